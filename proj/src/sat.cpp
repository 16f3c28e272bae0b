#include "vareffect/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>

namespace vareffect {

namespace {

struct CnfBuilder {
    std::unordered_map<std::string, int> varIds;   // formula variable -> solver var
    std::unordered_map<std::string, int> nodeAux;  // subformula key -> aux var
    int nVars = 0;
    int constTrue = 0;
    std::vector<std::vector<int>> clauses;

    int newVar() { return ++nVars; }

    int varFor(const std::string& name) {
        auto [it, inserted] = varIds.try_emplace(name, 0);
        if (inserted) it->second = newVar();
        return it->second;
    }

    int trueLit() {
        if (!constTrue) {
            constTrue = newVar();
            clauses.push_back({constTrue});
        }
        return constTrue;
    }

    // Returns a literal equisatisfiably standing for the subformula.
    int encode(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::True: return trueLit();
            case FormulaKind::False: return -trueLit();
            case FormulaKind::Var: return varFor(f.name());
            case FormulaKind::Not: return -encode(f.children()[0]);
            default: break;
        }
        auto it = nodeAux.find(f.key());
        if (it != nodeAux.end()) return it->second;
        std::vector<int> lits;
        lits.reserve(f.children().size());
        for (const Formula& c : f.children()) lits.push_back(encode(c));
        int a = newVar();
        switch (f.kind()) {
            case FormulaKind::And: {
                std::vector<int> big{a};
                for (int l : lits) {
                    clauses.push_back({-a, l});
                    big.push_back(-l);
                }
                clauses.push_back(std::move(big));
                break;
            }
            case FormulaKind::Or: {
                std::vector<int> big{-a};
                for (int l : lits) {
                    clauses.push_back({a, -l});
                    big.push_back(l);
                }
                clauses.push_back(std::move(big));
                break;
            }
            case FormulaKind::Xor: {
                int x = lits[0], y = lits[1];
                clauses.push_back({-a, x, y});
                clauses.push_back({-a, -x, -y});
                clauses.push_back({a, -x, y});
                clauses.push_back({a, x, -y});
                break;
            }
            default: break;
        }
        nodeAux.emplace(f.key(), a);
        return a;
    }
};

// Conflict-driven clause learning: two-watched-literal propagation,
// first-UIP learning with backjumping, VSIDS branching with phase saving,
// and Luby restarts. Fully deterministic for a given clause list.
class CdclSolver {
public:
    CdclSolver(int nVars, std::vector<std::vector<int>> input)
        : n_(nVars), assign_(nVars + 1, 0), level_(nVars + 1, 0),
          reason_(nVars + 1, -1), polarity_(nVars + 1, -1),
          activity_(nVars + 1, 0.0), seen_(nVars + 1, 0),
          watches_(2 * nVars + 2) {
        for (auto& cl : input) {
            std::sort(cl.begin(), cl.end(), [](int a, int b) {
                int va = std::abs(a), vb = std::abs(b);
                return va != vb ? va < vb : a < b;
            });
            cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
            bool taut = false;
            for (std::size_t i = 0; i + 1 < cl.size(); i++)
                if (cl[i] == -cl[i + 1]) {
                    taut = true;
                    break;
                }
            if (taut) continue;
            if (cl.empty()) {
                unsat_ = true;
                return;
            }
            if (cl.size() == 1) {
                units_.push_back(cl[0]);
                continue;
            }
            clauses_.push_back(std::move(cl));
            attach(static_cast<int>(clauses_.size()) - 1);
        }
    }

    bool solve() {
        if (unsat_) return false;
        for (int u : units_)
            if (!enqueue(u, -1)) return false;
        if (propagate() != -1) return false;

        std::int64_t untilRestart = restartBudget();
        for (;;) {
            int confl = propagate();
            if (confl != -1) {
                if (decisionLevel() == 0) return false;
                std::vector<int> learnt;
                int btLevel = analyze(confl, learnt);
                cancelUntil(btLevel);
                if (learnt.size() == 1) {
                    if (!enqueue(learnt[0], -1)) return false;
                } else {
                    int ci = static_cast<int>(clauses_.size());
                    clauses_.push_back(std::move(learnt));
                    attach(ci);
                    enqueueUnchecked(clauses_[ci][0], ci);
                }
                varInc_ /= kVarDecay;
                if (--untilRestart <= 0) {
                    restarts_++;
                    untilRestart = restartBudget();
                    cancelUntil(0);
                }
            } else {
                int v = pickBranchVar();
                if (v == 0) return true;
                trailLim_.push_back(trail_.size());
                enqueueUnchecked(polarity_[v] > 0 ? v : -v, -1);
            }
        }
    }

private:
    static constexpr double kVarDecay = 0.95;

    int n_;
    std::vector<std::vector<int>> clauses_;
    std::vector<signed char> assign_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<signed char> polarity_;
    std::vector<double> activity_;
    std::vector<signed char> seen_;
    std::vector<std::vector<int>> watches_;
    std::vector<int> trail_;
    std::vector<std::size_t> trailLim_;
    std::vector<int> units_;
    std::priority_queue<std::pair<double, int>> heap_;
    std::size_t qhead_ = 0;
    double varInc_ = 1.0;
    std::int64_t restarts_ = 0;
    bool unsat_ = false;

    std::size_t index(int lit) const {
        return lit > 0 ? static_cast<std::size_t>(lit)
                       : static_cast<std::size_t>(n_ - lit);
    }

    int value(int lit) const {
        signed char v = assign_[std::abs(lit)];
        return lit > 0 ? v : -v;
    }

    int decisionLevel() const { return static_cast<int>(trailLim_.size()); }

    void attach(int ci) {
        watches_[index(clauses_[ci][0])].push_back(ci);
        watches_[index(clauses_[ci][1])].push_back(ci);
    }

    bool enqueue(int lit, int reason) {
        int v = value(lit);
        if (v == 1) return true;
        if (v == -1) return false;
        enqueueUnchecked(lit, reason);
        return true;
    }

    void enqueueUnchecked(int lit, int reason) {
        int v = std::abs(lit);
        assign_[v] = lit > 0 ? 1 : -1;
        level_[v] = decisionLevel();
        reason_[v] = reason;
        trail_.push_back(lit);
    }

    void cancelUntil(int lvl) {
        if (decisionLevel() <= lvl) return;
        std::size_t mark = trailLim_[lvl];
        for (std::size_t k = trail_.size(); k > mark; k--) {
            int lit = trail_[k - 1];
            int v = std::abs(lit);
            polarity_[v] = lit > 0 ? 1 : -1;
            assign_[v] = 0;
            reason_[v] = -1;
            heap_.push({activity_[v], -v});
        }
        trail_.resize(mark);
        trailLim_.resize(lvl);
        qhead_ = mark;
    }

    // Returns the index of a conflicting clause, or -1 when propagation
    // reaches a fixpoint.
    int propagate() {
        while (qhead_ < trail_.size()) {
            int falseLit = -trail_[qhead_++];
            auto& ws = watches_[index(falseLit)];
            std::size_t i = 0, j = 0;
            while (i < ws.size()) {
                int ci = ws[i];
                auto& cl = clauses_[ci];
                if (cl[0] == falseLit) std::swap(cl[0], cl[1]);
                if (value(cl[0]) == 1) {
                    ws[j++] = ws[i++];
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < cl.size(); k++) {
                    if (value(cl[k]) != -1) {
                        std::swap(cl[1], cl[k]);
                        watches_[index(cl[1])].push_back(ci);
                        i++;
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = ws[i++];
                if (value(cl[0]) == -1) {
                    while (i < ws.size()) ws[j++] = ws[i++];
                    ws.resize(j);
                    qhead_ = trail_.size();
                    return ci;
                }
                enqueueUnchecked(cl[0], ci);
            }
            ws.resize(j);
        }
        return -1;
    }

    void bump(int v) {
        activity_[v] += varInc_;
        if (activity_[v] > 1e100) {
            for (int w = 1; w <= n_; w++) activity_[w] *= 1e-100;
            varInc_ *= 1e-100;
        }
        if (assign_[v] == 0) heap_.push({activity_[v], -v});
    }

    // First-UIP conflict analysis. learnt[0] is the asserting literal,
    // learnt[1] (when present) a literal from the backjump level, so the
    // clause is ready for attach(). Returns the backjump level.
    int analyze(int confl, std::vector<int>& learnt) {
        learnt.push_back(0);
        std::vector<int> toClear;
        int counter = 0;
        int p = 0;
        std::size_t idx = trail_.size();
        for (;;) {
            const auto& cl = clauses_[confl];
            for (std::size_t k = (p == 0 ? 0 : 1); k < cl.size(); k++) {
                int v = std::abs(cl[k]);
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                toClear.push_back(v);
                bump(v);
                if (level_[v] == decisionLevel())
                    counter++;
                else
                    learnt.push_back(cl[k]);
            }
            do {
                idx--;
            } while (!seen_[std::abs(trail_[idx])]);
            p = trail_[idx];
            seen_[std::abs(p)] = 0;
            confl = reason_[std::abs(p)];
            if (--counter == 0) break;
        }
        learnt[0] = -p;

        int btLevel = 0;
        if (learnt.size() > 1) {
            std::size_t maxI = 1;
            for (std::size_t k = 2; k < learnt.size(); k++)
                if (level_[std::abs(learnt[k])] > level_[std::abs(learnt[maxI])])
                    maxI = k;
            std::swap(learnt[1], learnt[maxI]);
            btLevel = level_[std::abs(learnt[1])];
        }
        for (int v : toClear) seen_[v] = 0;
        return btLevel;
    }

    int pickBranchVar() {
        for (;;) {
            if (heap_.empty()) {
                bool any = false;
                for (int v = 1; v <= n_; v++)
                    if (assign_[v] == 0) {
                        heap_.push({activity_[v], -v});
                        any = true;
                    }
                if (!any) return 0;
                continue;
            }
            auto [act, nv] = heap_.top();
            heap_.pop();
            int v = -nv;
            if (assign_[v] != 0 || act != activity_[v]) continue;
            return v;
        }
    }

    std::int64_t restartBudget() const { return 100 * luby(restarts_); }

    static std::int64_t luby(std::int64_t x) {
        std::int64_t size = 1, seq = 0;
        while (size < x + 1) {
            seq++;
            size = 2 * size + 1;
        }
        while (size - 1 != x) {
            size = (size - 1) / 2;
            seq--;
            x = x % size;
        }
        return std::int64_t{1} << seq;
    }
};

}  // namespace

bool isSatisfiable(const Formula& f, const AxiomSet& axioms) {
    CnfBuilder b;
    b.clauses.push_back({b.encode(f)});
    for (const Formula& ax : axioms) b.clauses.push_back({b.encode(ax)});
    CdclSolver solver(b.nVars, std::move(b.clauses));
    return solver.solve();
}

bool isTautology(const Formula& f, const AxiomSet& axioms) {
    return !isSatisfiable(fNot(f), axioms);
}

AxiomIndex::AxiomIndex(AxiomSet axioms) : axioms_(std::move(axioms)) {
    axiomVars_.resize(axioms_.size());
    for (std::size_t i = 0; i < axioms_.size(); i++) {
        std::set<std::string> vars = axioms_[i].variables();
        axiomVars_[i].assign(vars.begin(), vars.end());
        for (const std::string& v : axiomVars_[i]) byVar_[v].push_back(i);
    }
}

AxiomSet AxiomIndex::relevant(const Formula& f) const {
    std::set<std::string> vars = f.variables();
    std::vector<std::string> queue(vars.begin(), vars.end());
    std::vector<bool> used(axioms_.size(), false);
    std::vector<std::size_t> picked;
    while (!queue.empty()) {
        std::string v = std::move(queue.back());
        queue.pop_back();
        auto it = byVar_.find(v);
        if (it == byVar_.end()) continue;
        for (std::size_t ai : it->second) {
            if (used[ai]) continue;
            used[ai] = true;
            picked.push_back(ai);
            for (const std::string& w : axiomVars_[ai])
                if (vars.insert(w).second) queue.push_back(w);
        }
    }
    std::sort(picked.begin(), picked.end());
    AxiomSet out;
    out.reserve(picked.size());
    for (std::size_t ai : picked) out.push_back(axioms_[ai]);
    return out;
}

AxiomSet relevantAxioms(const AxiomSet& axioms, const Formula& f) {
    return AxiomIndex(axioms).relevant(f);
}

}  // namespace vareffect