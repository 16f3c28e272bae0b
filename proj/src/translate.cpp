#include "vareffect/translate.hpp"

#include <algorithm>

#include "vareffect/error.hpp"

namespace vareffect {

namespace {

class Folder {
public:
    Folder(const std::map<std::string, Value>& constants, OpaqueNamer& namer, int* faults)
        : constants_(constants), namer_(namer), faults_(faults) {}

    ConditionExpr fold(const ConditionExpr& e) {
        switch (e.kind()) {
            case CondKind::IntLit:
            case CondKind::FloatLit:
            case CondKind::BoolLit:
            case CondKind::Defined:
            case CondKind::Opaque:
                return e;
            case CondKind::Ident: {
                auto it = constants_.find(e.name());
                if (it == constants_.end()) return e;
                return ConditionExpr::literal(it->second);
            }
            case CondKind::Not: {
                ConditionExpr c = fold(e.operand());
                return c == e.operand() ? e : ConditionExpr::notOp(std::move(c));
            }
            case CondKind::Neg: {
                ConditionExpr c = fold(e.operand());
                if (c.isLiteral()) {
                    const Value& v = c.value();
                    if (v.isFloat) return ConditionExpr::floatLit(-v.d);
                    return ConditionExpr::intLit(
                        static_cast<long long>(-static_cast<unsigned long long>(v.i)));
                }
                return c == e.operand() ? e : ConditionExpr::negOp(std::move(c));
            }
            case CondKind::Binary:
                return foldBinary(e);
        }
        return e;
    }

private:
    const std::map<std::string, Value>& constants_;
    OpaqueNamer& namer_;
    int* faults_;

    ConditionExpr foldBinary(const ConditionExpr& e) {
        ConditionExpr a = fold(e.lhs());
        ConditionExpr b = fold(e.rhs());
        if (isRelational(e.op())) {
            if (a.isLiteral() && b.isLiteral())
                return ConditionExpr::boolLit(applyRelation(e.op(), a.value(), b.value()));
        } else if (!isLogical(e.op())) {
            if (a.isLiteral() && b.isLiteral()) {
                std::optional<Value> r = applyArith(e.op(), a.value(), b.value());
                if (!r) {
                    if (faults_) (*faults_)++;
                    return ConditionExpr::opaque(namer_.fresh(), false);
                }
                return ConditionExpr::literal(*r);
            }
        }
        if (a == e.lhs() && b == e.rhs()) return e;
        return ConditionExpr::binary(e.op(), std::move(a), std::move(b));
    }
};

class Translator {
public:
    Translator(const FeatureModel& model, const TranslateOptions& opts, OpaqueNamer& namer)
        : model_(model), opts_(opts), namer_(namer) {}

    Formula boolExpr(const ConditionExpr& e) {
        switch (e.kind()) {
            case CondKind::BoolLit:
                return e.boolValue() ? Formula::t() : Formula::f();
            case CondKind::Opaque:
                return Formula::var(e.name());
            case CondKind::Defined:
                return definedOf(e.name());
            case CondKind::Not:
                return fNot(boolExpr(e.operand()));
            case CondKind::Binary:
                if (e.op() == BinOp::And) return fAnd({boolExpr(e.lhs()), boolExpr(e.rhs())});
                if (e.op() == BinOp::Or) return fOr({boolExpr(e.lhs()), boolExpr(e.rhs())});
                if (isRelational(e.op())) return relational(e);
                break;
            default:
                break;
        }
        throw Error("numeric expression where a Boolean condition was expected: " + e.text());
    }

    int degraded = 0;
    std::set<std::string> unknown;

private:
    const FeatureModel& model_;
    const TranslateOptions& opts_;
    OpaqueNamer& namer_;

    enum class Cls { Constant, Bounded, Unbounded };

    struct Part {
        std::string name;
        Cls cls;
        const FeatureDef* def;
    };

    Formula definedOf(const std::string& name) {
        if (model_.constants.count(name)) return Formula::t();
        note(name);
        return Formula::var(pseudoDefinedName(name));
    }

    void note(const std::string& name) {
        if (model_.find(name)) return;
        if (opts_.strict) throw UnknownFeatureError(name);
        unknown.insert(name);
    }

    static void collectIdents(const ConditionExpr& e, std::set<std::string>& out,
                              bool& hasOpaque) {
        switch (e.kind()) {
            case CondKind::Ident:
                out.insert(e.name());
                return;
            case CondKind::Opaque:
                hasOpaque = true;
                return;
            case CondKind::Neg:
                collectIdents(e.operand(), out, hasOpaque);
                return;
            case CondKind::Binary:
                collectIdents(e.lhs(), out, hasOpaque);
                collectIdents(e.rhs(), out, hasOpaque);
                return;
            default:
                return;
        }
    }

    Formula degrade() {
        degraded++;
        return Formula::var(namer_.fresh());
    }

    // Conservative fallback: the node holds only when all its features are
    // defined at all.
    Formula degradeToDefined(const std::vector<Part>& parts) {
        degraded++;
        std::vector<Formula> terms;
        for (const Part& p : parts)
            if (p.cls != Cls::Constant) terms.push_back(Formula::var(pseudoDefinedName(p.name)));
        return fAnd(std::move(terms));
    }

    Formula relational(const ConditionExpr& e) {
        std::set<std::string> idents;
        bool hasOpaque = false;
        collectIdents(e.lhs(), idents, hasOpaque);
        collectIdents(e.rhs(), idents, hasOpaque);
        if (hasOpaque) return degrade();

        std::map<std::string, Value> env;
        std::vector<Part> parts;
        int unboundedCount = 0;
        std::vector<Part> bounded;
        for (const std::string& name : idents) {
            auto cit = model_.constants.find(name);
            if (cit != model_.constants.end()) {
                env.emplace(name, cit->second);
                parts.push_back({name, Cls::Constant, nullptr});
                continue;
            }
            const FeatureDef* def = model_.find(name);
            if (def && def->bounded()) {
                parts.push_back({name, Cls::Bounded, def});
                bounded.push_back(parts.back());
            } else {
                note(name);
                parts.push_back({name, Cls::Unbounded, def});
                unboundedCount++;
            }
        }

        if (unboundedCount > 0) {
            if (parts.size() == 1) return unboundedSingle(e, parts[0].name);
            return degradeToDefined(parts);
        }

        if (bounded.empty()) {
            std::optional<Value> a = evalNumeric(e.lhs(), env);
            std::optional<Value> b = evalNumeric(e.rhs(), env);
            if (!a || !b) return degrade();
            return applyRelation(e.op(), *a, *b) ? Formula::t() : Formula::f();
        }

        long long joint = 1;
        for (const Part& p : bounded) {
            joint *= static_cast<long long>(p.def->values.size()) +
                     (opts_.cppUndefinedAsZero ? 1 : 0);
            if (joint > opts_.expansionLimit) return degradeToDefined(parts);
        }

        std::vector<Formula> terms;
        std::vector<const Value*> state(bounded.size(), nullptr);
        enumerate(e, bounded, 0, state, env, terms);
        return fOr(std::move(terms));
    }

    void enumerate(const ConditionExpr& e, const std::vector<Part>& bounded, std::size_t i,
                   std::vector<const Value*>& state, std::map<std::string, Value>& env,
                   std::vector<Formula>& terms) {
        if (i == bounded.size()) {
            std::optional<Value> a = evalNumeric(e.lhs(), env);
            std::optional<Value> b = evalNumeric(e.rhs(), env);
            if (!a || !b || !applyRelation(e.op(), *a, *b)) return;
            std::vector<Formula> conj;
            for (std::size_t k = 0; k < bounded.size(); k++) {
                if (state[k])
                    conj.push_back(Formula::var(pseudoValueName(bounded[k].name, *state[k])));
                else
                    conj.push_back(fNot(Formula::var(pseudoDefinedName(bounded[k].name))));
            }
            terms.push_back(fAnd(std::move(conj)));
            return;
        }
        const Part& p = bounded[i];
        for (const Value& v : p.def->values) {
            state[i] = &v;
            env[p.name] = v;
            enumerate(e, bounded, i + 1, state, env, terms);
        }
        if (opts_.cppUndefinedAsZero) {
            state[i] = nullptr;
            env[p.name] = Value::ofInt(0);
            enumerate(e, bounded, i + 1, state, env, terms);
        }
        env.erase(p.name);
    }

    Formula unboundedSingle(const ConditionExpr& e, const std::string& name) {
        if (opts_.cppUndefinedAsZero) {
            std::map<std::string, Value> env{{name, Value::ofInt(0)}};
            std::optional<Value> a = evalNumeric(e.lhs(), env);
            std::optional<Value> b = evalNumeric(e.rhs(), env);
            if (a && b && applyRelation(e.op(), *a, *b)) return Formula::t();
        }
        return Formula::var(pseudoDefinedName(name));
    }
};

}  // namespace

ConditionExpr foldConstants(const ConditionExpr& e, const std::map<std::string, Value>& constants,
                            OpaqueNamer& namer, int* arithFaults) {
    return Folder(constants, namer, arithFaults).fold(e);
}

TranslationResult translate(const ConditionExpr& e, const FeatureModel& model,
                            const TranslateOptions& opts, OpaqueNamer& namer) {
    Translator tr(model, opts, namer);
    TranslationResult r;
    r.formula = tr.boolExpr(e);
    r.usedPseudoVariables = r.formula.variables();
    r.degradedNodes = tr.degraded;
    r.unknownFeatures.assign(tr.unknown.begin(), tr.unknown.end());
    return r;
}

AxiomSet domainAxioms(const FeatureModel& model) {
    AxiomSet out;
    for (const auto& [name, def] : model.features) {
        if (!def.bounded()) continue;
        std::vector<Formula> vals;
        vals.reserve(def.values.size());
        for (const Value& v : def.values) vals.push_back(Formula::var(pseudoValueName(name, v)));
        if (vals.size() >= 2) {
            std::vector<Formula> pairs;
            for (std::size_t i = 0; i < vals.size(); i++)
                for (std::size_t j = i + 1; j < vals.size(); j++)
                    pairs.push_back(fNot(fAnd({vals[i], vals[j]})));
            out.push_back(fAnd(std::move(pairs)));
        }
        Formula d = Formula::var(pseudoDefinedName(name));
        Formula any = fOr(std::move(vals));
        out.push_back(fAnd({fOr({fNot(d), any}), fOr({d, fNot(any)})}));
    }
    return out;
}

}  // namespace vareffect
