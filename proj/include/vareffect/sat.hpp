#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "vareffect/formula.hpp"

namespace vareffect {

// Domain axioms (or any side conditions) conjoined with queries. Each axiom
// is expected to be satisfiable on its own.
using AxiomSet = std::vector<Formula>;

// CDCL over a Tseitin CNF of f plus all axioms. Auxiliary encoding variables
// never leak; results only depend on the formula variables.
bool isSatisfiable(const Formula& f, const AxiomSet& axioms = {});

// True iff f holds in every assignment satisfying the axioms
// (i.e. !f && axioms is unsatisfiable).
bool isTautology(const Formula& f, const AxiomSet& axioms = {});

// Variable-to-axiom lookup built once so repeated relevance queries against
// the same axiom set skip rescanning every axiom.
class AxiomIndex {
public:
    AxiomIndex() = default;
    explicit AxiomIndex(AxiomSet axioms);

    const AxiomSet& axioms() const { return axioms_; }

    // The subset of axioms transitively sharing variables with f, in input
    // order. Restricting a query to this subset is only sound when the
    // axiom set is jointly satisfiable, which holds for per-feature domain
    // axioms.
    AxiomSet relevant(const Formula& f) const;

private:
    AxiomSet axioms_;
    std::vector<std::vector<std::string>> axiomVars_;
    std::unordered_map<std::string, std::vector<std::size_t>> byVar_;
};

// One-shot form of AxiomIndex::relevant.
AxiomSet relevantAxioms(const AxiomSet& axioms, const Formula& f);

}  // namespace vareffect
