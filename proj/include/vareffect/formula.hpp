#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "vareffect/error.hpp"

namespace vareffect {

enum class FormulaKind { True, False, Var, Not, And, Or, Xor };

// Immutable propositional formula. AND/OR are n-ary (>= 2 children) and get
// flattened and canonically ordered at construction, so formulas that differ
// only in child order compare equal. Subtrees are shared; copying is cheap.
class Formula {
public:
    Formula();  // TRUE

    static Formula t();
    static Formula f();
    static Formula var(std::string name);

    FormulaKind kind() const;
    const std::string& name() const;              // Var only
    const std::vector<Formula>& children() const; // Not/And/Or/Xor

    // Canonical text form; doubles as the structural identity key.
    const std::string& key() const;
    std::size_t nodeCount() const;

    bool isTrue() const { return kind() == FormulaKind::True; }
    bool isFalse() const { return kind() == FormulaKind::False; }
    bool isConstant() const { return isTrue() || isFalse(); }

    void collectVariables(std::set<std::string>& out) const;
    std::set<std::string> variables() const;

    bool operator==(const Formula& o) const { return key() == o.key(); }
    bool operator!=(const Formula& o) const { return !(*this == o); }
    bool operator<(const Formula& o) const { return key() < o.key(); }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(FormulaKind kind, std::string name, std::vector<Formula> children);
    static Formula makeNary(FormulaKind kind, std::vector<Formula> children);
    std::shared_ptr<const Node> node_;

    friend Formula fNot(Formula child);
    friend Formula fAnd(std::vector<Formula> children);
    friend Formula fOr(std::vector<Formula> children);
    friend Formula fXor(Formula left, Formula right);
};

// Factories. fAnd/fOr flatten nested same-kind children and sort the result;
// an empty conjunction collapses to TRUE, an empty disjunction to FALSE, and
// a single child is returned as-is. None of them folds constants.
Formula fNot(Formula child);
Formula fAnd(std::vector<Formula> children);
Formula fOr(std::vector<Formula> children);
Formula fXor(Formula left, Formula right);

using Assignment = std::map<std::string, bool>;

// Replaces every occurrence of var by the given constant. No simplification;
// child lists are re-ordered canonically where the replacement changed keys.
Formula substitute(const Formula& f, const std::string& var, bool value);

// Total evaluation; throws MissingVariableError when a variable is not set.
bool evaluate(const Formula& f, const Assignment& a);

// Rewrites a ^ b into (a && !b) || (!a && b), bottom-up. Negations of
// constants fold on the spot; nothing else is simplified.
Formula eliminateXor(const Formula& f);

// Applies constant folding, double negation, idempotence, absorption,
// complement, and the xor-with-constant rules to a fixpoint. Equivalence is
// preserved and the node count never grows; minimality is not attempted.
Formula simplify(const Formula& f);

// Parses the canonical text form (e.g. "!(A || B) && defined(F) ^ F=1").
// Inverse of key() for every constructible formula.
Formula parseFormula(const std::string& text);

}  // namespace vareffect
