#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vareffect/condition.hpp"
#include "vareffect/feature_model.hpp"
#include "vareffect/formula.hpp"
#include "vareffect/sat.hpp"

namespace vareffect {

struct TranslateOptions {
    // Strict C preprocessor semantics: an undefined feature evaluates as 0.
    // Off by default; the default convention makes a relational node false
    // whenever a participating feature is undefined.
    bool cppUndefinedAsZero = false;
    // Unknown identifiers abort instead of being treated as unbounded.
    bool strict = false;
    // Cap on enumerated value combinations per relational node.
    long long expansionLimit = 4096;
};

struct TranslationResult {
    Formula formula;
    std::set<std::string> usedPseudoVariables;  // all variables in formula
    int degradedNodes = 0;        // sub-expressions translated conservatively
    std::vector<std::string> unknownFeatures;  // sorted, unique
};

// Replaces known-constant identifiers by their literals and evaluates every
// fully constant arithmetic or relational sub-expression. Division by zero
// (and kin) degrades the offending sub-expression to a numeric opaque
// variable; arithFaults counts those.
ConditionExpr foldConstants(const ConditionExpr& e, const std::map<std::string, Value>& constants,
                            OpaqueNamer& namer, int* arithFaults = nullptr);

// Rewrites a Boolean-valued condition into a propositional formula over
// `F=v` / `defined(F)` pseudo-variables by enumerating declared ranges.
// foldConstants should run first. Throws UnknownFeatureError only in strict
// mode.
TranslationResult translate(const ConditionExpr& e, const FeatureModel& model,
                            const TranslateOptions& opts, OpaqueNamer& namer);

// At-most-one per bounded feature plus defined(F) <-> one-of-range. Sorted
// by feature name; unbounded features contribute nothing.
AxiomSet domainAxioms(const FeatureModel& model);

}  // namespace vareffect
