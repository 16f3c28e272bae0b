#pragma once

#include <map>
#include <set>
#include <string>

#include "vareffect/formula.hpp"
#include "vareffect/sat.hpp"

namespace vareffect {

// Presence conditions indexed by the pseudo-variables they mention.
// Formulas are deduplicated structurally; conditions that cannot hold under
// the domain axioms are dropped and counted.
struct PCIndex {
    std::map<std::string, std::set<Formula>> byPseudoVar;
    std::map<std::string, std::set<std::string>> byFeature;
    int droppedUnsat = 0;

    // Registers a (pre-simplified) presence condition. Constant conditions
    // register nothing; unsatisfiable ones are dropped. Returns whether the
    // condition was kept.
    bool add(const Formula& pc, const AxiomIndex& axioms);
    bool add(const Formula& pc, const AxiomSet& axioms);
};

// The effect of one pseudo-variable given the presence conditions that
// mention it: the disjunction over all PCs of "PC with p true XOR PC with p
// false", constants resolved per XOR term, then simplified. An empty set
// yields FALSE. With simplifyResult=false the xor-eliminated disjunction is
// returned as built.
Formula featureEffect(const std::string& pseudoVar, const std::set<Formula>& pcs,
                      bool simplifyResult = true);

// Disjunction of the effects of every observed pseudo-variable of the
// feature: the condition under which some value choice matters. Throws
// UnusedFeatureError when the feature was never observed.
Formula featureLevelEffect(const std::string& feature, const PCIndex& index,
                           bool simplifyResult = true);

enum class FeatureCategory { Independent, Dependent };

const char* categoryName(FeatureCategory c);

struct FeatureEffectRecord {
    std::string feature;
    std::map<std::string, Formula> pseudoEffects;
    Formula effect;
    FeatureCategory category = FeatureCategory::Dependent;
    std::string product;
    int pcCount = 0;  // distinct PCs mentioning any of the feature's pseudo-variables
};

// Computes per-value effects, the feature-level effect, and the category:
// INDEPENDENT iff the effect is a tautology under the (relevant) axioms.
FeatureEffectRecord classifyFeature(const std::string& feature, const PCIndex& index,
                                    const AxiomIndex& axioms, const std::string& productId,
                                    bool simplifyResult = true);
FeatureEffectRecord classifyFeature(const std::string& feature, const PCIndex& index,
                                    const AxiomSet& axioms, const std::string& productId,
                                    bool simplifyResult = true);

}  // namespace vareffect
