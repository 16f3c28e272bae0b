#include "vareffect/feature_effect.hpp"

#include <vector>

#include "vareffect/error.hpp"
#include "vareffect/feature_model.hpp"

namespace vareffect {

bool PCIndex::add(const Formula& pc, const AxiomIndex& axioms) {
    if (pc.isConstant()) {
        if (pc.isFalse()) droppedUnsat++;
        return false;
    }
    if (!isSatisfiable(pc, axioms.relevant(pc))) {
        droppedUnsat++;
        return false;
    }
    for (const auto& v : pc.variables()) {
        auto pv = parsePseudoVariable(v);
        if (!pv) continue;
        byPseudoVar[v].insert(pc);
        byFeature[pv->feature].insert(v);
    }
    return true;
}

bool PCIndex::add(const Formula& pc, const AxiomSet& axioms) {
    return add(pc, AxiomIndex(axioms));
}

Formula featureEffect(const std::string& pseudoVar, const std::set<Formula>& pcs,
                      bool simplifyResult) {
    std::vector<Formula> terms;
    terms.reserve(pcs.size());
    for (const auto& pc : pcs) {
        Formula on = substitute(pc, pseudoVar, true);
        Formula off = substitute(pc, pseudoVar, false);
        terms.push_back(simplify(fXor(on, off)));
    }
    Formula joined = eliminateXor(fOr(terms));
    return simplifyResult ? simplify(joined) : joined;
}

Formula featureLevelEffect(const std::string& feature, const PCIndex& index,
                           bool simplifyResult) {
    auto it = index.byFeature.find(feature);
    if (it == index.byFeature.end() || it->second.empty())
        throw UnusedFeatureError(feature);
    std::vector<Formula> parts;
    parts.reserve(it->second.size());
    for (const auto& pseudo : it->second) {
        auto pcs = index.byPseudoVar.find(pseudo);
        parts.push_back(featureEffect(pseudo, pcs == index.byPseudoVar.end()
                                                  ? std::set<Formula>{}
                                                  : pcs->second,
                                      simplifyResult));
    }
    Formula joined = fOr(parts);
    return simplifyResult ? simplify(joined) : joined;
}

const char* categoryName(FeatureCategory c) {
    return c == FeatureCategory::Independent ? "INDEPENDENT" : "DEPENDENT";
}

FeatureEffectRecord classifyFeature(const std::string& feature, const PCIndex& index,
                                    const AxiomIndex& axioms, const std::string& productId,
                                    bool simplifyResult) {
    FeatureEffectRecord rec;
    rec.feature = feature;
    rec.product = productId;

    auto it = index.byFeature.find(feature);
    if (it == index.byFeature.end() || it->second.empty())
        throw UnusedFeatureError(feature);

    std::set<Formula> allPcs;
    for (const auto& pseudo : it->second) {
        auto pcs = index.byPseudoVar.find(pseudo);
        std::set<Formula> set =
            pcs == index.byPseudoVar.end() ? std::set<Formula>{} : pcs->second;
        rec.pseudoEffects.emplace(pseudo, featureEffect(pseudo, set, simplifyResult));
        allPcs.insert(set.begin(), set.end());
    }
    rec.pcCount = static_cast<int>(allPcs.size());

    std::vector<Formula> parts;
    parts.reserve(rec.pseudoEffects.size());
    for (const auto& [pseudo, eff] : rec.pseudoEffects) parts.push_back(eff);
    Formula joined = fOr(parts);
    rec.effect = simplifyResult ? simplify(joined) : joined;

    rec.category = isTautology(rec.effect, axioms.relevant(rec.effect))
                       ? FeatureCategory::Independent
                       : FeatureCategory::Dependent;
    return rec;
}

FeatureEffectRecord classifyFeature(const std::string& feature, const PCIndex& index,
                                    const AxiomSet& axioms, const std::string& productId,
                                    bool simplifyResult) {
    return classifyFeature(feature, index, AxiomIndex(axioms), productId, simplifyResult);
}

}  // namespace vareffect
