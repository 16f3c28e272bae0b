#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vareffect/formula.hpp"
#include "vareffect/value.hpp"

namespace vareffect {

enum class FeatureKind { Bool, Enum, IntUnbounded, FloatUnbounded };
enum class LegacyKind { None, Fixed, Retired };

struct FeatureDef {
    std::string name;
    FeatureKind kind = FeatureKind::IntUnbounded;
    std::vector<Value> values;  // declared range for Bool/Enum, in file order
    LegacyKind legacy = LegacyKind::None;
    Value legacyValue;  // Fixed only

    bool bounded() const { return kind == FeatureKind::Bool || kind == FeatureKind::Enum; }
};

// Feature definitions plus known constants. Constant rows from the feature
// file and entries of the constants file land in `constants`; the two name
// sets stay disjoint.
struct FeatureModel {
    std::map<std::string, FeatureDef> features;
    std::map<std::string, Value> constants;

    const FeatureDef* find(const std::string& name) const {
        auto it = features.find(name);
        return it == features.end() ? nullptr : &it->second;
    }
};

// features.csv has header `name,kind,values,legacy,legacy_value` with kind
// in {bool, enum, int, float, constant} and pipe-separated enum values.
// Throws ModelError (DuplicateFeature / MalformedRange) with line numbers.
FeatureModel parseFeatureModel(const std::string& csvText);

// constants.csv has header `name,value`; merges into model.constants.
void mergeConstants(FeatureModel& model, const std::string& csvText);

// Convenience: reads both files; constantsPath may be empty.
FeatureModel loadFeatureModel(const std::string& featuresPath,
                              const std::string& constantsPath = "");

// Pseudo-variable naming scheme shared by translation and legacy
// substitution: `F=v` for a value assignment, `defined(F)` for definedness.
std::string pseudoValueName(const std::string& feature, const Value& v);
std::string pseudoDefinedName(const std::string& feature);

struct PseudoVariable {
    std::string feature;
    bool isDefined = false;  // defined(F) as opposed to F=v
    Value value;             // for F=v
};

// Recognizes the two pseudo-variable shapes; anything else (opaque
// stand-ins, plain names) yields nullopt.
std::optional<PseudoVariable> parsePseudoVariable(const std::string& varName);

// Replaces pseudo-variables of legacy features by constants: FIXED(v)
// makes F=v true, every other F=w false and defined(F) true; RETIRED makes
// all of them false. The result is simplified unless told otherwise.
Formula applyLegacy(const Formula& f, const FeatureModel& model,
                    bool simplifyResult = true);

bool hasLegacyFeatures(const FeatureModel& model);

}  // namespace vareffect
