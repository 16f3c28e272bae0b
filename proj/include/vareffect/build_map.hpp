#pragma once

#include <string>
#include <vector>

#include "vareffect/condition.hpp"
#include "vareffect/formula.hpp"

namespace vareffect {

struct BuildMapRow {
    std::string pattern;
    ConditionExpr condition;
    bool degraded = false;  // condition failed to parse, opaque stand-in
    int line = 0;
};

// Ordered file-selection conditions; first matching pattern wins, paths
// without a match are unconditionally included.
struct BuildMap {
    std::vector<BuildMapRow> rows;
};

// Glob with `*` (within one path segment), `?` (one character in a
// segment) and `**` (a whole segment span, possibly empty). Patterns and
// paths are compared segment-wise on '/'.
bool globMatch(const std::string& pattern, const std::string& path);

// build_map.csv has header `pattern,condition`. Bad conditions degrade to
// opaque variables (strict mode: ConfigError).
BuildMap parseBuildMap(const std::string& csvText, bool strict = false);
BuildMap loadBuildMap(const std::string& path, bool strict = false);

ConditionExpr fileCondition(const BuildMap& map, const std::string& path);

// One auxiliary presence condition, already propositional. The feature
// column is a provenance label; the formula itself decides which
// pseudo-variables the entry touches.
struct AuxCondition {
    std::string feature;
    Formula formula;
    std::string tag;
    bool degraded = false;
    std::string raw;
    int line = 0;
};

// aux_conditions.txt: one `feature<TAB>formula<TAB>tag` per line; blank
// lines and lines starting with '#' are skipped. Unparsable formulas become
// degraded entries (strict mode: ConfigError).
std::vector<AuxCondition> parseAuxConditions(const std::string& text, bool strict = false);
std::vector<AuxCondition> loadAuxConditions(const std::string& path, bool strict = false);

}  // namespace vareffect
