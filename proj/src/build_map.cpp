#include "vareffect/build_map.hpp"

#include <cstddef>

#include "vareffect/csv.hpp"
#include "vareffect/error.hpp"

namespace vareffect {

namespace {

std::vector<std::string> splitSegments(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); i++) {
        if (i == s.size() || s[i] == '/') {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

bool segmentMatch(const std::string& pat, std::size_t pi, const std::string& seg,
                  std::size_t si) {
    while (pi < pat.size()) {
        char p = pat[pi];
        if (p == '*') {
            for (std::size_t k = si; k <= seg.size(); k++)
                if (segmentMatch(pat, pi + 1, seg, k)) return true;
            return false;
        }
        if (si == seg.size()) return false;
        if (p != '?' && p != seg[si]) return false;
        pi++;
        si++;
    }
    return si == seg.size();
}

bool listMatch(const std::vector<std::string>& pat, std::size_t pi,
               const std::vector<std::string>& segs, std::size_t si) {
    if (pi == pat.size()) return si == segs.size();
    if (pat[pi] == "**") {
        for (std::size_t k = si; k <= segs.size(); k++)
            if (listMatch(pat, pi + 1, segs, k)) return true;
        return false;
    }
    if (si == segs.size()) return false;
    if (!segmentMatch(pat[pi], 0, segs[si], 0)) return false;
    return listMatch(pat, pi + 1, segs, si + 1);
}

}  // namespace

bool globMatch(const std::string& pattern, const std::string& path) {
    return listMatch(splitSegments(pattern), 0, splitSegments(path), 0);
}

BuildMap parseBuildMap(const std::string& csvText, bool strict) {
    std::vector<CsvRow> rows = parseCsv(csvText);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"pattern", "condition"})
        throw ConfigError("build map: expected header pattern,condition");
    BuildMap map;
    OpaqueNamer namer("build_map");
    for (std::size_t r = 1; r < rows.size(); r++) {
        const CsvRow& row = rows[r];
        if (row.fields.size() != 2)
            throw ConfigError("build map line " + std::to_string(row.line) +
                              ": expected 2 fields");
        BuildMapRow out;
        out.pattern = row.fields[0];
        out.line = row.line;
        if (out.pattern.empty())
            throw ConfigError("build map line " + std::to_string(row.line) + ": empty pattern");
        try {
            out.condition = parseCondition(row.fields[1]);
        } catch (const ConditionParseError& e) {
            if (strict)
                throw ConfigError("build map line " + std::to_string(row.line) + ": " +
                                  e.what());
            out.condition = ConditionExpr::opaque(namer.fresh(), true);
            out.degraded = true;
        }
        map.rows.push_back(std::move(out));
    }
    return map;
}

BuildMap loadBuildMap(const std::string& path, bool strict) {
    return parseBuildMap(readFileText(path), strict);
}

ConditionExpr fileCondition(const BuildMap& map, const std::string& path) {
    for (const BuildMapRow& row : map.rows)
        if (globMatch(row.pattern, path)) return row.condition;
    return ConditionExpr::boolLit(true);
}

std::vector<AuxCondition> parseAuxConditions(const std::string& text, bool strict) {
    std::vector<AuxCondition> out;
    OpaqueNamer namer("aux_conditions");
    std::size_t start = 0;
    int lineNo = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(
            start, end == std::string::npos ? std::string::npos : end - start);
        lineNo++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') {
            std::size_t t1 = line.find('\t');
            std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
            AuxCondition aux;
            aux.line = lineNo;
            aux.raw = line;
            if (t2 == std::string::npos) {
                if (strict)
                    throw ConfigError("aux conditions line " + std::to_string(lineNo) +
                                      ": expected feature<TAB>formula<TAB>tag");
                aux.degraded = true;
                aux.formula = Formula::var(namer.fresh());
            } else {
                aux.feature = line.substr(0, t1);
                aux.tag = line.substr(t2 + 1);
                std::string body = line.substr(t1 + 1, t2 - t1 - 1);
                try {
                    aux.formula = parseFormula(body);
                } catch (const FormulaParseError& e) {
                    if (strict)
                        throw ConfigError("aux conditions line " + std::to_string(lineNo) +
                                          ": " + e.what());
                    aux.degraded = true;
                    aux.formula = Formula::var(namer.fresh());
                }
            }
            out.push_back(std::move(aux));
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

std::vector<AuxCondition> loadAuxConditions(const std::string& path, bool strict) {
    return parseAuxConditions(readFileText(path), strict);
}

}  // namespace vareffect
