#include "vareffect/feature_model.hpp"

#include <algorithm>
#include <cctype>

#include "vareffect/csv.hpp"
#include "vareffect/error.hpp"

namespace vareffect {

namespace {

bool validIdent(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<Value> parseRange(const std::string& spec, int line) {
    std::vector<Value> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t bar = spec.find('|', start);
        std::string item = spec.substr(start, bar == std::string::npos ? bar : bar - start);
        std::optional<Value> v = parseValue(item);
        if (!v) throw ModelError("MalformedRange", line, "bad range value '" + item + "'");
        for (const Value& prev : out)
            if (prev.sameNumber(*v))
                throw ModelError("MalformedRange", line, "duplicate range value '" + item + "'");
        out.push_back(*v);
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return out;
}

void requireUnique(const FeatureModel& m, const std::string& name, int line) {
    if (m.features.count(name) || m.constants.count(name))
        throw ModelError("DuplicateFeature", line, "duplicate name '" + name + "'");
}

}  // namespace

FeatureModel parseFeatureModel(const std::string& csvText) {
    std::vector<CsvRow> rows = parseCsv(csvText);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"name", "kind", "values",
                                                                   "legacy", "legacy_value"})
        throw ModelError("MalformedRange", rows.empty() ? 1 : rows[0].line,
                         "expected header name,kind,values,legacy,legacy_value");
    FeatureModel model;
    for (std::size_t r = 1; r < rows.size(); r++) {
        const CsvRow& row = rows[r];
        if (row.fields.size() != 5)
            throw ModelError("MalformedRange", row.line, "expected 5 fields");
        const std::string& name = row.fields[0];
        std::string kind = lower(row.fields[1]);
        const std::string& values = row.fields[2];
        std::string legacy = lower(row.fields[3]);
        const std::string& legacyValue = row.fields[4];

        if (!validIdent(name))
            throw ModelError("MalformedRange", row.line, "bad feature name '" + name + "'");
        requireUnique(model, name, row.line);

        if (kind == "constant") {
            std::optional<Value> v = parseValue(values);
            if (!v)
                throw ModelError("MalformedRange", row.line,
                                 "constant needs a literal value, got '" + values + "'");
            if (!legacy.empty() && legacy != "none")
                throw ModelError("MalformedRange", row.line, "constants cannot be legacy");
            model.constants.emplace(name, *v);
            continue;
        }

        FeatureDef def;
        def.name = name;
        if (kind == "bool") {
            if (!values.empty())
                throw ModelError("MalformedRange", row.line, "bool takes no values");
            def.kind = FeatureKind::Bool;
            def.values = {Value::ofInt(0), Value::ofInt(1)};
        } else if (kind == "enum") {
            def.kind = FeatureKind::Enum;
            if (values.empty())
                throw ModelError("MalformedRange", row.line, "enum needs values");
            def.values = parseRange(values, row.line);
        } else if (kind == "int" || kind == "float") {
            if (!values.empty())
                throw ModelError("MalformedRange", row.line,
                                 "unbounded kinds take no values");
            def.kind = kind == "int" ? FeatureKind::IntUnbounded : FeatureKind::FloatUnbounded;
        } else {
            throw ModelError("MalformedRange", row.line, "unknown kind '" + kind + "'");
        }

        if (legacy.empty() || legacy == "none") {
            def.legacy = LegacyKind::None;
            if (!legacyValue.empty())
                throw ModelError("MalformedRange", row.line,
                                 "legacy_value given without legacy=fixed");
        } else if (legacy == "fixed") {
            def.legacy = LegacyKind::Fixed;
            std::optional<Value> v = parseValue(legacyValue);
            if (!v)
                throw ModelError("MalformedRange", row.line,
                                 "bad legacy value '" + legacyValue + "'");
            if (def.bounded()) {
                bool inRange = false;
                for (const Value& rv : def.values) inRange |= rv.sameNumber(*v);
                if (!inRange)
                    throw ModelError("MalformedRange", row.line,
                                     "fixed value outside declared range");
            }
            def.legacyValue = *v;
        } else if (legacy == "retired") {
            def.legacy = LegacyKind::Retired;
            if (!legacyValue.empty())
                throw ModelError("MalformedRange", row.line,
                                 "retired features take no legacy_value");
        } else {
            throw ModelError("MalformedRange", row.line, "unknown legacy kind '" + legacy + "'");
        }

        model.features.emplace(name, std::move(def));
    }
    return model;
}

void mergeConstants(FeatureModel& model, const std::string& csvText) {
    std::vector<CsvRow> rows = parseCsv(csvText);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"name", "value"})
        throw ModelError("MalformedRange", rows.empty() ? 1 : rows[0].line,
                         "expected header name,value");
    for (std::size_t r = 1; r < rows.size(); r++) {
        const CsvRow& row = rows[r];
        if (row.fields.size() != 2)
            throw ModelError("MalformedRange", row.line, "expected 2 fields");
        const std::string& name = row.fields[0];
        if (!validIdent(name))
            throw ModelError("MalformedRange", row.line, "bad constant name '" + name + "'");
        requireUnique(model, name, row.line);
        std::optional<Value> v = parseValue(row.fields[1]);
        if (!v)
            throw ModelError("MalformedRange", row.line,
                             "bad constant value '" + row.fields[1] + "'");
        model.constants.emplace(name, *v);
    }
}

FeatureModel loadFeatureModel(const std::string& featuresPath,
                              const std::string& constantsPath) {
    FeatureModel model = parseFeatureModel(readFileText(featuresPath));
    if (!constantsPath.empty()) mergeConstants(model, readFileText(constantsPath));
    return model;
}

std::string pseudoValueName(const std::string& feature, const Value& v) {
    return feature + "=" + v.str();
}

std::string pseudoDefinedName(const std::string& feature) {
    return "defined(" + feature + ")";
}

std::optional<PseudoVariable> parsePseudoVariable(const std::string& varName) {
    if (varName.rfind("defined(", 0) == 0 && varName.back() == ')') {
        std::string inner = varName.substr(8, varName.size() - 9);
        if (!validIdent(inner)) return std::nullopt;
        PseudoVariable p;
        p.feature = inner;
        p.isDefined = true;
        return p;
    }
    std::size_t eq = varName.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string name = varName.substr(0, eq);
    std::optional<Value> v = parseValue(varName.substr(eq + 1));
    if (!validIdent(name) || !v) return std::nullopt;
    PseudoVariable p;
    p.feature = name;
    p.value = *v;
    return p;
}

Formula applyLegacy(const Formula& f, const FeatureModel& model, bool simplifyResult) {
    Formula out = f;
    for (const std::string& var : f.variables()) {
        std::optional<PseudoVariable> p = parsePseudoVariable(var);
        if (!p) continue;
        const FeatureDef* def = model.find(p->feature);
        if (!def || def->legacy == LegacyKind::None) continue;
        bool value;
        if (def->legacy == LegacyKind::Retired) {
            value = false;
        } else if (p->isDefined) {
            value = true;
        } else {
            value = p->value.sameNumber(def->legacyValue);
        }
        out = substitute(out, var, value);
    }
    return simplifyResult ? simplify(out) : out;
}

bool hasLegacyFeatures(const FeatureModel& model) {
    for (const auto& [name, def] : model.features)
        if (def.legacy != LegacyKind::None) return true;
    return false;
}

}  // namespace vareffect
