#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "vareffect/csv.hpp"
#include "vareffect/feature_model.hpp"
#include "vareffect/sat.hpp"

using namespace vareffect;

namespace {

const char* kModelCsv =
    "name,kind,values,legacy,legacy_value\n"
    "VAR1,enum,0|1|2,none,\n"
    "DEBUG_LVL,int,,none,\n"
    "OLD_FLAG,bool,,fixed,0\n"
    "GONE,enum,1|2,retired,\n"
    "CONST_ZERO,constant,0,none,\n"
    "FVAR,float,,none,\n";

}  // namespace

TEST_CASE("parseCsv handles quoting and line endings") {
    auto rows = parseCsv("a,b\r\n\"x,1\",\"he said \"\"hi\"\"\"\n\nlast,\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(rows[1].fields == std::vector<std::string>{"x,1", "he said \"hi\""});
    CHECK(rows[1].line == 2);
    CHECK(rows[2].fields == std::vector<std::string>{"last", ""});
    CHECK(rows[2].line == 4);
}

TEST_CASE("parseFeatureModel loads kinds, ranges, legacy and constants") {
    FeatureModel m = parseFeatureModel(kModelCsv);
    REQUIRE(m.features.size() == 5);
    REQUIRE(m.constants.size() == 1);

    const FeatureDef* var1 = m.find("VAR1");
    REQUIRE(var1);
    CHECK(var1->kind == FeatureKind::Enum);
    REQUIRE(var1->values.size() == 3);
    CHECK(var1->values[2].i == 2);
    CHECK(var1->bounded());

    CHECK(m.find("DEBUG_LVL")->kind == FeatureKind::IntUnbounded);
    CHECK_FALSE(m.find("DEBUG_LVL")->bounded());
    CHECK(m.find("FVAR")->kind == FeatureKind::FloatUnbounded);

    const FeatureDef* old = m.find("OLD_FLAG");
    CHECK(old->kind == FeatureKind::Bool);
    REQUIRE(old->values.size() == 2);
    CHECK(old->legacy == LegacyKind::Fixed);
    CHECK(old->legacyValue.i == 0);

    CHECK(m.find("GONE")->legacy == LegacyKind::Retired);
    CHECK(m.constants.at("CONST_ZERO").i == 0);
    CHECK(m.find("CONST_ZERO") == nullptr);
}

TEST_CASE("parseFeatureModel rejects malformed input with line numbers") {
    auto expectError = [](const std::string& body, const std::string& code, int line) {
        try {
            parseFeatureModel("name,kind,values,legacy,legacy_value\n" + body);
            FAIL_CHECK("expected ModelError for: " << body);
        } catch (const ModelError& e) {
            CHECK(e.code == code);
            CHECK(e.line == line);
        }
    };
    expectError("A,enum,0|1,none,\nA,bool,,none,\n", "DuplicateFeature", 3);
    expectError("A,constant,1,none,\nA,bool,,none,\n", "DuplicateFeature", 3);
    expectError("A,gadget,,none,\n", "MalformedRange", 2);
    expectError("A,bool,0|1,none,\n", "MalformedRange", 2);
    expectError("A,enum,,none,\n", "MalformedRange", 2);
    expectError("A,enum,0|zero,none,\n", "MalformedRange", 2);
    expectError("A,enum,0|1|1,none,\n", "MalformedRange", 2);
    expectError("A,enum,0|1,fixed,7\n", "MalformedRange", 2);
    expectError("A,enum,0|1,retired,1\n", "MalformedRange", 2);
    expectError("A,enum,0|1,none,1\n", "MalformedRange", 2);
    expectError("A,int,0|1,none,\n", "MalformedRange", 2);
    expectError("9A,bool,,none,\n", "MalformedRange", 2);
    expectError("A,bool,,none\n", "MalformedRange", 2);
    CHECK_THROWS_AS(parseFeatureModel("wrong,header\nA,bool,,none,\n"), ModelError);
    CHECK_THROWS_AS(parseFeatureModel(""), ModelError);
}

TEST_CASE("mergeConstants extends the model and keeps names disjoint") {
    FeatureModel m = parseFeatureModel(kModelCsv);
    mergeConstants(m, "name,value\nCONST_A,1\nCONST_HEX,0x10\n");
    CHECK(m.constants.at("CONST_A").i == 1);
    CHECK(m.constants.at("CONST_HEX").i == 16);

    try {
        mergeConstants(m, "name,value\nVAR1,3\n");
        FAIL_CHECK("expected DuplicateFeature");
    } catch (const ModelError& e) {
        CHECK(e.code == "DuplicateFeature");
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(mergeConstants(m, "name,value\nX,notanumber\n"), ModelError);
    CHECK_THROWS_AS(mergeConstants(m, "bad,header,x\n"), ModelError);
}

TEST_CASE("pseudo-variable names round-trip") {
    CHECK(pseudoValueName("F", Value::ofInt(16)) == "F=16");
    CHECK(pseudoDefinedName("F") == "defined(F)");

    std::optional<PseudoVariable> p = parsePseudoVariable("VAR1=2");
    REQUIRE(p.has_value());
    CHECK(p->feature == "VAR1");
    CHECK_FALSE(p->isDefined);
    CHECK(p->value.i == 2);

    p = parsePseudoVariable("defined(VAR1)");
    REQUIRE(p.has_value());
    CHECK(p->isDefined);
    CHECK(p->feature == "VAR1");

    CHECK_FALSE(parsePseudoVariable("plain").has_value());
    CHECK_FALSE(parsePseudoVariable("__opaque_00000000_1").has_value());
    CHECK_FALSE(parsePseudoVariable("F=notvalue").has_value());
    CHECK_FALSE(parsePseudoVariable("defined(9x)").has_value());
}

TEST_CASE("applyLegacy substitutes fixed and retired features") {
    FeatureModel m = parseFeatureModel(
        "name,kind,values,legacy,legacy_value\n"
        "F,enum,0|1,fixed,0\n"
        "G,enum,0|1,retired,\n"
        "H,enum,0|1,none,\n");

    CHECK(applyLegacy(parseFormula("F=0 || A"), m).isTrue());
    CHECK(applyLegacy(parseFormula("F=1 && A"), m).isFalse());
    CHECK(applyLegacy(parseFormula("defined(G) && A"), m).isFalse());
    CHECK(applyLegacy(parseFormula("defined(F)"), m).isTrue());
    CHECK(applyLegacy(parseFormula("G=0 || G=1"), m).isFalse());
    CHECK(applyLegacy(parseFormula("!defined(G) && A"), m) == Formula::var("A"));
    CHECK(applyLegacy(parseFormula("H=1 && F=0"), m) == parseFormula("H=1"));
    // untouched variables survive
    CHECK(applyLegacy(parseFormula("H=0 ^ defined(H)"), m) ==
          simplify(parseFormula("H=0 ^ defined(H)")));
}

TEST_CASE("applyLegacy is idempotent and preserves tautologies") {
    FeatureModel m = parseFeatureModel(
        "name,kind,values,legacy,legacy_value\n"
        "F,enum,0|1|2,fixed,1\n"
        "G,enum,0|1,retired,\n"
        "H,enum,0|1,none,\n");
    std::vector<std::string> vars = {"F=0", "F=1", "F=2", "defined(F)",
                                     "G=0", "defined(G)", "H=0", "H=1"};
    std::mt19937 rng(7401);
    for (int i = 0; i < 200; i++) {
        Formula f = oracle::randomFormula(rng, vars, 4, true);
        Formula once = applyLegacy(f, m);
        CHECK(applyLegacy(once, m) == once);

        Formula taut = fOr({f, fNot(f)});
        REQUIRE(isTautology(taut));
        CHECK(isTautology(applyLegacy(taut, m)));
    }
}
