#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "vareffect/analysis.hpp"
#include "vareffect/csv.hpp"
#include "vareffect/error.hpp"

using namespace vareffect;
namespace fs = std::filesystem;

namespace {

const char* kListing =
    "#if VAR1 > 0 && VAR2 != 0\n"
    "int shared_code;\n"
    "#if VAR3 != 1\n"
    "int var3_code;\n"
    "#endif\n"
    "#ifndef VAR3\n"
    "#error VAR3 must be defined\n"
    "#endif\n"
    "#endif\n";

const char* kModelCsv =
    "name,kind,values,legacy,legacy_value\n"
    "VAR1,enum,0|1|2,,\n"
    "VAR2,enum,0|1,,\n"
    "VAR3,enum,0|1,,\n"
    "NETWORK,bool,,,\n"
    "FASTPATH,bool,,,\n"
    "EXTRA,bool,,,\n";

const char* kBuildMapCsv =
    "pattern,condition\n"
    "dead/**,0\n"
    "net/**,defined(NETWORK)\n";

struct Fixture {
    fs::path base;

    explicit Fixture(const std::string& name) : base(fs::path("/tmp") / name) {
        fs::remove_all(base);
        fs::create_directories(base);
    }

    std::string file(const std::string& rel, const std::string& text) const {
        std::string path = (base / rel).string();
        writeFileText(path, text);
        return path;
    }

    std::string dir(const std::string& rel) const {
        fs::create_directories(base / rel);
        return (base / rel).string();
    }
};

Fixture makeProduct(const std::string& name) {
    Fixture fx(name);
    fx.file("features.csv", kModelCsv);
    fx.file("build_map.csv", kBuildMapCsv);
    fx.file("p1/listing.c", kListing);
    fx.file("p1/other.c", "#if VAR2 != 0\nint more;\n#endif\n");
    fx.file("p1/dead/gone.c", "#if VAR1 > 0\nint unused;\n#endif\n");
    fx.file("p1/net/fast.c", "#ifdef FASTPATH\nint quick;\n#endif\n");
    fx.file("p1/readme.txt", "not scanned\n");
    return fx;
}

AnalysisOptions baseOptions(const Fixture& fx) {
    AnalysisOptions opts;
    opts.productRoots = {(fx.base / "p1").string()};
    opts.featuresPath = (fx.base / "features.csv").string();
    opts.buildMapPath = (fx.base / "build_map.csv").string();
    opts.outDir = (fx.base / "out").string();
    opts.threads = 1;
    return opts;
}

const FeatureEffectRecord& record(const ProductResult& r, const std::string& feature) {
    for (const auto& rec : r.records)
        if (rec.feature == feature) return rec;
    throw std::runtime_error("missing feature: " + feature);
}

}  // namespace

TEST_CASE("analyzeProduct classifies the listing-shaped product") {
    Fixture fx = makeProduct("vareffect_an_basic");
    AnalysisOptions opts = baseOptions(fx);
    FeatureModel model = loadFeatureModel(opts.featuresPath);
    BuildMap buildMap = loadBuildMap(opts.buildMapPath);

    ProductAnalysis pa = analyzeProduct(opts.productRoots[0], "p1", model, buildMap,
                                        {}, opts);

    std::vector<std::string> names;
    for (const auto& rec : pa.result.records) names.push_back(rec.feature);
    CHECK(names == std::vector<std::string>{"FASTPATH", "NETWORK", "VAR1", "VAR2",
                                            "VAR3"});

    CHECK(record(pa.result, "VAR2").category == FeatureCategory::Independent);
    CHECK(record(pa.result, "VAR2").effect.isTrue());
    CHECK(record(pa.result, "VAR1").category == FeatureCategory::Dependent);
    CHECK(record(pa.result, "VAR3").category == FeatureCategory::Dependent);
    CHECK(oracle::equivalent(record(pa.result, "VAR3").effect,
                             parseFormula("(VAR1=1 || VAR1=2) && VAR2=1")));
    CHECK(record(pa.result, "NETWORK").category == FeatureCategory::Independent);
    CHECK(record(pa.result, "FASTPATH").category == FeatureCategory::Dependent);
    CHECK(record(pa.result, "FASTPATH").effect.key() == "defined(NETWORK)");

    CHECK(pa.stats.at("files") == 3);
    CHECK(pa.stats.at("files_excluded") == 1);
    CHECK(pa.stats.at("blocks") == 5);
    CHECK(pa.stats.at("consistency_checks_removed") == 1);
    CHECK(pa.stats.at("features") == 5);
    CHECK(pa.stats.at("independent") == 2);
    CHECK(pa.stats.at("dependent") == 3);

    bool excludedLogged = false;
    for (const auto& line : pa.logLines)
        if (line.find("FILE_EXCLUDED\tdead/gone.c") != std::string::npos)
            excludedLogged = true;
    CHECK(excludedLogged);
}

TEST_CASE("aux conditions join the index under their mentioned variables") {
    Fixture fx = makeProduct("vareffect_an_aux");
    AnalysisOptions opts = baseOptions(fx);
    FeatureModel model = loadFeatureModel(opts.featuresPath);
    BuildMap buildMap = loadBuildMap(opts.buildMapPath);
    auto aux = parseAuxConditions("EXTRA\tdefined(EXTRA) && VAR2=1\tmodule\n");

    ProductAnalysis pa = analyzeProduct(opts.productRoots[0], "p1", model, buildMap,
                                        aux, opts);
    CHECK(record(pa.result, "EXTRA").category == FeatureCategory::Dependent);
    CHECK(record(pa.result, "EXTRA").effect.key() == "VAR2=1");
    CHECK(pa.stats.at("aux_conditions") == 1);
    CHECK(pa.stats.at("aux_degraded") == 0);
}

TEST_CASE("empty product root yields an empty result and a warning") {
    Fixture fx("vareffect_an_empty");
    fx.file("features.csv", kModelCsv);
    fx.dir("p1");
    AnalysisOptions opts;
    opts.productRoots = {(fx.base / "p1").string()};
    opts.featuresPath = (fx.base / "features.csv").string();
    opts.outDir = (fx.base / "out").string();
    opts.threads = 1;

    std::ostringstream out, err;
    CHECK(runAnalyze(opts, out, err) == 0);
    CHECK(err.str().empty());

    std::string log = readFileText((fs::path(opts.outDir) / "p1/analysis.log").string());
    CHECK(log.find("warn\tEMPTY_PRODUCT") != std::string::npos);
    std::string csv = readFileText((fs::path(opts.outDir) / "p1/result.csv").string());
    CHECK(csv == "feature,category,effect_formula,pseudo_variables,pc_count\n");
}

TEST_CASE("broken files are logged and skipped unless strict") {
    Fixture fx = makeProduct("vareffect_an_strict");
    fx.file("p1/broken.c", "#if VAR1 > 0\nint never_closed;\n");
    AnalysisOptions opts = baseOptions(fx);

    std::ostringstream out, err;
    CHECK(runAnalyze(opts, out, err) == 0);
    std::string log = readFileText((fs::path(opts.outDir) / "p1/analysis.log").string());
    CHECK(log.find("error\tFILE_ERROR\tbroken.c") != std::string::npos);
    CHECK(log.find("files_failed=1") != std::string::npos);
    // The healthy files still produced a full result.
    std::string csv = readFileText((fs::path(opts.outDir) / "p1/result.csv").string());
    CHECK(csv.find("VAR2,INDEPENDENT") != std::string::npos);

    opts.strict = true;
    opts.outDir = (fx.base / "out_strict").string();
    std::ostringstream out2, err2;
    CHECK(runAnalyze(opts, out2, err2) == 1);
    CHECK(err2.str().find("broken.c") != std::string::npos);
}

TEST_CASE("analyze output is byte-identical across runs and thread counts") {
    Fixture fx = makeProduct("vareffect_an_determinism");
    AnalysisOptions opts = baseOptions(fx);

    auto runInto = [&](const std::string& outDir, int threads) {
        AnalysisOptions o = opts;
        o.outDir = outDir;
        o.threads = threads;
        std::ostringstream out, err;
        REQUIRE(runAnalyze(o, out, err) == 0);
    };
    runInto((fx.base / "out1").string(), 1);
    runInto((fx.base / "out2").string(), 1);
    runInto((fx.base / "out4").string(), 4);

    for (const char* name : {"result.csv", "result.json", "analysis.log"}) {
        std::string a = readFileText((fx.base / "out1/p1" / name).string());
        std::string b = readFileText((fx.base / "out2/p1" / name).string());
        std::string c = readFileText((fx.base / "out4/p1" / name).string());
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("no-simplify keeps effects semantically unchanged") {
    Fixture fx = makeProduct("vareffect_an_nosimp");
    AnalysisOptions opts = baseOptions(fx);
    FeatureModel model = loadFeatureModel(opts.featuresPath);
    BuildMap buildMap = loadBuildMap(opts.buildMapPath);

    ProductAnalysis plain = analyzeProduct(opts.productRoots[0], "p1", model,
                                           buildMap, {}, opts);
    opts.noSimplify = true;
    ProductAnalysis raw = analyzeProduct(opts.productRoots[0], "p1", model, buildMap,
                                         {}, opts);

    REQUIRE(plain.result.records.size() == raw.result.records.size());
    for (std::size_t i = 0; i < plain.result.records.size(); i++) {
        const auto& a = plain.result.records[i];
        const auto& b = raw.result.records[i];
        CHECK(a.feature == b.feature);
        CHECK(a.category == b.category);
        CHECK(oracle::equivalent(a.effect, b.effect));
    }
}

TEST_CASE("legacy substitution statistics track category flips") {
    Fixture fx("vareffect_an_legacy");
    fx.file("features.csv",
            "name,kind,values,legacy,legacy_value\n"
            "VAR2,enum,0|1,,\n"
            "OLDF,bool,,fixed,1\n");
    fx.file("p1/a.c", "#if defined(OLDF) && VAR2 != 0\nint x;\n#endif\n");
    AnalysisOptions opts;
    opts.productRoots = {(fx.base / "p1").string()};
    opts.featuresPath = (fx.base / "features.csv").string();
    opts.outDir = (fx.base / "out").string();
    opts.threads = 1;

    FeatureModel model = loadFeatureModel(opts.featuresPath);
    ProductAnalysis pa = analyzeProduct(opts.productRoots[0], "p1", model, BuildMap{},
                                        {}, opts);

    CHECK(record(pa.result, "VAR2").category == FeatureCategory::Independent);
    CHECK(pa.result.records.size() == 1);  // OLDF vanishes from the analysis
    CHECK(pa.stats.at("legacy_features") == 1);
    CHECK(pa.stats.at("legacy_removed_features") == 1);
    CHECK(pa.stats.at("legacy_flips_to_independent") == 1);
    CHECK(pa.stats.at("legacy_flips_to_dependent") == 0);
}

TEST_CASE("block dumps are written on request") {
    Fixture fx = makeProduct("vareffect_an_dump");
    AnalysisOptions opts = baseOptions(fx);
    opts.dumpBlocks = true;

    std::ostringstream out, err;
    REQUIRE(runAnalyze(opts, out, err) == 0);
    std::string dump =
        readFileText((fs::path(opts.outDir) / "p1/blocks/listing.c.json").string());
    CHECK(dump.find("VAR1 > 0") != std::string::npos);
    CHECK(fs::exists(fs::path(opts.outDir) / "p1/blocks/net/fast.c.json"));
}

TEST_CASE("product ids derive from the root directory name") {
    CHECK(productIdFromRoot("/tmp/vareffect_an_basic/p1") == "p1");
    CHECK(productIdFromRoot("/tmp/vareffect_an_basic/p1/") == "p1");
    CHECK_THROWS_AS(productIdFromRoot("/"), ConfigError);

    Fixture fx("vareffect_an_dupid");
    fx.file("features.csv", kModelCsv);
    fx.dir("a/p1");
    fx.dir("b/p1");
    AnalysisOptions opts;
    opts.productRoots = {(fx.base / "a/p1").string(), (fx.base / "b/p1").string()};
    opts.featuresPath = (fx.base / "features.csv").string();
    opts.outDir = (fx.base / "out").string();
    std::ostringstream out, err;
    CHECK(runAnalyze(opts, out, err) == 2);
    CHECK(err.str().find("duplicate product id") != std::string::npos);
}

TEST_CASE("file listing respects extensions and sorts") {
    Fixture fx = makeProduct("vareffect_an_listing");
    auto files = listProductFiles((fx.base / "p1").string(), {".c", ".h"});
    CHECK(files == std::vector<std::string>{"dead/gone.c", "listing.c", "net/fast.c",
                                            "other.c"});
    CHECK_THROWS_AS(listProductFiles((fx.base / "missing").string(), {".c"}),
                    ConfigError);
}

TEST_CASE("worker count resolution") {
    unsetenv("VAREFFECT_THREADS");
    CHECK(resolveThreads(3) == 3);
    CHECK(resolveThreads(0) >= 1);
    setenv("VAREFFECT_THREADS", "5", 1);
    CHECK(resolveThreads(3) == 5);
    setenv("VAREFFECT_THREADS", "garbage", 1);
    CHECK(resolveThreads(3) == 3);
    unsetenv("VAREFFECT_THREADS");
}

TEST_CASE("aggregate command over analyzed products") {
    Fixture fx("vareffect_an_agg");
    fx.file("features.csv", kModelCsv);
    fx.file("pa/a.c", kListing);
    fx.file("pa/b.c", "#if VAR2 != 0\nint m;\n#endif\n");
    fx.file("pb/a.c", "#if VAR2 != 0\nint m;\n#endif\n#ifdef NETWORK\nint n;\n#endif\n");

    AnalysisOptions opts;
    opts.productRoots = {(fx.base / "pa").string(), (fx.base / "pb").string()};
    opts.featuresPath = (fx.base / "features.csv").string();
    opts.outDir = (fx.base / "out").string();
    opts.threads = 1;
    std::ostringstream out, err;
    REQUIRE(runAnalyze(opts, out, err) == 0);

    AggregateOptions agg;
    agg.inputs = {(fs::path(opts.outDir) / "pa/result.json").string(),
                  (fs::path(opts.outDir) / "pb/result.json").string()};
    agg.outDir = (fx.base / "agg").string();
    fx.file("clusters.csv", "cluster,product\nonly,pa\n");
    agg.clustersPath = (fx.base / "clusters.csv").string();

    std::ostringstream aout, aerr;
    CHECK(runAggregate(agg, aout, aerr) == 0);
    CHECK(fs::exists(fs::path(agg.outDir) / "aggregate.csv"));
    CHECK(fs::exists(fs::path(agg.outDir) / "occurrence.csv"));
    CHECK(fs::exists(fs::path(agg.outDir) / "clusters.csv"));
    CHECK(fs::exists(fs::path(agg.outDir) / "aggregate.json"));

    std::string csv = readFileText((fs::path(agg.outDir) / "aggregate.csv").string());
    CHECK(csv.find("VAR2,INDEPENDENT,2,pa|pb,") != std::string::npos);

    AggregateOptions tooFew;
    tooFew.inputs = {agg.inputs[0]};
    tooFew.outDir = agg.outDir;
    std::ostringstream fout, ferr;
    CHECK(runAggregate(tooFew, fout, ferr) == 2);

    fx.file("bad.json", "{\"schema_version\": 99}");
    AggregateOptions bad;
    bad.inputs = {agg.inputs[0], (fx.base / "bad.json").string()};
    bad.outDir = agg.outDir;
    std::ostringstream bout, berr;
    CHECK(runAggregate(bad, bout, berr) == 2);
    CHECK(berr.str().find("schema") != std::string::npos);
}
