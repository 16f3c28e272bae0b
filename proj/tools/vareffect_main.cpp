#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vareffect/analysis.hpp"

namespace {
constexpr const char* kVersion = "0.1.0";
}

int main(int argc, char** argv) {
    CLI::App app{"Reverse engineers variability dependencies from preprocessor-based "
                 "product lines: extracts presence conditions, computes feature "
                 "effects, and classifies features as independent or dependent."};
    app.set_version_flag("--version", std::string("vareffect ") + kVersion);
    app.require_subcommand(1);

    vareffect::AnalysisOptions analysis;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Analyze product checkouts and classify their features");
    analyze->add_option("--product", analysis.productRoots,
                        "Product source root (repeatable)")
        ->required();
    analyze->add_option("--features", analysis.featuresPath,
                        "Feature model CSV (name,kind,values,legacy,legacy_value)")
        ->required();
    analyze->add_option("--constants", analysis.constantsPath,
                        "Known constants CSV (name,value)");
    analyze->add_option("--build-map", analysis.buildMapPath,
                        "Build map CSV (pattern,condition), first match wins");
    analyze->add_option("--aux", analysis.auxPath,
                        "Auxiliary presence conditions (feature<TAB>formula<TAB>tag)");
    analyze->add_flag("--cpp-undefined-as-zero", analysis.cppUndefinedAsZero,
                      "Treat undefined features as 0 in relational expressions");
    analyze->add_flag("--strict", analysis.strict,
                      "Abort on degraded input instead of logging it");
    analyze->add_flag("--no-simplify", analysis.noSimplify,
                      "Skip formula simplification (diagnostics)");
    analyze->add_flag("--dump-blocks", analysis.dumpBlocks,
                      "Write the scanned block tree of every file");
    analyze->add_option("--expansion-limit", analysis.expansionLimit,
                        "Max enumerated value combinations per relational node")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--threads", analysis.threads,
                        "Worker threads (VAREFFECT_THREADS overrides; 0 = auto)");
    analyze->add_option("--out", analysis.outDir, "Output directory")->required();

    vareffect::AggregateOptions aggregate;
    CLI::App* agg = app.add_subcommand(
        "aggregate", "Combine per-product results into cross-product reports");
    agg->add_option("--in", aggregate.inputs, "Per-product result.json (>= 2)")
        ->required()
        ->expected(-2);
    agg->add_option("--clusters", aggregate.clustersPath,
                    "Cluster spec CSV (cluster,product)");
    agg->add_flag("--confidential", aggregate.confidential,
                  "Suppress absolute counts, report percentages only");
    agg->add_option("--out", aggregate.outDir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed())
        return vareffect::runAnalyze(analysis, std::cout, std::cerr);
    return vareffect::runAggregate(aggregate, std::cout, std::cerr);
}
