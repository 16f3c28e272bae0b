#pragma once

#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "vareffect/aggregate.hpp"
#include "vareffect/build_map.hpp"
#include "vareffect/feature_model.hpp"

namespace vareffect {

struct AnalysisOptions {
    std::vector<std::string> productRoots;
    std::string featuresPath;
    std::string constantsPath;
    std::string buildMapPath;
    std::string auxPath;
    std::string outDir;
    bool cppUndefinedAsZero = false;
    bool strict = false;
    bool noSimplify = false;
    bool dumpBlocks = false;
    long long expansionLimit = 4096;
    int threads = 0;  // 0: take VAREFFECT_THREADS, else hardware default
    std::set<std::string> extensions = {".c", ".h"};
};

struct ProductAnalysis {
    ProductResult result;
    std::map<std::string, long long> stats;
    std::vector<std::string> logLines;  // `level<TAB>code<TAB>message`
    std::vector<std::pair<std::string, std::string>> blockDumps;  // relpath, json
};

// VAREFFECT_THREADS wins over the option; 0/unset falls back to the
// hardware thread count.
int resolveThreads(int optionValue);

// The product id of a root directory is its trailing path component.
std::string productIdFromRoot(const std::string& root);

// Sorted POSIX-style paths, relative to root, of all files with a matching
// extension. Throws ConfigError when root is not a directory.
std::vector<std::string> listProductFiles(const std::string& root,
                                          const std::set<std::string>& extensions);

// Full per-product pipeline: scan directives, strip consistency checks,
// translate presence conditions, apply legacy substitutions, classify every
// observed feature. File-level failures are logged and skipped unless
// strict, where they abort the product.
ProductAnalysis analyzeProduct(const std::string& root, const std::string& productId,
                               const FeatureModel& model, const BuildMap& buildMap,
                               const std::vector<AuxCondition>& aux,
                               const AnalysisOptions& opts);

// result.csv body: `feature,category,effect_formula,pseudo_variables,pc_count`.
std::string resultCsvText(const ProductResult& result);

// Runs the analyze command end to end and writes per-product outputs under
// opts.outDir/<product>/. Returns the process exit code: 0 on success, 1 on
// analysis failure (strict), 2 on configuration problems.
int runAnalyze(const AnalysisOptions& opts, std::ostream& out, std::ostream& err);

struct AggregateOptions {
    std::vector<std::string> inputs;  // result.json paths, >= 2
    std::string clustersPath;
    std::string outDir;
    bool confidential = false;
};

// Runs the aggregate command: loads result files, folds categories, writes
// aggregate.csv / occurrence.csv / aggregate.json (and clusters.csv when a
// cluster spec is given). Same exit-code contract as runAnalyze.
int runAggregate(const AggregateOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace vareffect
