#include "vareffect/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "vareffect/blocks.hpp"
#include "vareffect/csv.hpp"
#include "vareffect/error.hpp"
#include "vareffect/feature_effect.hpp"
#include "vareffect/sat.hpp"
#include "vareffect/translate.hpp"

namespace fs = std::filesystem;

namespace vareffect {

namespace {

std::string logLine(const char* level, const char* code, const std::string& message) {
    return std::string(level) + "\t" + code + "\t" + message;
}

int countBlocks(const std::vector<CodeBlock>& blocks) {
    int n = 0;
    for (const CodeBlock& b : blocks) n += 1 + countBlocks(b.children);
    return n;
}

// Everything one source file contributes, computed in parallel and merged
// in path order so results do not depend on scheduling.
struct FileOutcome {
    std::vector<Formula> pcs;     // legacy-substituted presence conditions
    std::vector<Formula> rawPcs;  // pre-legacy, kept only for flip statistics
    std::vector<std::string> logLines;
    std::map<std::string, long long> stats;
    std::set<std::string> unknownFeatures;
    std::string blockDump;
    bool failed = false;
    std::string error;
};

struct FileContext {
    const std::string& root;
    const FeatureModel& model;
    const BuildMap& buildMap;
    const AnalysisOptions& opts;
    const AxiomIndex& axioms;
    bool trackRaw = false;
};

FileOutcome processFile(const FileContext& ctx, const std::string& relpath) {
    FileOutcome out;
    TranslateOptions topts;
    topts.cppUndefinedAsZero = ctx.opts.cppUndefinedAsZero;
    topts.strict = ctx.opts.strict;
    topts.expansionLimit = ctx.opts.expansionLimit;
    const bool simplifyPCs = !ctx.opts.noSimplify;
    auto simplified = [&](const Formula& f) { return simplifyPCs ? simplify(f) : f; };

    try {
        std::string text = readFileText((fs::path(ctx.root) / relpath).string());
        OpaqueNamer namer(relpath);
        int arithFaults = 0;
        int degraded = 0;

        ConditionExpr fileCond =
            foldConstants(fileCondition(ctx.buildMap, relpath), ctx.model.constants,
                          namer, &arithFaults);
        TranslationResult fileTr = translate(fileCond, ctx.model, topts, namer);
        degraded += fileTr.degradedNodes;
        out.unknownFeatures.insert(fileTr.unknownFeatures.begin(),
                                   fileTr.unknownFeatures.end());
        Formula fileFormula = simplified(fileTr.formula);
        if (!isSatisfiable(fileFormula, ctx.axioms.relevant(fileFormula))) {
            out.logLines.push_back(
                logLine("info", "FILE_EXCLUDED", relpath + ": build condition unsatisfiable"));
            out.stats["files_excluded"] = 1;
            return out;
        }

        BlockTree tree = scanBlocks(text, relpath, namer);
        out.stats["degraded_directives"] = tree.degradedCount;
        int before = countBlocks(tree.blocks);
        if (ctx.opts.dumpBlocks) out.blockDump = blockTreeJsonText(tree);
        BlockTree stripped = stripConsistencyChecks(tree);
        int after = countBlocks(stripped.blocks);
        out.stats["blocks"] = before;
        out.stats["consistency_checks_removed"] = before - after;

        for (const auto& [block, cond] : blockPresenceConditions(stripped)) {
            ConditionExpr folded =
                foldConstants(cond, ctx.model.constants, namer, &arithFaults);
            TranslationResult tr = translate(folded, ctx.model, topts, namer);
            degraded += tr.degradedNodes;
            out.unknownFeatures.insert(tr.unknownFeatures.begin(),
                                       tr.unknownFeatures.end());
            Formula pc = simplified(fAnd({fileFormula, tr.formula}));
            if (ctx.trackRaw) out.rawPcs.push_back(pc);
            out.pcs.push_back(applyLegacy(pc, ctx.model, simplifyPCs));
        }

        out.stats["files"] = 1;
        out.stats["degraded_expressions"] = degraded;
        out.stats["arith_faults"] = arithFaults;
        if (degraded + arithFaults + tree.degradedCount > 0)
            out.logLines.push_back(logLine(
                "warn", "DEGRADED",
                relpath + ": " +
                    std::to_string(degraded + arithFaults + tree.degradedCount) +
                    " conservatively translated expressions"));
    } catch (const Error& e) {
        out.failed = true;
        out.error = relpath + ": " + e.what();
        out.logLines.push_back(logLine("error", "FILE_ERROR", out.error));
        out.stats["files_failed"] = 1;
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = relpath + ": " + e.what();
        out.logLines.push_back(logLine("error", "FILE_ERROR", out.error));
        out.stats["files_failed"] = 1;
    }
    return out;
}

void addStats(std::map<std::string, long long>& total,
              const std::map<std::string, long long>& delta) {
    for (const auto& [key, value] : delta) total[key] += value;
}

}  // namespace

int resolveThreads(int optionValue) {
    if (const char* env = std::getenv("VAREFFECT_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(std::min(v, 256L));
    }
    if (optionValue > 0) return optionValue;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string productIdFromRoot(const std::string& root) {
    std::error_code ec;
    fs::path p = fs::weakly_canonical(fs::path(root), ec);
    if (ec) p = fs::path(root).lexically_normal();
    if (p.filename().empty()) p = p.parent_path();
    std::string id = p.filename().string();
    if (id.empty() || id == "." || id == "..")
        throw ConfigError("cannot derive a product id from root: " + root);
    return id;
}

std::vector<std::string> listProductFiles(const std::string& root,
                                          const std::set<std::string>& extensions) {
    fs::path rootPath(root);
    std::error_code ec;
    if (!fs::is_directory(rootPath, ec))
        throw ConfigError("product root is not a directory: " + root);
    std::vector<std::string> files;
    for (auto it = fs::recursive_directory_iterator(
             rootPath, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        if (!extensions.count(it->path().extension().string())) continue;
        files.push_back(fs::relative(it->path(), rootPath).generic_string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

ProductAnalysis analyzeProduct(const std::string& root, const std::string& productId,
                               const FeatureModel& model, const BuildMap& buildMap,
                               const std::vector<AuxCondition>& aux,
                               const AnalysisOptions& opts) {
    ProductAnalysis pa;
    pa.result.product = productId;
    pa.result.axioms = domainAxioms(model);
    const bool simplifyPCs = !opts.noSimplify;
    const bool trackRaw = hasLegacyFeatures(model);

    std::vector<std::string> files = listProductFiles(root, opts.extensions);
    AxiomIndex axioms(pa.result.axioms);
    FileContext ctx{root, model, buildMap, opts, axioms, trackRaw};

    std::vector<FileOutcome> outcomes(files.size());
    int workers = std::min<int>(resolveThreads(opts.threads),
                                std::max<int>(1, static_cast<int>(files.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < files.size(); i++)
            outcomes[i] = processFile(ctx, files[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            for (std::size_t i; (i = next.fetch_add(1)) < files.size();)
                outcomes[i] = processFile(ctx, files[i]);
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; w++) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    PCIndex index;
    PCIndex rawIndex;
    std::set<std::string> unknown;
    for (std::size_t i = 0; i < files.size(); i++) {
        FileOutcome& out = outcomes[i];
        if (out.failed && opts.strict) {
            pa.logLines.insert(pa.logLines.end(), out.logLines.begin(),
                               out.logLines.end());
            throw Error("analysis failed: " + out.error);
        }
        pa.logLines.insert(pa.logLines.end(), out.logLines.begin(), out.logLines.end());
        addStats(pa.stats, out.stats);
        unknown.insert(out.unknownFeatures.begin(), out.unknownFeatures.end());
        for (const Formula& pc : out.pcs) index.add(pc, axioms);
        for (const Formula& pc : out.rawPcs) rawIndex.add(pc, axioms);
        if (!out.blockDump.empty()) pa.blockDumps.emplace_back(files[i], out.blockDump);
    }

    for (const AuxCondition& a : aux) {
        Formula f = simplifyPCs ? simplify(a.formula) : a.formula;
        if (trackRaw) rawIndex.add(f, axioms);
        index.add(applyLegacy(f, model, simplifyPCs), axioms);
        pa.stats["aux_conditions"]++;
        if (a.degraded) {
            pa.stats["aux_degraded"]++;
            pa.logLines.push_back(logLine(
                "warn", "AUX_DEGRADED", "line " + std::to_string(a.line) + ": " + a.raw));
        }
    }

    for (const std::string& name : unknown)
        pa.logLines.push_back(logLine("warn", "UNKNOWN_FEATURE", name));
    pa.stats["unknown_features"] = static_cast<long long>(unknown.size());

    for (const auto& [feature, pseudos] : index.byFeature) {
        FeatureEffectRecord rec =
            classifyFeature(feature, index, axioms, productId, simplifyPCs);
        if (rec.category == FeatureCategory::Independent)
            pa.stats["independent"]++;
        else
            pa.stats["dependent"]++;
        pa.result.records.push_back(std::move(rec));
    }
    pa.stats["features"] = static_cast<long long>(pa.result.records.size());
    pa.stats["dropped_unsat"] = index.droppedUnsat;
    if (index.droppedUnsat > 0)
        pa.logLines.push_back(logLine(
            "info", "DROPPED_UNSAT",
            std::to_string(index.droppedUnsat) + " dead presence conditions removed"));

    if (trackRaw) {
        long long legacyFeatures = 0;
        for (const auto& [name, def] : model.features)
            if (def.legacy != LegacyKind::None) legacyFeatures++;
        pa.stats["legacy_features"] = legacyFeatures;
        pa.stats["legacy_removed_features"] = 0;
        pa.stats["legacy_flips_to_independent"] = 0;
        pa.stats["legacy_flips_to_dependent"] = 0;

        std::map<std::string, FeatureCategory> now;
        for (const auto& rec : pa.result.records) now[rec.feature] = rec.category;
        for (const auto& [feature, pseudos] : rawIndex.byFeature) {
            auto it = now.find(feature);
            if (it == now.end()) {
                pa.stats["legacy_removed_features"]++;
                continue;
            }
            FeatureEffectRecord raw =
                classifyFeature(feature, rawIndex, axioms, productId,
                                simplifyPCs);
            if (raw.category == it->second) continue;
            if (it->second == FeatureCategory::Independent)
                pa.stats["legacy_flips_to_independent"]++;
            else
                pa.stats["legacy_flips_to_dependent"]++;
        }
    }

    for (const char* key : {"files", "files_excluded", "files_failed", "blocks",
                            "consistency_checks_removed", "degraded_directives",
                            "degraded_expressions", "arith_faults", "aux_conditions",
                            "aux_degraded", "dropped_unsat", "features", "independent",
                            "dependent"})
        pa.stats[key] += 0;

    if (files.empty())
        pa.logLines.push_back(logLine("warn", "EMPTY_PRODUCT", "no source files found"));
    for (const auto& [key, value] : pa.stats)
        pa.logLines.push_back(
            logLine("info", "STAT", key + "=" + std::to_string(value)));
    return pa;
}

std::string resultCsvText(const ProductResult& result) {
    std::string out = "feature,category,effect_formula,pseudo_variables,pc_count\n";
    for (const FeatureEffectRecord& rec : result.records) {
        std::string pseudos;
        for (const auto& [name, eff] : rec.pseudoEffects) {
            if (!pseudos.empty()) pseudos += '|';
            pseudos += name;
        }
        out += csvField(rec.feature);
        out += ',';
        out += categoryName(rec.category);
        out += ',';
        out += csvField(rec.effect.key());
        out += ',';
        out += csvField(pseudos);
        out += ',';
        out += std::to_string(rec.pcCount);
        out += '\n';
    }
    return out;
}

int runAnalyze(const AnalysisOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.productRoots.empty())
            throw ConfigError("analyze needs at least one --product root");
        if (opts.featuresPath.empty()) throw ConfigError("analyze needs --features");
        if (opts.outDir.empty()) throw ConfigError("analyze needs --out");

        FeatureModel model = loadFeatureModel(opts.featuresPath, opts.constantsPath);
        BuildMap buildMap;
        if (!opts.buildMapPath.empty())
            buildMap = loadBuildMap(opts.buildMapPath, opts.strict);
        std::vector<AuxCondition> aux;
        if (!opts.auxPath.empty()) aux = loadAuxConditions(opts.auxPath, opts.strict);

        std::vector<std::pair<std::string, std::string>> products;  // id, root
        std::set<std::string> seen;
        for (const std::string& root : opts.productRoots) {
            std::string id = productIdFromRoot(root);
            if (!seen.insert(id).second)
                throw ConfigError("duplicate product id: " + id);
            products.emplace_back(id, root);
        }

        for (const auto& [id, root] : products) {
            ProductAnalysis pa = analyzeProduct(root, id, model, buildMap, aux, opts);
            fs::path dir = fs::path(opts.outDir) / id;
            writeFileText((dir / "result.csv").string(), resultCsvText(pa.result));
            writeFileText((dir / "result.json").string(),
                          resultJsonText(pa.result, pa.stats));
            std::string log;
            for (const std::string& line : pa.logLines) log += line + "\n";
            writeFileText((dir / "analysis.log").string(), log);
            for (const auto& [relpath, dump] : pa.blockDumps)
                writeFileText((dir / "blocks" / (relpath + ".json")).string(), dump);
            out << id << ": " << pa.stats.at("files") << " files, "
                << pa.stats.at("features") << " features ("
                << pa.stats.at("independent") << " independent, "
                << pa.stats.at("dependent") << " dependent)\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int runAggregate(const AggregateOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.inputs.size() < 2)
            throw ConfigError("aggregate needs at least two result files");
        if (opts.outDir.empty()) throw ConfigError("aggregate needs --out");

        std::vector<ProductResult> results;
        for (const std::string& path : opts.inputs)
            results.push_back(loadProductResult(path));

        AggregateReport global = aggregateCategories(results);
        OccurrenceTable occurrence = occurrenceGrouping(global);

        std::vector<std::pair<ClusterSpec, AggregateReport>> clusters;
        if (!opts.clustersPath.empty())
            for (const ClusterSpec& spec : parseClusters(readFileText(opts.clustersPath)))
                clusters.emplace_back(spec, clusterAggregate(results, spec.products));

        fs::path dir(opts.outDir);
        writeFileText((dir / "aggregate.csv").string(),
                      aggregateCsvText(global, opts.confidential));
        writeFileText((dir / "occurrence.csv").string(),
                      occurrenceCsvText(occurrence, opts.confidential));
        if (!clusters.empty())
            writeFileText((dir / "clusters.csv").string(),
                          clustersCsvText(clusters, opts.confidential));
        writeFileText((dir / "aggregate.json").string(),
                      aggregateJsonText(global, occurrence, clusters, opts.confidential));

        if (opts.confidential) {
            long long ref = global.referenceCount;
            auto pct = [&](long long n) {
                return ref > 0 ? static_cast<double>((n * 1000 + ref / 2) / ref) / 10.0
                               : 0.0;
            };
            out << results.size() << " products (" << pct(global.independent)
                << "% independent, " << pct(global.dependent) << "% dependent, "
                << pct(global.mixed) << "% mixed)\n";
        } else {
            out << results.size() << " products, " << global.referenceCount
                << " unique features (" << global.independent << " independent, "
                << global.dependent << " dependent, " << global.mixed << " mixed)\n";
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace vareffect
