#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vareffect/analysis.hpp"
#include "vareffect/blocks.hpp"
#include "vareffect/condition.hpp"
#include "vareffect/error.hpp"
#include "vareffect/feature_effect.hpp"
#include "vareffect/feature_model.hpp"
#include "vareffect/formula.hpp"
#include "vareffect/sat.hpp"
#include "vareffect/translate.hpp"

namespace py = pybind11;
using namespace vareffect;

namespace {

AxiomSet parseAxioms(const std::vector<std::string>& texts) {
    AxiomSet out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(parseFormula(t));
    return out;
}

py::dict runResult(int code, const std::ostringstream& out, const std::ostringstream& err) {
    py::dict d;
    d["exit_code"] = code;
    d["stdout"] = out.str();
    d["stderr"] = err.str();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Presence-condition extraction and feature-effect classification "
              "for preprocessor-based product lines";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "VareffectError");

    m.def(
        "parse_formula",
        [](const std::string& text) { return parseFormula(text).key(); },
        py::arg("text"),
        "Parses a propositional formula and returns its canonical text form.");

    m.def(
        "simplify_formula",
        [](const std::string& text) { return simplify(parseFormula(text)).key(); },
        py::arg("text"),
        "Parses, simplifies, and returns the canonical text of the result.");

    m.def(
        "feature_effect",
        [](const std::string& pseudo_var, const std::vector<std::string>& pcs) {
            std::set<Formula> set;
            for (const auto& t : pcs) set.insert(parseFormula(t));
            return featureEffect(pseudo_var, set).key();
        },
        py::arg("pseudo_var"), py::arg("presence_conditions"),
        "Effect of one pseudo-variable over the given presence conditions: "
        "the simplified disjunction of per-condition toggle differences.");

    m.def(
        "is_satisfiable",
        [](const std::string& text, const std::vector<std::string>& axioms) {
            return isSatisfiable(parseFormula(text), parseAxioms(axioms));
        },
        py::arg("text"), py::arg("axioms") = std::vector<std::string>{});

    m.def(
        "is_tautology",
        [](const std::string& text, const std::vector<std::string>& axioms) {
            return isTautology(parseFormula(text), parseAxioms(axioms));
        },
        py::arg("text"), py::arg("axioms") = std::vector<std::string>{});

    m.def(
        "domain_axioms",
        [](const std::string& features_csv) {
            FeatureModel model = parseFeatureModel(features_csv);
            std::vector<std::string> keys;
            for (const auto& ax : domainAxioms(model)) keys.push_back(ax.key());
            return keys;
        },
        py::arg("features_csv"),
        "At-most-one and definedness axioms for every bounded feature of the "
        "model, as canonical formula texts.");

    m.def(
        "translate_condition",
        [](const std::string& text, const std::string& features_csv,
           bool cpp_undefined_as_zero, bool strict, long long expansion_limit) {
            FeatureModel model = parseFeatureModel(features_csv);
            OpaqueNamer namer("<python>");
            TranslateOptions opts;
            opts.cppUndefinedAsZero = cpp_undefined_as_zero;
            opts.strict = strict;
            opts.expansionLimit = expansion_limit;
            ConditionExpr folded =
                foldConstants(parseCondition(text), model.constants, namer);
            TranslationResult r = translate(folded, model, opts, namer);
            py::dict out;
            out["formula"] = r.formula.key();
            out["degraded_nodes"] = r.degradedNodes;
            out["unknown_features"] = r.unknownFeatures;
            return out;
        },
        py::arg("text"), py::arg("features_csv"),
        py::arg("cpp_undefined_as_zero") = false, py::arg("strict") = false,
        py::arg("expansion_limit") = 4096,
        "Translates a numeric preprocessor condition into a propositional "
        "formula over F=v / defined(F) pseudo-variables.");

    m.def(
        "scan_blocks",
        [](const std::string& source, const std::string& path) {
            return blockTreeJsonText(scanBlocks(source, path));
        },
        py::arg("source"), py::arg("path") = std::string("<memory>"),
        "Scans preprocessor conditional blocks and returns the block tree as "
        "a JSON string.");

    m.def(
        "analyze",
        [](const std::vector<std::string>& products, const std::string& features,
           const std::string& out_dir, const std::string& constants,
           const std::string& build_map, const std::string& aux,
           bool cpp_undefined_as_zero, bool strict, bool no_simplify,
           bool dump_blocks, long long expansion_limit, int threads) {
            AnalysisOptions opts;
            opts.productRoots = products;
            opts.featuresPath = features;
            opts.constantsPath = constants;
            opts.buildMapPath = build_map;
            opts.auxPath = aux;
            opts.outDir = out_dir;
            opts.cppUndefinedAsZero = cpp_undefined_as_zero;
            opts.strict = strict;
            opts.noSimplify = no_simplify;
            opts.dumpBlocks = dump_blocks;
            opts.expansionLimit = expansion_limit;
            opts.threads = threads;
            std::ostringstream out, err;
            int code = runAnalyze(opts, out, err);
            return runResult(code, out, err);
        },
        py::arg("products"), py::arg("features"), py::arg("out_dir"),
        py::arg("constants") = std::string(), py::arg("build_map") = std::string(),
        py::arg("aux") = std::string(), py::arg("cpp_undefined_as_zero") = false,
        py::arg("strict") = false, py::arg("no_simplify") = false,
        py::arg("dump_blocks") = false, py::arg("expansion_limit") = 4096,
        py::arg("threads") = 0,
        "Runs the per-product analysis pipeline. Returns a dict with "
        "exit_code, stdout, and stderr.");

    m.def(
        "aggregate",
        [](const std::vector<std::string>& inputs, const std::string& out_dir,
           const std::string& clusters, bool confidential) {
            AggregateOptions opts;
            opts.inputs = inputs;
            opts.clustersPath = clusters;
            opts.outDir = out_dir;
            opts.confidential = confidential;
            std::ostringstream out, err;
            int code = runAggregate(opts, out, err);
            return runResult(code, out, err);
        },
        py::arg("inputs"), py::arg("out_dir"), py::arg("clusters") = std::string(),
        py::arg("confidential") = false,
        "Combines per-product results across a product line. Returns a dict "
        "with exit_code, stdout, and stderr.");
}
