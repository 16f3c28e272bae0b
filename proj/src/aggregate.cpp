#include "vareffect/aggregate.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vareffect/csv.hpp"
#include "vareffect/error.hpp"

namespace vareffect {

using nlohmann::json;

namespace {

std::string categoryText(FeatureCategory c) { return categoryName(c); }

FeatureCategory categoryFromText(const std::string& s) {
    if (s == "INDEPENDENT") return FeatureCategory::Independent;
    if (s == "DEPENDENT") return FeatureCategory::Dependent;
    throw SchemaError("unknown category: " + s);
}

std::string tenthsText(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string joined(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

// Rounds raw counts to tenths of a percent of `reference`, then spreads the
// leftover tenths over the largest fractional parts so the rendered values
// add up to the rendered total.
std::vector<long long> remainderTenths(const std::vector<long long>& counts,
                                       long long reference) {
    std::vector<long long> tenths(counts.size(), 0);
    if (reference <= 0) return tenths;
    long long total = 0;
    std::vector<std::pair<long long, std::size_t>> rema;
    for (std::size_t i = 0; i < counts.size(); i++) {
        long long scaled = counts[i] * 1000;
        tenths[i] = scaled / reference;
        rema.emplace_back(scaled % reference, i);
        total += counts[i];
    }
    long long target = (total * 1000 + reference / 2) / reference;
    long long leftover = target - std::accumulate(tenths.begin(), tenths.end(), 0LL);
    std::stable_sort(rema.begin(), rema.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < rema.size() && leftover > 0; i++, leftover--)
        tenths[rema[i].second]++;
    return tenths;
}

double percentOf(long long count, long long reference) {
    if (reference <= 0) return 0.0;
    return static_cast<double>((count * 1000 + reference / 2) / reference) / 10.0;
}

bool equivalentUnder(const Formula& a, const Formula& b, const AxiomSet& axioms) {
    if (a == b) return true;
    Formula aNotB = fAnd({a, fNot(b)});
    if (isSatisfiable(aNotB, relevantAxioms(axioms, aNotB))) return false;
    Formula bNotA = fAnd({fNot(a), b});
    return !isSatisfiable(bNotA, relevantAxioms(axioms, bNotA));
}

AggregateReport buildReport(const std::vector<const ProductResult*>& results,
                            int referenceCount) {
    if (results.empty()) throw ConfigError("no product results to aggregate");

    AxiomSet axioms;
    std::set<std::string> axiomKeys;
    for (const ProductResult* r : results)
        for (const Formula& ax : r->axioms)
            if (axiomKeys.insert(ax.key()).second) axioms.push_back(ax);

    std::map<std::string, std::map<std::string, const FeatureEffectRecord*>> byFeature;
    for (const ProductResult* r : results)
        for (const FeatureEffectRecord& rec : r->records)
            byFeature[rec.feature][r->product] = &rec;

    AggregateReport report;
    report.referenceCount = referenceCount;
    for (const auto& [feature, perProduct] : byFeature) {
        FeatureAggregate agg;
        agg.feature = feature;
        const FeatureEffectRecord* first = nullptr;
        bool allSame = true;
        for (const auto& [product, rec] : perProduct) {
            agg.products.push_back(product);
            agg.perProduct[product] = rec->category;
            agg.effects.emplace(product, rec->effect);
            if (!first) {
                first = rec;
            } else {
                if (rec->category != first->category) allSame = false;
                if (agg.effectsEquivalent &&
                    !equivalentUnder(rec->effect, first->effect, axioms))
                    agg.effectsEquivalent = false;
            }
        }
        if (!allSame)
            agg.category = AggregateCategory::Mixed;
        else if (first->category == FeatureCategory::Independent)
            agg.category = AggregateCategory::Independent;
        else
            agg.category = AggregateCategory::Dependent;
        switch (agg.category) {
            case AggregateCategory::Independent: report.independent++; break;
            case AggregateCategory::Dependent: report.dependent++; break;
            case AggregateCategory::Mixed: report.mixed++; break;
        }
        report.features.push_back(std::move(agg));
    }

    std::map<std::string, const ProductResult*> byProduct;
    for (const ProductResult* r : results) byProduct[r->product] = r;
    for (const auto& [product, r] : byProduct) {
        ProductSummary s;
        s.product = product;
        s.features = static_cast<int>(r->records.size());
        for (const auto& rec : r->records) {
            if (rec.category == FeatureCategory::Independent)
                s.independent++;
            else
                s.dependent++;
        }
        s.dependentRatioPercent = percentOf(s.dependent, s.features);
        report.products.push_back(std::move(s));
    }
    return report;
}

int uniqueFeatureCount(const std::vector<ProductResult>& results) {
    std::set<std::string> names;
    for (const auto& r : results)
        for (const auto& rec : r.records) names.insert(rec.feature);
    return static_cast<int>(names.size());
}

void checkDuplicates(const std::vector<ProductResult>& results) {
    std::set<std::string> ids;
    for (const auto& r : results)
        if (!ids.insert(r.product).second)
            throw ConfigError("duplicate product id: " + r.product);
}

}  // namespace

std::string resultJsonText(const ProductResult& result,
                           const std::map<std::string, long long>& stats) {
    json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["product"] = result.product;
    json axioms = json::array();
    for (const Formula& ax : result.axioms) axioms.push_back(ax.key());
    doc["axioms"] = std::move(axioms);
    json features = json::array();
    for (const FeatureEffectRecord& rec : result.records) {
        json f;
        f["feature"] = rec.feature;
        f["category"] = categoryText(rec.category);
        f["effect"] = rec.effect.key();
        f["pc_count"] = rec.pcCount;
        json pseudo = json::object();
        for (const auto& [name, eff] : rec.pseudoEffects) pseudo[name] = eff.key();
        f["pseudo_effects"] = std::move(pseudo);
        features.push_back(std::move(f));
    }
    doc["features"] = std::move(features);
    json st = json::object();
    for (const auto& [name, value] : stats) st[name] = value;
    doc["stats"] = std::move(st);
    return doc.dump(2) + "\n";
}

ProductResult parseProductResult(const std::string& jsonText) {
    json doc;
    try {
        doc = json::parse(jsonText);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("result file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
            throw SchemaError("result file lacks a schema_version");
        int version = doc["schema_version"].get<int>();
        if (version != kResultSchemaVersion)
            throw SchemaError("unsupported result schema version " +
                              std::to_string(version) + " (expected " +
                              std::to_string(kResultSchemaVersion) + ")");
        ProductResult result;
        result.product = doc.at("product").get<std::string>();
        if (result.product.empty()) throw SchemaError("result file has an empty product id");
        for (const auto& ax : doc.at("axioms"))
            result.axioms.push_back(parseFormula(ax.get<std::string>()));
        for (const auto& f : doc.at("features")) {
            FeatureEffectRecord rec;
            rec.feature = f.at("feature").get<std::string>();
            rec.category = categoryFromText(f.at("category").get<std::string>());
            rec.effect = parseFormula(f.at("effect").get<std::string>());
            rec.pcCount = f.value("pc_count", 0);
            rec.product = result.product;
            if (f.contains("pseudo_effects"))
                for (const auto& [name, eff] : f.at("pseudo_effects").items())
                    rec.pseudoEffects.emplace(name, parseFormula(eff.get<std::string>()));
            result.records.push_back(std::move(rec));
        }
        std::sort(result.records.begin(), result.records.end(),
                  [](const auto& a, const auto& b) { return a.feature < b.feature; });
        return result;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed result file: ") + e.what());
    } catch (const FormulaParseError& e) {
        throw SchemaError(std::string("malformed formula in result file: ") + e.what());
    }
}

ProductResult loadProductResult(const std::string& path) {
    return parseProductResult(readFileText(path));
}

const char* aggregateCategoryName(AggregateCategory c) {
    switch (c) {
        case AggregateCategory::Independent: return "INDEPENDENT";
        case AggregateCategory::Dependent: return "DEPENDENT";
        default: return "MIXED";
    }
}

AggregateReport aggregateCategories(const std::vector<ProductResult>& results) {
    checkDuplicates(results);
    std::vector<const ProductResult*> ptrs;
    for (const auto& r : results) ptrs.push_back(&r);
    return buildReport(ptrs, uniqueFeatureCount(results));
}

AggregateReport clusterAggregate(const std::vector<ProductResult>& allResults,
                                 const std::vector<std::string>& clusterProducts) {
    checkDuplicates(allResults);
    if (clusterProducts.empty()) throw ConfigError("empty cluster");
    std::map<std::string, const ProductResult*> byId;
    for (const auto& r : allResults) byId[r.product] = &r;
    std::set<std::string> wanted;
    for (const auto& id : clusterProducts) {
        if (!byId.count(id)) throw UnknownProductError(id);
        wanted.insert(id);
    }
    std::vector<const ProductResult*> subset;
    for (const auto& r : allResults)
        if (wanted.count(r.product)) subset.push_back(&r);
    return buildReport(subset, uniqueFeatureCount(allResults));
}

OccurrenceTable occurrenceGrouping(const AggregateReport& report) {
    OccurrenceTable table;
    table.referenceCount = report.referenceCount;
    int maxCount = static_cast<int>(report.products.size());
    const AggregateCategory cats[] = {AggregateCategory::Independent,
                                      AggregateCategory::Dependent,
                                      AggregateCategory::Mixed};
    std::map<std::pair<int, int>, int> counts;
    for (const auto& f : report.features) {
        int occ = static_cast<int>(f.products.size());
        maxCount = std::max(maxCount, occ);
        counts[{occ, static_cast<int>(f.category)}]++;
    }
    std::vector<long long> raw;
    for (int occ = 1; occ <= maxCount; occ++)
        for (AggregateCategory cat : cats) {
            OccurrenceCell cell;
            cell.count = occ;
            cell.category = cat;
            auto it = counts.find({occ, static_cast<int>(cat)});
            cell.features = it == counts.end() ? 0 : it->second;
            raw.push_back(cell.features);
            table.cells.push_back(cell);
        }
    std::vector<long long> tenths = remainderTenths(raw, table.referenceCount);
    for (std::size_t i = 0; i < table.cells.size(); i++)
        table.cells[i].percent = static_cast<double>(tenths[i]) / 10.0;
    return table;
}

std::vector<ClusterSpec> parseClusters(const std::string& csvText) {
    auto rows = parseCsv(csvText);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"cluster", "product"})
        throw ConfigError("clusters file must start with header `cluster,product`");
    std::vector<ClusterSpec> clusters;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 1; i < rows.size(); i++) {
        const auto& row = rows[i];
        if (row.fields.size() != 2)
            throw ConfigError("clusters row at line " + std::to_string(row.line) +
                              " must have 2 fields");
        const std::string& name = row.fields[0];
        const std::string& product = row.fields[1];
        if (name.empty() || product.empty())
            throw ConfigError("clusters row at line " + std::to_string(row.line) +
                              " has an empty field");
        auto it = index.find(name);
        if (it == index.end()) {
            index[name] = clusters.size();
            clusters.push_back({name, {product}});
        } else {
            auto& members = clusters[it->second].products;
            if (std::find(members.begin(), members.end(), product) == members.end())
                members.push_back(product);
        }
    }
    return clusters;
}

std::string aggregateCsvText(const AggregateReport& report, bool confidential) {
    (void)confidential;  // no absolute corpus counts in this table
    std::string out =
        "feature,category,occurrence_count,products,per_product,effects_equivalent,effect\n";
    for (const auto& f : report.features) {
        std::vector<std::string> per;
        for (const auto& [product, cat] : f.perProduct)
            per.push_back(product + ":" + categoryName(cat));
        std::string effect;
        if (f.category != AggregateCategory::Mixed && !f.effects.empty())
            effect = f.effects.begin()->second.key();
        out += csvField(f.feature);
        out += ',';
        out += aggregateCategoryName(f.category);
        out += ',';
        out += std::to_string(f.products.size());
        out += ',';
        out += csvField(joined(f.products, '|'));
        out += ',';
        out += csvField(joined(per, '|'));
        out += ',';
        out += f.effectsEquivalent ? "yes" : "no";
        out += ',';
        out += csvField(effect);
        out += '\n';
    }
    return out;
}

std::string occurrenceCsvText(const OccurrenceTable& table, bool confidential) {
    std::string out = "occurrence_count,category,features,percent\n";
    for (const auto& cell : table.cells) {
        out += std::to_string(cell.count);
        out += ',';
        out += aggregateCategoryName(cell.category);
        out += ',';
        if (!confidential) out += std::to_string(cell.features);
        out += ',';
        out += tenthsText(cell.percent);
        out += '\n';
    }
    return out;
}

std::string clustersCsvText(
    const std::vector<std::pair<ClusterSpec, AggregateReport>>& clusters,
    bool confidential) {
    std::string out =
        "cluster,products,features,percent_of_reference,independent,dependent,mixed,"
        "independent_percent,dependent_percent,mixed_percent\n";
    for (const auto& [spec, report] : clusters) {
        long long ref = report.referenceCount;
        out += csvField(spec.name);
        out += ',';
        out += csvField(joined(spec.products, '|'));
        out += ',';
        if (!confidential) out += std::to_string(report.features.size());
        out += ',';
        out += tenthsText(percentOf(static_cast<long long>(report.features.size()), ref));
        out += ',';
        if (!confidential) out += std::to_string(report.independent);
        out += ',';
        if (!confidential) out += std::to_string(report.dependent);
        out += ',';
        if (!confidential) out += std::to_string(report.mixed);
        out += ',';
        out += tenthsText(percentOf(report.independent, ref));
        out += ',';
        out += tenthsText(percentOf(report.dependent, ref));
        out += ',';
        out += tenthsText(percentOf(report.mixed, ref));
        out += '\n';
    }
    return out;
}

std::string aggregateJsonText(
    const AggregateReport& global, const OccurrenceTable& occurrence,
    const std::vector<std::pair<ClusterSpec, AggregateReport>>& clusters,
    bool confidential) {
    json doc;
    doc["schema_version"] = kResultSchemaVersion;
    if (!confidential) doc["reference_count"] = global.referenceCount;

    json summary;
    if (!confidential) {
        summary["independent"] = global.independent;
        summary["dependent"] = global.dependent;
        summary["mixed"] = global.mixed;
    }
    long long ref = global.referenceCount;
    summary["independent_percent"] = percentOf(global.independent, ref);
    summary["dependent_percent"] = percentOf(global.dependent, ref);
    summary["mixed_percent"] = percentOf(global.mixed, ref);
    doc["summary"] = std::move(summary);

    json products = json::array();
    for (const auto& p : global.products) {
        json row;
        row["product"] = p.product;
        if (!confidential) {
            row["features"] = p.features;
            row["independent"] = p.independent;
            row["dependent"] = p.dependent;
        }
        row["share_of_reference_percent"] = percentOf(p.features, ref);
        row["dependent_ratio_percent"] = p.dependentRatioPercent;
        products.push_back(std::move(row));
    }
    doc["products"] = std::move(products);

    json features = json::array();
    for (const auto& f : global.features) {
        json row;
        row["feature"] = f.feature;
        row["category"] = aggregateCategoryName(f.category);
        row["occurrence_count"] = f.products.size();
        row["products"] = f.products;
        json per = json::object();
        for (const auto& [product, cat] : f.perProduct) per[product] = categoryName(cat);
        row["per_product"] = std::move(per);
        row["effects_equivalent"] = f.effectsEquivalent;
        if (f.category != AggregateCategory::Mixed) {
            json effects = json::object();
            for (const auto& [product, eff] : f.effects) effects[product] = eff.key();
            row["effects"] = std::move(effects);
        }
        features.push_back(std::move(row));
    }
    doc["features"] = std::move(features);

    json occ = json::array();
    for (const auto& cell : occurrence.cells) {
        json row;
        row["count"] = cell.count;
        row["category"] = aggregateCategoryName(cell.category);
        if (!confidential) row["features"] = cell.features;
        row["percent"] = cell.percent;
        occ.push_back(std::move(row));
    }
    doc["occurrence"] = std::move(occ);

    json cl = json::array();
    for (const auto& [spec, report] : clusters) {
        json row;
        row["cluster"] = spec.name;
        row["products"] = spec.products;
        if (!confidential) {
            row["features"] = report.features.size();
            row["independent"] = report.independent;
            row["dependent"] = report.dependent;
            row["mixed"] = report.mixed;
        }
        row["percent_of_reference"] =
            percentOf(static_cast<long long>(report.features.size()), ref);
        row["independent_percent"] = percentOf(report.independent, ref);
        row["dependent_percent"] = percentOf(report.dependent, ref);
        row["mixed_percent"] = percentOf(report.mixed, ref);
        cl.push_back(std::move(row));
    }
    doc["clusters"] = std::move(cl);

    return doc.dump(2) + "\n";
}

}  // namespace vareffect
