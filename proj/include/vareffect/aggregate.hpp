#pragma once

#include <map>
#include <string>
#include <vector>

#include "vareffect/feature_effect.hpp"
#include "vareffect/formula.hpp"
#include "vareffect/sat.hpp"

namespace vareffect {

inline constexpr int kResultSchemaVersion = 1;

// One product's classification output, as stored in its result.json.
struct ProductResult {
    std::string product;
    std::vector<FeatureEffectRecord> records;  // sorted by feature
    AxiomSet axioms;
};

std::string resultJsonText(const ProductResult& result,
                           const std::map<std::string, long long>& stats);
ProductResult parseProductResult(const std::string& jsonText);
ProductResult loadProductResult(const std::string& path);

enum class AggregateCategory { Independent, Dependent, Mixed };

const char* aggregateCategoryName(AggregateCategory c);

// Cross-product view of one feature.
struct FeatureAggregate {
    std::string feature;
    std::vector<std::string> products;  // sorted ids of products observing it
    std::map<std::string, FeatureCategory> perProduct;
    AggregateCategory category = AggregateCategory::Dependent;
    // Informational: all per-product effect formulas are SAT-equivalent under
    // the combined axioms. Always true for single-product features.
    bool effectsEquivalent = true;
    std::map<std::string, Formula> effects;  // product -> effect formula
};

struct ProductSummary {
    std::string product;
    int features = 0;
    int independent = 0;
    int dependent = 0;
    double dependentRatioPercent = 0.0;  // dependent / features, tenths
};

struct AggregateReport {
    std::vector<FeatureAggregate> features;  // sorted by feature name
    std::vector<ProductSummary> products;    // sorted by product id
    // Unique features across every analyzed product, the normalization base
    // for all percentages. For cluster reports this stays the global count.
    int referenceCount = 0;
    int independent = 0;
    int dependent = 0;
    int mixed = 0;
};

// Folds per-product categories: MIXED iff products disagree. Throws
// ConfigError on empty input or duplicate product ids.
AggregateReport aggregateCategories(const std::vector<ProductResult>& results);

// Same fold restricted to the named products; features unobserved inside the
// cluster are excluded, but referenceCount stays global. Throws
// UnknownProductError for ids not among the results.
AggregateReport clusterAggregate(const std::vector<ProductResult>& allResults,
                                 const std::vector<std::string>& clusterProducts);

struct OccurrenceCell {
    int count = 0;  // number of products the features occur in
    AggregateCategory category = AggregateCategory::Independent;
    int features = 0;
    double percent = 0.0;  // of referenceCount, tenths
};

// One cell per (occurrence count 1..#products) x category, zero cells
// included. Percentages are rounded to 0.1 with the remainder spread over
// the largest fractional parts, so a full partition sums to exactly 100.0.
struct OccurrenceTable {
    std::vector<OccurrenceCell> cells;
    int referenceCount = 0;
};

OccurrenceTable occurrenceGrouping(const AggregateReport& report);

struct ClusterSpec {
    std::string name;
    std::vector<std::string> products;
};

// CSV with header `cluster,product`, one row per membership; clusters keep
// first-appearance order.
std::vector<ClusterSpec> parseClusters(const std::string& csvText);

std::string aggregateCsvText(const AggregateReport& report, bool confidential);
std::string occurrenceCsvText(const OccurrenceTable& table, bool confidential);
std::string clustersCsvText(
    const std::vector<std::pair<ClusterSpec, AggregateReport>>& clusters,
    bool confidential);
std::string aggregateJsonText(
    const AggregateReport& global, const OccurrenceTable& occurrence,
    const std::vector<std::pair<ClusterSpec, AggregateReport>>& clusters,
    bool confidential);

}  // namespace vareffect
