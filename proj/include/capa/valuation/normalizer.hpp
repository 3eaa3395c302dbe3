#pragma once
// Empirical-CDF normalization of raw metrics and their aggregation into
// per-dimension capability values.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/metrics/metric_vector.hpp"
#include "capa/metrics/registry.hpp"
#include "capa/valuation/matrix.hpp"

namespace capa::valuation {

struct EmpiricalDistribution {
  std::vector<double> sorted;  // ascending, non-empty
  metrics::Orientation orientation = metrics::Orientation::higher_is_harder;

  /// Mid-rank CDF: (#below + #equal / 2) / n, complemented for lower_is_harder.
  double cdf(double raw) const;
};

struct NormalizationModel {
  std::map<std::string, EmpiricalDistribution> metrics;

  nlohmann::json to_json() const;
  static NormalizationModel from_json(const nlohmann::json& j);
};

/// Throws ValidationError naming the metric for an empty or non-finite column,
/// or a column id the registry does not know.
NormalizationModel fit_normalizer(const std::map<std::string, std::vector<double>>& metric_columns,
                                  const metrics::MetricRegistry& registry);

double normalize(double raw, const std::string& metric, const NormalizationModel& model);

/// Present values per metric id, over vectors of the given split (all splits when nullopt).
std::map<std::string, std::vector<double>> metric_columns(const std::vector<metrics::MetricVector>& vectors,
                                                          std::optional<Split> split = Split::train);

struct CapabilityValues {
  Row4 v{};
  std::vector<std::string> dropped;  // incomplete metrics left out of their dimension's mean
};

/// v_i = mean of the normalized metrics of dimension i that are present.
/// Throws ValidationError when a dimension has no available metric.
CapabilityValues capability_values(const metrics::MetricVector& vec, const NormalizationModel& model,
                                   const metrics::MetricRegistry& registry);

/// raw_v for every vector, in input order.
ScoreMatrix score_vectors(const std::vector<metrics::MetricVector>& vectors, const NormalizationModel& model,
                          const metrics::MetricRegistry& registry);

}  // namespace capa::valuation
