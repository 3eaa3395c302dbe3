#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "capa/corpus.hpp"
#include "capa/metrics/registry.hpp"

namespace capa::metrics {

struct MetricVector {
  std::string sample_id;
  Split split = Split::train;
  std::map<std::string, double> values;    // present values only, all finite
  std::map<std::string, bool> complete;    // one flag per registered metric

  bool is_complete(const std::string& id) const;
  bool operator==(const MetricVector&) const = default;
};

/// Native metrics are computed on the registry scope text; dataset_field
/// metrics are copied from the sample; external metrics are taken from the
/// merged features. A metric that is undefined on this sample (empty scope
/// text, missing field or feature) is left out and flagged incomplete.
MetricVector compute_metric_vector(const Sample& sample, const MetricRegistry& registry);

nlohmann::json to_json(const MetricVector& v);
MetricVector metric_vector_from_json(const nlohmann::json& j);

}  // namespace capa::metrics
