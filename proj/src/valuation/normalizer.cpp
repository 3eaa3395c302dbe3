#include "capa/valuation/normalizer.hpp"

#include <algorithm>
#include <cmath>

#include "capa/error.hpp"

namespace capa::valuation {

using metrics::Orientation;
using nlohmann::json;

double EmpiricalDistribution::cdf(double raw) const {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), raw);
  const auto hi = std::upper_bound(lo, sorted.end(), raw);
  const double below = static_cast<double>(lo - sorted.begin());
  const double equal = static_cast<double>(hi - lo);
  const double n = static_cast<double>(sorted.size());
  const double p = (below + 0.5 * equal) / n;
  return orientation == Orientation::higher_is_harder ? p : 1.0 - p;
}

json NormalizationModel::to_json() const {
  json j = json::object();
  for (const auto& [id, d] : metrics)
    j[id] = json{{"orientation", metrics::to_string(d.orientation)}, {"sorted", d.sorted}};
  return json{{"metrics", std::move(j)}};
}

NormalizationModel NormalizationModel::from_json(const json& j) {
  NormalizationModel m;
  try {
    for (const auto& [id, d] : j.at("metrics").items()) {
      EmpiricalDistribution dist;
      dist.sorted = d.at("sorted").get<std::vector<double>>();
      const auto o = d.at("orientation").get<std::string>();
      dist.orientation = o == "lower_is_harder" ? Orientation::lower_is_harder : Orientation::higher_is_harder;
      if (dist.sorted.empty() || !std::is_sorted(dist.sorted.begin(), dist.sorted.end()))
        throw ValidationError("normalizer: distribution for " + id + " is empty or unsorted");
      m.metrics.emplace(id, std::move(dist));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("normalizer: ") + e.what());
  }
  return m;
}

NormalizationModel fit_normalizer(const std::map<std::string, std::vector<double>>& metric_columns,
                                  const metrics::MetricRegistry& registry) {
  NormalizationModel model;
  for (const auto& [id, column] : metric_columns) {
    const auto* spec = registry.find(id);
    if (!spec) throw ValidationError("fit_normalizer: metric '" + id + "' is not registered");
    if (column.empty()) throw ValidationError("fit_normalizer: empty column for metric '" + id + "'");
    for (double v : column)
      if (!std::isfinite(v)) throw ValidationError("fit_normalizer: non-finite value in metric '" + id + "'");
    EmpiricalDistribution dist{column, spec->orientation};
    std::sort(dist.sorted.begin(), dist.sorted.end());
    model.metrics.emplace(id, std::move(dist));
  }
  return model;
}

double normalize(double raw, const std::string& metric, const NormalizationModel& model) {
  auto it = model.metrics.find(metric);
  if (it == model.metrics.end()) throw ValidationError("normalize: no fitted distribution for '" + metric + "'");
  return it->second.cdf(raw);
}

std::map<std::string, std::vector<double>> metric_columns(const std::vector<metrics::MetricVector>& vectors,
                                                          std::optional<Split> split) {
  std::map<std::string, std::vector<double>> columns;
  for (const auto& v : vectors) {
    if (split && v.split != *split) continue;
    for (const auto& [id, value] : v.values) columns[id].push_back(value);
  }
  return columns;
}

CapabilityValues capability_values(const metrics::MetricVector& vec, const NormalizationModel& model,
                                   const metrics::MetricRegistry& registry) {
  CapabilityValues out;
  for (int dim = 1; dim <= static_cast<int>(metrics::kDimensions); ++dim) {
    double total = 0.0;
    std::size_t used = 0;
    for (const auto* spec : registry.dimension(dim)) {
      auto it = vec.values.find(spec->id);
      if (it == vec.values.end()) {
        out.dropped.push_back(spec->id);
        continue;
      }
      total += normalize(it->second, spec->id, model);
      ++used;
    }
    if (used == 0)
      throw ValidationError("capability_values: sample " + vec.sample_id + " has no available metric for dimension " +
                            std::to_string(dim));
    out.v[static_cast<std::size_t>(dim - 1)] = total / static_cast<double>(used);
  }
  return out;
}

ScoreMatrix score_vectors(const std::vector<metrics::MetricVector>& vectors, const NormalizationModel& model,
                          const metrics::MetricRegistry& registry) {
  ScoreMatrix m;
  for (const auto& v : vectors) {
    m.sample_ids.push_back(v.sample_id);
    m.splits.push_back(v.split);
    m.raw_v.push_back(capability_values(v, model, registry).v);
  }
  return m;
}

}  // namespace capa::valuation
