#include "capa/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "capa/error.hpp"
#include "capa/jsonl.hpp"
#include "capa/valuation/stats.hpp"

namespace capa::assessment {

using nlohmann::json;

namespace {

double log_confidence(const std::optional<double>& x, const char* name, const std::string& id) {
  if (!x) throw ValidationError("sample " + id + ": missing " + name);
  if (!std::isfinite(*x)) throw ValidationError("sample " + id + ": " + name + " is not finite");
  const double v = std::max(*x, kConfidenceFloor);
  return std::log(v);
}

std::optional<double> opt_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ValidationError(std::string("performance record: ") + key + " must be a number");
  return it->get<double>();
}

}  // namespace

double f_logits(const PerformanceRecord& r) {
  if (!std::isfinite(r.f1) || r.f1 < 0.0 || r.f1 > 1.0)
    throw ValidationError("sample " + r.sample_id + ": f1 must lie in [0,1]");
  if (r.style == QuestionStyle::extractive) {
    const double ls = log_confidence(r.slog, "slog", r.sample_id);
    const double le = log_confidence(r.elog, "elog", r.sample_id);
    return r.f1 * ls * le;
  }
  return r.f1 * log_confidence(r.candlog, "candlog", r.sample_id);
}

json to_json(const PerformanceRecord& r) {
  json j{{"sample_id", r.sample_id}, {"f1", r.f1}, {"style", to_string(r.style)}};
  if (r.slog) j["slog"] = *r.slog;
  if (r.elog) j["elog"] = *r.elog;
  if (r.candlog) j["candlog"] = *r.candlog;
  return j;
}

PerformanceRecord performance_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("performance record must be an object");
  PerformanceRecord r;
  try {
    r.sample_id = j.at("sample_id").get<std::string>();
    r.f1 = j.at("f1").get<double>();
    r.style = parse_style(j.value("style", std::string("extractive")));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("performance record: ") + e.what());
  }
  r.slog = opt_number(j, "slog");
  r.elog = opt_number(j, "elog");
  r.candlog = opt_number(j, "candlog");
  f_logits(r);  // validates the record
  return r;
}

std::vector<PerformanceRecord> load_performance(const std::filesystem::path& path) {
  std::vector<PerformanceRecord> out;
  jsonl::for_each_file(path, [&](std::size_t line, const json& j) {
    try {
      out.push_back(performance_from_json(j));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void save_performance(const std::vector<PerformanceRecord>& records, const std::filesystem::path& path) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  jsonl::write_all(path, rows);
}

json CapabilityState::to_json() const {
  return json{{"stage", stage}, {"c", c}, {"rho", rho}, {"topk_mean_f", topk_mean_f}, {"k", k}};
}

CapabilityState CapabilityState::from_json(const json& j) {
  CapabilityState s;
  try {
    s.stage = j.at("stage").get<int>();
    s.c = j.at("c").get<Row4>();
    s.rho = j.at("rho").get<Row4>();
    s.topk_mean_f = j.value("topk_mean_f", Row4{});
    s.k = j.value("k", kDefaultTopK);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("capability state: ") + e.what());
  }
  if (s.k == 0) throw ValidationError("capability state: k must be positive");
  for (double v : s.c)
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("capability state: c must be finite and non-negative");
  return s;
}

std::vector<std::string> topk_subset(const ScoreMatrix& scores, std::size_t dim, std::size_t k, ValueView view) {
  if (dim >= 4) throw ValidationError("topk_subset: dimension out of range");
  const std::size_t n = scores.size();
  if (k == 0 || k > n)
    throw ValidationError("topk_subset: k=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  const Nx4Matrix& m = scores.view(view);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    if (m(a, dim) != m(b, dim)) return m(a, dim) > m(b, dim);
    return scores.sample_ids[a] < scores.sample_ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
  std::vector<std::string> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(scores.sample_ids[order[i]]);
  return ids;
}

Row4 combine_levels(const Row4& rho, const Row4& topk_mean) {
  double total = 0.0;
  for (double r : rho) total += std::abs(r);
  if (!(total > 0.0)) throw ValidationError("degenerate measurement: every partial correlation is zero");
  Row4 c{};
  for (std::size_t i = 0; i < 4; ++i) c[i] = std::abs(rho[i]) / total * topk_mean[i];
  return c;
}

std::vector<double> f_logits_for(const ScoreMatrix& scores, const std::vector<PerformanceRecord>& perf) {
  std::map<std::string, const PerformanceRecord*> by_id;
  for (const auto& r : perf) by_id[r.sample_id] = &r;
  std::vector<double> f;
  f.reserve(scores.size());
  std::vector<std::string> missing;
  for (const auto& id : scores.sample_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing.push_back(id);
      continue;
    }
    f.push_back(f_logits(*it->second));
  }
  if (!missing.empty()) {
    std::string msg = "missing performance records for " + std::to_string(missing.size()) + " samples:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw ValidationError(msg);
  }
  return f;
}

CapabilityState measure_capabilities(const ScoreMatrix& dev_scores, const std::vector<PerformanceRecord>& dev_perf,
                                     std::size_t k, int stage, ValueView view) {
  const std::vector<double> f = f_logits_for(dev_scores, dev_perf);
  const Nx4Matrix& m = dev_scores.view(view);

  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < dev_scores.size(); ++i) row_of[dev_scores.sample_ids[i]] = i;

  CapabilityState state;
  state.stage = stage;
  state.k = k;
  for (std::size_t d = 0; d < 4; ++d) {
    const auto ids = topk_subset(dev_scores, d, k, view);
    double total = 0.0;
    for (const auto& id : ids) total += f[row_of.at(id)];
    state.topk_mean_f[d] = total / static_cast<double>(ids.size());
    state.rho[d] = valuation::partial_correlation(m, f, d);
  }
  state.c = combine_levels(state.rho, state.topk_mean_f);
  return state;
}

}  // namespace capa::assessment
