#pragma once
// Performance signal from logged model outcomes and the per-dimension
// capability levels derived from it.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/valuation/matrix.hpp"

namespace capa::assessment {

// Confidence values are clamped here before taking logs, so ln() stays positive.
inline constexpr double kConfidenceFloor = 1.0 + 1e-6;
inline constexpr std::size_t kDefaultTopK = 32;

struct PerformanceRecord {
  std::string sample_id;
  double f1 = 0.0;  // accuracy in {0,1} for multiple choice
  QuestionStyle style = QuestionStyle::extractive;
  std::optional<double> slog;
  std::optional<double> elog;
  std::optional<double> candlog;
};

/// extractive: f1·ln(slog)·ln(elog); multiple choice: f1·ln(candlog).
/// Throws ValidationError when f1 is outside [0,1] or a confidence the style needs is missing or not finite.
double f_logits(const PerformanceRecord& record);

nlohmann::json to_json(const PerformanceRecord& r);
/// A stored f_logits field is ignored; it is always recomputed.
PerformanceRecord performance_from_json(const nlohmann::json& j);
std::vector<PerformanceRecord> load_performance(const std::filesystem::path& path);
void save_performance(const std::vector<PerformanceRecord>& records, const std::filesystem::path& path);

struct CapabilityState {
  int stage = 0;
  Row4 c{};
  Row4 rho{};
  Row4 topk_mean_f{};
  std::size_t k = kDefaultTopK;

  nlohmann::json to_json() const;
  static CapabilityState from_json(const nlohmann::json& j);
  bool operator==(const CapabilityState&) const = default;
};

/// Ids of the k largest values in column dim (0-based); ties go to the smaller id.
/// Throws ValidationError when k > N or k == 0.
std::vector<std::string> topk_subset(const ScoreMatrix& scores, std::size_t dim, std::size_t k,
                                     ValueView view = ValueView::rescaled);

/// c_i = |ρ_i| / Σ|ρ| · topk_mean_i. Throws ValidationError when every ρ is zero.
Row4 combine_levels(const Row4& rho, const Row4& topk_mean);

/// ρ is taken over the whole dev set, the level over each dimension's top-k subset.
/// Throws ValidationError listing dev ids without a performance record.
CapabilityState measure_capabilities(const ScoreMatrix& dev_scores, const std::vector<PerformanceRecord>& dev_perf,
                                     std::size_t k = kDefaultTopK, int stage = 0,
                                     ValueView view = ValueView::rescaled);

/// F_logits per row of scores, in row order. Throws like measure_capabilities on missing ids.
std::vector<double> f_logits_for(const ScoreMatrix& scores, const std::vector<PerformanceRecord>& perf);

}  // namespace capa::assessment
