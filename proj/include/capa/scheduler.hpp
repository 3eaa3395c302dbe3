#pragma once
// Capability-bounded curriculum: bound growth, candidate pools, staged
// sampling in |ρ| proportion, and the boundary-seeking active-learning query.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/assessment.hpp"
#include "capa/valuation/matrix.hpp"

namespace capa::scheduler {

struct CurriculumConfig {
  double gamma = 1.5;
  int pace_iterations = 1000;
  std::size_t k = assessment::kDefaultTopK;
  std::optional<double> initial_fraction;  // default: see warm_start_size
  std::uint64_t seed = 0;
  ValueView value_view = ValueView::rescaled;

  /// Throws ValidationError on gamma <= 1, pace < 1, k == 0 or a fraction outside (0, 1].
  void validate() const;
  nlohmann::json to_json() const;
  static CurriculumConfig from_json(const nlohmann::json& j);
};

// Where a sampled id came from. Dimension draws satisfy that dimension's bound.
enum class Source : std::uint8_t { dim1, dim2, dim3, dim4, refill_union, refill_easiest, warm_start, full };
std::string to_string(Source s);
Source parse_source(const std::string& s);
inline Source dimension_source(std::size_t d) { return static_cast<Source>(d); }
inline bool is_dimension_source(Source s) { return static_cast<int>(s) < 4; }

using CandidateSets = std::array<std::vector<std::string>, 4>;

struct StagePlan {
  int stage = 0;
  Row4 bounds{};
  CandidateSets candidate_ids;  // in memory only
  std::array<std::size_t, 4> candidate_counts{};
  std::vector<std::string> sampled_ids;
  std::vector<Source> sources;  // parallel to sampled_ids
  Row4 ratios{};
  std::size_t target_size = 0;
  bool short_of_target = false;  // the candidate union could not fill target_size
  bool complete = false;         // the plan spans the whole training set

  /// Stage manifest. Candidate lists are summarized as counts.
  nlohmann::json to_json() const;
  static StagePlan from_json(const nlohmann::json& j);
  bool operator==(const StagePlan&) const = default;
};

void save_plan(const StagePlan& plan, const std::filesystem::path& path);
StagePlan load_plan(const std::filesystem::path& path);

/// bound_i = min(γ·c_i, 1).
Row4 next_bounds(const assessment::CapabilityState& state, double gamma);

/// D_i = ids with v_i < bound_i, sorted by id.
CandidateSets build_candidates(const ScoreMatrix& scores, const Row4& bounds, ValueView view = ValueView::rescaled);

/// Largest-remainder split of total over |weights|; remainder ties go to the lower index.
/// Throws ValidationError when every weight is zero.
std::array<std::size_t, 4> quotas(const Row4& weights, std::size_t total);

/// target = min(2·prev_size, total). Quotas from |ρ| drawn without replacement
/// from each D_i, duplicates skipped, shortfall refilled uniformly from the union.
StagePlan sample_stage(const CandidateSets& candidates, const Row4& rho, std::size_t prev_size, std::size_t total,
                       std::uint64_t seed);

/// N0 = max(8k, ⌈N / 2^⌈log2(N/256)⌉⌉) capped at N, or ⌈f·N⌉ with an explicit fraction.
std::size_t warm_start_size(const CurriculumConfig& config, std::size_t n);

/// Without prev: warm-start plan of the lowest mean-v samples. Otherwise
/// bounds → candidates → sample_stage, topped up with the easiest unselected
/// samples so sizes follow min(2·prev, N) exactly.
StagePlan advance(const CurriculumConfig& config, const assessment::CapabilityState* state,
                  const ScoreMatrix& train_scores, const StagePlan* prev);

/// Boundary-seeking query over an unlabeled pool. Returns budget ids, no duplicates.
/// Throws ValidationError when budget exceeds the pool.
std::vector<std::string> al_query(const ScoreMatrix& unlabeled, const assessment::CapabilityState& state,
                                  std::size_t budget, std::uint64_t seed, double gamma = 1.5,
                                  ValueView view = ValueView::rescaled);

}  // namespace capa::scheduler
