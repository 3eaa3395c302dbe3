#include "capa/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "capa/error.hpp"
#include "capa/jsonl.hpp"
#include "capa/rng.hpp"

namespace capa::scheduler {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 8> kSourceNames{"dim1",         "dim2",           "dim3",       "dim4",
                                                  "refill_union", "refill_easiest", "warm_start", "full"};

// Row indices ordered by mean value across dimensions, ties by id.
std::vector<std::size_t> easiest_first(const ScoreMatrix& scores, ValueView view) {
  const Nx4Matrix& m = scores.view(view);
  std::vector<double> mean(scores.size());
  for (std::size_t r = 0; r < scores.size(); ++r) mean[r] = (m(r, 0) + m(r, 1) + m(r, 2) + m(r, 3)) / 4.0;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mean[a] != mean[b]) return mean[a] < mean[b];
    return scores.sample_ids[a] < scores.sample_ids[b];
  });
  return order;
}

StagePlan full_plan(const ScoreMatrix& scores, int stage) {
  StagePlan plan;
  plan.stage = stage;
  plan.bounds = {1.0, 1.0, 1.0, 1.0};
  plan.ratios = {0.25, 0.25, 0.25, 0.25};
  plan.sampled_ids = scores.sample_ids;
  std::sort(plan.sampled_ids.begin(), plan.sampled_ids.end());
  plan.sources.assign(plan.sampled_ids.size(), Source::full);
  plan.target_size = plan.sampled_ids.size();
  plan.complete = true;
  return plan;
}

Row4 normalized_ratios(const Row4& rho) {
  double total = 0.0;
  for (double r : rho) total += std::abs(r);
  Row4 out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = total > 0.0 ? std::abs(rho[i]) / total : 0.25;
  return out;
}

}  // namespace

void CurriculumConfig::validate() const {
  if (!(gamma > 1.0)) throw ValidationError("curriculum: gamma must exceed 1");
  if (pace_iterations < 1) throw ValidationError("curriculum: pace_iterations must be positive");
  if (k == 0) throw ValidationError("curriculum: k must be positive");
  if (initial_fraction && !(*initial_fraction > 0.0 && *initial_fraction <= 1.0))
    throw ValidationError("curriculum: initial_fraction must lie in (0, 1]");
}

json CurriculumConfig::to_json() const {
  json j{{"gamma", gamma}, {"pace_iterations", pace_iterations}, {"k", k}, {"seed", seed},
         {"value_view", capa::to_string(value_view)}};
  j["initial_fraction"] = initial_fraction ? json(*initial_fraction) : json(nullptr);
  return j;
}

CurriculumConfig CurriculumConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("curriculum config must be an object");
  CurriculumConfig c;
  try {
    c.gamma = j.value("gamma", c.gamma);
    c.pace_iterations = j.value("pace_iterations", c.pace_iterations);
    c.k = j.value("k", c.k);
    c.seed = j.value("seed", c.seed);
    c.value_view = parse_value_view(j.value("value_view", std::string("rescaled")));
    if (j.contains("initial_fraction") && !j["initial_fraction"].is_null())
      c.initial_fraction = j["initial_fraction"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("curriculum config: ") + e.what());
  }
  if (c.value_view == ValueView::whitened) throw ValidationError("curriculum config: value_view must be rescaled or raw");
  c.validate();
  return c;
}

std::string to_string(Source s) { return kSourceNames[static_cast<std::size_t>(s)]; }

Source parse_source(const std::string& s) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i)
    if (s == kSourceNames[i]) return static_cast<Source>(i);
  throw ValidationError("unknown sample source: " + s);
}

json StagePlan::to_json() const {
  std::vector<std::string> src;
  for (auto s : sources) src.push_back(scheduler::to_string(s));
  return json{{"stage", stage},
              {"bounds", bounds},
              {"ratios", ratios},
              {"target_size", target_size},
              {"candidate_counts", candidate_counts},
              {"short", short_of_target},
              {"complete", complete},
              {"sampled_ids", sampled_ids},
              {"sources", src}};
}

StagePlan StagePlan::from_json(const json& j) {
  StagePlan p;
  try {
    p.stage = j.at("stage").get<int>();
    p.bounds = j.at("bounds").get<Row4>();
    p.ratios = j.at("ratios").get<Row4>();
    p.target_size = j.at("target_size").get<std::size_t>();
    p.sampled_ids = j.at("sampled_ids").get<std::vector<std::string>>();
    if (j.contains("candidate_counts")) p.candidate_counts = j["candidate_counts"].get<std::array<std::size_t, 4>>();
    p.short_of_target = j.value("short", false);
    p.complete = j.value("complete", false);
    if (j.contains("sources"))
      for (const auto& s : j["sources"]) p.sources.push_back(parse_source(s.get<std::string>()));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("stage manifest: ") + e.what());
  }
  if (!p.sources.empty() && p.sources.size() != p.sampled_ids.size())
    throw ValidationError("stage manifest: sources and sampled_ids differ in length");
  if (std::set<std::string>(p.sampled_ids.begin(), p.sampled_ids.end()).size() != p.sampled_ids.size())
    throw ValidationError("stage manifest: duplicate sampled ids");
  return p;
}

void save_plan(const StagePlan& plan, const std::filesystem::path& path) { jsonl::write_json(path, plan.to_json()); }

StagePlan load_plan(const std::filesystem::path& path) { return StagePlan::from_json(jsonl::read_json(path)); }

Row4 next_bounds(const assessment::CapabilityState& state, double gamma) {
  if (!(gamma > 1.0)) throw ValidationError("next_bounds: gamma must exceed 1");
  Row4 b{};
  for (std::size_t i = 0; i < 4; ++i) b[i] = std::min(gamma * state.c[i], 1.0);
  return b;
}

CandidateSets build_candidates(const ScoreMatrix& scores, const Row4& bounds, ValueView view) {
  const Nx4Matrix& m = scores.view(view);
  CandidateSets out;
  for (std::size_t d = 0; d < 4; ++d) {
    for (std::size_t r = 0; r < scores.size(); ++r)
      if (m(r, d) < bounds[d]) out[d].push_back(scores.sample_ids[r]);
    std::sort(out[d].begin(), out[d].end());
  }
  return out;
}

std::array<std::size_t, 4> quotas(const Row4& weights, std::size_t total) {
  double sum = 0.0;
  for (double w : weights) sum += std::abs(w);
  if (!(sum > 0.0)) throw ValidationError("sampling ratios are all zero");
  std::array<std::size_t, 4> q{};
  std::array<double, 4> rem{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = std::abs(weights[i]) / sum * static_cast<double>(total);
    q[i] = static_cast<std::size_t>(std::floor(exact));
    rem[i] = exact - static_cast<double>(q[i]);
    assigned += q[i];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % 4) {
    if (weights[order[i]] == 0.0) continue;
    ++q[order[i]];
    ++assigned;
  }
  return q;
}

StagePlan sample_stage(const CandidateSets& candidates, const Row4& rho, std::size_t prev_size, std::size_t total,
                       std::uint64_t seed) {
  if (prev_size == 0) throw ValidationError("sample_stage: previous stage size must be positive");
  StagePlan plan;
  plan.candidate_ids = candidates;
  for (std::size_t d = 0; d < 4; ++d) plan.candidate_counts[d] = candidates[d].size();
  plan.ratios = normalized_ratios(rho);
  plan.target_size = std::min(2 * prev_size, total);
  const auto q = quotas(rho, plan.target_size);

  rng::Engine g(seed);
  std::unordered_set<std::string> taken;
  for (std::size_t d = 0; d < 4; ++d) {
    std::vector<std::string> pool = candidates[d];
    rng::shuffle(pool, g);
    std::size_t got = 0;
    for (const auto& id : pool) {
      if (got == q[d]) break;
      if (!taken.insert(id).second) continue;
      plan.sampled_ids.push_back(id);
      plan.sources.push_back(dimension_source(d));
      ++got;
    }
  }
  if (plan.sampled_ids.size() < plan.target_size) {
    std::set<std::string> uni;
    for (const auto& c : candidates) uni.insert(c.begin(), c.end());
    std::vector<std::string> rest;
    for (const auto& id : uni)
      if (!taken.count(id)) rest.push_back(id);
    rng::shuffle(rest, g);
    for (const auto& id : rest) {
      if (plan.sampled_ids.size() == plan.target_size) break;
      taken.insert(id);
      plan.sampled_ids.push_back(id);
      plan.sources.push_back(Source::refill_union);
    }
  }
  plan.short_of_target = plan.sampled_ids.size() < plan.target_size;
  return plan;
}

std::size_t warm_start_size(const CurriculumConfig& config, std::size_t n) {
  if (n == 0) throw ValidationError("warm start: empty training set");
  std::size_t n0;
  if (config.initial_fraction) {
    n0 = static_cast<std::size_t>(std::ceil(*config.initial_fraction * static_cast<double>(n) - 1e-9));
  } else {
    const double halvings = std::ceil(std::log2(static_cast<double>(n) / 256.0));
    const auto by_doubling = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / std::exp2(halvings)));
    n0 = std::max(8 * config.k, by_doubling);
  }
  return std::clamp<std::size_t>(n0, 1, n);
}

StagePlan advance(const CurriculumConfig& config, const assessment::CapabilityState* state,
                  const ScoreMatrix& train_scores, const StagePlan* prev) {
  config.validate();
  const std::size_t n = train_scores.size();
  if (n == 0) throw ValidationError("advance: empty training scores");

  if (prev == nullptr) {
    const std::size_t n0 = warm_start_size(config, n);
    if (n0 == n) return full_plan(train_scores, 0);
    StagePlan plan;
    plan.ratios = {0.25, 0.25, 0.25, 0.25};
    plan.target_size = n0;
    const auto order = easiest_first(train_scores, config.value_view);
    for (std::size_t i = 0; i < n0; ++i) {
      plan.sampled_ids.push_back(train_scores.sample_ids[order[i]]);
      plan.sources.push_back(Source::warm_start);
    }
    return plan;
  }

  const int stage = prev->stage + 1;
  if (prev->complete || prev->sampled_ids.size() >= n) return full_plan(train_scores, stage);
  if (state == nullptr) throw ValidationError("advance: a capability state is required after the warm start");

  const Row4 bounds = next_bounds(*state, config.gamma);
  const auto candidates = build_candidates(train_scores, bounds, config.value_view);
  StagePlan plan = sample_stage(candidates, state->rho, prev->sampled_ids.size(), n,
                                rng::splitmix64(config.seed ^ static_cast<std::uint64_t>(stage)));
  plan.stage = stage;
  plan.bounds = bounds;

  if (plan.sampled_ids.size() < plan.target_size) {
    std::unordered_set<std::string> taken(plan.sampled_ids.begin(), plan.sampled_ids.end());
    for (std::size_t r : easiest_first(train_scores, config.value_view)) {
      if (plan.sampled_ids.size() == plan.target_size) break;
      const auto& id = train_scores.sample_ids[r];
      if (taken.count(id)) continue;
      plan.sampled_ids.push_back(id);
      plan.sources.push_back(Source::refill_easiest);
    }
  }
  plan.complete = plan.sampled_ids.size() == n;
  return plan;
}

std::vector<std::string> al_query(const ScoreMatrix& unlabeled, const assessment::CapabilityState& state,
                                  std::size_t budget, std::uint64_t seed, double gamma, ValueView view) {
  const std::size_t n = unlabeled.size();
  if (budget > n)
    throw ValidationError("al_query: budget " + std::to_string(budget) + " exceeds pool of " + std::to_string(n));
  if (budget == n) {
    auto all = unlabeled.sample_ids;
    std::sort(all.begin(), all.end());
    return all;
  }
  const Nx4Matrix& m = unlabeled.view(view);
  const Row4 bounds = next_bounds(state, gamma);

  double rho_total = 0.0;
  for (double r : state.rho) rho_total += std::abs(r);
  std::array<std::size_t, 4> q{};
  if (rho_total > 0.0) q = quotas(state.rho, budget);

  std::vector<std::string> out;
  std::unordered_set<std::string> taken;
  for (std::size_t d = 0; d < 4; ++d) {
    if (q[d] == 0) continue;
    const double reach = std::min(gamma * bounds[d], 1.0);
    std::vector<std::size_t> eligible;
    for (std::size_t r = 0; r < n; ++r)
      if (m(r, d) < reach) eligible.push_back(r);
    std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
      const double da = std::abs(m(a, d) - bounds[d]);
      const double db = std::abs(m(b, d) - bounds[d]);
      if (da != db) return da < db;
      return unlabeled.sample_ids[a] < unlabeled.sample_ids[b];
    });
    std::size_t got = 0;
    for (std::size_t r : eligible) {
      if (got == q[d]) break;
      if (!taken.insert(unlabeled.sample_ids[r]).second) continue;
      out.push_back(unlabeled.sample_ids[r]);
      ++got;
    }
  }
  if (out.size() < budget) {
    std::vector<std::string> rest;
    for (const auto& id : unlabeled.sample_ids)
      if (!taken.count(id)) rest.push_back(id);
    std::sort(rest.begin(), rest.end());
    rng::Engine g(seed);
    rng::shuffle(rest, g);
    rest.resize(budget - out.size());
    out.insert(out.end(), rest.begin(), rest.end());
  }
  return out;
}

}  // namespace capa::scheduler
