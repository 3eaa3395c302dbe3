#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "capa/error.hpp"
#include "capa/rng.hpp"
#include "capa/scheduler.hpp"

using namespace capa;
using namespace capa::scheduler;

namespace {

ScoreMatrix uniform_scores(std::size_t n, std::uint64_t seed) {
  rng::Engine g(seed);
  ScoreMatrix m;
  m.raw_v = Nx4Matrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.sample_ids.push_back("t" + std::to_string(1000 + i));
    m.splits.push_back(Split::train);
    for (int c = 0; c < 4; ++c) m.raw_v(i, c) = rng::uniform01(g);
  }
  m.rescaled_v = m.raw_v;
  return m;
}

assessment::CapabilityState state(Row4 c, Row4 rho) {
  assessment::CapabilityState s;
  s.c = c;
  s.rho = rho;
  return s;
}

}  // namespace

TEST_SUITE("scheduler") {

TEST_CASE("bounds grow by gamma and saturate at 1") {
  auto b = next_bounds(state({0.1, 0.4, 0.8, 0}, {1, 1, 1, 1}), 1.5);
  CHECK(b[0] == doctest::Approx(0.15));
  CHECK(b[1] == doctest::Approx(0.6));
  CHECK(b[2] == 1.0);
  CHECK(b[3] == 0.0);
  CHECK_THROWS_AS(next_bounds(state({}, {}), 1.0), ValidationError);
}

TEST_CASE("candidates match a brute-force filter") {
  auto m = uniform_scores(200, 1);
  Row4 bounds{0.2, 0.5, 0.0, 1.0};
  auto sets = build_candidates(m, bounds);
  for (std::size_t d = 0; d < 4; ++d) {
    std::set<std::string> expect;
    for (std::size_t r = 0; r < 200; ++r)
      if (m.raw_v(r, d) < bounds[d]) expect.insert(m.sample_ids[r]);
    CHECK(std::set<std::string>(sets[d].begin(), sets[d].end()) == expect);
    CHECK(std::is_sorted(sets[d].begin(), sets[d].end()));
  }
  CHECK(sets[2].empty());
  CHECK(sets[3].size() == 200);
}

TEST_CASE("largest remainder quotas") {
  CHECK(quotas({1, 1, 1, 1}, 10) == std::array<std::size_t, 4>{3, 3, 2, 2});
  CHECK(quotas({0.5, 0, 0, -0.5}, 7) == std::array<std::size_t, 4>{4, 0, 0, 3});
  CHECK(quotas({0.1, 0.2, 0.3, 0.4}, 0) == std::array<std::size_t, 4>{0, 0, 0, 0});
  CHECK_THROWS_AS(quotas({0, 0, 0, 0}, 3), ValidationError);
  rng::Engine g(3);
  for (int t = 0; t < 200; ++t) {
    Row4 w{rng::uniform01(g), rng::uniform01(g), 0.0, rng::uniform01(g) - 0.5};
    const std::size_t total = rng::below(g, 500);
    auto q = quotas(w, total);
    CHECK(q[0] + q[1] + q[2] + q[3] == total);
    CHECK(q[2] == 0);
    double sum = std::abs(w[0]) + std::abs(w[1]) + std::abs(w[3]);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(static_cast<double>(q[i]) - std::abs(w[i]) / sum * total) < 1.0 + 1e-9);
  }
}

TEST_CASE("stage sampling invariants") {
  auto m = uniform_scores(300, 2);
  auto sets = build_candidates(m, {0.3, 0.5, 0.2, 0.7});
  auto plan = sample_stage(sets, {0.4, -0.1, 0.2, 0.3}, 40, 300, 99);
  CHECK(plan.target_size == 80);
  CHECK(plan.sampled_ids.size() == 80);
  CHECK_FALSE(plan.short_of_target);
  std::set<std::string> uniq(plan.sampled_ids.begin(), plan.sampled_ids.end());
  CHECK(uniq.size() == 80);
  for (std::size_t i = 0; i < plan.sampled_ids.size(); ++i) {
    if (!is_dimension_source(plan.sources[i])) continue;
    const auto& pool = sets[static_cast<std::size_t>(plan.sources[i])];
    CHECK(std::binary_search(pool.begin(), pool.end(), plan.sampled_ids[i]));
  }
  CHECK(plan.ratios[0] == doctest::Approx(0.4));
  CHECK(plan.ratios[1] == doctest::Approx(0.1));
  CHECK(sample_stage(sets, {0.4, -0.1, 0.2, 0.3}, 40, 300, 99) == plan);
  CHECK_FALSE(sample_stage(sets, {0.4, -0.1, 0.2, 0.3}, 40, 300, 100) == plan);

  CandidateSets tiny{{{"a", "b"}, {"b"}, {}, {"c"}}};
  auto small = sample_stage(tiny, {1, 1, 1, 1}, 4, 100, 1);
  CHECK(small.target_size == 8);
  CHECK(small.sampled_ids.size() == 3);
  CHECK(small.short_of_target);
}

TEST_CASE("warm start size") {
  CurriculumConfig cfg;
  CHECK(warm_start_size(cfg, 1600) == 256);
  CHECK(warm_start_size(cfg, 100) == 100);
  CHECK(warm_start_size(cfg, 100000) == 256);
  cfg.k = 8;
  CHECK(warm_start_size(cfg, 1000) == 250);
  cfg.initial_fraction = 0.125;
  CHECK(warm_start_size(cfg, 48) == 6);
  CHECK(warm_start_size(cfg, 50) == 7);
  cfg.initial_fraction = 1e-9;
  CHECK(warm_start_size(cfg, 50) == 1);
}

TEST_CASE("advance doubles until the training set is covered") {
  auto m = uniform_scores(100, 4);
  CurriculumConfig cfg;
  cfg.initial_fraction = 0.08;
  cfg.seed = 7;
  auto st = state({0.2, 0.2, 0.2, 0.2}, {0.3, 0.3, 0.2, 0.2});
  auto plan = advance(cfg, nullptr, m, nullptr);
  CHECK(plan.stage == 0);
  CHECK(plan.sampled_ids.size() == 8);
  for (auto s : plan.sources) CHECK(s == Source::warm_start);
  std::vector<std::size_t> sizes{8};
  for (int i = 0; i < 6; ++i) {
    plan = advance(cfg, &st, m, &plan);
    CHECK(plan.stage == i + 1);
    sizes.push_back(plan.sampled_ids.size());
  }
  CHECK(sizes == std::vector<std::size_t>{8, 16, 32, 64, 100, 100, 100});
  CHECK(plan.complete);

  StagePlan prev;
  prev.sampled_ids = {"t1000"};
  CHECK_THROWS_AS(advance(cfg, nullptr, m, &prev), ValidationError);
}

TEST_CASE("warm start takes the easiest samples") {
  auto m = uniform_scores(64, 5);
  CurriculumConfig cfg;
  cfg.initial_fraction = 0.25;
  auto plan = advance(cfg, nullptr, m, nullptr);
  std::vector<std::pair<double, std::string>> by_mean;
  for (std::size_t r = 0; r < 64; ++r) {
    auto row = m.raw_v.row(r);
    by_mean.push_back({(row[0] + row[1] + row[2] + row[3]) / 4, m.sample_ids[r]});
  }
  std::sort(by_mean.begin(), by_mean.end());
  std::set<std::string> expect;
  for (int i = 0; i < 16; ++i) expect.insert(by_mean[i].second);
  CHECK(std::set<std::string>(plan.sampled_ids.begin(), plan.sampled_ids.end()) == expect);
}

TEST_CASE("plan manifest round trip") {
  auto m = uniform_scores(50, 6);
  CurriculumConfig cfg;
  cfg.initial_fraction = 0.1;
  auto st = state({0.3, 0.3, 0.3, 0.3}, {0.1, 0.2, 0.3, 0.4});
  auto p0 = advance(cfg, nullptr, m, nullptr);
  auto p1 = advance(cfg, &st, m, &p0);
  auto path = std::filesystem::temp_directory_path() / "capa_plan_rt.json";
  save_plan(p1, path);
  auto back = load_plan(path);
  CHECK(back.to_json() == p1.to_json());
  CHECK(back.sampled_ids == p1.sampled_ids);
  CHECK(back.sources == p1.sources);
  std::filesystem::remove(path);
}

TEST_CASE("curriculum config validation and json") {
  CurriculumConfig cfg;
  cfg.validate();
  auto back = CurriculumConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.gamma = 2;
  cfg.initial_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  CHECK_THROWS_AS(CurriculumConfig::from_json({{"value_view", "whitened"}}), ValidationError);
}

TEST_CASE("active-learning query picks the samples nearest the boundary") {
  auto m = uniform_scores(400, 8);
  auto st = state({0.3, 0.1, 0.1, 0.1}, {0.8, 0, 0, 0});
  auto ids = al_query(m, st, 20, 1, 1.5);
  REQUIRE(ids.size() == 20);
  const double bound = 0.45;
  const double reach = std::min(1.5 * bound, 1.0);
  std::vector<std::pair<double, std::string>> near;
  for (std::size_t r = 0; r < 400; ++r)
    if (m.raw_v(r, 0) < reach) near.push_back({std::abs(m.raw_v(r, 0) - bound), m.sample_ids[r]});
  std::sort(near.begin(), near.end());
  for (int i = 0; i < 20; ++i) CHECK(ids[i] == near[i].second);
}

TEST_CASE("active-learning query edge cases") {
  auto m = uniform_scores(30, 9);
  auto st = state({0.2, 0.2, 0.2, 0.2}, {0.3, 0.3, 0.2, 0.2});
  auto all = al_query(m, st, 30, 1);
  CHECK(std::is_sorted(all.begin(), all.end()));
  CHECK(all.size() == 30);
  CHECK_THROWS_AS(al_query(m, st, 31, 1), ValidationError);
  auto some = al_query(m, st, 12, 5);
  CHECK(std::set<std::string>(some.begin(), some.end()).size() == 12);
  CHECK(al_query(m, st, 12, 5) == some);
  auto flat = al_query(m, state({0.2, 0.2, 0.2, 0.2}, {0, 0, 0, 0}), 5, 3);
  CHECK(std::set<std::string>(flat.begin(), flat.end()).size() == 5);
}

}
