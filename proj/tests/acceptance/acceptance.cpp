// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "capa/assessment.hpp"
#include "capa/cli.hpp"
#include "capa/corpus.hpp"
#include "capa/metrics/metric_vector.hpp"
#include "capa/rng.hpp"
#include "capa/scheduler.hpp"
#include "capa/simlab.hpp"
#include "capa/valuation/stats.hpp"
#include "capa/valuation/whitening.hpp"

using namespace capa;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = CAPA_FIXTURES;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failed = 0;

void report(int id, const std::string& name, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = Clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double secs = seconds_since(t0);
  if (!v.pass) ++g_failed;
  std::printf("criterion %d %s  %s (%.3f s)%s\n", id, v.pass ? "PASS" : "FAIL", name.c_str(), secs,
              v.detail.str().c_str());
  std::fflush(stdout);
}

void golden(Verdict& v) {
  const auto t0 = Clock::now();
  auto loaded = load_corpus(kFixtures + "/golden_hotpot.jsonl");
  v.require(loaded.rejects.empty() && loaded.corpus.size() == 2, "fixture loads");
  const auto& reg = metrics::MetricRegistry::default_registry();
  auto q1 = metrics::compute_metric_vector(*loaded.corpus.find("5a7322a25542991f9a20c634"), reg);
  auto q2 = metrics::compute_metric_vector(*loaded.corpus.find("5a72bd0b5542992359bc318f"), reg);
  const double secs = seconds_since(t0);
  auto within = [&](double got, double want, double tol, const std::string& name) {
    v.detail << ' ' << name << '=' << got;
    v.require(std::abs(got - want) <= tol, name);
  };
  within(q1.values.at("intra1"), 0.521, 0.05, "q1.intra1");
  within(q2.values.at("intra1"), 0.608, 0.05, "q2.intra1");
  within(q1.values.at("ent1"), 6.243, 0.3, "q1.ent1");
  within(q2.values.at("ent1"), 6.363, 0.3, "q2.ent1");
  within(q1.values.at("flesch_kincaid"), 16.748, 1.0, "q1.fk");
  within(q1.values.at("ari"), 17.659, 1.0, "q1.ari");
  v.require(q1.values.at("nfacts") == 2 && q2.values.at("nfacts") == 3, "nfacts");
  v.require(secs < 1.0, "runtime < 1 s");
}

Nx4Matrix well_conditioned(std::size_t n, std::uint64_t seed) {
  rng::Engine g(seed);
  Nx4Matrix m(n);
  // fixed mixing matrix with condition number around 10
  const double mix[4][4] = {{1.0, 0.5, 0.2, 0.1}, {0.0, 1.0, 0.4, 0.3}, {0.0, 0.0, 0.8, 0.5}, {0.0, 0.0, 0.0, 0.6}};
  for (std::size_t r = 0; r < n; ++r) {
    double z[4];
    for (double& x : z) x = rng::normal(g);
    for (int c = 0; c < 4; ++c) {
      double s = 0.5 * c;
      for (int k = 0; k < 4; ++k) s += z[k] * mix[k][c];
      m(r, c) = s;
    }
  }
  return m;
}

void whitening(Verdict& v) {
  double worst_cov = 0, worst_r = 0, big_secs = 0;
  for (std::size_t n : {50u, 51u, 200u, 1000u, 10000u}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto raw = well_conditioned(n, seed * 7919 + n);
      const auto t0 = Clock::now();
      const auto w = valuation::whiten(raw, valuation::fit_zca(raw));
      if (n == 10000) big_secs = std::max(big_secs, seconds_since(t0));
      const auto cov = valuation::covariance(w);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) worst_cov = std::max(worst_cov, std::abs(cov[4 * i + j] - (i == j ? 1.0 : 0.0)));
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          auto a = w.column(i), b = w.column(j);
          worst_r = std::max(worst_r, std::abs(oracle::pearson_r(a, b)));
        }
    }
  }
  v.detail << " max|cov-I|=" << worst_cov << " max|r|=" << worst_r << " t(N=10000)=" << big_secs << "s";
  v.require(worst_cov < 1e-6, "covariance within 1e-6 of identity");
  v.require(worst_r < 1e-6, "off-diagonal |r| < 1e-6");
  v.require(big_secs < 1.0, "runtime < 1 s for N = 10000");
}

void partial(Verdict& v) {
  rng::Engine g(2024);
  double worst = 0, worst_plain = 0;
  for (int inst = 0; inst < 100; ++inst) {
    Nx4Matrix m(1000);
    std::vector<double> f(1000);
    const double a = rng::normal(g), b = rng::normal(g), c = rng::normal(g);
    for (std::size_t r = 0; r < 1000; ++r) {
      const double z = rng::normal(g);
      for (int k = 0; k < 4; ++k) m(r, k) = 0.5 * z + rng::normal(g);
      f[r] = a * m(r, 0) + b * m(r, 1) + c * m(r, 3) + rng::normal(g);
    }
    for (std::size_t d = 0; d < 4; ++d) {
      std::vector<std::vector<double>> controls;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != d) controls.push_back(m.column(k));
      const double expect = oracle::partial_r(m.column(d), f, controls);
      worst = std::max(worst, std::abs(valuation::partial_correlation(m, f, d) - expect));
    }
    auto x = m.column(inst % 4);
    worst_plain = std::max(worst_plain,
                           std::abs(valuation::partial_correlation(x, f, {}) - valuation::pearson(x, f).r));
  }
  v.detail << " max|diff|=" << worst << " max|diff no controls|=" << worst_plain;
  v.require(worst < 1e-10, "matches residual-regression oracle within 1e-10");
  v.require(worst_plain < 1e-10, "equals Pearson without controls");
}

void flogits(Verdict& v) {
  const double floor = assessment::kConfidenceFloor;
  const std::vector<double> f1s{0.0, 1e-9, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> confs{0.0, 0.5, 1.0, floor - 1e-12, floor, floor + 1e-9, 1.5, std::exp(1.0), 10.0, 1e6};
  std::size_t cases = 0, mismatches = 0, nonzero_at_zero = 0;
  for (double f1 : f1s) {
    for (double s : confs) {
      // multiple choice
      assessment::PerformanceRecord mc;
      mc.style = QuestionStyle::multiple_choice;
      mc.f1 = f1;
      mc.candlog = s;
      const double mc_direct = f1 * std::log(std::max(s, floor));
      const double mc_got = assessment::f_logits(mc);
      mismatches += mc_got != mc_direct;
      nonzero_at_zero += f1 == 0.0 && mc_got != 0.0;
      ++cases;
      for (double e : confs) {
        assessment::PerformanceRecord r;
        r.f1 = f1;
        r.slog = s;
        r.elog = e;
        const double direct = f1 * std::log(std::max(s, floor)) * std::log(std::max(e, floor));
        const double got = assessment::f_logits(r);
        mismatches += got != direct;
        nonzero_at_zero += f1 == 0.0 && got != 0.0;
        ++cases;
      }
    }
  }
  v.detail << " cases=" << cases << " mismatches=" << mismatches;
  v.require(mismatches == 0, "exact equality on the grid");
  v.require(nonzero_at_zero == 0, "zero when F1 = 0");
}

void scheduler_invariants(Verdict& v) {
  rng::Engine g(77);
  std::size_t runs = 0, stages = 0, size_errors = 0, bound_errors = 0, replay_errors = 0;
  for (int run = 0; run < 200; ++run, ++runs) {
    const std::size_t n = 40 + rng::below(g, 1500);
    ScoreMatrix m;
    m.raw_v = Nx4Matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.sample_ids.push_back("r" + std::to_string(run) + "_" + std::to_string(i));
      m.splits.push_back(Split::train);
      for (int c = 0; c < 4; ++c) m.raw_v(i, c) = rng::uniform01(g);
    }
    m.rescaled_v = valuation::rank_rescale(m.raw_v);
    scheduler::CurriculumConfig cfg;
    cfg.gamma = 1.1 + 3.0 * rng::uniform01(g);
    cfg.k = 1 + rng::below(g, 16);
    cfg.seed = g();
    if (rng::below(g, 2)) cfg.initial_fraction = 0.01 + 0.3 * rng::uniform01(g);

    std::vector<assessment::CapabilityState> states;
    for (int s = 0; s < 16; ++s) {
      assessment::CapabilityState st;
      st.stage = s;
      for (int d = 0; d < 4; ++d) {
        st.c[d] = 0.6 * rng::uniform01(g);
        st.rho[d] = rng::uniform01(g) - 0.5;
      }
      if (rng::below(g, 5) == 0) st.rho[rng::below(g, 4)] = 0.0;
      states.push_back(st);
    }

    auto play = [&](std::vector<std::string>* dumps) {
      std::vector<scheduler::StagePlan> plans{scheduler::advance(cfg, nullptr, m, nullptr)};
      while (!plans.back().complete && plans.size() < states.size()) {
        const auto& prev = plans.back();
        plans.push_back(scheduler::advance(cfg, &states[plans.size() - 1], m, &prev));
      }
      for (const auto& p : plans) dumps->push_back(p.to_json().dump());
      return plans;
    };
    std::vector<std::string> first, second;
    const auto plans = play(&first);
    play(&second);
    replay_errors += first != second;

    for (std::size_t s = 1; s < plans.size(); ++s) {
      ++stages;
      const auto& p = plans[s];
      const std::size_t want = std::min(2 * plans[s - 1].sampled_ids.size(), n);
      const bool full_after_complete = plans[s - 1].complete || plans[s - 1].sampled_ids.size() >= n;
      size_errors += p.sampled_ids.size() != (full_after_complete ? n : want);
      for (std::size_t i = 0; i < p.sampled_ids.size(); ++i) {
        if (!scheduler::is_dimension_source(p.sources[i])) continue;
        const auto d = static_cast<std::size_t>(p.sources[i]);
        const auto row = *m.index_of(p.sampled_ids[i]);
        bound_errors += !((*m.rescaled_v)(row, d) < p.bounds[d]);
      }
    }
  }
  v.detail << " runs=" << runs << " stages=" << stages << " size_errors=" << size_errors
           << " bound_errors=" << bound_errors << " replay_errors=" << replay_errors;
  v.require(size_errors == 0, "sizes follow min(2 prev, N)");
  v.require(bound_errors == 0, "dimension draws satisfy v < bound");
  v.require(replay_errors == 0, "replays are byte-identical");
}

std::vector<std::uint64_t> seeds20() {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 20; ++i) s.push_back(i);
  return s;
}

void ordering(Verdict& v) {
  simlab::ExperimentConfig cfg;  // 1600 train + 400 dev = 2000 samples
  cfg.seeds = seeds20();
  const auto results = simlab::run_experiment(cfg);
  const auto table = simlab::summarize(results);
  const double cbbc = table.strategies.at("cbbc").mean_final;
  const double e2h = table.strategies.at("easy_to_hard").mean_final;
  const double h2e = table.strategies.at("hard_to_easy").mean_final;
  const double rnd = table.strategies.at("random").mean_final;
  v.detail << " cbbc=" << cbbc << " easy_to_hard=" << e2h << " hard_to_easy=" << h2e << " random=" << rnd;
  v.require(e2h - h2e >= 0.02, "easy_to_hard beats hard_to_easy by 2 points");
  v.require(cbbc >= e2h, "cbbc >= easy_to_hard");
  v.require(cbbc >= rnd, "cbbc >= random");
}

void label_efficiency(Verdict& v) {
  simlab::ExperimentConfig cfg;
  cfg.seeds = seeds20();
  cfg.al_strategies = {simlab::AlStrategy::cbbc_al, simlab::AlStrategy::random};
  const auto results = simlab::run_al_experiment(cfg, 0.05);
  std::vector<double> shares;
  for (const auto& c : results) {
    if (c.strategy != "cbbc_al") continue;
    for (const auto& r : results)
      if (r.strategy == "random" && r.seed == c.seed) shares.push_back(simlab::label_share_to_match(c, r));
  }
  std::sort(shares.begin(), shares.end());
  const double median = (shares[shares.size() / 2 - 1] + shares[shares.size() / 2]) / 2.0;
  v.detail << " seeds=" << shares.size() << " median label share=" << median;
  v.require(median <= 0.8, "median label share <= 0.8");
}

void distribution(Verdict& v) {
  const std::string dir = kFixtures + "/distribution/";
  const auto rep = cli::report_distribution(load_scores(dir + "scores.jsonl"),
                                            assessment::load_performance(dir + "perf.jsonl"));
  // manual tally: F levels and value bins of the ten fixture samples
  const std::size_t level[10] = {0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
  const std::size_t bin[4][10] = {{0, 0, 1, 1, 2, 2, 3, 3, 4, 4},
                                  {2, 2, 2, 2, 2, 2, 2, 2, 2, 2},
                                  {0, 0, 0, 0, 0, 4, 4, 4, 4, 4},
                                  {0, 1, 2, 3, 4, 4, 0, 1, 2, 3}};
  std::size_t mismatches = 0, bad_rows = 0;
  for (std::size_t d = 0; d < 4; ++d) {
    std::size_t counts[5][5] = {};
    std::size_t sizes[5] = {};
    for (std::size_t i = 0; i < 10; ++i) {
      ++counts[bin[d][i]][level[i]];
      ++sizes[bin[d][i]];
    }
    for (std::size_t b = 0; b < 5; ++b) {
      double row = 0;
      for (std::size_t l = 0; l < 5; ++l) {
        const double want = sizes[b] ? static_cast<double>(counts[b][l]) / static_cast<double>(sizes[b]) : 0.0;
        mismatches += rep.counts[d][b][l] != counts[b][l] || rep.frequency[d][b][l] != want;
        row += rep.frequency[d][b][l];
      }
      if (sizes[b] && std::abs(row - 1.0) > 1e-12) ++bad_rows;
    }
  }
  v.detail << " mismatches=" << mismatches << " rows not summing to 1=" << bad_rows;
  v.require(mismatches == 0, "frequencies match the manual tally");
  v.require(bad_rows == 0, "non-empty bins sum to 1");
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"capa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(Verdict& v) {
  const std::string fx = kFixtures + "/pipeline/";
  const fs::path base = fs::temp_directory_path() / "capa_acceptance_e2e";
  fs::remove_all(base);
  const std::vector<std::string> outputs{"corpus.jsonl", "metrics.jsonl", "scores.jsonl", "norm_model.json",
                                         "whitened.jsonl", "zca_model.json", "state.json", "plan0.json",
                                         "plan1.json"};
  std::vector<std::string> digests[2];
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path dir = base / ("run" + std::to_string(rep));
    fs::create_directories(dir);
    auto at = [&](const std::string& f) { return (dir / f).string(); };
    const std::vector<std::string> common{"--quiet", "--seed", "11", "--out-dir", dir.string()};
    auto step = [&](std::vector<std::string> args) {
      args.insert(args.begin(), common.begin(), common.end());
      return cli(args) == 0;
    };
    bool ok = step({"ingest", "--input", fx + "corpus.jsonl", "--features", fx + "features.jsonl", "--out",
                    "corpus.jsonl"}) &&
              step({"score", "--corpus", at("corpus.jsonl"), "--out", "metrics.jsonl"}) &&
              step({"normalize", "--metrics", at("metrics.jsonl"), "--out", "scores.jsonl", "--model-out",
                    "norm_model.json"}) &&
              step({"whiten", "--scores", at("scores.jsonl"), "--out", "whitened.jsonl", "--model-out",
                    "zca_model.json"}) &&
              step({"measure", "--scores", at("whitened.jsonl"), "--perf", fx + "perf.jsonl", "--k", "8", "--out",
                    "state.json"}) &&
              step({"plan", "--config", fx + "curriculum.json", "--scores", at("whitened.jsonl"), "--out",
                    "plan0.json"}) &&
              step({"plan", "--config", fx + "curriculum.json", "--scores", at("whitened.jsonl"), "--state",
                    at("state.json"), "--prev", at("plan0.json"), "--out", "plan1.json"});
    v.require(ok, "pipeline run " + std::to_string(rep) + " exits 0");
    for (const auto& f : outputs) {
      v.require(fs::exists(dir / f), f + " written");
      digests[rep].push_back(cli::sha256_hex_bytes(slurp(dir / f)));
    }
  }
  std::size_t differ = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    if (digests[0][i] != digests[1][i]) {
      ++differ;
      v.detail << " differs:" << outputs[i];
    }
  v.detail << " outputs=" << outputs.size() << " differing=" << differ;
  v.require(differ == 0, "byte-identical outputs");
}

}  // namespace

int main() {
  report(1, "golden metrics", golden);
  report(2, "whitening", whitening);
  report(3, "partial correlation", partial);
  report(4, "F_logits", flogits);
  report(5, "scheduler invariants", scheduler_invariants);
  report(6, "simulation ordering effect", ordering);
  report(7, "active-learning label efficiency", label_efficiency);
  report(8, "distribution report", distribution);
  report(9, "end-to-end determinism", determinism);
  std::printf("%d of 9 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
