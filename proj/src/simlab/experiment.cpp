#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "capa/error.hpp"
#include "capa/metrics/metric_vector.hpp"
#include "capa/metrics/registry.hpp"
#include "capa/simlab.hpp"
#include "capa/valuation/normalizer.hpp"
#include "capa/valuation/whitening.hpp"

namespace capa::simlab {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t { corpus_stream = 1, train_stream = 2, eval_stream = 3, order_stream = 4, query_stream = 5 };

std::uint64_t derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return rng::splitmix64(rng::splitmix64(seed ^ (stream << 56)) ^ index);
}

void note(const Trace& trace, const char* op) {
  if (trace) trace(op);
}

// Train and dev views of one synthetic corpus, valued the same way real data is.
struct Prepared {
  std::vector<Row4> train_d;
  std::vector<Row4> dev_d;
  ScoreMatrix train;
  ScoreMatrix dev;
  std::map<std::string, std::size_t> train_row;
};

const metrics::MetricRegistry& difficulty_registry() {
  static const metrics::MetricRegistry reg = [] {
    std::vector<metrics::MetricSpec> specs;
    for (int d = 1; d <= 4; ++d) {
      metrics::MetricSpec s;
      s.id = "sim_d" + std::to_string(d);
      s.dimension = d;
      s.source = metrics::MetricSource::external;
      specs.push_back(s);
    }
    return metrics::MetricRegistry(std::move(specs), {});
  }();
  return reg;
}

Prepared prepare(const ExperimentConfig& cfg, std::uint64_t seed, const Trace& trace) {
  const auto corpus = synth_corpus(cfg.n_train + cfg.n_dev, derive(seed, corpus_stream));
  Prepared p;
  std::vector<metrics::MetricVector> vectors;
  for (std::size_t i = 0; i < corpus.difficulty.size(); ++i) {
    metrics::MetricVector v;
    v.sample_id = corpus.scores.sample_ids[i];
    v.split = i < cfg.n_train ? Split::train : Split::dev;
    for (int d = 0; d < 4; ++d) {
      const std::string id = "sim_d" + std::to_string(d + 1);
      v.values[id] = corpus.difficulty[i][static_cast<std::size_t>(d)];
      v.complete[id] = true;
    }
    vectors.push_back(std::move(v));
    (i < cfg.n_train ? p.train_d : p.dev_d).push_back(corpus.difficulty[i]);
  }
  const auto& reg = difficulty_registry();
  note(trace, "fit_normalizer");
  const auto model = valuation::fit_normalizer(valuation::metric_columns(vectors, Split::train), reg);
  note(trace, "capability_values");
  const ScoreMatrix all = valuation::score_vectors(vectors, model, reg);
  p.train = all.subset(Split::train);
  p.dev = all.subset(Split::dev);

  note(trace, "fit_zca");
  const auto zca = valuation::fit_zca(p.train.raw_v);
  for (ScoreMatrix* m : {&p.train, &p.dev}) {
    note(trace, "whiten");
    m->whitened_v = valuation::whiten(m->raw_v, zca);
    note(trace, "rank_rescale");
    m->rescaled_v = valuation::rank_rescale(*m->whitened_v);
  }
  for (std::size_t i = 0; i < p.train.size(); ++i) p.train_row[p.train.sample_ids[i]] = i;
  return p;
}

struct DevEval {
  double accuracy = 0.0;
  std::vector<assessment::PerformanceRecord> records;
};

DevEval evaluate(const SyntheticLearner& l, const Prepared& p, std::uint64_t seed, std::uint64_t point) {
  rng::Engine g(derive(seed, eval_stream, point));
  DevEval out;
  double total = 0.0;
  for (std::size_t i = 0; i < p.dev_d.size(); ++i) {
    out.records.push_back(learner_eval(l, p.dev_d[i], g, p.dev.sample_ids[i]));
    total += out.records.back().f1;
  }
  out.accuracy = total / static_cast<double>(p.dev_d.size());
  return out;
}

// steps minibatches cycling through the rows in a seeded shuffled order.
SyntheticLearner train(SyntheticLearner l, const Prepared& p, std::vector<std::size_t> rows, std::size_t steps,
                       std::size_t batch_size, rng::Engine& g) {
  if (rows.empty()) return l;
  std::sort(rows.begin(), rows.end());
  rng::shuffle(rows, g);
  std::size_t pos = 0;
  std::vector<Row4> batch;
  for (std::size_t s = 0; s < steps; ++s) {
    batch.clear();
    for (std::size_t b = 0; b < batch_size; ++b) {
      if (pos == rows.size()) {
        rng::shuffle(rows, g);
        pos = 0;
      }
      batch.push_back(p.train_d[rows[pos++]]);
    }
    l = learner_step(l, batch);
  }
  return l;
}

std::vector<std::size_t> rows_of(const Prepared& p, const std::vector<std::string>& ids) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) rows.push_back(p.train_row.at(id));
  return rows;
}

// Train rows by mean rescaled value, easiest first, ties by id.
std::vector<std::size_t> easy_order(const Prepared& p) {
  const Nx4Matrix& m = p.train.view(ValueView::rescaled);
  std::vector<double> mean(p.train.size());
  for (std::size_t r = 0; r < mean.size(); ++r) mean[r] = (m(r, 0) + m(r, 1) + m(r, 2) + m(r, 3)) / 4.0;
  std::vector<std::size_t> order(mean.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mean[a] != mean[b]) return mean[a] < mean[b];
    return p.train.sample_ids[a] < p.train.sample_ids[b];
  });
  return order;
}

SyntheticLearner initial_learner(const ExperimentConfig& cfg) {
  SyntheticLearner l = cfg.learner;
  for (std::size_t i = 0; i < 4; ++i) l.skill[i] = std::clamp(cfg.initial_skill[i], 0.0, 1.0);
  return l;
}

}  // namespace

scheduler::CurriculumConfig default_curriculum() {
  scheduler::CurriculumConfig c;
  c.gamma = 4.0;
  c.initial_fraction = 1.0 / 32.0;
  return c;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ValidationError("experiment: seeds must be non-empty");
  if (n_train < 8 || n_dev < 8) throw ValidationError("experiment: n_train and n_dev must be at least 8");
  if (n_dev < curriculum.k) throw ValidationError("experiment: n_dev must be at least the curriculum k");
  if (stages == 0 || steps_per_stage == 0 || batch_size == 0)
    throw ValidationError("experiment: stages, steps_per_stage and batch_size must be positive");
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0))
    throw ValidationError("experiment: budget_fraction must lie in (0, 1]");
  if (al_cycles == 0) throw ValidationError("experiment: al_cycles must be positive");
  if (!(al_epochs >= 0.0)) throw ValidationError("experiment: al_epochs must be non-negative");
  if (!(learner.alpha > 0.0 && learner.learn_rate > 0.0 && learner.gain_bandwidth > 0.0 && learner.noise_sd >= 0.0))
    throw ValidationError("experiment: learner parameters out of range");
  curriculum.validate();
}

json ExperimentConfig::to_json() const {
  std::vector<std::string> strat, al;
  for (auto s : strategies) strat.push_back(to_string(s));
  for (auto s : al_strategies) al.push_back(to_string(s));
  return json{{"n_train", n_train},
              {"n_dev", n_dev},
              {"strategies", strat},
              {"al_strategies", al},
              {"stages", stages},
              {"steps_per_stage", steps_per_stage},
              {"batch_size", batch_size},
              {"initial_skill", initial_skill},
              {"seeds", seeds},
              {"learner",
               {{"alpha", learner.alpha},
                {"learn_rate", learner.learn_rate},
                {"gain_bandwidth", learner.gain_bandwidth},
                {"noise_sd", learner.noise_sd},
                {"soft_f1", learner.soft_f1}}},
              {"curriculum", curriculum.to_json()},
              {"budget_fraction", budget_fraction},
              {"al_cycles", al_cycles},
              {"al_epochs", al_epochs}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("experiment config must be an object");
  ExperimentConfig c;
  try {
    c.n_train = j.value("n_train", c.n_train);
    c.n_dev = j.value("n_dev", c.n_dev);
    if (j.contains("strategy")) c.strategies = {parse_strategy(j["strategy"].get<std::string>())};
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j["strategies"]) c.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    if (j.contains("al_strategies")) {
      c.al_strategies.clear();
      for (const auto& s : j["al_strategies"]) c.al_strategies.push_back(parse_al_strategy(s.get<std::string>()));
    }
    c.stages = j.value("stages", c.stages);
    c.steps_per_stage = j.value("steps_per_stage", c.steps_per_stage);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("initial_skill")) {
      const auto& v = j["initial_skill"];
      if (v.is_number()) c.initial_skill.fill(v.get<double>());
      else c.initial_skill = v.get<Row4>();
    }
    c.seeds = j.value("seeds", c.seeds);
    if (j.contains("learner")) {
      const auto& l = j["learner"];
      c.learner.alpha = l.value("alpha", c.learner.alpha);
      c.learner.learn_rate = l.value("learn_rate", c.learner.learn_rate);
      c.learner.gain_bandwidth = l.value("gain_bandwidth", c.learner.gain_bandwidth);
      c.learner.noise_sd = l.value("noise_sd", c.learner.noise_sd);
      c.learner.soft_f1 = l.value("soft_f1", c.learner.soft_f1);
    }
    if (j.contains("curriculum")) {
      json merged = c.curriculum.to_json();
      merged.update(j["curriculum"]);
      c.curriculum = scheduler::CurriculumConfig::from_json(merged);
    }
    c.budget_fraction = j.value("budget_fraction", c.budget_fraction);
    c.al_cycles = j.value("al_cycles", c.al_cycles);
    c.al_epochs = j.value("al_epochs", c.al_epochs);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

TrialResult run_trial(const ExperimentConfig& cfg, Strategy strategy, std::uint64_t seed, const Trace& trace) {
  const Prepared p = prepare(cfg, seed, trace);
  const std::size_t n = p.train.size();
  SyntheticLearner learner = initial_learner(cfg);
  rng::Engine train_g(derive(seed, train_stream));

  TrialResult result;
  result.strategy = to_string(strategy);
  result.seed = seed;
  DevEval eval = evaluate(learner, p, seed, 0);
  result.accuracy_curve.emplace_back(0, eval.accuracy);

  std::vector<std::size_t> order;
  if (strategy == Strategy::easy_to_hard || strategy == Strategy::hard_to_easy) {
    order = easy_order(p);
    if (strategy == Strategy::hard_to_easy) std::reverse(order.begin(), order.end());
  } else if (strategy == Strategy::random) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::Engine g(derive(seed, order_stream));
    rng::shuffle(order, g);
  }

  scheduler::CurriculumConfig ccfg = cfg.curriculum;
  ccfg.seed = seed;
  std::optional<scheduler::StagePlan> plan;
  std::optional<assessment::CapabilityState> state;

  for (std::size_t s = 0; s < cfg.stages; ++s) {
    std::vector<std::size_t> rows;
    if (strategy == Strategy::cbbc) {
      note(trace, "advance");
      plan = scheduler::advance(ccfg, state ? &*state : nullptr, p.train, plan ? &*plan : nullptr);
      rows = rows_of(p, plan->sampled_ids);
    } else {
      const std::size_t begin = s * n / cfg.stages;
      const std::size_t end = (s + 1) * n / cfg.stages;
      rows.assign(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    learner = train(learner, p, rows, cfg.steps_per_stage, cfg.batch_size, train_g);
    eval = evaluate(learner, p, seed, s + 1);
    result.accuracy_curve.emplace_back(static_cast<int>(s + 1), eval.accuracy);
    if (strategy == Strategy::cbbc) {
      note(trace, "measure_capabilities");
      state = assessment::measure_capabilities(p.dev, eval.records, ccfg.k, static_cast<int>(s + 1), ccfg.value_view);
    }
  }
  result.final_accuracy = result.accuracy_curve.back().second;
  return result;
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, const Trace& trace) {
  cfg.validate();
  std::vector<TrialResult> out;
  for (auto seed : cfg.seeds)
    for (auto s : cfg.strategies) out.push_back(run_trial(cfg, s, seed, trace));
  return out;
}

TrialResult run_al_trial(const ExperimentConfig& cfg, AlStrategy strategy, std::uint64_t seed,
                         double budget_fraction_per_cycle) {
  if (!(budget_fraction_per_cycle > 0.0 && budget_fraction_per_cycle <= 1.0))
    throw ValidationError("active learning: budget fraction must lie in (0, 1]");
  const Prepared p = prepare(cfg, seed, {});
  const std::size_t n = p.train.size();
  const auto budget = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(budget_fraction_per_cycle * static_cast<double>(n) - 1e-9)));
  SyntheticLearner learner = initial_learner(cfg);
  rng::Engine train_g(derive(seed, train_stream));
  rng::Engine query_g(derive(seed, query_stream));

  TrialResult result;
  result.strategy = to_string(strategy);
  result.seed = seed;
  result.labels_used.emplace();
  DevEval eval = evaluate(learner, p, seed, 0);
  result.accuracy_curve.emplace_back(0, eval.accuracy);
  result.labels_used->push_back(0);

  std::vector<bool> labeled(n, false);
  std::vector<std::size_t> labeled_rows;
  for (std::size_t cycle = 1; cycle <= cfg.al_cycles && labeled_rows.size() < n; ++cycle) {
    std::vector<std::size_t> pool;
    for (std::size_t r = 0; r < n; ++r)
      if (!labeled[r]) pool.push_back(r);
    const std::size_t take = std::min(budget, pool.size());

    std::vector<std::size_t> chosen;
    switch (strategy) {
      case AlStrategy::random:
        rng::shuffle(pool, query_g);
        chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
        break;
      case AlStrategy::uncertainty: {
        std::vector<double> p_success(n);
        for (auto r : pool) p_success[r] = success_probability(learner, p.train_d[r]);
        std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return p_success[a] < p_success[b]; });
        chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
        break;
      }
      case AlStrategy::cbbc_al: {
        const auto state = assessment::measure_capabilities(p.dev, eval.records, cfg.curriculum.k,
                                                            static_cast<int>(cycle - 1), cfg.curriculum.value_view);
        const ScoreMatrix unlabeled = p.train.subset(pool);
        const auto ids = scheduler::al_query(unlabeled, state, take, derive(seed, query_stream, cycle),
                                             cfg.curriculum.gamma, cfg.curriculum.value_view);
        chosen = rows_of(p, ids);
        break;
      }
    }
    for (auto r : chosen) {
      labeled[r] = true;
      labeled_rows.push_back(r);
    }
    const std::size_t steps =
        cfg.al_epochs > 0.0 ? static_cast<std::size_t>(std::ceil(cfg.al_epochs * static_cast<double>(labeled_rows.size()) /
                                                                 static_cast<double>(cfg.batch_size)))
                            : cfg.steps_per_stage;
    learner = train(learner, p, labeled_rows, steps, cfg.batch_size, train_g);
    eval = evaluate(learner, p, seed, cycle);
    result.accuracy_curve.emplace_back(static_cast<int>(cycle), eval.accuracy);
    result.labels_used->push_back(labeled_rows.size());
  }
  result.final_accuracy = result.accuracy_curve.back().second;
  return result;
}

std::vector<TrialResult> run_al_experiment(const ExperimentConfig& cfg, double budget_fraction_per_cycle) {
  cfg.validate();
  std::vector<TrialResult> out;
  for (auto seed : cfg.seeds)
    for (auto s : cfg.al_strategies) out.push_back(run_al_trial(cfg, s, seed, budget_fraction_per_cycle));
  return out;
}

}  // namespace capa::simlab
