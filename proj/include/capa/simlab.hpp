#pragma once
// Synthetic learner laboratory: a 4-skill learner trained on synthetic
// difficulty vectors under different sample orderings, so that curriculum
// and query strategies can be compared without neural training.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/assessment.hpp"
#include "capa/rng.hpp"
#include "capa/scheduler.hpp"
#include "capa/valuation/matrix.hpp"

namespace capa::simlab {

struct SyntheticLearner {
  Row4 skill{};
  double alpha = 6.0;
  double learn_rate = 0.05;
  double gain_bandwidth = 0.15;
  double noise_sd = 0.05;
  bool soft_f1 = true;  // F1 = p; otherwise a Bernoulli(p) draw
};

struct SynthCorpus {
  ScoreMatrix scores;          // raw_v = difficulty
  std::vector<Row4> difficulty;
};

/// d_i = Φ(0.7·z + √0.51·e_i) with shared z, so dimensions correlate positively.
/// Ids are "s00000"-style. Throws ValidationError for n < 8.
SynthCorpus synth_corpus(std::size_t n, std::uint64_t seed);

/// σ(α·(mean_i(skill_i − d_i) + noise)).
double success_probability(const SyntheticLearner& l, const Row4& difficulty, double noise = 0.0);

/// One evaluation: the margin gets N(0, noise_sd) noise; confidence = exp(1 + p).
assessment::PerformanceRecord learner_eval(const SyntheticLearner& l, const Row4& difficulty, rng::Engine& g,
                                           const std::string& sample_id = {});

/// Sequential per-sample update:
/// skill_i += lr·exp(−(d_i − skill_i)² / (2·bw²))·max(d_i − skill_i, 0), clamped to [0, 1].
SyntheticLearner learner_step(SyntheticLearner l, const std::vector<Row4>& batch);

enum class Strategy { cbbc, easy_to_hard, hard_to_easy, random };
enum class AlStrategy { cbbc_al, random, uncertainty };
std::string to_string(Strategy s);
std::string to_string(AlStrategy s);
Strategy parse_strategy(const std::string& s);
AlStrategy parse_al_strategy(const std::string& s);

// γ = 4 offsets the 1/4 share each dimension gets when |ρ| is even; warm start at 1/32.
scheduler::CurriculumConfig default_curriculum();

struct ExperimentConfig {
  std::size_t n_train = 1600;
  std::size_t n_dev = 400;
  std::vector<Strategy> strategies{Strategy::cbbc, Strategy::easy_to_hard, Strategy::hard_to_easy,
                                   Strategy::random};
  std::vector<AlStrategy> al_strategies{AlStrategy::cbbc_al, AlStrategy::random, AlStrategy::uncertainty};
  std::size_t stages = 10;
  std::size_t steps_per_stage = 10;
  std::size_t batch_size = 16;
  Row4 initial_skill{0.1, 0.1, 0.1, 0.1};
  std::vector<std::uint64_t> seeds{1};
  SyntheticLearner learner;
  scheduler::CurriculumConfig curriculum = default_curriculum();
  // active learning
  double budget_fraction = 0.05;
  std::size_t al_cycles = 10;
  // passes over the labeled set per cycle; 0 trains steps_per_stage minibatches instead
  double al_epochs = 0.5;

  /// Throws ValidationError: empty seeds, n_dev < k, zero stages/steps/batch, bad fractions.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct TrialResult {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, double>> accuracy_curve;  // (stage or cycle, mean dev F1)
  double final_accuracy = 0.0;
  std::optional<std::vector<std::size_t>> labels_used;  // cumulative labels per cycle

  nlohmann::json to_json() const;
};

// Names of the engine operations a trial called, in call order (tests check coverage).
using Trace = std::function<void(const std::string&)>;

std::vector<TrialResult> run_experiment(const ExperimentConfig& config, const Trace& trace = {});
TrialResult run_trial(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed,
                      const Trace& trace = {});

std::vector<TrialResult> run_al_experiment(const ExperimentConfig& config, double budget_fraction_per_cycle);
TrialResult run_al_trial(const ExperimentConfig& config, AlStrategy strategy, std::uint64_t seed,
                         double budget_fraction_per_cycle);

struct StrategySummary {
  std::size_t trials = 0;
  double mean_final = 0.0;
  double sd_final = 0.0;  // n − 1 denominator, 0 for a single trial
  std::vector<double> mean_curve;
};

struct SummaryTable {
  std::map<std::string, StrategySummary> strategies;
  // win_rate[a][b]: share of common seeds where a's final accuracy beats b's; ties count half
  std::map<std::string, std::map<std::string, double>> win_rate;

  std::string to_tsv() const;
  std::string curves_tsv() const;
};

SummaryTable summarize(const std::vector<TrialResult>& results);

/// Labels cbbc-style results need to match a reference final accuracy, as a
/// share of the reference's labels; +inf when never reached.
double label_share_to_match(const TrialResult& candidate, const TrialResult& reference);

}  // namespace capa::simlab
