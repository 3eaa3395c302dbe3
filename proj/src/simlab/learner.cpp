#include <algorithm>
#include <cmath>
#include <cstdio>

#include "capa/error.hpp"
#include "capa/simlab.hpp"

namespace capa::simlab {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

SynthCorpus synth_corpus(std::size_t n, std::uint64_t seed) {
  if (n < 8) throw ValidationError("synth_corpus: need at least 8 samples");
  rng::Engine g(seed);
  const double shared = 0.7;
  const double own = std::sqrt(1.0 - shared * shared);
  SynthCorpus out;
  out.difficulty.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng::normal(g);
    Row4 d{};
    for (auto& x : d) x = normal_cdf(shared * z + own * rng::normal(g));
    char id[32];
    std::snprintf(id, sizeof id, "s%05zu", i);
    out.scores.sample_ids.emplace_back(id);
    out.scores.splits.push_back(Split::train);
    out.scores.raw_v.push_back(d);
    out.difficulty.push_back(d);
  }
  return out;
}

double success_probability(const SyntheticLearner& l, const Row4& difficulty, double noise) {
  double margin = 0.0;
  for (std::size_t i = 0; i < 4; ++i) margin += l.skill[i] - difficulty[i];
  margin = margin / 4.0 + noise;
  return 1.0 / (1.0 + std::exp(-l.alpha * margin));
}

assessment::PerformanceRecord learner_eval(const SyntheticLearner& l, const Row4& difficulty, rng::Engine& g,
                                           const std::string& sample_id) {
  const double noise = l.noise_sd > 0.0 ? l.noise_sd * rng::normal(g) : 0.0;
  const double p = success_probability(l, difficulty, noise);
  const double confidence = std::exp(1.0 + p);
  assessment::PerformanceRecord r;
  r.sample_id = sample_id;
  if (l.soft_f1) {
    r.style = QuestionStyle::extractive;
    r.f1 = p;
    r.slog = confidence;
    r.elog = confidence;
  } else {
    r.style = QuestionStyle::multiple_choice;
    r.f1 = rng::uniform01(g) < p ? 1.0 : 0.0;
    r.candlog = confidence;
  }
  return r;
}

SyntheticLearner learner_step(SyntheticLearner l, const std::vector<Row4>& batch) {
  const double two_bw2 = 2.0 * l.gain_bandwidth * l.gain_bandwidth;
  for (const auto& d : batch) {
    for (std::size_t i = 0; i < 4; ++i) {
      const double gap = d[i] - l.skill[i];
      if (gap <= 0.0) continue;
      l.skill[i] = std::clamp(l.skill[i] + l.learn_rate * std::exp(-gap * gap / two_bw2) * gap, 0.0, 1.0);
    }
  }
  return l;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::cbbc: return "cbbc";
    case Strategy::easy_to_hard: return "easy_to_hard";
    case Strategy::hard_to_easy: return "hard_to_easy";
    case Strategy::random: return "random";
  }
  return "?";
}

std::string to_string(AlStrategy s) {
  switch (s) {
    case AlStrategy::cbbc_al: return "cbbc_al";
    case AlStrategy::random: return "random";
    case AlStrategy::uncertainty: return "uncertainty";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  for (auto v : {Strategy::cbbc, Strategy::easy_to_hard, Strategy::hard_to_easy, Strategy::random})
    if (to_string(v) == s) return v;
  throw ValidationError("unknown strategy: " + s);
}

AlStrategy parse_al_strategy(const std::string& s) {
  for (auto v : {AlStrategy::cbbc_al, AlStrategy::random, AlStrategy::uncertainty})
    if (to_string(v) == s) return v;
  throw ValidationError("unknown active-learning strategy: " + s);
}

}  // namespace capa::simlab
