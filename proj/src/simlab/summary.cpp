#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "capa/error.hpp"
#include "capa/simlab.hpp"

namespace capa::simlab {

using nlohmann::json;

json TrialResult::to_json() const {
  json curve = json::array();
  for (const auto& [stage, acc] : accuracy_curve) curve.push_back({stage, acc});
  json j{{"strategy", strategy}, {"seed", seed}, {"accuracy_curve", curve}, {"final_accuracy", final_accuracy}};
  if (labels_used) j["labels_used"] = *labels_used;
  return j;
}

SummaryTable summarize(const std::vector<TrialResult>& results) {
  if (results.empty()) throw ValidationError("summarize: no results");
  std::map<std::string, std::vector<const TrialResult*>> by_strategy;
  for (const auto& r : results) by_strategy[r.strategy].push_back(&r);

  SummaryTable table;
  for (const auto& [name, trials] : by_strategy) {
    StrategySummary s;
    s.trials = trials.size();
    double total = 0.0;
    for (const auto* t : trials) total += t->final_accuracy;
    s.mean_final = total / static_cast<double>(trials.size());
    if (trials.size() > 1) {
      double ss = 0.0;
      for (const auto* t : trials) ss += (t->final_accuracy - s.mean_final) * (t->final_accuracy - s.mean_final);
      s.sd_final = std::sqrt(ss / static_cast<double>(trials.size() - 1));
    }
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto* t : trials) len = std::min(len, t->accuracy_curve.size());
    s.mean_curve.assign(len, 0.0);
    for (const auto* t : trials)
      for (std::size_t i = 0; i < len; ++i) s.mean_curve[i] += t->accuracy_curve[i].second;
    for (auto& v : s.mean_curve) v /= static_cast<double>(trials.size());
    table.strategies[name] = std::move(s);
  }

  for (const auto& [a, ta] : by_strategy) {
    for (const auto& [b, tb] : by_strategy) {
      if (a == b) continue;
      double wins = 0.0;
      std::size_t common = 0;
      for (const auto* x : ta) {
        for (const auto* y : tb) {
          if (x->seed != y->seed) continue;
          ++common;
          if (x->final_accuracy > y->final_accuracy) wins += 1.0;
          else if (x->final_accuracy == y->final_accuracy) wins += 0.5;
        }
      }
      if (common > 0) table.win_rate[a][b] = wins / static_cast<double>(common);
    }
  }
  return table;
}

std::string SummaryTable::to_tsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "strategy\ttrials\tmean_final\tsd_final";
  for (const auto& [name, s] : strategies) out << "\twin_vs_" << name;
  out << '\n';
  for (const auto& [name, s] : strategies) {
    out << name << '\t' << s.trials << '\t' << s.mean_final << '\t' << s.sd_final;
    for (const auto& [other, o] : strategies) {
      out << '\t';
      if (other == name) continue;
      auto row = win_rate.find(name);
      if (row != win_rate.end()) {
        auto it = row->second.find(other);
        if (it != row->second.end()) out << it->second;
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string SummaryTable::curves_tsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "strategy\tpoint\tmean_accuracy\n";
  for (const auto& [name, s] : strategies)
    for (std::size_t i = 0; i < s.mean_curve.size(); ++i) out << name << '\t' << i << '\t' << s.mean_curve[i] << '\n';
  return out.str();
}

double label_share_to_match(const TrialResult& candidate, const TrialResult& reference) {
  if (!candidate.labels_used || !reference.labels_used || reference.labels_used->empty())
    throw ValidationError("label_share_to_match: results carry no label counts");
  const double target = reference.final_accuracy;
  const auto& labels = *candidate.labels_used;
  const double ref_labels = static_cast<double>(reference.labels_used->back());
  for (std::size_t i = 0; i < candidate.accuracy_curve.size() && i < labels.size(); ++i)
    if (candidate.accuracy_curve[i].second >= target) return static_cast<double>(labels[i]) / ref_labels;
  return std::numeric_limits<double>::infinity();
}

}  // namespace capa::simlab
