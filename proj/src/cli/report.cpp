#include <cmath>
#include <map>
#include <sstream>

#include "capa/cli.hpp"
#include "capa/error.hpp"
#include "capa/valuation/stats.hpp"

namespace capa::cli {

std::size_t bin_of(double x) {
  if (!(x >= 0.2)) return 0;  // also catches NaN
  if (x >= 0.8) return kBins - 1;
  return std::min(kBins - 1, static_cast<std::size_t>(std::floor(x * 5.0)));
}

DistributionReport report_distribution(const ScoreMatrix& scores,
                                       const std::vector<assessment::PerformanceRecord>& perf, ValueView view) {
  std::map<std::string, double> f_of;
  for (const auto& r : perf) f_of[r.sample_id] = assessment::f_logits(r);
  const Nx4Matrix& m = scores.view(view);

  DistributionReport rep;
  rep.view = view;
  std::array<std::array<std::vector<double>, kBins>, 4> members;
  std::size_t matched = 0;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    auto it = f_of.find(scores.sample_ids[r]);
    if (it == f_of.end()) continue;
    ++matched;
    const std::size_t level = bin_of(it->second);
    for (std::size_t d = 0; d < 4; ++d) {
      const std::size_t b = bin_of(m(r, d));
      ++rep.counts[d][b][level];
      ++rep.bin_size[d][b];
      members[d][b].push_back(it->second);
    }
  }
  if (matched == 0) throw ValidationError("report: scores and performance log share no sample ids");

  for (std::size_t d = 0; d < 4; ++d) {
    for (std::size_t b = 0; b < kBins; ++b) {
      const auto& xs = members[d][b];
      if (xs.empty()) continue;
      for (std::size_t l = 0; l < kBins; ++l)
        rep.frequency[d][b][l] = static_cast<double>(rep.counts[d][b][l]) / static_cast<double>(xs.size());
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      rep.mean_f[d][b] = mean;
      rep.sd_f[d][b] = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    }
  }
  return rep;
}

std::string DistributionReport::to_tsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "dimension\tvalue_bin\tn";
  for (std::size_t l = 0; l < kBins; ++l) out << "\tlevel" << l + 1;
  out << "\tmean_f_logits\tsd_f_logits\n";
  for (std::size_t d = 0; d < 4; ++d) {
    for (std::size_t b = 0; b < kBins; ++b) {
      out << d + 1 << '\t' << "[" << 0.2 * static_cast<double>(b) << "," << 0.2 * static_cast<double>(b + 1)
          << (b + 1 == kBins ? "]" : ")") << '\t' << bin_size[d][b];
      for (std::size_t l = 0; l < kBins; ++l) out << '\t' << frequency[d][b][l];
      out << '\t' << mean_f[d][b] << '\t' << sd_f[d][b] << '\n';
    }
  }
  return out.str();
}

CorrelationReport report_correlation(const ScoreMatrix& scores) {
  if (!scores.whitened_v) throw ValidationError("correlation report: scores carry no whitened view");
  CorrelationReport rep;
  rep.before = valuation::correlation_matrix(scores.raw_v);
  rep.after = valuation::correlation_matrix(*scores.whitened_v);
  return rep;
}

std::string CorrelationReport::to_tsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "view\trow\tv1\tv2\tv3\tv4\n";
  for (const auto& [name, mat] : {std::pair{"raw", &before}, std::pair{"whitened", &after}}) {
    for (std::size_t i = 0; i < 4; ++i) {
      out << name << "\tv" << i + 1;
      for (std::size_t j = 0; j < 4; ++j) out << '\t' << (*mat)[4 * i + j];
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace capa::cli
