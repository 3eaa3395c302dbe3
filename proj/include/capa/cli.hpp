#pragma once
// Command-line driver, run manifests and plot-ready reports.

#include <array>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/assessment.hpp"
#include "capa/valuation/matrix.hpp"

namespace capa::cli {

inline constexpr std::size_t kBins = 5;

/// Per dimension: value bins [0,0.2) … [0.8,1.0] against F_logits levels with
/// the same edges (level 5 also takes everything ≥ 0.8).
struct DistributionReport {
  ValueView view = ValueView::rescaled;
  using Grid = std::array<std::array<double, kBins>, kBins>;  // [value bin][level]
  std::array<std::array<std::array<std::size_t, kBins>, kBins>, 4> counts{};
  std::array<std::array<std::size_t, kBins>, 4> bin_size{};
  std::array<Grid, 4> frequency{};  // rows sum to 1 for non-empty bins
  std::array<std::array<double, kBins>, 4> mean_f{};
  std::array<std::array<double, kBins>, 4> sd_f{};  // n − 1 denominator; 0 below two samples

  std::string to_tsv() const;
};

/// Bin index for a value in [0, 1]; values below 0 go to the first bin, ≥ 0.8 to the last.
std::size_t bin_of(double x);

/// Throws ValidationError when scores and performance share no ids.
DistributionReport report_distribution(const ScoreMatrix& scores,
                                       const std::vector<assessment::PerformanceRecord>& perf,
                                       ValueView view = ValueView::rescaled);

struct CorrelationReport {
  Mat4x4 before{};
  Mat4x4 after{};
  std::string to_tsv() const;
};

/// Pearson matrices of the raw and whitened views. Throws ValidationError without a whitened view.
CorrelationReport report_correlation(const ScoreMatrix& scores);

// Run provenance. Manifests are appended, one JSON object per line, to manifest.jsonl.
struct FileDigest {
  std::string path;
  std::string sha256;
};

std::string sha256_hex(const std::filesystem::path& file);
std::string sha256_hex_bytes(const std::string& bytes);

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string engine_version;
  std::string started_at;  // UTC, ISO 8601
  double duration_s = 0.0;
  int exit_code = 0;
  std::string error;

  nlohmann::json to_json() const;
};

void append_manifest(const RunManifest& m, const std::filesystem::path& dir);

/// Entry point of the capa binary. Returns the process exit status:
/// 0 success, 1 usage or validation error, 2 internal error.
int run(int argc, const char* const* argv);

}  // namespace capa::cli
