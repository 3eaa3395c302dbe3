#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/corpus.hpp"

namespace capa {

using Row4 = std::array<double, 4>;
using Mat4x4 = std::array<double, 16>;  // row-major

/// N×4 row-major matrix of per-sample capability values.
class Nx4Matrix {
 public:
  Nx4Matrix() = default;
  explicit Nx4Matrix(std::size_t rows, double fill = 0.0) : data_(rows * 4, fill) {}
  static Nx4Matrix from_rows(const std::vector<Row4>& rows);

  std::size_t rows() const { return data_.size() / 4; }
  bool empty() const { return data_.empty(); }
  double operator()(std::size_t r, std::size_t c) const { return data_[4 * r + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[4 * r + c]; }
  Row4 row(std::size_t r) const;
  void set_row(std::size_t r, const Row4& v);
  void push_back(const Row4& v);
  std::vector<double> column(std::size_t c) const;

  std::span<const double> flat() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Nx4Matrix&) const = default;

 private:
  std::vector<double> data_;
};

enum class ValueView { raw, whitened, rescaled };
std::string to_string(ValueView v);
ValueView parse_value_view(const std::string& s);

/// Capability-specific values for an ordered set of samples.
struct ScoreMatrix {
  std::vector<std::string> sample_ids;
  std::vector<Split> splits;
  Nx4Matrix raw_v;
  std::optional<Nx4Matrix> whitened_v;
  std::optional<Nx4Matrix> rescaled_v;

  std::size_t size() const { return sample_ids.size(); }
  /// Throws ValidationError when the view is not populated.
  const Nx4Matrix& view(ValueView v) const;
  std::optional<std::size_t> index_of(const std::string& id) const;
  /// Rows of one split, order preserved.
  ScoreMatrix subset(Split split) const;
  ScoreMatrix subset(const std::vector<std::size_t>& rows) const;

  bool operator==(const ScoreMatrix&) const = default;
};

/// Score file: one {sample_id, split, raw_v[4], whitened_v[4]?, rescaled_v[4]?} per line.
std::vector<nlohmann::json> score_rows_to_json(const ScoreMatrix& m);
ScoreMatrix score_matrix_from_json(const std::vector<nlohmann::json>& rows);
ScoreMatrix load_scores(const std::filesystem::path& path);
void save_scores(const ScoreMatrix& m, const std::filesystem::path& path);

}  // namespace capa
