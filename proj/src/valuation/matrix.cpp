#include "capa/valuation/matrix.hpp"

#include "capa/error.hpp"

namespace capa {

Nx4Matrix Nx4Matrix::from_rows(const std::vector<Row4>& rows) {
  Nx4Matrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
  return m;
}

Row4 Nx4Matrix::row(std::size_t r) const {
  return {data_[4 * r], data_[4 * r + 1], data_[4 * r + 2], data_[4 * r + 3]};
}

void Nx4Matrix::set_row(std::size_t r, const Row4& v) {
  for (std::size_t c = 0; c < 4; ++c) data_[4 * r + c] = v[c];
}

void Nx4Matrix::push_back(const Row4& v) { data_.insert(data_.end(), v.begin(), v.end()); }

std::vector<double> Nx4Matrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = data_[4 * r + c];
  return out;
}

std::string to_string(ValueView v) {
  switch (v) {
    case ValueView::raw: return "raw";
    case ValueView::whitened: return "whitened";
    case ValueView::rescaled: return "rescaled";
  }
  return "?";
}

ValueView parse_value_view(const std::string& s) {
  for (ValueView v : {ValueView::raw, ValueView::whitened, ValueView::rescaled})
    if (to_string(v) == s) return v;
  throw ValidationError("unknown value view: " + s);
}

const Nx4Matrix& ScoreMatrix::view(ValueView v) const {
  switch (v) {
    case ValueView::raw: return raw_v;
    case ValueView::whitened:
      if (!whitened_v) throw ValidationError("score matrix has no whitened view");
      return *whitened_v;
    case ValueView::rescaled:
      if (!rescaled_v) throw ValidationError("score matrix has no rescaled view");
      return *rescaled_v;
  }
  throw Error("bad value view");
}

std::optional<std::size_t> ScoreMatrix::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < sample_ids.size(); ++i)
    if (sample_ids[i] == id) return i;
  return std::nullopt;
}

ScoreMatrix ScoreMatrix::subset(const std::vector<std::size_t>& rows) const {
  ScoreMatrix out;
  auto pick = [&](const Nx4Matrix& m) {
    Nx4Matrix sub;
    for (auto r : rows) sub.push_back(m.row(r));
    return sub;
  };
  for (auto r : rows) {
    out.sample_ids.push_back(sample_ids.at(r));
    out.splits.push_back(splits.empty() ? Split::train : splits.at(r));
  }
  out.raw_v = pick(raw_v);
  if (whitened_v) out.whitened_v = pick(*whitened_v);
  if (rescaled_v) out.rescaled_v = pick(*rescaled_v);
  return out;
}

ScoreMatrix ScoreMatrix::subset(Split split) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i)
    if ((splits.empty() ? Split::train : splits[i]) == split) rows.push_back(i);
  return subset(rows);
}

}  // namespace capa
