#include <cmath>

#include "capa/error.hpp"
#include "capa/jsonl.hpp"
#include "capa/valuation/matrix.hpp"

namespace capa {

using nlohmann::json;

std::vector<json> score_rows_to_json(const ScoreMatrix& m) {
  std::vector<json> rows;
  rows.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row{{"sample_id", m.sample_ids[i]},
             {"split", to_string(m.splits.empty() ? Split::train : m.splits[i])},
             {"raw_v", m.raw_v.row(i)}};
    if (m.whitened_v) row["whitened_v"] = m.whitened_v->row(i);
    if (m.rescaled_v) row["rescaled_v"] = m.rescaled_v->row(i);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {
Row4 read_row(const json& j, const char* key) {
  Row4 r{};
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 4) throw ValidationError(std::string(key) + " must have 4 entries");
  for (std::size_t c = 0; c < 4; ++c) {
    r[c] = a[c].get<double>();
    if (!std::isfinite(r[c])) throw ValidationError(std::string(key) + " has a non-finite entry");
  }
  return r;
}
}  // namespace

ScoreMatrix score_matrix_from_json(const std::vector<json>& rows) {
  ScoreMatrix m;
  if (rows.empty()) return m;
  const bool has_white = rows.front().contains("whitened_v");
  const bool has_rescaled = rows.front().contains("rescaled_v");
  if (has_white) m.whitened_v.emplace();
  if (has_rescaled) m.rescaled_v.emplace();
  try {
    for (const auto& row : rows) {
      m.sample_ids.push_back(row.at("sample_id").get<std::string>());
      m.splits.push_back(parse_split(row.value("split", std::string("train"))));
      m.raw_v.push_back(read_row(row, "raw_v"));
      if (has_white) m.whitened_v->push_back(read_row(row, "whitened_v"));
      if (has_rescaled) m.rescaled_v->push_back(read_row(row, "rescaled_v"));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("score file: ") + e.what());
  }
  return m;
}

ScoreMatrix load_scores(const std::filesystem::path& path) {
  return score_matrix_from_json(jsonl::read_all(path));
}

void save_scores(const ScoreMatrix& m, const std::filesystem::path& path) {
  jsonl::write_all(path, score_rows_to_json(m));
}

}  // namespace capa
