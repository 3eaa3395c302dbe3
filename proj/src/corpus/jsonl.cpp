#include "capa/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "capa/error.hpp"

namespace capa::jsonl {

void for_each(std::istream& in, const std::function<void(std::size_t, const nlohmann::json&)>& fn,
              const std::function<void(std::size_t, const std::string&)>& on_error) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      if (!on_error) throw ValidationError("line " + std::to_string(number) + ": " + e.what());
      on_error(number, std::string("malformed JSON: ") + e.what());
      continue;
    }
    fn(number, parsed);
  }
}

namespace {
std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file: " + path.string());
  return in;
}
}  // namespace

void for_each_file(const std::filesystem::path& path,
                   const std::function<void(std::size_t, const nlohmann::json&)>& fn,
                   const std::function<void(std::size_t, const std::string&)>& on_error) {
  auto in = open_in(path);
  for_each(in, fn, on_error);
}

std::vector<nlohmann::json> read_all(const std::filesystem::path& path) {
  std::vector<nlohmann::json> rows;
  for_each_file(path, [&](std::size_t, const nlohmann::json& j) { rows.push_back(j); });
  return rows;
}

void write_all(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) out << row.dump() << '\n';
  write_text(path, out.str());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace capa::jsonl
