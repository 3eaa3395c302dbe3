#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace capa::jsonl {

/// Calls fn(line_number, parsed) for every non-blank line. Parse errors are
/// passed to on_error (or rethrown as ValidationError when on_error is empty).
void for_each(std::istream& in, const std::function<void(std::size_t, const nlohmann::json&)>& fn,
              const std::function<void(std::size_t, const std::string&)>& on_error = {});

void for_each_file(const std::filesystem::path& path,
                   const std::function<void(std::size_t, const nlohmann::json&)>& fn,
                   const std::function<void(std::size_t, const std::string&)>& on_error = {});

std::vector<nlohmann::json> read_all(const std::filesystem::path& path);

/// Writes one compact object per line.
void write_all(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace capa::jsonl
