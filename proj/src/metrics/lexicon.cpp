#include "capa/metrics/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "capa/error.hpp"

namespace capa::metrics {
namespace {

struct BuiltinText {
  const char* name;
  const char* text;
};

const BuiltinText kBuiltinLexicons[] = {
#include "capa/builtin_lexicons.inc"
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Lexicon::Lexicon(std::string name, const std::vector<std::string>& entries, bool numeric_pattern)
    : name_(std::move(name)), numeric_pattern_(numeric_pattern) {
  for (const auto& entry : entries) {
    auto words = tokenize(entry).tokens;
    if (words.empty()) continue;
    longest_ = std::max(longest_, words.size());
    phrases_.insert(std::move(words));
  }
  if (phrases_.empty() && !numeric_pattern_)
    throw ValidationError("lexicon '" + name_ + "' has no entries and no pattern");
}

Lexicon Lexicon::with_numeric_pattern(bool on) const {
  Lexicon copy = *this;
  copy.numeric_pattern_ = on;
  if (copy.phrases_.empty() && !on) throw ValidationError("lexicon '" + name_ + "' has no entries and no pattern");
  return copy;
}

std::vector<std::string> parse_lexicon_text(std::string_view text) {
  std::vector<std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto entry = trim(line);
    if (!entry.empty()) entries.push_back(std::move(entry));
  }
  return entries;
}

Lexicon load_lexicon(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read lexicon: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (name.empty()) name = path.stem().string();
  return Lexicon(std::move(name), parse_lexicon_text(buf.str()));
}

const std::map<std::string, Lexicon>& builtin_lexicons() {
  static const std::map<std::string, Lexicon> lexicons = [] {
    std::map<std::string, Lexicon> out;
    for (const auto& b : kBuiltinLexicons) out.emplace(b.name, Lexicon(b.name, parse_lexicon_text(b.text)));
    return out;
  }();
  return lexicons;
}

double lexicon_frequency(const TokenSequence& seq, const Lexicon& lex) {
  const auto& tokens = seq.tokens;
  if (tokens.empty()) throw UndefinedInput("lexicon_frequency: empty sequence");
  std::vector<bool> covered(tokens.size(), false);
  std::vector<std::string> window;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lex.numeric_pattern_ && is_numeric_token(tokens[i])) covered[i] = true;
    window.clear();
    for (std::size_t len = 1; len <= lex.longest_ && i + len <= tokens.size(); ++len) {
      window.push_back(tokens[i + len - 1]);
      if (lex.phrases_.contains(window))
        std::fill(covered.begin() + static_cast<std::ptrdiff_t>(i),
                  covered.begin() + static_cast<std::ptrdiff_t>(i + len), true);
    }
  }
  const auto matched = std::count(covered.begin(), covered.end(), true);
  return static_cast<double>(matched) / static_cast<double>(tokens.size());
}

}  // namespace capa::metrics
