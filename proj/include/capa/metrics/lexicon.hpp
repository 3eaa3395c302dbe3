#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "capa/metrics/text.hpp"

namespace capa::metrics {

/// Word list (single words and multi-word phrases) used by frequency metrics.
class Lexicon {
 public:
  Lexicon() = default;
  /// Entries are lowercased and tokenized; blank entries are dropped.
  /// Throws ValidationError when no entries remain and numeric_pattern is off.
  Lexicon(std::string name, const std::vector<std::string>& entries, bool numeric_pattern = false);

  const std::string& name() const { return name_; }
  bool numeric_pattern() const { return numeric_pattern_; }
  std::size_t size() const { return phrases_.size(); }
  const std::set<std::vector<std::string>>& phrases() const { return phrases_; }

  Lexicon with_numeric_pattern(bool on) const;

 private:
  std::string name_;
  std::set<std::vector<std::string>> phrases_;
  std::size_t longest_ = 0;
  bool numeric_pattern_ = false;

  friend double lexicon_frequency(const TokenSequence&, const Lexicon&);
};

/// One entry per line, UTF-8, '#' starts a comment.
std::vector<std::string> parse_lexicon_text(std::string_view text);
Lexicon load_lexicon(const std::filesystem::path& path, std::string name = {});

/// Lexicons compiled in from data/lexicons, keyed by file stem.
const std::map<std::string, Lexicon>& builtin_lexicons();

/// Share of word tokens covered by a lexicon entry. Every occurrence of every
/// entry (and, with the numeric pattern, every digit-bearing token) marks the
/// tokens it spans; each token counts once. Throws UndefinedInput on an empty sequence.
double lexicon_frequency(const TokenSequence& seq, const Lexicon& lex);

}  // namespace capa::metrics
