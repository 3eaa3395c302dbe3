#include <cctype>

#include "capa/metrics/text.hpp"

namespace capa::metrics {
namespace {

bool is_ascii_alnum(unsigned char c) { return std::isalnum(c) != 0 && c < 0x80; }
bool is_ascii_alpha(unsigned char c) { return c < 0x80 && std::isalpha(c) != 0; }

// Byte length of the word character starting at i, or 0 when s[i] does not
// start a letter/digit. Non-ASCII code points count as letters except the
// Latin-1 symbol range and the general/CJK punctuation blocks.
std::size_t word_char_len(std::string_view s, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) return is_ascii_alnum(c) ? 1 : 0;
  std::size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 0;
  if (len == 0 || i + len > s.size()) return 0;
  char32_t cp = len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  if ((cp >= 0xA0 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) return 0;
  if ((cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFF0F)) return 0;
  return len;
}

bool is_word_at(std::string_view s, std::size_t i) { return i < s.size() && word_char_len(s, i) > 0; }

std::size_t word_end(std::string_view s, std::size_t i) {
  while (i < s.size()) {
    std::size_t len = word_char_len(s, i);
    if (len == 0) break;
    i += len;
  }
  return i;
}
bool is_mark(unsigned char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '?' || c == '!';
}
bool is_terminal(unsigned char c) { return c == '.' || c == '?' || c == '!'; }
bool is_space(unsigned char c) { return std::isspace(c) != 0 && c < 0x80; }

// Right single quotation mark U+2019 as UTF-8.
bool is_curly_apostrophe(std::string_view s, std::size_t i) {
  return i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
         static_cast<unsigned char>(s[i + 1]) == 0x80 && static_cast<unsigned char>(s[i + 2]) == 0x99;
}

// Closing and opening quote/bracket bytes, including the UTF-8 curly quotes.
std::size_t skip_closers(std::string_view s, std::size_t i) {
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') {
      ++i;
    } else if (i + 2 < s.size() && c == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) == 0x9D || static_cast<unsigned char>(s[i + 2]) == 0x99)) {
      i += 3;
    } else {
      break;
    }
  }
  return i;
}

std::size_t skip_openers(std::string_view s, std::size_t i) {
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == '"' || c == '\'' || c == '(' || c == '[' || c == '{') {
      ++i;
    } else if (i + 2 < s.size() && c == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) == 0x9C || static_cast<unsigned char>(s[i + 2]) == 0x98)) {
      i += 3;
    } else {
      break;
    }
  }
  return i;
}

// A sentence ends at terminal punctuation followed by whitespace and a word
// starting with an uppercase letter.
bool is_sentence_break(std::string_view s, std::size_t after_mark) {
  std::size_t i = skip_closers(s, after_mark);
  if (i >= s.size() || !is_space(static_cast<unsigned char>(s[i]))) return false;
  while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
  i = skip_openers(s, i);
  return i < s.size() && std::isupper(static_cast<unsigned char>(s[i])) && static_cast<unsigned char>(s[i]) < 0x80;
}

// Length of a dotted initialism ("A.B.", "M.B.A.") starting at i, or 0.
std::size_t initialism_length(std::string_view s, std::size_t i) {
  std::size_t j = i;
  int letters = 0;
  while (j + 1 < s.size() && is_ascii_alpha(static_cast<unsigned char>(s[j])) && s[j + 1] == '.') {
    ++letters;
    j += 2;
  }
  if (letters < 2) return 0;
  if (is_word_at(s, j)) return 0;
  return j - i;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t count_characters(std::string_view token) {
  std::size_t n = 0;
  for (unsigned char c : token) {
    if (is_ascii_alnum(c)) ++n;
    else if (c >= 0xC0) ++n;  // UTF-8 lead byte of a non-ASCII letter
  }
  return n;
}

}  // namespace

std::size_t count_syllables(std::string_view word) {
  std::string w;
  for (unsigned char c : word)
    if (is_ascii_alpha(c)) w.push_back(static_cast<char>(std::tolower(c)));
  if (w.empty()) return 1;

  auto vowel_at = [&](std::size_t i) {
    char c = w[i];
    if (c == 'y') return i > 0;
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  };
  std::size_t groups = 0;
  bool prev = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    bool v = vowel_at(i);
    if (v && !prev) ++groups;
    prev = v;
  }

  const std::size_t n = w.size();
  auto vowel_char = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; };
  if (groups > 1 && w.back() == 'e' && !vowel_char(w[n - 2])) {
    // consonant + "le" keeps its syllable (ta-ble)
    bool consonant_le = w[n - 2] == 'l' && n > 2 && !vowel_char(w[n - 3]);
    if (!consonant_le) --groups;
  } else if (groups > 1 && n > 3 && w.ends_with("es")) {
    char c = w[n - 3];
    bool sibilant = c == 's' || c == 'x' || c == 'z' || c == 'c' || c == 'g' ||
                    (c == 'h' && (w[n - 4] == 'c' || w[n - 4] == 's'));
    if (!vowel_char(c) && !sibilant) --groups;
  } else if (groups > 1 && n > 3 && w.ends_with("ed")) {
    char c = w[n - 3];
    if (!vowel_char(c) && c != 't' && c != 'd') --groups;
  }
  return groups == 0 ? 1 : groups;
}

bool is_numeric_token(std::string_view token) {
  for (unsigned char c : token)
    if (c < 0x80 && std::isdigit(c)) return true;
  return false;
}

TokenSequence TokenSequence::from_tokens(std::vector<std::string> tokens) {
  TokenSequence seq;
  for (const auto& t : tokens) {
    seq.syllable_count += count_syllables(t);
    seq.character_count += count_characters(t);
  }
  seq.word_count = tokens.size();
  seq.sentence_count = tokens.empty() ? 0 : 1;
  seq.terms = tokens;
  seq.tokens = std::move(tokens);
  return seq;
}

TokenSequence tokenize(std::string_view s) {
  TokenSequence seq;
  std::size_t words_in_sentence = 0;
  std::size_t i = 0;

  auto push_word = [&](std::string word) {
    seq.syllable_count += count_syllables(word);
    seq.character_count += count_characters(word);
    seq.terms.push_back(word);
    seq.tokens.push_back(std::move(word));
    ++words_in_sentence;
  };

  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);

    if (is_word_at(s, i)) {
      if (std::size_t len = initialism_length(s, i)) {
        push_word(lower_ascii(s.substr(i, len)));
        i += len;
        continue;
      }
      std::size_t j = word_end(s, i);
      std::string word = lower_ascii(s.substr(i, j - i));
      for (;;) {
        // possessive / contraction
        if (j + 1 < s.size() && s[j] == '\'' && is_ascii_alpha(static_cast<unsigned char>(s[j + 1]))) {
          std::size_t k = word_end(s, j + 1);
          word += lower_ascii(s.substr(j, k - j));
          j = k;
          continue;
        }
        if (is_curly_apostrophe(s, j) && j + 3 < s.size() && is_ascii_alpha(static_cast<unsigned char>(s[j + 3]))) {
          std::size_t k = word_end(s, j + 3);
          word += "'" + lower_ascii(s.substr(j + 3, k - j - 3));
          j = k;
          continue;
        }
        // inner decimal point or thousands separator
        if (j + 1 < s.size() && (s[j] == '.' || s[j] == ',') && std::isdigit(static_cast<unsigned char>(s[j - 1])) &&
            std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
          std::size_t k = word_end(s, j + 1);
          word += s.substr(j, k - j);
          j = k;
          continue;
        }
        break;
      }
      push_word(std::move(word));
      i = j;
      continue;
    }

    if (is_mark(c)) {
      std::size_t j = i;
      bool terminal = false;
      while (j < s.size() && is_mark(static_cast<unsigned char>(s[j]))) {
        terminal = terminal || is_terminal(static_cast<unsigned char>(s[j]));
        ++j;
      }
      seq.terms.emplace_back(s.substr(i, j - i));
      if (terminal && words_in_sentence > 0 && is_sentence_break(s, j)) {
        ++seq.sentence_count;
        words_in_sentence = 0;
      }
      i = j;
      continue;
    }
    ++i;
  }
  if (words_in_sentence > 0) ++seq.sentence_count;
  seq.word_count = seq.tokens.size();
  return seq;
}

}  // namespace capa::metrics
