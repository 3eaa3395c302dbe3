#pragma once
// Tokenization and text-level data-property metrics.

#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace capa::metrics {

/// Tokenized view of a passage.
///
/// tokens holds lowercased words in text order. Numbers keep their inner
/// separators ("2.1", "4,000"), possessives stay attached ("manhattan's") and
/// dotted initialisms stay whole ("m.b.a."). terms is the stream the n-gram
/// metrics run on: the same words interleaved with clause punctuation marks
/// (runs of . , ; : ? !).
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::string> terms;
  std::size_t sentence_count = 0;
  std::size_t word_count = 0;
  std::size_t syllable_count = 0;
  std::size_t character_count = 0;  // letters and digits only

  /// Builds a one-sentence sequence from pre-split tokens (terms == tokens).
  static TokenSequence from_tokens(std::vector<std::string> tokens);
};

TokenSequence tokenize(std::string_view text);

/// Vowel-group count with silent-e / -es / -ed corrections, at least 1.
std::size_t count_syllables(std::string_view word);

/// True for digit-bearing tokens ("15", "23rd", "2.1").
bool is_numeric_token(std::string_view token);

/// Distinct n-grams over total n-grams of seq.terms. Throws UndefinedInput
/// when there are fewer than n terms.
double ngram_diversity(const TokenSequence& seq, std::size_t n);

/// Shannon entropy of the n-gram distribution of seq.terms in the given log base.
double ngram_entropy(const TokenSequence& seq, std::size_t n, double log_base = std::numbers::e);

enum class ReadabilityKind { flesch_kincaid, ari };

/// US grade level. Throws UndefinedInput without at least one sentence and one word.
double readability(const TokenSequence& seq, ReadabilityKind kind);
double readability(std::string_view text, ReadabilityKind kind);

/// BLEU of the question (hypothesis) against the context (reference) on
/// word tokens: geometric mean of clipped n-gram precisions for n = 1..n_max
/// times the brevity penalty. Orders for which the question has no n-grams
/// are left out of the mean. Throws UndefinedInput on an empty side.
double overlap_bleu(const TokenSequence& question, const TokenSequence& context, int n_max);

}  // namespace capa::metrics
