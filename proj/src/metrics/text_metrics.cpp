#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "capa/error.hpp"
#include "capa/metrics/text.hpp"

namespace capa::metrics {
namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// n-gram keys join the units with U+001F so no token boundary is ambiguous.
NgramCounts count_ngrams(const std::vector<std::string>& units, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || units.size() < n) return counts;
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string key = units[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += units[i + k];
    }
    ++counts[key];
  }
  return counts;
}

void require_ngrams(const TokenSequence& seq, std::size_t n, const char* what) {
  if (n == 0) throw ValidationError(std::string(what) + ": n must be positive");
  if (seq.terms.size() < n)
    throw UndefinedInput(std::string(what) + ": need at least " + std::to_string(n) + " terms, got " +
                         std::to_string(seq.terms.size()));
}

}  // namespace

double ngram_diversity(const TokenSequence& seq, std::size_t n) {
  require_ngrams(seq, n, "ngram_diversity");
  const auto counts = count_ngrams(seq.terms, n);
  const double total = static_cast<double>(seq.terms.size() - n + 1);
  return static_cast<double>(counts.size()) / total;
}

double ngram_entropy(const TokenSequence& seq, std::size_t n, double log_base) {
  require_ngrams(seq, n, "ngram_entropy");
  if (!(log_base > 0.0) || log_base == 1.0) throw ValidationError("ngram_entropy: invalid log base");
  const auto counts = count_ngrams(seq.terms, n);
  const double total = static_cast<double>(seq.terms.size() - n + 1);
  // Accumulate in a fixed order so the result does not depend on hash layout.
  std::map<std::string, std::size_t> ordered(counts.begin(), counts.end());
  double h = 0.0;
  for (const auto& [gram, count] : ordered) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log(p);
  }
  return h / std::log(log_base);
}

double readability(const TokenSequence& seq, ReadabilityKind kind) {
  if (seq.word_count == 0 || seq.sentence_count == 0)
    throw UndefinedInput("readability: text needs at least one sentence and one word");
  const double words = static_cast<double>(seq.word_count);
  const double sentences = static_cast<double>(seq.sentence_count);
  switch (kind) {
    case ReadabilityKind::flesch_kincaid:
      return 0.39 * (words / sentences) + 11.8 * (static_cast<double>(seq.syllable_count) / words) - 15.59;
    case ReadabilityKind::ari:
      return 4.71 * (static_cast<double>(seq.character_count) / words) + 0.5 * (words / sentences) - 21.43;
  }
  throw Error("readability: unknown kind");
}

double readability(std::string_view text, ReadabilityKind kind) { return readability(tokenize(text), kind); }

double overlap_bleu(const TokenSequence& question, const TokenSequence& context, int n_max) {
  if (n_max < 1 || n_max > 4) throw ValidationError("overlap_bleu: n_max must be in [1,4]");
  if (question.tokens.empty() || context.tokens.empty()) throw UndefinedInput("overlap_bleu: empty input");

  double log_precision = 0.0;
  int orders = 0;
  for (int n = 1; n <= n_max; ++n) {
    const auto hyp = count_ngrams(question.tokens, static_cast<std::size_t>(n));
    if (hyp.empty()) break;
    const auto ref = count_ngrams(context.tokens, static_cast<std::size_t>(n));
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& [gram, count] : hyp) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    if (matched == 0) return 0.0;
    log_precision += std::log(static_cast<double>(matched) / static_cast<double>(total));
    ++orders;
  }

  const double hyp_len = static_cast<double>(question.tokens.size());
  const double ref_len = static_cast<double>(context.tokens.size());
  const double brevity = hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return brevity * std::exp(log_precision / orders);
}

}  // namespace capa::metrics
