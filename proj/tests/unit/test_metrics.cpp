#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "capa/corpus.hpp"
#include "capa/error.hpp"
#include "capa/metrics/lexicon.hpp"
#include "capa/metrics/metric_vector.hpp"
#include "capa/metrics/registry.hpp"
#include "capa/metrics/text.hpp"

using namespace capa;
using namespace capa::metrics;

namespace {

// Plain counting over the term stream, written independently of the library.
double oracle_diversity(const std::vector<std::string>& t, std::size_t n) {
  std::set<std::vector<std::string>> distinct;
  for (std::size_t i = 0; i + n <= t.size(); ++i) distinct.insert({t.begin() + i, t.begin() + i + n});
  return static_cast<double>(distinct.size()) / static_cast<double>(t.size() - n + 1);
}

double oracle_entropy2(const std::vector<std::string>& t, std::size_t n) {
  std::map<std::vector<std::string>, double> freq;
  const double total = static_cast<double>(t.size() - n + 1);
  for (std::size_t i = 0; i + n <= t.size(); ++i) freq[{t.begin() + i, t.begin() + i + n}] += 1;
  double h = 0;
  for (const auto& [g, c] : freq) h -= (c / total) * std::log2(c / total);
  return h;
}

Corpus golden() {
  auto r = load_corpus(std::string(CAPA_FIXTURES) + "/golden_hotpot.jsonl");
  REQUIRE(r.rejects.empty());
  return r.corpus;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("tokenizer keeps numbers, possessives and initialisms whole") {
  auto seq = tokenize("Ann Smith's M.B.A. cost $4,000 in 2.1 years. Then he left!");
  CHECK(seq.tokens == std::vector<std::string>{"ann", "smith's", "m.b.a.", "cost", "4,000", "in", "2.1", "years",
                                                "then", "he", "left"});
  CHECK(seq.word_count == 11);
  CHECK(seq.sentence_count == 2);
  CHECK(seq.terms.back() == "!");
}

TEST_CASE("sentence needs an uppercase start after the terminator") {
  CHECK(tokenize("It was late. it rained.").sentence_count == 1);
  CHECK(tokenize("It was late. It rained.").sentence_count == 2);
  CHECK(tokenize("No terminator at all").sentence_count == 1);
  CHECK(tokenize("").sentence_count == 0);
}

TEST_CASE("term stream interleaves clause punctuation") {
  auto seq = tokenize("a, b; c: d?");
  CHECK(seq.terms == std::vector<std::string>{"a", ",", "b", ";", "c", ":", "d", "?"});
  CHECK(seq.tokens.size() == 4);
}

TEST_CASE("syllable counts agree with a dictionary on common words") {
  const std::map<std::string, int> dict{
      {"the", 1},          {"cat", 1},           {"dog", 1},         {"water", 2},        {"table", 2},
      {"little", 2},       {"beautiful", 3},     {"university", 5},  {"reading", 2},      {"actress", 2},
      {"apple", 2},        {"banana", 3},        {"computer", 3},    {"elephant", 3},     {"yellow", 2},
      {"happy", 2},        {"tower", 2},         {"building", 2},    {"designed", 2},     {"firm", 1},
      {"sons", 1},         {"company", 3},       {"insurance", 3},   {"metropolitan", 5}, {"landmark", 2},
      {"skyscraper", 3},   {"located", 3},       {"avenue", 3},      {"intersection", 4}, {"street", 1},
      {"square", 1},       {"park", 1},          {"city", 2},        {"architectural", 5}, {"construction", 3},
      {"modeled", 2},      {"campanile", 4},     {"venice", 3},      {"italy", 3},        {"american", 4},
      {"singer", 2},       {"author", 2},        {"television", 4},  {"series", 2},       {"christmas", 2},
      {"achieved", 2},     {"more", 1},          {"jumped", 1},      {"wanted", 2},       {"played", 1},
      {"boxes", 2},        {"houses", 2},        {"makes", 1},       {"time", 1},         {"hope", 1},
      {"create", 2},       {"music", 2},         {"money", 2},       {"problem", 2},      {"question", 2},
      {"simple", 2},       {"example", 3},       {"important", 3},   {"different", 3},    {"people", 2}};
  int hits = 0;
  for (const auto& [w, n] : dict) hits += static_cast<int>(count_syllables(w)) == n;
  const double share = static_cast<double>(hits) / static_cast<double>(dict.size());
  CAPTURE(share);
  CHECK(share >= 0.9);
  CHECK(count_syllables("reading") == 2);
  CHECK(count_syllables("") == 1);
}

TEST_CASE("n-gram diversity and entropy against counting oracles") {
  auto seq = tokenize("The cat sat on the mat, and the cat slept. The dog did not.");
  for (std::size_t n : {1u, 2u, 3u}) {
    CHECK(ngram_diversity(seq, n) == doctest::Approx(oracle_diversity(seq.terms, n)).epsilon(1e-12));
    CHECK(ngram_entropy(seq, n, 2.0) == doctest::Approx(oracle_entropy2(seq.terms, n)).epsilon(1e-12));
  }
  CHECK(ngram_entropy(seq, 1) == doctest::Approx(oracle_entropy2(seq.terms, 1) * std::log(2.0)));
  CHECK(ngram_diversity(tokenize("a a a a"), 1) == 0.25);
  CHECK(ngram_entropy(tokenize("a a a a"), 1, 2.0) == 0.0);
  CHECK_THROWS_AS(ngram_diversity(tokenize("one"), 2), UndefinedInput);
}

TEST_CASE("readability formulas") {
  // 6 words, 1 sentence, 6 syllables, 17 characters
  auto seq = tokenize("The cat sat on the mat.");
  CHECK(seq.syllable_count == 6);
  CHECK(seq.character_count == 17);
  CHECK(readability(seq, ReadabilityKind::flesch_kincaid) == doctest::Approx(0.39 * 6 + 11.8 - 15.59));
  CHECK(readability(seq, ReadabilityKind::ari) == doctest::Approx(4.71 * 17.0 / 6.0 + 3.0 - 21.43));
  CHECK_THROWS_AS(readability("", ReadabilityKind::ari), UndefinedInput);
}

TEST_CASE("bleu of question against context") {
  auto ctx = tokenize("the cat sat on the mat");
  CHECK(overlap_bleu(tokenize("the cat sat on the mat"), ctx, 2) == doctest::Approx(1.0));
  CHECK(overlap_bleu(tokenize("dogs bark"), ctx, 2) == 0.0);
  // unigram 2/2, bigram 1/1, brevity exp(1 − 6/2)
  CHECK(overlap_bleu(tokenize("the cat"), ctx, 2) == doctest::Approx(std::exp(-2.0)));
  // bigrams missing from a one-word question leave the mean over unigrams
  CHECK(overlap_bleu(tokenize("cat"), ctx, 2) == doctest::Approx(std::exp(1.0 - 6.0)));
  CHECK_THROWS_AS(overlap_bleu(tokenize(""), ctx, 2), UndefinedInput);
}

TEST_CASE("lexicon frequency counts each covered token once") {
  Lexicon lex("t", {"new york", "york", "the"});
  auto seq = tokenize("The new york times in new york.");
  // the, new, york, new, york are covered out of 7 words
  CHECK(lexicon_frequency(seq, lex) == doctest::Approx(5.0 / 7.0));
  Lexicon nums = Lexicon("n", {"two"}, true);
  CHECK(lexicon_frequency(tokenize("Two of 15 and 23rd were 4,000."), nums) == doctest::Approx(4.0 / 7.0));
  CHECK_THROWS_AS(lexicon_frequency(tokenize(""), lex), UndefinedInput);
  CHECK_THROWS_AS(Lexicon("empty", {"", "  "}), ValidationError);
}

TEST_CASE("lexicon text parsing skips comments and blanks") {
  auto entries = parse_lexicon_text("# header\nthe\n\n  a  \nnew york # trailing\n");
  CHECK(entries == std::vector<std::string>{"the", "a", "new york"});
  CHECK(builtin_lexicons().contains("function_words"));
  CHECK(builtin_lexicons().contains("pronouns"));
}

TEST_CASE("registry validation and json round trip") {
  const auto& reg = MetricRegistry::default_registry();
  CHECK(reg.count(1) == 3);
  CHECK(reg.count(2) == 4);
  CHECK(reg.count(3) == 2);
  CHECK(reg.count(4) == 9);
  auto back = MetricRegistry::from_json(reg.to_json());
  CHECK(back.to_json() == reg.to_json());

  MetricSpec bad;
  bad.id = "x";
  bad.dimension = 5;
  bad.source = MetricSource::external;
  CHECK_THROWS_AS(MetricRegistry({bad}, {}), ValidationError);
  bad.dimension = 1;
  CHECK_THROWS_AS(MetricRegistry({bad, bad}, {}), ValidationError);
  MetricSpec lex;
  lex.id = "y";
  lex.kind = NativeKind::lexicon_frequency;
  lex.lexicon = "missing";
  CHECK_THROWS_AS(MetricRegistry({lex}, {}), ValidationError);
}

TEST_CASE("golden HotpotQA samples") {
  auto corpus = golden();
  const auto& reg = MetricRegistry::default_registry();
  auto v1 = compute_metric_vector(*corpus.find("5a7322a25542991f9a20c634"), reg);
  auto v2 = compute_metric_vector(*corpus.find("5a72bd0b5542992359bc318f"), reg);
  CHECK(std::abs(v1.values.at("intra1") - 0.521) <= 0.05);
  CHECK(std::abs(v2.values.at("intra1") - 0.608) <= 0.05);
  CHECK(std::abs(v1.values.at("ent1") - 6.243) <= 0.3);
  CHECK(std::abs(v2.values.at("ent1") - 6.363) <= 0.3);
  CHECK(std::abs(v1.values.at("flesch_kincaid") - 16.748) <= 1.0);
  CHECK(std::abs(v1.values.at("ari") - 17.659) <= 1.0);
  CHECK(v1.values.at("nfacts") == 2);
  CHECK(v2.values.at("nfacts") == 3);
  // no external features merged
  CHECK_FALSE(v1.is_complete("bertscore"));
  CHECK(v1.is_complete("bleu_n"));
  CHECK(v1.complete.size() == reg.specs().size());
}

TEST_CASE("metric vector json round trip and empty text") {
  Sample s;
  s.id = "e";
  s.question = "";
  s.answers.push_back({"x", std::nullopt});
  auto v = compute_metric_vector(s, MetricRegistry::default_registry());
  CHECK_FALSE(v.is_complete("intra1"));
  CHECK_FALSE(v.is_complete("flesch_kincaid"));
  CHECK(metric_vector_from_json(to_json(v)) == v);
}

}
