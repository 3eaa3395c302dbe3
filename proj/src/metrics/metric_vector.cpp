#include "capa/metrics/metric_vector.hpp"

#include <cmath>

#include "capa/error.hpp"
#include "capa/metrics/text.hpp"

namespace capa::metrics {

using nlohmann::json;

bool MetricVector::is_complete(const std::string& id) const {
  auto it = complete.find(id);
  return it != complete.end() && it->second;
}

MetricVector compute_metric_vector(const Sample& sample, const MetricRegistry& registry) {
  MetricVector out;
  out.sample_id = sample.id;
  out.split = sample.split;

  // Tokenize each scope text once.
  const TokenSequence question = tokenize(sample.question);
  const TokenSequence context = tokenize(sample.context);
  const TokenSequence joined = tokenize(sample.context.empty() ? sample.question
                                                                : sample.question + " " + sample.context);

  for (const auto& spec : registry.specs()) {
    std::optional<double> value;
    try {
      switch (spec.source) {
        case MetricSource::external: {
          auto it = sample.features.find(spec.id);
          if (it != sample.features.end()) value = it->second;
          break;
        }
        case MetricSource::dataset_field:
          if (sample.supporting_fact_count) value = static_cast<double>(*sample.supporting_fact_count);
          break;
        case MetricSource::native: {
          const TokenSequence& text = spec.scope == Scope::question_only ? question : joined;
          switch (spec.kind) {
            case NativeKind::intra: value = ngram_diversity(text, static_cast<std::size_t>(spec.n)); break;
            case NativeKind::entropy:
              value = ngram_entropy(text, static_cast<std::size_t>(spec.n), spec.log_base);
              break;
            case NativeKind::lexicon_frequency: {
              const Lexicon& lex = registry.lexicon(spec.numeric_pattern ? "#" + spec.id : spec.lexicon);
              value = lexicon_frequency(text, lex);
              break;
            }
            case NativeKind::flesch_kincaid: value = readability(text, ReadabilityKind::flesch_kincaid); break;
            case NativeKind::ari: value = readability(text, ReadabilityKind::ari); break;
            case NativeKind::bleu: value = overlap_bleu(question, context, spec.n_max); break;
            case NativeKind::none: break;
          }
          break;
        }
      }
    } catch (const UndefinedInput&) {
      value.reset();
    }
    const bool ok = value && std::isfinite(*value);
    out.complete[spec.id] = ok;
    if (ok) out.values[spec.id] = *value;
  }
  return out;
}

json to_json(const MetricVector& v) {
  json incomplete = json::array();
  for (const auto& [id, ok] : v.complete)
    if (!ok) incomplete.push_back(id);
  return json{{"sample_id", v.sample_id},
              {"split", to_string(v.split)},
              {"values", v.values},
              {"incomplete", std::move(incomplete)}};
}

MetricVector metric_vector_from_json(const json& j) {
  MetricVector v;
  try {
    v.sample_id = j.at("sample_id").get<std::string>();
    v.split = parse_split(j.value("split", std::string("train")));
    v.values = j.at("values").get<std::map<std::string, double>>();
    for (const auto& [id, value] : v.values) {
      if (!std::isfinite(value)) throw ValidationError("metric " + id + " is not finite");
      v.complete[id] = true;
    }
    if (j.contains("incomplete"))
      for (const auto& id : j.at("incomplete")) v.complete[id.get<std::string>()] = false;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("metric vector: ") + e.what());
  }
  return v;
}

}  // namespace capa::metrics
