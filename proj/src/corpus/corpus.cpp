#include "capa/corpus.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "capa/error.hpp"
#include "capa/jsonl.hpp"

namespace capa {

using nlohmann::json;

std::string to_string(QuestionStyle style) {
  return style == QuestionStyle::extractive ? "extractive" : "multiple_choice";
}

std::string to_string(Split split) { return split == Split::train ? "train" : "dev"; }

QuestionStyle parse_style(const std::string& s) {
  if (s == "extractive") return QuestionStyle::extractive;
  if (s == "multiple_choice") return QuestionStyle::multiple_choice;
  throw ValidationError("unknown style: " + s);
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  throw ValidationError("unknown split: " + s);
}

std::optional<std::string> check_sample(const Sample& s) {
  if (s.id.empty()) return "empty id";
  if (s.style == QuestionStyle::extractive) {
    if (s.answers.empty()) return "extractive sample without answer spans";
  } else {
    if (s.candidates.size() < 2) return "multiple_choice sample with fewer than 2 candidates";
    if (!s.correct_index || *s.correct_index < 0 ||
        *s.correct_index >= static_cast<std::int64_t>(s.candidates.size()))
      return "multiple_choice sample without a valid correct_index";
  }
  if (s.supporting_fact_count && *s.supporting_fact_count < 0) return "negative supporting_fact_count";
  for (const auto& [metric, value] : s.features)
    if (!std::isfinite(value)) return "non-finite feature " + metric;
  return std::nullopt;
}

void Corpus::add(Sample sample) {
  if (auto problem = check_sample(sample)) throw ValidationError(sample.id + ": " + *problem);
  if (index_.contains(sample.id)) throw ValidationError("duplicate id: " + sample.id);
  index_.emplace(sample.id, samples_.size());
  samples_.push_back(std::move(sample));
}

const Sample* Corpus::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &samples_[it->second];
}

Sample* Corpus::find_mutable(const std::string& id) {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &samples_[it->second];
}

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

std::optional<std::int64_t> optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer");
  return j.at(key).get<std::int64_t>();
}

std::map<std::string, double> feature_map(const json& j) {
  if (!j.is_object()) throw ValidationError("features must be an object");
  std::map<std::string, double> out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ValidationError("feature '" + key + "' is not a number");
    out[key] = value.get<double>();
  }
  return out;
}

}  // namespace

Sample sample_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record is not an object");
  Sample s;
  s.id = field<std::string>(j, "id");
  s.question = field<std::string>(j, "question");
  s.context = j.contains("context") ? field<std::string>(j, "context") : std::string();
  s.style = j.contains("style") ? parse_style(field<std::string>(j, "style")) : QuestionStyle::extractive;
  s.split = j.contains("split") ? parse_split(field<std::string>(j, "split")) : Split::train;
  if (j.contains("answers")) {
    if (!j.at("answers").is_array()) throw ValidationError("answers must be an array");
    for (const auto& a : j.at("answers")) {
      AnswerSpan span;
      if (a.is_string()) {
        span.text = a.get<std::string>();
      } else if (a.is_object()) {
        span.text = field<std::string>(a, "text");
        span.start = optional_int(a, "answer_start");
      } else {
        throw ValidationError("answer entries must be strings or objects");
      }
      s.answers.push_back(std::move(span));
    }
  }
  if (j.contains("candidates")) s.candidates = field<std::vector<std::string>>(j, "candidates");
  s.correct_index = optional_int(j, "correct_index");
  s.supporting_fact_count = optional_int(j, "supporting_fact_count");
  if (j.contains("features")) s.features = feature_map(j.at("features"));
  return s;
}

json sample_to_json(const Sample& s) {
  json j;
  j["id"] = s.id;
  j["question"] = s.question;
  j["context"] = s.context;
  j["style"] = to_string(s.style);
  j["split"] = to_string(s.split);
  if (s.style == QuestionStyle::extractive || !s.answers.empty()) {
    json answers = json::array();
    for (const auto& a : s.answers) {
      json aj{{"text", a.text}};
      if (a.start) aj["answer_start"] = *a.start;
      answers.push_back(std::move(aj));
    }
    j["answers"] = std::move(answers);
  }
  if (!s.candidates.empty()) j["candidates"] = s.candidates;
  if (s.correct_index) j["correct_index"] = *s.correct_index;
  if (s.supporting_fact_count) j["supporting_fact_count"] = *s.supporting_fact_count;
  if (!s.features.empty()) j["features"] = s.features;
  return j;
}

ExternalFeatureRecord feature_record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("feature record is not an object");
  ExternalFeatureRecord r;
  r.sample_id = field<std::string>(j, "sample_id");
  if (!j.contains("values")) throw ValidationError("missing field 'values'");
  r.values = feature_map(j.at("values"));
  return r;
}

LoadResult parse_corpus(std::istream& in) {
  LoadResult result;
  jsonl::for_each(
      in,
      [&](std::size_t line, const json& j) {
        std::string id = j.is_object() && j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
        try {
          result.corpus.add(sample_from_json(j));
        } catch (const ValidationError& e) {
          result.rejects.push_back({line, id, e.what()});
        }
      },
      [&](std::size_t line, const std::string& why) { result.rejects.push_back({line, "", why}); });
  return result;
}

LoadResult load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus: " + path.string());
  return parse_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& s : corpus.samples()) out << sample_to_json(s).dump() << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ostringstream out;
  write_corpus(corpus, out);
  jsonl::write_text(path, out.str());
}

std::vector<ExternalFeatureRecord> load_feature_records(const std::filesystem::path& path,
                                                        std::vector<Reject>* rejects) {
  std::vector<ExternalFeatureRecord> records;
  auto reject = [&](std::size_t line, const std::string& id, const std::string& why) {
    if (!rejects) throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + why);
    rejects->push_back({line, id, why});
  };
  jsonl::for_each_file(
      path,
      [&](std::size_t line, const json& j) {
        try {
          records.push_back(feature_record_from_json(j));
        } catch (const ValidationError& e) {
          reject(line, "", e.what());
        }
      },
      [&](std::size_t line, const std::string& why) { reject(line, "", why); });
  return records;
}

const std::set<std::string>& default_external_metrics() {
  static const std::set<std::string> ids{"bertscore", "moverscore", "ls_score", "tree_height", "tree_width"};
  return ids;
}

MergeResult merge_features(const Corpus& corpus, const std::vector<ExternalFeatureRecord>& records,
                           const std::set<std::string>& allowed_metrics) {
  std::vector<std::string> unknown;
  for (const auto& r : records)
    if (!corpus.find(r.sample_id)) unknown.push_back(r.sample_id);
  if (!unknown.empty()) {
    std::string msg = "feature records reference unknown sample ids:";
    for (const auto& id : unknown) msg += " " + id;
    throw ValidationError(msg);
  }

  MergeResult result{corpus, {}};
  std::size_t ordinal = 0;
  for (const auto& r : records) {
    ++ordinal;
    std::optional<std::string> problem;
    for (const auto& [metric, value] : r.values) {
      if (!allowed_metrics.contains(metric)) {
        problem = "unregistered external metric '" + metric + "'";
        break;
      }
      if (!std::isfinite(value)) {
        problem = "non-finite value for '" + metric + "'";
        break;
      }
    }
    if (problem) {
      result.rejects.push_back({ordinal, r.sample_id, *problem});
      continue;
    }
    Sample* s = result.corpus.find_mutable(r.sample_id);
    for (const auto& [metric, value] : r.values) s->features[metric] = value;
  }
  return result;
}

ValidationReport validate(const Corpus& corpus, const std::set<std::string>& required_metrics) {
  ValidationReport report;
  for (const auto& s : corpus.samples()) {
    if (auto problem = check_sample(s)) report.violations.push_back(s.id + ": " + *problem);
    for (const auto& metric : required_metrics)
      if (!s.features.contains(metric)) report.missing[metric].push_back(s.id);
  }
  return report;
}

}  // namespace capa
