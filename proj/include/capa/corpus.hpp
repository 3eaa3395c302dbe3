#pragma once
// QA corpus data model and ingestion from line-delimited JSON records.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace capa {

enum class QuestionStyle { extractive, multiple_choice };
enum class Split { train, dev };

struct AnswerSpan {
  std::string text;
  std::optional<std::int64_t> start;

  bool operator==(const AnswerSpan&) const = default;
};

struct Sample {
  std::string id;
  std::string question;
  std::string context;
  QuestionStyle style = QuestionStyle::extractive;
  std::vector<AnswerSpan> answers;      // extractive
  std::vector<std::string> candidates;  // multiple_choice
  std::optional<std::int64_t> correct_index;
  std::optional<std::int64_t> supporting_fact_count;
  Split split = Split::train;
  std::map<std::string, double> features;  // merged external metric values

  bool operator==(const Sample&) const = default;
};

struct ExternalFeatureRecord {
  std::string sample_id;
  std::map<std::string, double> values;
};

/// Ordered, id-unique sample collection. Iteration order is insertion order.
class Corpus {
 public:
  Corpus() = default;

  /// Throws ValidationError on a duplicate id or an invalid sample.
  void add(Sample sample);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample* find(const std::string& id) const;
  Sample* find_mutable(const std::string& id);

  bool operator==(const Corpus& other) const { return samples_ == other.samples_; }

 private:
  std::vector<Sample> samples_;
  std::map<std::string, std::size_t> index_;
};

/// One record skipped during ingestion. line is 1-based, 0 when not line-oriented.
struct Reject {
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct LoadResult {
  Corpus corpus;
  std::vector<Reject> rejects;
};

struct MergeResult {
  Corpus corpus;
  std::vector<Reject> rejects;
};

struct ValidationReport {
  std::map<std::string, std::vector<std::string>> missing;  // metric id → sample ids
  std::vector<std::string> violations;

  bool clean() const { return missing.empty() && violations.empty(); }
};

/// Returns a description of the first violated Sample invariant, or nullopt.
std::optional<std::string> check_sample(const Sample& sample);

Sample sample_from_json(const nlohmann::json& j);
nlohmann::json sample_to_json(const Sample& s);
ExternalFeatureRecord feature_record_from_json(const nlohmann::json& j);

std::string to_string(QuestionStyle style);
std::string to_string(Split split);
QuestionStyle parse_style(const std::string& s);
Split parse_split(const std::string& s);

/// Reads a unified JSONL corpus. Throws IoError if the file is unreadable; bad
/// records (parse errors, duplicate ids, invariant violations) are rejected
/// and reported, and loading continues.
LoadResult load_corpus(const std::filesystem::path& path);
LoadResult parse_corpus(std::istream& in);

void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Feature files use the same framing: one {sample_id, values} object per line.
std::vector<ExternalFeatureRecord> load_feature_records(const std::filesystem::path& path,
                                                        std::vector<Reject>* rejects = nullptr);

/// External metric ids accepted by merge_features when no explicit set is given.
const std::set<std::string>& default_external_metrics();

/// Merges external feature values; later records win per (sample, metric).
/// Throws ValidationError listing every unknown sample id. Records with a
/// non-finite value or an unregistered metric id are rejected whole.
MergeResult merge_features(const Corpus& corpus, const std::vector<ExternalFeatureRecord>& records,
                           const std::set<std::string>& allowed_metrics = default_external_metrics());

ValidationReport validate(const Corpus& corpus, const std::set<std::string>& required_metrics);

}  // namespace capa
