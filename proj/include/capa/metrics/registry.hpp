#pragma once
// Metric registry: which metric feeds which capability dimension, where its
// value comes from, and which direction means harder.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capa/metrics/lexicon.hpp"

namespace capa::metrics {

inline constexpr std::size_t kDimensions = 4;

enum class MetricSource { native, external, dataset_field };
enum class Orientation { higher_is_harder, lower_is_harder };
enum class Scope { question_only, question_plus_context };
enum class NativeKind { none, intra, entropy, lexicon_frequency, flesch_kincaid, ari, bleu };

struct MetricSpec {
  std::string id;
  int dimension = 1;  // 1..4
  MetricSource source = MetricSource::native;
  Orientation orientation = Orientation::higher_is_harder;
  Scope scope = Scope::question_plus_context;

  // native parameters
  NativeKind kind = NativeKind::none;
  int n = 1;
  double log_base = 2.0;
  std::string lexicon;
  bool numeric_pattern = false;
  int n_max = 2;

  // dataset_field metrics name the Sample field they copy
  std::string field;
};

class MetricRegistry {
 public:
  MetricRegistry() = default;

  /// Throws ValidationError on a duplicate id, a dimension outside 1..4, or a
  /// native metric whose lexicon is not among `lexicons`.
  MetricRegistry(std::vector<MetricSpec> specs, std::map<std::string, Lexicon> lexicons);

  /// Built-in metric set with the shipped lexicons.
  static const MetricRegistry& default_registry();

  static MetricRegistry from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static MetricRegistry load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<MetricSpec>& specs() const { return specs_; }
  const MetricSpec* find(const std::string& id) const;
  const MetricSpec& at(const std::string& id) const;
  std::vector<const MetricSpec*> dimension(int dim) const;
  /// n(i): number of registered metrics for dimension i (1-based).
  std::size_t count(int dim) const;
  const Lexicon& lexicon(const std::string& name) const;
  std::vector<std::string> ids(MetricSource source) const;

 private:
  std::vector<MetricSpec> specs_;
  std::map<std::string, Lexicon> lexicons_;
};

std::string to_string(MetricSource s);
std::string to_string(Orientation o);
std::string to_string(Scope s);
std::string to_string(NativeKind k);

}  // namespace capa::metrics
