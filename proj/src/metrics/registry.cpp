#include "capa/metrics/registry.hpp"

#include <set>

#include "capa/error.hpp"
#include "capa/jsonl.hpp"

namespace capa::metrics {

using nlohmann::json;

std::string to_string(MetricSource s) {
  switch (s) {
    case MetricSource::native: return "native";
    case MetricSource::external: return "external";
    case MetricSource::dataset_field: return "dataset_field";
  }
  return "?";
}

std::string to_string(Orientation o) {
  return o == Orientation::higher_is_harder ? "higher_is_harder" : "lower_is_harder";
}

std::string to_string(Scope s) { return s == Scope::question_only ? "question_only" : "question_plus_context"; }

std::string to_string(NativeKind k) {
  switch (k) {
    case NativeKind::none: return "none";
    case NativeKind::intra: return "intra";
    case NativeKind::entropy: return "entropy";
    case NativeKind::lexicon_frequency: return "lexicon_frequency";
    case NativeKind::flesch_kincaid: return "flesch_kincaid";
    case NativeKind::ari: return "ari";
    case NativeKind::bleu: return "bleu";
  }
  return "?";
}

namespace {

template <typename E>
E parse_enum(const std::string& text, std::initializer_list<E> values, const char* what) {
  for (E v : values)
    if (to_string(v) == text) return v;
  throw ValidationError(std::string("unknown ") + what + ": " + text);
}

MetricSpec native(std::string id, int dim, NativeKind kind) {
  MetricSpec s;
  s.id = std::move(id);
  s.dimension = dim;
  s.kind = kind;
  return s;
}

MetricSpec lexical(std::string id, int dim, std::string lexicon, bool numeric = false) {
  MetricSpec s = native(std::move(id), dim, NativeKind::lexicon_frequency);
  s.lexicon = std::move(lexicon);
  s.numeric_pattern = numeric;
  return s;
}

MetricSpec external(std::string id, int dim, Orientation o = Orientation::higher_is_harder) {
  MetricSpec s;
  s.id = std::move(id);
  s.dimension = dim;
  s.source = MetricSource::external;
  s.orientation = o;
  return s;
}

}  // namespace

MetricRegistry::MetricRegistry(std::vector<MetricSpec> specs, std::map<std::string, Lexicon> lexicons)
    : specs_(std::move(specs)), lexicons_(std::move(lexicons)) {
  std::set<std::string> seen;
  for (const auto& s : specs_) {
    if (s.id.empty()) throw ValidationError("registry: empty metric id");
    if (!seen.insert(s.id).second) throw ValidationError("registry: duplicate metric id " + s.id);
    if (s.dimension < 1 || s.dimension > static_cast<int>(kDimensions))
      throw ValidationError("registry: metric " + s.id + " has dimension outside 1..4");
    if (s.source == MetricSource::native) {
      if (s.kind == NativeKind::none) throw ValidationError("registry: native metric " + s.id + " has no kind");
      if (s.kind == NativeKind::lexicon_frequency && !lexicons_.contains(s.lexicon))
        throw ValidationError("registry: metric " + s.id + " references unknown lexicon '" + s.lexicon + "'");
      if ((s.kind == NativeKind::intra || s.kind == NativeKind::entropy) && s.n < 1)
        throw ValidationError("registry: metric " + s.id + " needs n >= 1");
      if (s.kind == NativeKind::bleu && (s.n_max < 1 || s.n_max > 4))
        throw ValidationError("registry: metric " + s.id + " needs n_max in [1,4]");
    }
    if (s.source == MetricSource::dataset_field && s.field != "supporting_fact_count")
      throw ValidationError("registry: metric " + s.id + " names unsupported dataset field '" + s.field + "'");
  }
  // Bake the numeric flag into per-metric copies.
  for (const auto& s : specs_)
    if (s.source == MetricSource::native && s.kind == NativeKind::lexicon_frequency && s.numeric_pattern)
      lexicons_.insert_or_assign("#" + s.id, lexicons_.at(s.lexicon).with_numeric_pattern(true));
}

const MetricRegistry& MetricRegistry::default_registry() {
  static const MetricRegistry registry = [] {
    std::vector<MetricSpec> specs;
    // c1: reading words
    specs.push_back(native("intra1", 1, NativeKind::intra));
    auto ent = native("ent1", 1, NativeKind::entropy);
    ent.log_base = 2.0;
    specs.push_back(ent);
    specs.push_back(lexical("ntopwords", 1, "function_words"));
    // c2: reading sentences
    specs.push_back(external("tree_height", 2));
    specs.push_back(external("tree_width", 2));
    specs.push_back(native("flesch_kincaid", 2, NativeKind::flesch_kincaid));
    specs.push_back(native("ari", 2, NativeKind::ari));
    // c3: understanding words
    specs.push_back(lexical("nnums", 3, "numeric", true));
    specs.push_back(lexical("nlogicals", 3, "logical_qualifiers"));
    // c4: understanding sentences
    auto bleu = native("bleu_n", 4, NativeKind::bleu);
    bleu.orientation = Orientation::lower_is_harder;
    specs.push_back(bleu);
    specs.push_back(external("bertscore", 4, Orientation::lower_is_harder));
    specs.push_back(external("moverscore", 4, Orientation::lower_is_harder));
    specs.push_back(external("ls_score", 4, Orientation::lower_is_harder));
    specs.push_back(lexical("ncoreferences", 4, "pronouns"));
    specs.push_back(lexical("njunctions", 4, "coordinating_junctions"));
    specs.push_back(lexical("ncausals", 4, "causal_markers"));
    specs.push_back(lexical("nspatialtemporals", 4, "spatial_temporal"));
    MetricSpec facts;
    facts.id = "nfacts";
    facts.dimension = 4;
    facts.source = MetricSource::dataset_field;
    facts.field = "supporting_fact_count";
    specs.push_back(facts);
    return MetricRegistry(std::move(specs), builtin_lexicons());
  }();
  return registry;
}

MetricRegistry MetricRegistry::from_json(const json& j, const std::filesystem::path& base_dir) {
  const json* list = &j;
  if (j.is_object()) {
    if (!j.contains("metrics")) throw ValidationError("registry: missing 'metrics'");
    list = &j.at("metrics");
  }
  if (!list->is_array()) throw ValidationError("registry: 'metrics' must be an array");

  std::map<std::string, Lexicon> lexicons = builtin_lexicons();
  if (j.is_object() && j.contains("lexicon_dir")) {
    std::filesystem::path dir = j.at("lexicon_dir").get<std::string>();
    if (dir.is_relative()) dir = base_dir / dir;
    if (!std::filesystem::is_directory(dir)) throw IoError("registry: lexicon_dir not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.path().extension() == ".txt")
        lexicons.insert_or_assign(entry.path().stem().string(), load_lexicon(entry.path()));
  }

  std::vector<MetricSpec> specs;
  try {
    for (const auto& m : *list) {
      MetricSpec s;
      s.id = m.at("id").get<std::string>();
      s.dimension = m.at("dimension").get<int>();
      s.source = parse_enum(m.at("source").get<std::string>(),
                            {MetricSource::native, MetricSource::external, MetricSource::dataset_field}, "source");
      s.orientation = parse_enum(m.value("orientation", std::string("higher_is_harder")),
                                 {Orientation::higher_is_harder, Orientation::lower_is_harder}, "orientation");
      s.scope = parse_enum(m.value("scope", std::string("question_plus_context")),
                           {Scope::question_only, Scope::question_plus_context}, "scope");
      s.kind = parse_enum(m.value("kind", std::string("none")),
                          {NativeKind::none, NativeKind::intra, NativeKind::entropy, NativeKind::lexicon_frequency,
                           NativeKind::flesch_kincaid, NativeKind::ari, NativeKind::bleu},
                          "kind");
      s.n = m.value("n", 1);
      s.log_base = m.value("log_base", 2.0);
      s.lexicon = m.value("lexicon", std::string());
      s.numeric_pattern = m.value("numeric_pattern", false);
      s.n_max = m.value("n_max", 2);
      s.field = m.value("field", std::string());
      specs.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("registry: ") + e.what());
  }
  return MetricRegistry(std::move(specs), std::move(lexicons));
}

MetricRegistry MetricRegistry::load(const std::filesystem::path& path) {
  return from_json(jsonl::read_json(path), path.parent_path());
}

json MetricRegistry::to_json() const {
  json metrics = json::array();
  for (const auto& s : specs_) {
    json m{{"id", s.id},
           {"dimension", s.dimension},
           {"source", to_string(s.source)},
           {"orientation", to_string(s.orientation)},
           {"scope", to_string(s.scope)}};
    if (s.source == MetricSource::native) {
      m["kind"] = to_string(s.kind);
      switch (s.kind) {
        case NativeKind::intra: m["n"] = s.n; break;
        case NativeKind::entropy:
          m["n"] = s.n;
          m["log_base"] = s.log_base;
          break;
        case NativeKind::lexicon_frequency:
          m["lexicon"] = s.lexicon;
          if (s.numeric_pattern) m["numeric_pattern"] = true;
          break;
        case NativeKind::bleu: m["n_max"] = s.n_max; break;
        default: break;
      }
    }
    if (s.source == MetricSource::dataset_field) m["field"] = s.field;
    metrics.push_back(std::move(m));
  }
  return json{{"version", 1}, {"metrics", std::move(metrics)}};
}

const MetricSpec* MetricRegistry::find(const std::string& id) const {
  for (const auto& s : specs_)
    if (s.id == id) return &s;
  return nullptr;
}

const MetricSpec& MetricRegistry::at(const std::string& id) const {
  if (const auto* s = find(id)) return *s;
  throw ValidationError("unknown metric id: " + id);
}

std::vector<const MetricSpec*> MetricRegistry::dimension(int dim) const {
  std::vector<const MetricSpec*> out;
  for (const auto& s : specs_)
    if (s.dimension == dim) out.push_back(&s);
  return out;
}

std::size_t MetricRegistry::count(int dim) const { return dimension(dim).size(); }

const Lexicon& MetricRegistry::lexicon(const std::string& name) const {
  auto it = lexicons_.find(name);
  if (it == lexicons_.end()) throw ValidationError("unknown lexicon: " + name);
  return it->second;
}

std::vector<std::string> MetricRegistry::ids(MetricSource source) const {
  std::vector<std::string> out;
  for (const auto& s : specs_)
    if (s.source == source) out.push_back(s.id);
  return out;
}

}  // namespace capa::metrics
