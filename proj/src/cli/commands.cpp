#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "capa/assessment.hpp"
#include "capa/cli.hpp"
#include "capa/corpus.hpp"
#include "capa/error.hpp"
#include "capa/jsonl.hpp"
#include "capa/metrics/metric_vector.hpp"
#include "capa/metrics/registry.hpp"
#include "capa/scheduler.hpp"
#include "capa/simlab.hpp"
#include "capa/valuation/normalizer.hpp"
#include "capa/valuation/stats.hpp"
#include "capa/valuation/whitening.hpp"

namespace capa::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
};

// Per-invocation state: path resolution, provenance and progress messages.
class Run {
 public:
  Run(std::string command, const Globals& g) : g_(g) {
    manifest_.command = std::move(command);
    manifest_.engine_version = CAPA_VERSION;
    manifest_.started_at = utc_now();
  }

  fs::path input(const std::string& path) {
    if (path.empty()) throw ValidationError("missing required input path");
    if (!fs::is_regular_file(path)) throw IoError("input file not found: " + path);
    manifest_.inputs.push_back({path, sha256_hex(path)});
    return path;
  }

  fs::path output_path(const std::string& path) const {
    if (path.empty()) throw ValidationError("missing required output path");
    fs::path p(path);
    if (!g_.out_dir.empty() && p.is_relative()) p = fs::path(g_.out_dir) / p;
    return p;
  }

  void output(const fs::path& p) { manifest_.outputs.push_back({p.string(), sha256_hex(p)}); }

  void set(const std::string& key, json value) { manifest_.config[key] = std::move(value); }
  const Globals& globals() const { return g_; }

  void info(const std::string& msg) const {
    if (!g_.quiet) std::cerr << msg << '\n';
  }

  void finish(int code, const std::string& error, double seconds) {
    manifest_.exit_code = code;
    manifest_.error = error;
    manifest_.duration_s = seconds;
    fs::path dir = g_.out_dir;
    if (dir.empty() && !manifest_.outputs.empty()) dir = fs::path(manifest_.outputs.front().path).parent_path();
    if (dir.empty()) dir = ".";
    try {
      append_manifest(manifest_, dir);
    } catch (const std::exception& e) {
      std::cerr << "warning: " << e.what() << '\n';
    }
  }

 private:
  Globals g_;
  RunManifest manifest_;
};

// Default file under CAPA_CONFIG_DIR, when the variable is set and the file exists.
std::string config_default(const std::string& given, const char* file) {
  if (!given.empty()) return given;
  const char* dir = std::getenv("CAPA_CONFIG_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  const fs::path p = fs::path(dir) / file;
  return fs::is_regular_file(p) ? p.string() : std::string{};
}

const metrics::MetricRegistry& registry_from(Run& run, const std::string& path, metrics::MetricRegistry& storage) {
  if (path.empty()) {
    run.set("registry", "builtin");
    return metrics::MetricRegistry::default_registry();
  }
  storage = metrics::MetricRegistry::load(run.input(path));
  run.set("registry", path);
  return storage;
}

std::vector<metrics::MetricVector> load_metric_vectors(const fs::path& path) {
  std::vector<metrics::MetricVector> out;
  jsonl::for_each_file(path, [&](std::size_t, const json& j) { out.push_back(metrics::metric_vector_from_json(j)); });
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input, out, metrics_list;
  std::vector<std::string> features;
};

void cmd_ingest(Run& run, const IngestArgs& a) {
  const auto in = run.input(a.input);
  const auto loaded = load_corpus(in);
  for (const auto& r : loaded.rejects)
    run.info("rejected line " + std::to_string(r.line) + (r.id.empty() ? "" : " (" + r.id + ")") + ": " + r.reason);

  Corpus corpus = loaded.corpus;
  std::size_t feature_rejects = 0;
  std::set<std::string> allowed = default_external_metrics();
  if (!a.metrics_list.empty()) {
    allowed.clear();
    std::stringstream ss(a.metrics_list);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) allowed.insert(item);
  }
  for (const auto& f : a.features) {
    std::vector<Reject> rejects;
    const auto records = load_feature_records(run.input(f), &rejects);
    auto merged = merge_features(corpus, records, allowed);
    rejects.insert(rejects.end(), merged.rejects.begin(), merged.rejects.end());
    for (const auto& r : rejects) run.info(f + ": rejected " + r.id + ": " + r.reason);
    feature_rejects += rejects.size();
    corpus = std::move(merged.corpus);
  }
  const auto out = run.output_path(a.out);
  save_corpus(corpus, out);
  run.output(out);
  run.set("samples", corpus.size());
  run.set("rejected_records", loaded.rejects.size());
  run.set("rejected_feature_records", feature_rejects);
  run.info("ingested " + std::to_string(corpus.size()) + " samples, " + std::to_string(loaded.rejects.size()) +
           " malformed");
}

struct ScoreArgs {
  std::string corpus, registry, out;
};

void cmd_score(Run& run, const ScoreArgs& a) {
  metrics::MetricRegistry storage;
  const auto& reg = registry_from(run, config_default(a.registry, "registry.json"), storage);
  const auto loaded = load_corpus(run.input(a.corpus));
  if (!loaded.rejects.empty())
    throw ValidationError(a.corpus + ": " + std::to_string(loaded.rejects.size()) + " malformed records (first at line " +
                          std::to_string(loaded.rejects.front().line) + ": " + loaded.rejects.front().reason + ")");
  std::vector<json> rows;
  std::size_t incomplete = 0;
  for (const auto& s : loaded.corpus.samples()) {
    const auto v = metrics::compute_metric_vector(s, reg);
    for (const auto& [id, ok] : v.complete)
      if (!ok) ++incomplete;
    rows.push_back(metrics::to_json(v));
  }
  const auto out = run.output_path(a.out);
  jsonl::write_all(out, rows);
  run.output(out);
  run.set("samples", rows.size());
  run.set("incomplete_values", incomplete);
}

struct NormalizeArgs {
  std::string metrics, registry, out, model_out;
};

void cmd_normalize(Run& run, const NormalizeArgs& a) {
  metrics::MetricRegistry storage;
  const auto& reg = registry_from(run, config_default(a.registry, "registry.json"), storage);
  const auto vectors = load_metric_vectors(run.input(a.metrics));
  const auto model = valuation::fit_normalizer(valuation::metric_columns(vectors, Split::train), reg);
  const ScoreMatrix scores = valuation::score_vectors(vectors, model, reg);
  const auto out = run.output_path(a.out);
  save_scores(scores, out);
  run.output(out);
  if (!a.model_out.empty()) {
    const auto mo = run.output_path(a.model_out);
    jsonl::write_json(mo, model.to_json());
    run.output(mo);
  }
  run.set("samples", scores.size());
}

struct WhitenArgs {
  std::string scores, out, model_out;
  double epsilon = valuation::kDefaultZcaEpsilon;
};

void cmd_whiten(Run& run, const WhitenArgs& a) {
  ScoreMatrix scores = load_scores(run.input(a.scores));
  run.set("epsilon", a.epsilon);
  ScoreMatrix train = scores.subset(Split::train);
  const auto model = valuation::fit_zca(train.raw_v, a.epsilon);
  scores.whitened_v = valuation::whiten(scores.raw_v, model);

  // Rescale within each split so train and dev values are each spread over [0, 1].
  Nx4Matrix rescaled(scores.size());
  for (Split split : {Split::train, Split::dev}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores.splits[i] == split) rows.push_back(i);
    if (rows.empty()) continue;
    Nx4Matrix part;
    for (auto r : rows) part.push_back(scores.whitened_v->row(r));
    const Nx4Matrix ranked = valuation::rank_rescale(part);
    for (std::size_t k = 0; k < rows.size(); ++k) rescaled.set_row(rows[k], ranked.row(k));
  }
  scores.rescaled_v = std::move(rescaled);

  const auto out = run.output_path(a.out);
  save_scores(scores, out);
  run.output(out);
  if (!a.model_out.empty()) {
    const auto mo = run.output_path(a.model_out);
    jsonl::write_json(mo, model.to_json());
    run.output(mo);
  }
}

struct CorrelateArgs {
  std::string scores, target, metrics, out, view = "rescaled";
};

void cmd_correlate(Run& run, const CorrelateArgs& a) {
  const ScoreMatrix all = load_scores(run.input(a.scores));
  const auto perf = assessment::load_performance(run.input(a.target));
  const ValueView view = parse_value_view(a.view);
  run.set("view", a.view);

  // Rows with a performance record only.
  std::set<std::string> have;
  for (const auto& r : perf) have.insert(r.sample_id);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (have.count(all.sample_ids[i])) rows.push_back(i);
  const ScoreMatrix scores = all.subset(rows);
  if (scores.size() < 6) throw ValidationError("correlate: fewer than 6 scored samples with performance records");
  const auto f = assessment::f_logits_for(scores, perf);
  const Nx4Matrix& m = scores.view(view);

  std::ostringstream out;
  out.precision(10);
  out << "name\tdimension\tr\tp\tpartial_rho\n";
  for (std::size_t d = 0; d < 4; ++d) {
    const auto col = m.column(d);
    const auto pr = valuation::pearson(col, f);
    out << "v" << d + 1 << '\t' << d + 1 << '\t' << pr.r << '\t' << pr.p << '\t'
        << valuation::partial_correlation(m, f, d) << '\n';
  }
  if (!a.metrics.empty()) {
    const auto vectors = load_metric_vectors(run.input(a.metrics));
    std::map<std::string, double> f_of;
    for (std::size_t i = 0; i < scores.size(); ++i) f_of[scores.sample_ids[i]] = f[i];
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> cols;
    for (const auto& v : vectors) {
      auto it = f_of.find(v.sample_id);
      if (it == f_of.end()) continue;
      for (const auto& [id, value] : v.values) {
        cols[id].first.push_back(value);
        cols[id].second.push_back(it->second);
      }
    }
    const auto& reg = metrics::MetricRegistry::default_registry();
    for (const auto& [id, xy] : cols) {
      const auto* spec = reg.find(id);
      out << id << '\t' << (spec ? std::to_string(spec->dimension) : std::string("-")) << '\t';
      try {
        const auto pr = valuation::pearson(xy.first, xy.second);
        out << pr.r << '\t' << pr.p;
      } catch (const UndefinedInput&) {
        out << "nan\tnan";
      }
      out << "\t\n";
    }
  }
  const auto path = run.output_path(a.out);
  jsonl::write_text(path, out.str());
  run.output(path);
}

struct MeasureArgs {
  std::string scores, perf, out, view = "rescaled";
  std::size_t k = assessment::kDefaultTopK;
  int stage = 0;
};

void cmd_measure(Run& run, const MeasureArgs& a) {
  const ScoreMatrix all = load_scores(run.input(a.scores));
  const auto perf = assessment::load_performance(run.input(a.perf));
  ScoreMatrix dev = all.subset(Split::dev);
  if (dev.size() == 0) throw ValidationError("measure: the score file has no dev samples");
  run.set("k", a.k);
  run.set("stage", a.stage);
  run.set("view", a.view);
  const auto state = assessment::measure_capabilities(dev, perf, a.k, a.stage, parse_value_view(a.view));
  const auto out = run.output_path(a.out);
  jsonl::write_json(out, state.to_json());
  run.output(out);
}

struct PlanArgs {
  std::string config, scores, state, prev, out, mode = "cbbc";
  std::size_t budget = 0;
};

void cmd_plan(Run& run, const PlanArgs& a) {
  scheduler::CurriculumConfig cfg;
  const std::string config_path = config_default(a.config, "curriculum.json");
  if (!config_path.empty()) cfg = scheduler::CurriculumConfig::from_json(jsonl::read_json(run.input(config_path)));
  if (run.globals().seed) cfg.seed = *run.globals().seed;
  cfg.validate();
  run.set("curriculum", cfg.to_json());
  run.set("mode", a.mode);

  const ScoreMatrix all = load_scores(run.input(a.scores));
  const ScoreMatrix train = all.subset(Split::train);
  std::optional<assessment::CapabilityState> state;
  if (!a.state.empty()) state = assessment::CapabilityState::from_json(jsonl::read_json(run.input(a.state)));
  const auto out = run.output_path(a.out);

  if (a.mode == "al") {
    if (!state) throw ValidationError("plan --mode al needs --state");
    run.set("budget", a.budget);
    const auto ids = scheduler::al_query(train, *state, a.budget, cfg.seed, cfg.gamma, cfg.value_view);
    jsonl::write_json(out, json{{"mode", "al"}, {"budget", a.budget}, {"seed", cfg.seed}, {"sample_ids", ids}});
  } else if (a.mode == "cbbc") {
    std::optional<scheduler::StagePlan> prev;
    if (!a.prev.empty()) prev = scheduler::load_plan(run.input(a.prev));
    const auto plan = scheduler::advance(cfg, state ? &*state : nullptr, train, prev ? &*prev : nullptr);
    scheduler::save_plan(plan, out);
    run.info("stage " + std::to_string(plan.stage) + ": " + std::to_string(plan.sampled_ids.size()) + " samples" +
             (plan.complete ? " (complete)" : ""));
  } else {
    throw ValidationError("plan: unknown mode " + a.mode);
  }
  run.output(out);
}

struct SimulateArgs {
  std::string config, out, mode = "curriculum";
  double budget_fraction = 0.0;
};

void cmd_simulate(Run& run, const SimulateArgs& a) {
  simlab::ExperimentConfig cfg;
  const std::string config_path = config_default(a.config, "experiment.json");
  if (!config_path.empty()) cfg = simlab::ExperimentConfig::from_json(jsonl::read_json(run.input(config_path)));
  if (run.globals().seed) cfg.seeds = {*run.globals().seed};
  if (a.budget_fraction > 0.0) cfg.budget_fraction = a.budget_fraction;
  cfg.validate();
  run.set("experiment", cfg.to_json());
  run.set("mode", a.mode);

  std::vector<simlab::TrialResult> results;
  if (a.mode == "al") results = simlab::run_al_experiment(cfg, cfg.budget_fraction);
  else if (a.mode == "curriculum") results = simlab::run_experiment(cfg);
  else throw ValidationError("simulate: unknown mode " + a.mode);

  const fs::path dir = run.output_path(a.out.empty() ? std::string(".") : a.out);
  std::vector<json> rows;
  for (const auto& r : results) rows.push_back(r.to_json());
  const auto summary = simlab::summarize(results);
  const std::vector<std::pair<fs::path, std::function<void(const fs::path&)>>> files{
      {dir / "trials.jsonl", [&](const fs::path& p) { jsonl::write_all(p, rows); }},
      {dir / "summary.tsv", [&](const fs::path& p) { jsonl::write_text(p, summary.to_tsv()); }},
      {dir / "curves.tsv", [&](const fs::path& p) { jsonl::write_text(p, summary.curves_tsv()); }},
  };
  for (const auto& [path, write] : files) {
    write(path);
    run.output(path);
  }
  for (const auto& [name, s] : summary.strategies)
    run.info(name + ": mean final " + std::to_string(s.mean_final) + " (sd " + std::to_string(s.sd_final) + ")");
}

struct ReportArgs {
  std::string kind, scores, perf, out, view = "rescaled";
};

void cmd_report(Run& run, const ReportArgs& a) {
  const ScoreMatrix scores = load_scores(run.input(a.scores));
  std::string text;
  run.set("kind", a.kind);
  if (a.kind == "distribution") {
    const auto perf = assessment::load_performance(run.input(a.perf));
    run.set("view", a.view);
    text = report_distribution(scores, perf, parse_value_view(a.view)).to_tsv();
  } else if (a.kind == "correlation") {
    text = report_correlation(scores).to_tsv();
  } else {
    throw ValidationError("report: unknown kind " + a.kind);
  }
  const auto out = run.output_path(a.out);
  jsonl::write_text(out, text);
  run.output(out);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"capa: capability-aware curriculum engine"};
  app.set_version_flag("--version", std::string(CAPA_VERSION));
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for sampling and simulation");
  app.add_option("--out-dir", g.out_dir, "Directory for relative outputs and manifest.jsonl");
  app.add_flag("--quiet,-q", g.quiet, "Suppress progress messages");

  std::function<void(Run&)> action;
  std::string command;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  IngestArgs ingest;
  auto* s_ingest = sub("ingest", "Load a unified JSONL corpus and merge external feature files");
  s_ingest->add_option("--input", ingest.input)->required();
  s_ingest->add_option("--features", ingest.features);
  s_ingest->add_option("--metrics", ingest.metrics_list, "Comma-separated accepted feature ids");
  s_ingest->add_option("--out", ingest.out)->required();
  s_ingest->callback([&] { command = "ingest"; action = [&](Run& r) { cmd_ingest(r, ingest); }; });

  ScoreArgs score;
  auto* s_score = sub("score", "Compute raw metric vectors");
  s_score->add_option("--corpus", score.corpus)->required();
  s_score->add_option("--registry", score.registry);
  s_score->add_option("--out", score.out)->required();
  s_score->callback([&] { command = "score"; action = [&](Run& r) { cmd_score(r, score); }; });

  NormalizeArgs norm;
  auto* s_norm = sub("normalize", "Fit CDF normalization on the train split and write capability values");
  s_norm->add_option("--metrics", norm.metrics)->required();
  s_norm->add_option("--registry", norm.registry);
  s_norm->add_option("--out", norm.out)->required();
  s_norm->add_option("--model-out", norm.model_out);
  s_norm->callback([&] { command = "normalize"; action = [&](Run& r) { cmd_normalize(r, norm); }; });

  WhitenArgs whiten;
  auto* s_whiten = sub("whiten", "ZCA-whiten capability values and rank-rescale them");
  s_whiten->add_option("--scores", whiten.scores)->required();
  s_whiten->add_option("--epsilon", whiten.epsilon)->check(CLI::PositiveNumber);
  s_whiten->add_option("--out", whiten.out)->required();
  s_whiten->add_option("--model-out", whiten.model_out);
  s_whiten->callback([&] { command = "whiten"; action = [&](Run& r) { cmd_whiten(r, whiten); }; });

  CorrelateArgs corr;
  auto* s_corr = sub("correlate", "Correlate capability values and metrics with F_logits");
  s_corr->add_option("--scores", corr.scores)->required();
  s_corr->add_option("--target", corr.target)->required();
  s_corr->add_option("--metrics", corr.metrics);
  s_corr->add_option("--view", corr.view);
  s_corr->add_option("--out", corr.out)->required();
  s_corr->callback([&] { command = "correlate"; action = [&](Run& r) { cmd_correlate(r, corr); }; });

  MeasureArgs measure;
  auto* s_measure = sub("measure", "Measure capability levels on the dev split");
  s_measure->add_option("--scores", measure.scores)->required();
  s_measure->add_option("--perf", measure.perf)->required();
  s_measure->add_option("--k", measure.k)->check(CLI::PositiveNumber);
  s_measure->add_option("--stage", measure.stage);
  s_measure->add_option("--view", measure.view);
  s_measure->add_option("--out", measure.out)->required();
  s_measure->callback([&] { command = "measure"; action = [&](Run& r) { cmd_measure(r, measure); }; });

  PlanArgs plan;
  auto* s_plan = sub("plan", "Emit the next stage manifest or an active-learning query");
  s_plan->add_option("--config", plan.config);
  s_plan->add_option("--scores", plan.scores)->required();
  s_plan->add_option("--state", plan.state);
  s_plan->add_option("--prev", plan.prev);
  s_plan->add_option("--mode", plan.mode)->check(CLI::IsMember({"cbbc", "al"}));
  s_plan->add_option("--budget", plan.budget);
  s_plan->add_option("--out", plan.out)->required();
  s_plan->callback([&] { command = "plan"; action = [&](Run& r) { cmd_plan(r, plan); }; });

  SimulateArgs sim;
  auto* s_sim = sub("simulate", "Run synthetic-learner comparisons");
  s_sim->add_option("--config", sim.config);
  s_sim->add_option("--mode", sim.mode)->check(CLI::IsMember({"curriculum", "al"}));
  s_sim->add_option("--budget-fraction", sim.budget_fraction);
  s_sim->add_option("--out", sim.out)->required();
  s_sim->callback([&] { command = "simulate"; action = [&](Run& r) { cmd_simulate(r, sim); }; });

  ReportArgs report;
  auto* s_report = sub("report", "Write distribution or correlation tables");
  s_report->add_option("--kind", report.kind)->required()->check(CLI::IsMember({"distribution", "correlation"}));
  s_report->add_option("--scores", report.scores)->required();
  s_report->add_option("--perf", report.perf);
  s_report->add_option("--view", report.view);
  s_report->add_option("--out", report.out)->required();
  s_report->callback([&] { command = "report"; action = [&](Run& r) { cmd_report(r, report); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  Run run_state(command, g);
  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  std::string error;
  try {
    action(run_state);
  } catch (const ValidationError& e) {
    code = 1;
    error = e.what();
  } catch (const std::exception& e) {
    code = 2;
    error = std::string("internal error: ") + e.what();
  }
  if (code != 0) std::cerr << "error: " << error << '\n';
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run_state.finish(code, error, seconds);
  return code;
}

}  // namespace capa::cli
