#include "privflow/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "privflow/errors.hpp"
#include "privflow/eval_confaide.hpp"
#include "privflow/eval_privacylens.hpp"
#include "privflow/propagation.hpp"

namespace privflow {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(BackendMode mode) {
  switch (mode) {
    case BackendMode::Scripted: return "scripted";
    case BackendMode::Replay: return "replay";
    case BackendMode::Live: return "live";
  }
  return "scripted";
}

BackendMode backend_mode_from_string(const std::string& s) {
  if (s == "scripted") return BackendMode::Scripted;
  if (s == "replay") return BackendMode::Replay;
  if (s == "live") return BackendMode::Live;
  throw ConfigError("unknown backend mode: " + s);
}

namespace {

json config_json(const RunConfig& c) {
  json j;
  j["corpus"] = c.corpus;
  j["benchmark_kind"] = to_string(c.kind);
  j["variants"] = c.variants;
  j["mode"] = to_string(c.mode);
  j["cassette"] = c.cassette;
  j["model"] = c.models.default_model;
  if (c.models.extractor) j["model_extractor"] = *c.models.extractor;
  if (c.models.checker) j["model_checker"] = *c.models.checker;
  if (c.models.executor) j["model_executor"] = *c.models.executor;
  j["sampling"] = {{"temperature", c.sampling.temperature},
                   {"top_p", c.sampling.top_p},
                   {"frequency_penalty", c.sampling.frequency_penalty},
                   {"presence_penalty", c.sampling.presence_penalty},
                   {"seed", c.sampling.seed},
                   {"num_samples", c.sampling.num_samples}};
  j["sim"] = {{"extractor_private_pass", c.sim.extractor_private_pass},
              {"checker_filter", c.sim.checker_filter},
              {"executor_filter", c.sim.executor_filter},
              {"public_pass", c.sim.public_pass},
              {"seed", c.sim.seed}};
  j["output_dir"] = c.output_dir;
  j["templates_dir"] = c.templates_dir;
  j["call_budget"] = c.call_budget;
  j["concurrency"] = c.concurrency;
  j["nt_scope"] = c.nt_scope == NtScope::Both ? "both" : "executor-only";
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.corpus = j.value("corpus", "");
  c.kind = benchmark_kind_from_string(j.value("benchmark_kind", "synthetic"));
  c.variants = j.value("variants", std::vector<std::string>{});
  c.mode = backend_mode_from_string(j.value("mode", "scripted"));
  c.cassette = j.value("cassette", "");
  c.models.default_model = j.value("model", "scripted-model");
  if (j.contains("model_extractor")) c.models.extractor = j["model_extractor"].get<std::string>();
  if (j.contains("model_checker")) c.models.checker = j["model_checker"].get<std::string>();
  if (j.contains("model_executor")) c.models.executor = j["model_executor"].get<std::string>();
  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    c.sampling.temperature = s.value("temperature", 1.0);
    c.sampling.top_p = s.value("top_p", 1.0);
    c.sampling.frequency_penalty = s.value("frequency_penalty", 0.0);
    c.sampling.presence_penalty = s.value("presence_penalty", 0.0);
    c.sampling.seed = s.value("seed", 99L);
    c.sampling.num_samples = s.value("num_samples", 10);
  }
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    c.sim.extractor_private_pass = s.value("extractor_private_pass", 0.9);
    c.sim.checker_filter = s.value("checker_filter", 0.8);
    c.sim.executor_filter = s.value("executor_filter", 0.8);
    c.sim.public_pass = s.value("public_pass", 0.97);
    c.sim.seed = s.value("seed", 99L);
  }
  c.output_dir = j.value("output_dir", "");
  c.templates_dir = j.value("templates_dir", "");
  c.call_budget = j.value("call_budget", 0L);
  c.concurrency = j.value("concurrency", 4);
  c.nt_scope = j.value("nt_scope", "both") == "executor-only" ? NtScope::ExecutorOnly : NtScope::Both;
  return c;
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a_str(const std::string& s) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

RunConfig config_from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a_str(config_json(config).dump());
}

std::vector<ScenarioInstance> load_config_corpus(const RunConfig& config, BenchmarkKind& kind_out) {
  if (config.corpus.empty()) throw ConfigError("no corpus configured");
  const fs::path path = config.corpus;
  if (path.extension() == ".json") {
    CorpusManifest manifest = load_manifest(path);
    kind_out = manifest.kind;
    return load_corpus(manifest);
  }
  kind_out = config.kind;
  return config.kind == BenchmarkKind::PrivacyLens ? load_privacylens(path) : load_confaide(path);
}

namespace {

json trace_to_json(const RunTrace& trace) {
  json j;
  j["instance_id"] = trace.instance_id;
  j["variant"] = trace.variant_name;
  j["sample_index"] = trace.sample_index;
  j["failed"] = trace.failed;
  j["failure_reason"] = trace.failure_reason;
  j["stages"] = json::array();
  for (const auto& s : trace.stage_outputs) {
    j["stages"].push_back({{"role", to_string(s.role)},
                           {"prompt_sent", s.prompt_sent},
                           {"raw_output", s.raw_output},
                           {"parsed_output", s.parsed_output},
                           {"latency_seconds", s.latency_seconds}});
  }
  return j;
}

RunTrace trace_from_json(const json& j) {
  RunTrace trace;
  trace.instance_id = j.at("instance_id").get<std::string>();
  trace.variant_name = j.at("variant").get<std::string>();
  trace.sample_index = j.at("sample_index").get<int>();
  trace.failed = j.value("failed", false);
  trace.failure_reason = j.value("failure_reason", "");
  for (const auto& sj : j.at("stages")) {
    StageOutput s;
    const std::string role = sj.at("role").get<std::string>();
    s.role = role == "extractor" ? AgentRole::Extractor
             : role == "checker" ? AgentRole::Checker
             : role == "executor" ? AgentRole::Executor
                                  : AgentRole::Single;
    s.prompt_sent = sj.at("prompt_sent").get<std::string>();
    s.raw_output = sj.at("raw_output").get<std::string>();
    s.parsed_output = sj.at("parsed_output").get<std::string>();
    s.latency_seconds = sj.at("latency_seconds").get<double>();
    trace.stage_outputs.push_back(std::move(s));
  }
  return trace;
}

std::shared_ptr<Backend> make_backend(const RunConfig& config,
                                      const std::vector<ScenarioInstance>& corpus, bool record) {
  std::shared_ptr<Backend> backend;
  switch (config.mode) {
    case BackendMode::Scripted:
      backend = std::make_shared<SimulatedAgentBackend>(corpus, config.sim);
      break;
    case BackendMode::Replay:
      if (config.cassette.empty()) throw ConfigError("replay mode requires a cassette path");
      backend = std::make_shared<ReplayBackend>(config.cassette);
      break;
    case BackendMode::Live: {
      LiveConfig live;
      const char* base = std::getenv("PRIVFLOW_BASE_URL");
      const char* key = std::getenv("PRIVFLOW_API_KEY");
      live.base_url = base ? base : "";
      live.api_key = key ? key : "";
      if (live.base_url.empty())
        throw ConfigError("live mode requires PRIVFLOW_BASE_URL (and usually PRIVFLOW_API_KEY)");
      backend = std::make_shared<LiveBackend>(live);
      if (record) {
        if (config.cassette.empty()) throw ConfigError("recording requires a cassette path");
        backend = std::make_shared<RecordingBackend>(backend, config.cassette);
      }
      break;
    }
  }
  if (config.call_budget > 0) backend = std::make_shared<BudgetGuard>(backend, config.call_budget);
  return backend;
}

// Index-ordered parallel map: results land in slot order regardless of
// worker scheduling, keeping artifacts deterministic.
template <typename Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mu;
  const int count = std::min<int>(workers, static_cast<int>(n));
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        if (failed.load()) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!failed.exchange(true)) first_error = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw Error(first_error);
}

// Scripted helpfulness judge: rates the action by how many item lines it
// carries, which tracks the simulated executor's public completeness.
std::string scripted_judge_reply(const ChatRequest& request) {
  const std::string& prompt = request.messages.back().content;
  const size_t marker = prompt.find("Agent final action:");
  const std::string action = marker == std::string::npos ? prompt : prompt.substr(marker);
  size_t lines = 0;
  for (size_t pos = 0; (pos = action.find("\n- ", pos)) != std::string::npos; ++pos) ++lines;
  if (lines == 0) {
    const bool empty = action.find('[') == std::string::npos;
    return empty ? "0" : "1";
  }
  return lines == 1 ? "2" : "3";
}

struct VariantArtifacts {
  std::vector<RunTrace> traces;
};

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& line : lines) out << line << "\n";
}

}  // namespace

void run(const RunConfig& config, bool record) {
  if (config.output_dir.empty()) throw ConfigError("no output_dir configured");
  if (config.variants.empty()) throw ConfigError("no variants configured");
  if (config.templates_dir.empty()) throw ConfigError("no templates_dir configured");
  for (const auto& name : config.variants) variant_from_name(name);  // fail fast

  BenchmarkKind kind = config.kind;
  const std::vector<ScenarioInstance> corpus = load_config_corpus(config, kind);
  if (corpus.empty()) throw ConfigError("corpus is empty: " + config.corpus);
  const PromptRegistry registry = PromptRegistry::load_dir(config.templates_dir);
  std::shared_ptr<Backend> backend = make_backend(config, corpus, record);

  fs::create_directories(fs::path(config.output_dir) / "traces");
  fs::create_directories(fs::path(config.output_dir) / "verdicts");

  for (const auto& variant_name : config.variants) {
    const FlowVariant variant = variant_from_name(variant_name);
    const FlowTopology topology = build_topology(variant, kind, config.models, config.nt_scope);

    std::vector<std::vector<RunTrace>> per_instance(corpus.size());
    parallel_for(corpus.size(), config.concurrency, [&](size_t i) {
      per_instance[i] = execute(corpus[i], topology, *backend, registry, config.sampling);
    });

    std::vector<std::string> lines;
    for (const auto& traces : per_instance)
      for (const auto& trace : traces) lines.push_back(trace_to_json(trace).dump());
    write_lines(fs::path(config.output_dir) / "traces" / (variant_name + ".jsonl"), lines);

    // PrivacyLens helpfulness verdicts need the judge backend, so they are
    // produced at run time; everything else is recomputed by report().
    if (kind == BenchmarkKind::PrivacyLens) {
      std::shared_ptr<Backend> judge = backend;
      if (config.mode == BackendMode::Scripted)
        judge = std::make_shared<ScriptedBackend>(
            [](const ChatRequest& req, std::uint64_t, int) { return scripted_judge_reply(req); });
      const std::string rubric = load_judge_rubric(config.templates_dir);

      std::map<std::string, const ScenarioInstance*> by_id;
      for (const auto& inst : corpus) by_id[inst.instance_id] = &inst;

      std::vector<std::string> verdict_lines;
      for (const auto& traces : per_instance) {
        for (const auto& trace : traces) {
          if (trace.failed || trace.stage_outputs.empty()) continue;
          const ScenarioInstance& inst = *by_id.at(trace.instance_id);
          const ActionVerdict v = judge_action(trace.stage_outputs.back().parsed_output, inst,
                                               *judge, rubric, config.models.default_model);
          json vj{{"instance_id", trace.instance_id},
                  {"sample_index", trace.sample_index},
                  {"leaked", v.leaked},
                  {"helpfulness", v.helpfulness},
                  {"judge_parse_failed", v.judge_parse_failed},
                  {"judge_raw", v.judge_raw}};
          verdict_lines.push_back(vj.dump());
        }
      }
      write_lines(fs::path(config.output_dir) / "verdicts" / (variant_name + ".pl.jsonl"),
                  verdict_lines);
    }
  }

  json manifest;
  manifest["config"] = config_json(config);
  manifest["config_hash"] = digest_hex(config_hash(config));
  manifest["n_instances"] = corpus.size();
  manifest["benchmark_kind"] = to_string(kind);
  {
    std::ofstream out(fs::path(config.output_dir) / "run_manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

  report(config.output_dir);
}

namespace {

std::vector<RunTrace> read_traces(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("trace file not found: " + path.string());
  std::vector<RunTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    traces.push_back(trace_from_json(json::parse(line)));
  }
  return traces;
}

std::pair<std::string, std::string> variant_labels(const std::string& name) {
  const FlowVariant v = variant_from_name(name);
  std::string setting, flow;
  if (v.agent_count == 1) {
    setting = "Single Agent";
    if (v.single_style == SingleStyle::Enhanced) setting = "Single Agent (Enhanced)";
    if (v.single_style == SingleStyle::Cot) setting = "Single Agent (CoT)";
  } else {
    setting = v.agent_count == 2 ? "Two Agents" : "Three Agents";
    flow = v.checker_mode == CheckerMode::AnnotatePrivate ? "Annotate Private" : "Public Only";
    if (!v.downstream_sees_transcript) flow += " (without meeting transcript)";
  }
  return {setting, flow};
}

struct LatencyStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  size_t n = 0;
};

LatencyStats latency_of(const std::vector<RunTrace>& traces) {
  std::vector<double> totals;
  for (const auto& t : traces) {
    if (t.failed) continue;
    double total = 0.0;
    for (const auto& s : t.stage_outputs) total += s.latency_seconds;
    totals.push_back(total);
  }
  LatencyStats stats;
  stats.n = totals.size();
  if (totals.empty()) return stats;
  for (double v : totals) stats.mean += v;
  stats.mean /= static_cast<double>(totals.size());
  if (totals.size() > 1) {
    double ss = 0.0;
    for (double v : totals) ss += (v - stats.mean) * (v - stats.mean);
    stats.stderr_ = std::sqrt(ss / static_cast<double>(totals.size() - 1)) /
                    std::sqrt(static_cast<double>(totals.size()));
  }
  return stats;
}

}  // namespace

void report(const fs::path& run_dir) {
  std::ifstream mf(run_dir / "run_manifest.json");
  if (!mf) throw MissingArtifact("run_manifest.json not found in " + run_dir.string());
  json manifest;
  mf >> manifest;
  const RunConfig config = config_from_json(manifest.at("config"));
  const BenchmarkKind kind = benchmark_kind_from_string(manifest.at("benchmark_kind").get<std::string>());

  BenchmarkKind loaded_kind = kind;
  const std::vector<ScenarioInstance> corpus = load_config_corpus(config, loaded_kind);
  std::map<std::string, const ScenarioInstance*> by_id;
  for (const auto& inst : corpus) by_id[inst.instance_id] = &inst;

  fs::create_directories(run_dir / "aggregates");
  fs::create_directories(run_dir / "propagation");

  std::ostringstream md;
  md << "# Run report\n\n";
  md << "config hash: " << manifest.at("config_hash").get<std::string>() << "\n\n";

  const bool confaide_like = kind != BenchmarkKind::PrivacyLens;
  std::ostringstream table, latency_md, pl_csv;
  if (confaide_like) {
    table << "| Setting | Information Flow | Leaks Secret ↓ | Leaks Secret (Worst Case) ↓ | "
             "Omits Public Information ↓ | Leaks Secret or Omits Info ↓ |\n";
    table << "|---|---|---|---|---|---|\n";
  }
  pl_csv << "variant,binary_helpfulness_rate,avg_helpfulness_score,privacy_preservation_rate,"
            "adjusted_information_preservation_rate\n";
  latency_md << "## Latency (seconds, mean ± stderr per pipeline sample)\n\n";
  latency_md << "| Variant | Latency (s) | n |\n|---|---|---|\n";

  size_t failures_total = 0;

  for (const auto& variant_name : config.variants) {
    const std::vector<RunTrace> traces = read_traces(run_dir / "traces" / (variant_name + ".jsonl"));
    json agg_json;
    agg_json["variant"] = variant_name;

    size_t failures = 0;
    for (const auto& t : traces)
      if (t.failed) ++failures;
    failures_total += failures;
    agg_json["failures"] = failures;

    if (confaide_like) {
      // Verdicts are a pure function of traces; rewrite them every report.
      std::map<std::string, std::vector<SampleVerdict>> verdicts;
      std::vector<std::string> verdict_lines;
      for (const auto& trace : traces) {
        if (trace.failed || trace.stage_outputs.empty()) continue;
        const auto it = by_id.find(trace.instance_id);
        if (it == by_id.end()) throw MissingArtifact("trace references unknown instance " + trace.instance_id);
        SampleVerdict v = judge_sample(trace.stage_outputs.back().parsed_output, *it->second);
        json vj{{"instance_id", trace.instance_id},
                {"sample_index", trace.sample_index},
                {"leaked", v.leaked},
                {"omitted", v.omitted},
                {"leaked_items", v.leaked_items},
                {"missing_items", v.missing_items}};
        verdict_lines.push_back(vj.dump());
        verdicts[trace.instance_id].push_back(std::move(v));
      }
      write_lines(run_dir / "verdicts" / (variant_name + ".confaide.jsonl"), verdict_lines);

      if (!verdicts.empty()) {
        const ConfAIdeAggregate agg = aggregate(verdicts);
        agg_json["confaide"] = {{"leak_rate_pct", agg.leak_rate_pct},
                                {"leak_stderr", agg.leak_stderr},
                                {"leak_worst_case_pct", agg.leak_worst_case_pct},
                                {"leak_worst_case_stderr", agg.leak_worst_case_stderr},
                                {"omit_rate_pct", agg.omit_rate_pct},
                                {"omit_stderr", agg.omit_stderr},
                                {"combined_rate_pct", agg.combined_rate_pct},
                                {"combined_stderr", agg.combined_stderr},
                                {"n_instances", agg.n_instances},
                                {"n_samples", agg.n_samples}};
        auto [setting, flow] = variant_labels(variant_name);
        table << "| " << setting << " | " << flow << " | " << fmt1(agg.leak_rate_pct) << " ± "
              << fmt1(agg.leak_stderr) << " | " << fmt1(agg.leak_worst_case_pct) << " ± "
              << fmt1(agg.leak_worst_case_stderr) << " | " << fmt1(agg.omit_rate_pct) << " ± "
              << fmt1(agg.omit_stderr) << " | " << fmt1(agg.combined_rate_pct) << " ± "
              << fmt1(agg.combined_stderr) << " |\n";
      }
    } else {
      // PrivacyLens: leak flags recomputed from traces; helpfulness comes
      // from the run-time judge verdicts.
      std::map<std::pair<std::string, int>, int> helpfulness;
      std::ifstream vin(run_dir / "verdicts" / (variant_name + ".pl.jsonl"));
      if (!vin) throw MissingArtifact("missing PrivacyLens verdicts for " + variant_name);
      std::string line;
      while (std::getline(vin, line)) {
        if (line.empty()) continue;
        const json vj = json::parse(line);
        helpfulness[{vj.at("instance_id"), vj.at("sample_index")}] = vj.at("helpfulness");
      }
      std::vector<ActionVerdict> verdicts;
      for (const auto& trace : traces) {
        if (trace.failed || trace.stage_outputs.empty()) continue;
        const ScenarioInstance& inst = *by_id.at(trace.instance_id);
        ActionVerdict v;
        for (const auto& item : inst.items) {
          if (item.label == ItemLabel::Private &&
              contains_item(trace.stage_outputs.back().parsed_output, item)) {
            v.leaked = true;
            break;
          }
        }
        auto it = helpfulness.find({trace.instance_id, trace.sample_index});
        v.helpfulness = it == helpfulness.end() ? 0 : it->second;
        verdicts.push_back(v);
      }
      if (!verdicts.empty()) {
        const PrivacyLensAggregate agg = aggregate_pl(verdicts);
        agg_json["privacylens"] = {
            {"leakage_rate_pct", agg.leakage_rate_pct},
            {"privacy_preservation_rate_pct", agg.privacy_preservation_rate_pct},
            {"binary_helpfulness_rate_pct", agg.binary_helpfulness_rate_pct},
            {"avg_helpfulness_score", agg.avg_helpfulness_score},
            {"n_actions", agg.n_actions},
            {"n_helpful", agg.n_helpful}};
        if (agg.adjusted_leakage_rate_pct) {
          agg_json["privacylens"]["adjusted_leakage_rate_pct"] = *agg.adjusted_leakage_rate_pct;
          agg_json["privacylens"]["adjusted_preservation_rate_pct"] =
              *agg.adjusted_preservation_rate_pct;
        } else {
          agg_json["privacylens"]["adjusted_leakage_rate_pct"] = "undefined";
          agg_json["privacylens"]["adjusted_preservation_rate_pct"] = "undefined";
        }
        pl_csv << variant_name << "," << fmt2(agg.binary_helpfulness_rate_pct) << ","
               << fmt2(agg.avg_helpfulness_score) << ","
               << fmt2(agg.privacy_preservation_rate_pct) << ","
               << (agg.adjusted_preservation_rate_pct
                       ? fmt2(*agg.adjusted_preservation_rate_pct)
                       : std::string("undefined"))
               << "\n";
      }
    }

    // Propagation on sample 0 of each instance (multi-agent variants).
    const FlowVariant variant = variant_from_name(variant_name);
    if (variant.agent_count > 1) {
      std::vector<StageFlags> all_flags;
      for (const auto& trace : traces) {
        if (trace.sample_index != 0 || trace.failed) continue;
        all_flags.push_back(stage_flags(trace, *by_id.at(trace.instance_id)));
      }
      if (!all_flags.empty()) {
        const PropagationAggregate prop = aggregate_stages(all_flags);
        std::ostringstream stage_csv;
        stage_csv << "stage,leaks_pct,public_pct,composite_q\n";
        json prop_json = json::array();
        for (const auto& s : prop.stages) {
          stage_csv << to_string(s.stage) << "," << fmt2(s.leaks_pct) << "," << fmt2(s.public_pct)
                    << "," << fmt2(s.composite_q) << "\n";
          prop_json.push_back({{"stage", to_string(s.stage)},
                               {"leaks_pct", s.leaks_pct},
                               {"public_pct", s.public_pct},
                               {"composite_q", s.composite_q}});
        }
        agg_json["propagation"] = prop_json;
        {
          std::ofstream out(run_dir / "propagation" / (variant_name + "_stage_metrics.csv"),
                            std::ios::binary);
          out << stage_csv.str();
        }
        std::ostringstream attr_csv;
        attr_csv << "category,stage,count\n";
        auto emit = [&attr_csv](const char* cat, const std::map<StageRef, size_t>& counts) {
          for (StageRef ref : {StageRef::Assistant, StageRef::Checker, StageRef::Executor,
                               StageRef::None, StageRef::NA}) {
            auto it = counts.find(ref);
            attr_csv << cat << "," << to_string(ref) << "," << (it == counts.end() ? 0 : it->second)
                     << "\n";
          }
        };
        emit("first_leak", prop.first_leak_counts);
        emit("first_drop", prop.first_drop_counts);
        emit("private_remover", prop.remover_counts);
        emit("public_restorer", prop.restorer_counts);
        std::ofstream out(run_dir / "propagation" / (variant_name + "_attribution.csv"),
                          std::ios::binary);
        out << attr_csv.str();
      }
    }

    const LatencyStats lat = latency_of(traces);
    agg_json["latency"] = {{"mean_s", lat.mean}, {"stderr_s", lat.stderr_}, {"n", lat.n}};
    latency_md << "| " << variant_name << " | " << fmt2(lat.mean) << " ± " << fmt2(lat.stderr_)
               << " | " << lat.n << " |\n";

    std::ofstream out(run_dir / "aggregates" / (variant_name + ".json"), std::ios::binary);
    out << agg_json.dump(2) << "\n";
  }

  if (confaide_like) {
    md << "## ConfAIde metrics\n\n" << table.str() << "\n";
  } else {
    md << "## PrivacyLens panels\n\nSee privacylens_panels.csv (Binary Helpfulness Rate, Average "
          "Helpfulness Score, Privacy Preservation Rate, Adjusted Information Preservation "
          "Rate).\n\n";
    std::ofstream out(run_dir / "privacylens_panels.csv", std::ios::binary);
    out << pl_csv.str();
  }
  md << latency_md.str() << "\n";
  md << "failed samples (excluded from metric denominators): " << failures_total << "\n";

  std::ofstream out(run_dir / "report.md", std::ios::binary);
  out << md.str();
}

}  // namespace privflow
