#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "privflow/backend.hpp"
#include "privflow/datasets.hpp"
#include "privflow/flows.hpp"
#include "privflow/sim.hpp"

namespace privflow {

enum class BackendMode { Scripted, Replay, Live };

std::string to_string(BackendMode mode);
BackendMode backend_mode_from_string(const std::string& s);

struct RunConfig {
  std::string corpus;  // manifest (.json) or instance file (.jsonl)
  BenchmarkKind kind = BenchmarkKind::Synthetic;  // used when corpus is a bare .jsonl
  std::vector<std::string> variants;
  BackendMode mode = BackendMode::Scripted;
  std::string cassette;  // replay source / recording target
  ModelAssignment models;
  SamplingParams sampling;
  SimParams sim;
  std::string output_dir;
  std::string templates_dir;
  long call_budget = 0;  // 0 = unlimited
  int concurrency = 4;
  NtScope nt_scope = NtScope::Both;
};

RunConfig config_from_json_file(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

/// Executes every (instance x variant x sample), writes traces, verdicts,
/// aggregates, propagation tables, latency stats and a run manifest under
/// config.output_dir. With `record` set, live responses are appended to the
/// cassette. Per-sample failures are tallied and the run continues.
void run(const RunConfig& config, bool record = false);

/// Recomputes every derived artifact (report.md, aggregate JSON, CSV plot
/// data) from the trace and verdict files in a run directory. Pure function
/// of those files; throws MissingArtifact when they are absent.
void report(const std::filesystem::path& run_dir);

/// Loads the corpus named by the config (manifest or bare jsonl).
std::vector<ScenarioInstance> load_config_corpus(const RunConfig& config, BenchmarkKind& kind_out);

}  // namespace privflow
