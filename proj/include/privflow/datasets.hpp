#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "privflow/core.hpp"

namespace privflow {

struct CorpusManifest {
  BenchmarkKind kind = BenchmarkKind::Synthetic;
  std::string version;
  std::vector<std::filesystem::path> instance_files;
  std::optional<std::filesystem::path> alias_dict;
};

/// Manifest JSON: {"benchmark_kind": ..., "version": ..., "instances": [paths],
/// "alias_dict": optional path}. Relative paths resolve against the manifest
/// directory. All referenced files must exist.
CorpusManifest load_manifest(const std::filesystem::path& path);

std::vector<ScenarioInstance> load_corpus(const CorpusManifest& manifest);

/// One JSON object per line. Every line either yields a valid instance or a
/// SchemaError naming file and field; duplicate instance ids raise
/// DuplicateId.
std::vector<ScenarioInstance> load_confaide(const std::filesystem::path& path);
std::vector<ScenarioInstance> load_privacylens(const std::filesystem::path& path);

void save_corpus(const std::filesystem::path& path, const std::vector<ScenarioInstance>& corpus);

std::string instance_to_json_line(const ScenarioInstance& instance);

struct SyntheticSpec {
  int count = 24;
  std::uint64_t seed = 99;
  BenchmarkKind kind = BenchmarkKind::Synthetic;
  bool plant_nonce = true;
};

/// Deterministic templated meeting corpus with planted secret/public phrases
/// recorded as ground truth. Same spec => byte-identical corpus.
std::vector<ScenarioInstance> generate_synthetic(const SyntheticSpec& spec);

/// The nonce token planted in instance `index`'s transcript.
std::string synthetic_nonce(std::uint64_t seed, int index);

}  // namespace privflow
