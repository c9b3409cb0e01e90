#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "privflow/backend.hpp"
#include "privflow/core.hpp"
#include "privflow/prompts.hpp"

namespace privflow {

enum class AgentRole { Extractor, Checker, Executor, Single };
enum class SingleStyle { Baseline, Enhanced, Cot };
enum class CheckerMode { AnnotatePrivate, PublicOnly };
enum class InputSource { Transcript, ExtractorOutput, CheckerOutput, UserInstruction, Trajectory };

/// Which agents lose transcript access under "without meeting transcript".
/// Default hides it from both Checker and Executor; ExecutorOnly matches the
/// narrower reading where only the final stage loses access.
enum class NtScope { Both, ExecutorOnly };

std::string to_string(AgentRole role);
std::string to_string(InputSource source);

struct FlowVariant {
  int agent_count = 1;  // 1, 2 or 3
  std::optional<SingleStyle> single_style;
  std::optional<CheckerMode> checker_mode;
  bool downstream_sees_transcript = true;
};

/// Canonical grid names: single-baseline, single-enhanced, single-cot,
/// 2a-annotate, 2a-public, 2a-annotate-nt, 2a-public-nt,
/// 3a-annotate, 3a-public, 3a-annotate-nt, 3a-public-nt.
std::string canonical_name(const FlowVariant& variant);
FlowVariant variant_from_name(const std::string& name);
const std::vector<std::string>& all_variant_names();

struct StageSpec {
  AgentRole role = AgentRole::Single;
  TemplateId template_id = TemplateId::SingleBaseline;
  std::string model_id;
};

struct FlowTopology {
  BenchmarkKind kind = BenchmarkKind::ConfAIde;
  FlowVariant variant;
  std::vector<StageSpec> stages;
  /// visibility[stage index] = set of input sources that stage may see.
  std::vector<std::set<InputSource>> visibility;

  bool visible(size_t stage, InputSource source) const {
    return visibility.at(stage).count(source) > 0;
  }
};

/// Per-role model assignment; missing roles fall back to the default id.
struct ModelAssignment {
  std::string default_model = "scripted-model";
  std::optional<std::string> extractor, checker, executor;

  const std::string& for_role(AgentRole role) const;
};

/// Realizes exactly the named flow configuration. Throws InvalidVariant for
/// combinations outside the grid (e.g. single agent with a checker mode).
FlowTopology build_topology(const FlowVariant& variant, BenchmarkKind kind,
                            const ModelAssignment& models = {}, NtScope nt_scope = NtScope::Both);

struct StageOutput {
  AgentRole role = AgentRole::Single;
  std::string prompt_sent;
  std::string raw_output;
  std::string parsed_output;
  double latency_seconds = 0.0;
};

struct RunTrace {
  std::string instance_id;
  std::string variant_name;
  int sample_index = 0;
  bool failed = false;
  std::string failure_reason;
  std::vector<StageOutput> stage_outputs;
};

/// Runs the pipeline num_samples times. Each stage's prompt is rendered only
/// from the inputs its visibility row marks visible; hidden placeholders are
/// bound to the empty string so hidden content can never reach the prompt.
/// A failed stage aborts that sample's remaining stages and marks the trace.
std::vector<RunTrace> execute(const ScenarioInstance& instance, const FlowTopology& topology,
                              Backend& backend, const PromptRegistry& registry,
                              const SamplingParams& sampling);

}  // namespace privflow
