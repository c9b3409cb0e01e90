#include "privflow/flows.hpp"

#include <algorithm>

#include "privflow/errors.hpp"

namespace privflow {

std::string to_string(AgentRole role) {
  switch (role) {
    case AgentRole::Extractor: return "extractor";
    case AgentRole::Checker: return "checker";
    case AgentRole::Executor: return "executor";
    case AgentRole::Single: return "single";
  }
  return "single";
}

std::string to_string(InputSource source) {
  switch (source) {
    case InputSource::Transcript: return "transcript";
    case InputSource::ExtractorOutput: return "extractor_output";
    case InputSource::CheckerOutput: return "checker_output";
    case InputSource::UserInstruction: return "user_instruction";
    case InputSource::Trajectory: return "trajectory";
  }
  return "transcript";
}

std::string canonical_name(const FlowVariant& v) {
  if (v.agent_count == 1) {
    switch (v.single_style.value_or(SingleStyle::Baseline)) {
      case SingleStyle::Baseline: return "single-baseline";
      case SingleStyle::Enhanced: return "single-enhanced";
      case SingleStyle::Cot: return "single-cot";
    }
  }
  std::string name = (v.agent_count == 2 ? "2a-" : "3a-");
  name += (v.checker_mode == CheckerMode::AnnotatePrivate ? "annotate" : "public");
  if (!v.downstream_sees_transcript) name += "-nt";
  return name;
}

FlowVariant variant_from_name(const std::string& name) {
  FlowVariant v;
  if (name == "single-baseline") { v.single_style = SingleStyle::Baseline; return v; }
  if (name == "single-enhanced") { v.single_style = SingleStyle::Enhanced; return v; }
  if (name == "single-cot") { v.single_style = SingleStyle::Cot; return v; }

  std::string rest;
  if (name.rfind("2a-", 0) == 0) { v.agent_count = 2; rest = name.substr(3); }
  else if (name.rfind("3a-", 0) == 0) { v.agent_count = 3; rest = name.substr(3); }
  else throw InvalidVariant("unknown variant name: " + name);

  if (rest.size() >= 3 && rest.substr(rest.size() - 3) == "-nt") {
    v.downstream_sees_transcript = false;
    rest = rest.substr(0, rest.size() - 3);
  }
  if (rest == "annotate") v.checker_mode = CheckerMode::AnnotatePrivate;
  else if (rest == "public") v.checker_mode = CheckerMode::PublicOnly;
  else throw InvalidVariant("unknown variant name: " + name);
  return v;
}

const std::vector<std::string>& all_variant_names() {
  static const std::vector<std::string> names = {
      "single-baseline", "single-enhanced", "single-cot",
      "2a-annotate", "2a-public", "2a-annotate-nt", "2a-public-nt",
      "3a-annotate", "3a-public", "3a-annotate-nt", "3a-public-nt",
  };
  return names;
}

const std::string& ModelAssignment::for_role(AgentRole role) const {
  switch (role) {
    case AgentRole::Extractor: return extractor ? *extractor : default_model;
    case AgentRole::Checker: return checker ? *checker : default_model;
    case AgentRole::Executor: return executor ? *executor : default_model;
    case AgentRole::Single: return default_model;
  }
  return default_model;
}

namespace {

void validate_variant(const FlowVariant& v) {
  if (v.agent_count < 1 || v.agent_count > 3)
    throw InvalidVariant("agent_count must be 1, 2 or 3");
  if (v.agent_count == 1) {
    if (!v.single_style) throw InvalidVariant("single agent requires a single_style");
    if (v.checker_mode) throw InvalidVariant("single agent cannot have a checker_mode");
    if (!v.downstream_sees_transcript)
      throw InvalidVariant("single agent has no downstream stage to withhold the transcript from");
  } else {
    if (v.single_style) throw InvalidVariant("multi-agent variant cannot have a single_style");
    if (!v.checker_mode) throw InvalidVariant("multi-agent variant requires a checker_mode");
  }
}

TemplateId single_template(SingleStyle style, BenchmarkKind kind) {
  if (kind == BenchmarkKind::PrivacyLens) return TemplateId::SinglePrivacylens;
  switch (style) {
    case SingleStyle::Baseline: return TemplateId::SingleBaseline;
    case SingleStyle::Enhanced: return TemplateId::SingleEnhanced;
    case SingleStyle::Cot: return TemplateId::SingleCot;
  }
  return TemplateId::SingleBaseline;
}

TemplateId checker_template(CheckerMode mode, BenchmarkKind kind) {
  const bool pl = kind == BenchmarkKind::PrivacyLens;
  if (mode == CheckerMode::PublicOnly)
    return pl ? TemplateId::CheckerPublicOnlyPl : TemplateId::CheckerPublicOnly;
  return pl ? TemplateId::CheckerAnnotatePrivatePl : TemplateId::CheckerAnnotatePrivate;
}

}  // namespace

FlowTopology build_topology(const FlowVariant& variant, BenchmarkKind kind,
                            const ModelAssignment& models, NtScope nt_scope) {
  validate_variant(variant);
  const bool pl = kind == BenchmarkKind::PrivacyLens;
  const InputSource context = pl ? InputSource::Trajectory : InputSource::Transcript;

  FlowTopology topo;
  topo.kind = kind;
  topo.variant = variant;

  auto add_stage = [&](AgentRole role, TemplateId tpl, std::set<InputSource> vis) {
    topo.stages.push_back({role, tpl, models.for_role(role)});
    topo.visibility.push_back(std::move(vis));
  };

  if (variant.agent_count == 1) {
    std::set<InputSource> vis{context};
    if (pl) vis.insert(InputSource::UserInstruction);
    add_stage(AgentRole::Single, single_template(*variant.single_style, kind), std::move(vis));
    return topo;
  }

  const bool hide_checker =
      !variant.downstream_sees_transcript && nt_scope == NtScope::Both;
  const bool hide_executor = !variant.downstream_sees_transcript;

  // Extractor always sees the original context.
  add_stage(AgentRole::Extractor,
            pl ? TemplateId::ExtractorPrivacylens
               : (variant.agent_count == 2 ? TemplateId::ExtractorConfaide2Agent
                                           : TemplateId::ExtractorConfaide3Agent),
            {context});

  if (variant.agent_count == 3) {
    // The PrivacyLens checker reviews only the extractor output; the
    // ConfAIde checker additionally sees the transcript unless withheld.
    std::set<InputSource> vis{InputSource::ExtractorOutput};
    if (!pl && !hide_checker) vis.insert(context);
    add_stage(AgentRole::Checker, checker_template(*variant.checker_mode, kind), std::move(vis));
  }

  std::set<InputSource> exec_vis{InputSource::ExtractorOutput};
  if (variant.agent_count == 3) exec_vis.insert(InputSource::CheckerOutput);
  if (!hide_executor) exec_vis.insert(context);
  if (pl) exec_vis.insert(InputSource::UserInstruction);
  add_stage(AgentRole::Executor,
            pl ? TemplateId::ExecutorPrivacylens : TemplateId::ExecutorConfaide,
            std::move(exec_vis));

  return topo;
}

namespace {

Bindings stage_bindings(const ScenarioInstance& instance, const FlowTopology& topo, size_t stage,
                        const std::string& extractor_output, const std::string& checker_output) {
  const std::string& context = instance.context_text;
  Bindings b;
  b["transcript"] = topo.visible(stage, InputSource::Transcript) ? context : "";
  b["executable_trajectory"] = topo.visible(stage, InputSource::Trajectory) ? context : "";
  b["extractor_response"] =
      topo.visible(stage, InputSource::ExtractorOutput) ? extractor_output : "";
  b["checker_response"] = topo.visible(stage, InputSource::CheckerOutput) ? checker_output : "";
  b["user_instruction"] = topo.visible(stage, InputSource::UserInstruction)
                              ? instance.user_instruction.value_or("")
                              : "";
  b["final_action"] = instance.final_action_kind.value_or("");
  return b;
}

std::string stage_system_header(const FlowTopology& topo, const StageSpec& stage) {
  std::string header = "role: " + to_string(stage.role);
  if (topo.variant.checker_mode) {
    header += "; mode: ";
    header += topo.variant.checker_mode == CheckerMode::AnnotatePrivate ? "annotate_private"
                                                                        : "public_only";
  }
  header += "; benchmark: " + to_string(topo.kind);
  header += "; variant: " + canonical_name(topo.variant);
  return header;
}

}  // namespace

std::vector<RunTrace> execute(const ScenarioInstance& instance, const FlowTopology& topology,
                              Backend& backend, const PromptRegistry& registry,
                              const SamplingParams& sampling) {
  if (sampling.num_samples < 1) throw Error("num_samples must be >= 1");
  const auto violations = validate_instance(instance);
  if (!violations.empty())
    throw Error("invalid instance '" + instance.instance_id + "': " + violations.front());

  std::vector<RunTrace> traces;
  traces.reserve(static_cast<size_t>(sampling.num_samples));

  for (int k = 0; k < sampling.num_samples; ++k) {
    RunTrace trace;
    trace.instance_id = instance.instance_id;
    trace.variant_name = canonical_name(topology.variant);
    trace.sample_index = k;

    std::string extractor_output, checker_output;
    for (size_t s = 0; s < topology.stages.size(); ++s) {
      const StageSpec& stage = topology.stages[s];
      const Bindings bindings =
          stage_bindings(instance, topology, s, extractor_output, checker_output);
      const std::string prompt = registry.render(stage.template_id, bindings);

      ChatRequest request;
      request.model_id = stage.model_id;
      request.sampling = sampling;
      request.messages.push_back({MessageRole::System, stage_system_header(topology, stage)});
      request.messages.push_back({MessageRole::User, prompt});

      StageOutput out;
      out.role = stage.role;
      out.prompt_sent = request.messages.front().content + "\n" + prompt;
      try {
        ChatResponse resp = backend.complete_indexed(request, k);
        out.raw_output = resp.content;
        out.latency_seconds = resp.latency_seconds;
      } catch (const Error& e) {
        trace.failed = true;
        trace.failure_reason = "instance " + instance.instance_id + ", stage " +
                               to_string(stage.role) + ", sample " + std::to_string(k) + ": " +
                               e.what();
        trace.stage_outputs.push_back(std::move(out));
        break;
      }

      if (stage.template_id == TemplateId::SingleCot) {
        out.parsed_output = extract_final_summary(out.raw_output).first;
      } else {
        out.parsed_output = out.raw_output;
      }

      if (stage.role == AgentRole::Extractor) extractor_output = out.parsed_output;
      if (stage.role == AgentRole::Checker) checker_output = out.parsed_output;
      trace.stage_outputs.push_back(std::move(out));
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace privflow
