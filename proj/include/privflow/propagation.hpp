#pragma once

#include <map>
#include <string>
#include <vector>

#include "privflow/core.hpp"
#include "privflow/flows.hpp"

namespace privflow {

/// Stage-level observables: does the stage output still contain any private
/// item, and does it retain all public items.
struct StageFlag {
  AgentRole stage = AgentRole::Single;
  bool has_private = false;
  bool has_all_public = false;
};

using StageFlags = std::vector<StageFlag>;

/// Stage reference for attribution. Assistant names the first stage
/// (extractor or single agent).
enum class StageRef { Assistant, Checker, Executor, None, NA };

std::string to_string(StageRef ref);

struct PropagationRecord {
  StageRef first_leak_stage = StageRef::None;
  StageRef first_drop_stage = StageRef::None;
  StageRef private_remover = StageRef::NA;
  StageRef public_restorer = StageRef::NA;
};

struct StageStats {
  AgentRole stage = AgentRole::Single;
  double leaks_pct = 0.0;   // Leaks_s
  double public_pct = 0.0;  // Public_s
  double composite_q = 0.0; // (100 - Leaks_s) + Public_s, in [0, 200]
};

struct PropagationAggregate {
  std::vector<StageStats> stages;
  std::map<StageRef, size_t> first_leak_counts;
  std::map<StageRef, size_t> first_drop_counts;
  std::map<StageRef, size_t> remover_counts;
  std::map<StageRef, size_t> restorer_counts;
  size_t n_records = 0;
};

/// Applies contains_item per private item (any => has_private) and per
/// public item (all => has_all_public) to each stage's parsed output.
/// Throws IncompleteTrace when the trace failed mid-pipeline.
StageFlags stage_flags(const RunTrace& trace, const ScenarioInstance& instance);

/// First-leak / first-drop stages and remover/restorer attribution. A fix
/// counts only if it persists through the final stage; an undone fix leaves
/// remover/restorer = None. N/A means the problem never occurred.
PropagationRecord attribute(const StageFlags& flags);

double composite_q(double leaks_pct, double public_pct);

PropagationAggregate aggregate_stages(const std::vector<StageFlags>& all_flags);

}  // namespace privflow
