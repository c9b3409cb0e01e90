#pragma once

#include <optional>
#include <string>
#include <vector>

#include "privflow/backend.hpp"
#include "privflow/core.hpp"

namespace privflow {

struct ActionVerdict {
  bool leaked = false;
  int helpfulness = 0;  // 0..3
  std::string judge_raw;
  bool judge_parse_failed = false;
};

struct PrivacyLensAggregate {
  double leakage_rate_pct = 0.0;
  double privacy_preservation_rate_pct = 100.0;  // = 100 - leakage
  /// LR_h: leakage conditioned on helpfulness >= 2. Empty when no verdict
  /// qualifies (reported as undefined, never as 0).
  std::optional<double> adjusted_leakage_rate_pct;
  std::optional<double> adjusted_preservation_rate_pct;  // = 100 - LR_h
  double binary_helpfulness_rate_pct = 0.0;
  double avg_helpfulness_score = 0.0;
  size_t n_actions = 0;
  size_t n_helpful = 0;  // actions with helpfulness >= 2
};

/// Rubric prompt body for the helpfulness judge; placeholders
/// {user_instruction} and {final_action}.
std::string load_judge_rubric(const std::string& templates_dir);

/// Leak detection uses the same string primitive as ConfAIde against the
/// instance's private items. Helpfulness comes from a judge completion
/// constrained to a bare integer 0-3; an unparseable reply is retried once,
/// then recorded as 0 with the parse-failure flag set.
ActionVerdict judge_action(const std::string& final_action, const ScenarioInstance& instance,
                           Backend& judge_backend, const std::string& judge_rubric,
                           const std::string& judge_model = "judge-model");

PrivacyLensAggregate aggregate_pl(const std::vector<ActionVerdict>& verdicts);

/// Parses a bare 0-3 integer from judge output, tolerating surrounding
/// whitespace and trailing punctuation. Empty optional when unparseable.
std::optional<int> parse_judge_score(const std::string& raw);

}  // namespace privflow
