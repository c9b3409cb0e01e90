#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "privflow/backend.hpp"
#include "privflow/core.hpp"

namespace privflow {

/// Behavior knobs for the corpus-aware scripted agents. Probabilities are
/// applied per item via a decision stream derived from (digest, seed), so a
/// given request always resolves the same way.
struct SimParams {
  double extractor_private_pass = 0.9;  // P(extractor forwards a private item)
  double checker_filter = 0.8;          // P(public-only checker removes a private item)
  double executor_filter = 0.8;         // P(executor drops a private item it still sees)
  double public_pass = 0.97;            // P(a stage retains a public item it sees)
  long seed = 99;
};

/// Deterministic stand-in for a chat model that actually plays the pipeline
/// roles over a known corpus: it echoes the item phrases it can see in the
/// prompt, passing or dropping them per SimParams. Every reply carries a
/// stage sentinel marker "[role#digest]" so tests can trace exactly which
/// stage output reached which prompt.
class SimulatedAgentBackend : public Backend {
 public:
  SimulatedAgentBackend(std::vector<ScenarioInstance> corpus, SimParams params = {});

  ChatResponse complete_indexed(const ChatRequest& request, int sample_index) override;

  static std::string stage_marker(const std::string& role, std::uint64_t digest);

 private:
  std::vector<ScenarioInstance> corpus_;
  SimParams params_;
  std::vector<std::vector<std::vector<std::string>>> canon_phrases_;
};

}  // namespace privflow
