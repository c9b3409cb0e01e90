#include "privflow/sim.hpp"

#include <algorithm>
#include <array>

#include "privflow/errors.hpp"

namespace privflow {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform [0,1) draw from the per-request decision stream.
double draw(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::string role_of(const ChatRequest& request) {
  if (!request.messages.empty() && request.messages.front().role == MessageRole::System) {
    const std::string& header = request.messages.front().content;
    for (const char* role : {"extractor", "checker", "executor", "single"}) {
      if (header.find("role: " + std::string(role)) != std::string::npos) return role;
    }
  }
  return "single";
}

bool annotate_mode(const ChatRequest& request) {
  return !request.messages.empty() &&
         request.messages.front().content.find("mode: annotate_private") != std::string::npos;
}

std::string full_prompt(const ChatRequest& request) {
  std::string text;
  for (const auto& msg : request.messages) {
    text += msg.content;
    text += "\n";
  }
  return text;
}

constexpr std::array<const char*, 7> kSectionLabels = {
    "Meeting Transcript:", "Extractor Response:", "Checker Response:",
    "Executable Trajectory:", "Past Trajectory:", "User Input:", "Instruction:",
};

// Content between `label` and the next section label (or end of prompt).
// Empty string if the label is absent.
std::string prompt_section(const std::string& prompt, const std::string& label) {
  const size_t start = prompt.find(label);
  if (start == std::string::npos) return "";
  const size_t body = start + label.size();
  size_t end = prompt.size();
  for (const char* other : kSectionLabels) {
    if (label == other) continue;
    const size_t pos = prompt.find(other, body);
    if (pos != std::string::npos) end = std::min(end, pos);
  }
  return prompt.substr(body, end - body);
}

bool has_text(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); });
}

// The text span an agent draws content from. Downstream agents work off
// their immediate upstream response; only the first stage reads the raw
// context. This is what makes upstream filtering effective downstream.
std::string selection_text(const std::string& prompt, const std::string& role) {
  if (role == "executor") {
    std::string checker = prompt_section(prompt, "Checker Response:");
    if (has_text(checker)) return checker;
    std::string extractor = prompt_section(prompt, "Extractor Response:");
    if (has_text(extractor)) return extractor;
    return prompt;
  }
  if (role == "checker") {
    std::string extractor = prompt_section(prompt, "Extractor Response:");
    if (has_text(extractor)) return extractor;
    return prompt;
  }
  return prompt;
}

}  // namespace

SimulatedAgentBackend::SimulatedAgentBackend(std::vector<ScenarioInstance> corpus,
                                             SimParams params)
    : corpus_(std::move(corpus)), params_(params) {
  // Pre-canonicalize every phrase so a request canonicalizes its prompt
  // once instead of once per corpus item.
  canon_phrases_.resize(corpus_.size());
  for (size_t c = 0; c < corpus_.size(); ++c) {
    canon_phrases_[c].resize(corpus_[c].items.size());
    for (size_t i = 0; i < corpus_[c].items.size(); ++i) {
      const InfoItem& item = corpus_[c].items[i];
      canon_phrases_[c][i].push_back(canonicalize(item.canonical_phrase).normalized);
      for (const auto& alias : item.aliases)
        canon_phrases_[c][i].push_back(canonicalize(alias).normalized);
    }
  }
}

namespace {

bool matches_any(const std::string& canon_hay, const std::vector<std::string>& canon_needles) {
  for (const auto& needle : canon_needles)
    if (!needle.empty() && canon_hay.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

std::string SimulatedAgentBackend::stage_marker(const std::string& role, std::uint64_t digest) {
  return "[" + role + "#" + digest_hex(digest) + "]";
}

ChatResponse SimulatedAgentBackend::complete_indexed(const ChatRequest& request,
                                                     int sample_index) {
  if (request.messages.empty()) throw Error("ChatRequest.messages must be non-empty");
  const std::uint64_t digest = request_digest(request, sample_index);
  const std::string prompt = full_prompt(request);
  const std::string role = role_of(request);
  const bool annotate = annotate_mode(request);
  const std::string selection = selection_text(prompt, role);

  const std::string canon_prompt = canonicalize(prompt).normalized;
  const std::string canon_selection = canonicalize(selection).normalized;

  // Identify the instance by its item phrases. Distinct instances can share
  // public phrases, so take the candidate with the most matching items.
  const ScenarioInstance* instance = nullptr;
  const std::vector<std::vector<std::string>>* instance_phrases = nullptr;
  size_t best_score = 0;
  for (size_t c = 0; c < corpus_.size(); ++c) {
    size_t score = 0;
    for (const auto& needles : canon_phrases_[c])
      if (matches_any(canon_prompt, needles)) ++score;
    if (score > best_score) {
      best_score = score;
      instance = &corpus_[c];
      instance_phrases = &canon_phrases_[c];
    }
  }

  std::uint64_t state = digest ^ static_cast<std::uint64_t>(params_.seed) * 0x9E3779B97F4A7C15ull;

  std::string body;
  if (instance) {
    for (size_t i = 0; i < instance->items.size(); ++i) {
      const InfoItem& item = instance->items[i];
      if (!matches_any(canon_selection, (*instance_phrases)[i])) continue;  // can only echo what it saw
      const double r = draw(state);
      bool keep;
      if (item.label == ItemLabel::Public) {
        keep = r < params_.public_pass;
      } else if (role == "extractor" || role == "single") {
        keep = r < params_.extractor_private_pass;
      } else if (role == "checker") {
        // The annotating checker forwards private content (tagged); the
        // public-only checker filters it.
        keep = annotate || r >= params_.checker_filter;
      } else {  // executor
        keep = r >= params_.executor_filter;
      }
      if (!keep) continue;
      if (item.label == ItemLabel::Private && role == "checker" && annotate) {
        body += "- [PRIVATE] " + item.canonical_phrase + "\n";
      } else {
        body += "- " + item.canonical_phrase + "\n";
      }
    }
  }

  std::string content = stage_marker(role, digest) + "\n" + body;
  if (prompt.find("<FINAL_SUMMARY>") != std::string::npos) {
    content = "Step-by-step reasoning over the transcript.\n<FINAL_SUMMARY>\n" + content +
              "</FINAL_SUMMARY>";
  }

  ChatResponse resp;
  resp.content = std::move(content);
  resp.latency_seconds = ScriptedBackend::scripted_latency(digest);
  return resp;
}

}  // namespace privflow
