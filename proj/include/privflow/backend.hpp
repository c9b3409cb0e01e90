#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace privflow {

/// Decoding configuration. Defaults follow the evaluation protocol:
/// temperature 1.0, top-p 1.0, no penalties, seed 99, 10 samples per prompt.
struct SamplingParams {
  double temperature = 1.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  long seed = 99;
  int num_samples = 10;
};

enum class MessageRole { System, User, Assistant };

std::string to_string(MessageRole role);

struct ChatMessage {
  MessageRole role = MessageRole::User;
  std::string content;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  SamplingParams sampling;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  double latency_seconds = 0.0;
  std::optional<TokenUsage> usage;
};

/// Stable 64-bit digest of the canonical serialization of
/// (model_id, messages, temperature, top_p, seed, sample index).
/// Field-order independent by construction; keys cassette lookups.
std::uint64_t request_digest(const ChatRequest& request, int sample_index);

std::string digest_hex(std::uint64_t digest);

/// Uniform chat-completion interface. Implementations must be safe for
/// concurrent use by many pipeline workers.
class Backend {
 public:
  virtual ~Backend() = default;

  ChatResponse complete(const ChatRequest& request) { return complete_indexed(request, 0); }

  /// One completion for a specific sample index. Sample index participates
  /// in the request digest so replay and scripted modes can distinguish the
  /// n samples drawn for one prompt.
  virtual ChatResponse complete_indexed(const ChatRequest& request, int sample_index) = 0;

  /// n independent samples for the same prompt, order stable.
  std::vector<ChatResponse> complete_batch(const ChatRequest& request, int n);
};

/// Deterministic offline backend: the reply is a pure function of
/// (model_id, message digest, sample index, seed). A custom handler can
/// override the default text generator.
class ScriptedBackend : public Backend {
 public:
  using Handler =
      std::function<std::string(const ChatRequest&, std::uint64_t digest, int sample_index)>;

  ScriptedBackend() = default;
  explicit ScriptedBackend(Handler handler) : handler_(std::move(handler)) {}

  ChatResponse complete_indexed(const ChatRequest& request, int sample_index) override;

  /// Deterministic pseudo-latency in [0, 1) derived from the digest, so
  /// latency tables are reproducible byte-for-byte.
  static double scripted_latency(std::uint64_t digest);

 private:
  Handler handler_;
};

/// Replays responses from a cassette: a JSON-lines file of
/// {"digest": hex, "content": text, "latency_seconds": real} entries.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(const std::filesystem::path& cassette_path);

  ChatResponse complete_indexed(const ChatRequest& request, int sample_index) override;

  size_t size() const { return entries_.size(); }

 private:
  std::map<std::uint64_t, ChatResponse> entries_;
};

/// Appends (digest -> response) entries produced by an inner backend to a
/// cassette file. Re-recording an already-present digest is a no-op.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, const std::filesystem::path& cassette_path);

  ChatResponse complete_indexed(const ChatRequest& request, int sample_index) override;

 private:
  std::shared_ptr<Backend> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
  std::map<std::uint64_t, bool> seen_;
};

struct LiveConfig {
  std::string base_url;   // e.g. http://host:port
  std::string api_key;
  std::string path = "/v1/chat/completions";
  int max_retries = 3;          // attempts = max_retries
  double backoff_base_s = 1.0;  // 1s, 2s, 4s
  int max_in_flight = 4;
  double timeout_s = 120.0;
};

/// OpenAI-compatible chat-completions client with capped exponential
/// backoff on transport-level failures (network errors and HTTP >= 500).
class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveConfig config);
  ~LiveBackend() override;

  ChatResponse complete_indexed(const ChatRequest& request, int sample_index) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Enforces a global call cap across all users of the wrapped backend.
class BudgetGuard : public Backend {
 public:
  BudgetGuard(std::shared_ptr<Backend> inner, long max_calls)
      : inner_(std::move(inner)), max_calls_(max_calls) {}

  ChatResponse complete_indexed(const ChatRequest& request, int sample_index) override;

  long calls_made() const { return calls_.load(); }

 private:
  std::shared_ptr<Backend> inner_;
  long max_calls_;
  std::atomic<long> calls_{0};
};

}  // namespace privflow
