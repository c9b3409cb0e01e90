#include "privflow/backend.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "privflow/errors.hpp"

namespace privflow {

std::string to_string(MessageRole role) {
  switch (role) {
    case MessageRole::System: return "system";
    case MessageRole::User: return "user";
    case MessageRole::Assistant: return "assistant";
  }
  return "user";
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, std::string_view data) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_request(const ChatRequest& request) {
  if (request.messages.empty()) throw Error("ChatRequest.messages must be non-empty");
  if (request.messages.front().role == MessageRole::Assistant)
    throw Error("first message role must be system or user");
}

// splitmix64: fans a digest out into an independent decision stream.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t request_digest(const ChatRequest& request, int sample_index) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a(h, request.model_id);
  h = fnv1a(h, "\x1f");
  for (const auto& msg : request.messages) {
    h = fnv1a(h, to_string(msg.role));
    h = fnv1a(h, "\x1e");
    h = fnv1a(h, msg.content);
    h = fnv1a(h, "\x1f");
  }
  h = fnv1a(h, format_real(request.sampling.temperature));
  h = fnv1a(h, "\x1f");
  h = fnv1a(h, format_real(request.sampling.top_p));
  h = fnv1a(h, "\x1f");
  h = fnv1a(h, std::to_string(request.sampling.seed));
  h = fnv1a(h, "\x1f");
  h = fnv1a(h, std::to_string(sample_index));
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::vector<ChatResponse> Backend::complete_batch(const ChatRequest& request, int n) {
  if (n < 1) throw Error("complete_batch: n must be >= 1");
  std::vector<ChatResponse> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    try {
      out.push_back(complete_indexed(request, k));
    } catch (const Error& e) {
      throw Error("sample " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ScriptedBackend

double ScriptedBackend::scripted_latency(std::uint64_t digest) {
  return static_cast<double>(digest % 1000) / 1000.0;
}

ChatResponse ScriptedBackend::complete_indexed(const ChatRequest& request, int sample_index) {
  validate_request(request);
  const std::uint64_t digest = request_digest(request, sample_index);
  ChatResponse resp;
  if (handler_) {
    resp.content = handler_(request, digest, sample_index);
  } else {
    std::uint64_t state = digest ^ static_cast<std::uint64_t>(request.sampling.seed);
    resp.content = "scripted:" + digest_hex(splitmix64(state));
  }
  resp.latency_seconds = scripted_latency(digest);
  return resp;
}

// ---------------------------------------------------------------------------
// ReplayBackend / RecordingBackend

ReplayBackend::ReplayBackend(const std::filesystem::path& cassette_path) {
  std::ifstream in(cassette_path);
  if (!in) throw CacheMissError("cassette not found: " + cassette_path.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(cassette_path.string(), "line " + std::to_string(lineno), e.what());
    }
    const std::uint64_t digest = std::stoull(j.at("digest").get<std::string>(), nullptr, 16);
    ChatResponse resp;
    resp.content = j.at("content").get<std::string>();
    resp.latency_seconds = j.value("latency_seconds", 0.0);
    entries_[digest] = std::move(resp);
  }
}

ChatResponse ReplayBackend::complete_indexed(const ChatRequest& request, int sample_index) {
  validate_request(request);
  const std::uint64_t digest = request_digest(request, sample_index);
  auto it = entries_.find(digest);
  if (it == entries_.end())
    throw CacheMissError("no cassette entry for digest " + digest_hex(digest));
  return it->second;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner,
                                   const std::filesystem::path& cassette_path)
    : inner_(std::move(inner)), path_(cassette_path) {
  // Pre-scan so re-recording appends only digests not yet present.
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.contains("digest"))
      seen_[std::stoull(j["digest"].get<std::string>(), nullptr, 16)] = true;
  }
}

ChatResponse RecordingBackend::complete_indexed(const ChatRequest& request, int sample_index) {
  ChatResponse resp = inner_->complete_indexed(request, sample_index);
  const std::uint64_t digest = request_digest(request, sample_index);
  std::lock_guard<std::mutex> lock(mu_);
  if (!seen_[digest]) {
    seen_[digest] = true;
    nlohmann::json j{{"digest", digest_hex(digest)},
                     {"content", resp.content},
                     {"latency_seconds", resp.latency_seconds}};
    std::ofstream out(path_, std::ios::app);
    out << j.dump() << "\n";
  }
  return resp;
}

// ---------------------------------------------------------------------------
// LiveBackend

struct LiveBackend::Impl {
  LiveConfig config;
  httplib::Client client;
  std::counting_semaphore<256> in_flight;

  explicit Impl(LiveConfig cfg)
      : config(std::move(cfg)),
        client(config.base_url),
        in_flight(std::max(1, config.max_in_flight)) {
    client.set_read_timeout(std::chrono::duration<double>(config.timeout_s));
    client.set_connection_timeout(std::chrono::duration<double>(config.timeout_s));
  }
};

LiveBackend::LiveBackend(LiveConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  if (impl_->config.base_url.empty()) throw ConfigError("live backend requires a base URL");
}

LiveBackend::~LiveBackend() = default;

ChatResponse LiveBackend::complete_indexed(const ChatRequest& request, int sample_index) {
  validate_request(request);
  (void)sample_index;  // live endpoints draw fresh samples; index is not wire-visible

  nlohmann::json payload{
      {"model", request.model_id},
      {"temperature", request.sampling.temperature},
      {"top_p", request.sampling.top_p},
      {"frequency_penalty", request.sampling.frequency_penalty},
      {"presence_penalty", request.sampling.presence_penalty},
      {"seed", request.sampling.seed},
  };
  auto& msgs = payload["messages"] = nlohmann::json::array();
  for (const auto& msg : request.messages)
    msgs.push_back({{"role", to_string(msg.role)}, {"content", msg.content}});

  httplib::Headers headers;
  if (!impl_->config.api_key.empty())
    headers.emplace("Authorization", "Bearer " + impl_->config.api_key);

  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<256>& sem;
    ~Release() { sem.release(); }
  } release{impl_->in_flight};

  std::string last_error;
  for (int attempt = 0; attempt < impl_->config.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = impl_->config.backoff_base_s * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    const auto start = std::chrono::steady_clock::now();
    auto res = impl_->client.Post(impl_->config.path, headers, payload.dump(), "application/json");
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("authentication rejected (HTTP " + std::to_string(res->status) + ")");
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed response body: ") + e.what());
    }
    ChatResponse resp;
    resp.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    resp.latency_seconds = latency;
    if (j.contains("usage")) {
      TokenUsage usage;
      usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
      resp.usage = usage;
    }
    return resp;
  }
  throw TransportError("retries exhausted: " + last_error);
}

// ---------------------------------------------------------------------------
// BudgetGuard

ChatResponse BudgetGuard::complete_indexed(const ChatRequest& request, int sample_index) {
  const long n = ++calls_;
  if (max_calls_ > 0 && n > max_calls_) {
    --calls_;
    throw BudgetExceeded("call budget of " + std::to_string(max_calls_) + " exhausted");
  }
  return inner_->complete_indexed(request, sample_index);
}

}  // namespace privflow
