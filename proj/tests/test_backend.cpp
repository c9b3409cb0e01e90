#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "privflow/backend.hpp"
#include "privflow/errors.hpp"

using namespace privflow;
namespace fs = std::filesystem;

namespace {

ChatRequest make_request(const std::string& user_text = "hello") {
  ChatRequest req;
  req.model_id = "scripted-model";
  req.messages = {{MessageRole::System, "sys"}, {MessageRole::User, user_text}};
  return req;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("privflow_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(rand()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

}  // namespace

TEST_CASE("request digest is deterministic and sensitive to every field") {
  ChatRequest req = make_request();
  auto d0 = request_digest(req, 0);
  CHECK(d0 == request_digest(req, 0));

  CHECK(d0 != request_digest(req, 1));

  ChatRequest other = req;
  other.model_id = "other-model";
  CHECK(request_digest(other, 0) != d0);

  other = req;
  other.messages[1].content = "hello!";
  CHECK(request_digest(other, 0) != d0);

  other = req;
  other.sampling.temperature = 0.0;
  CHECK(request_digest(other, 0) != d0);

  other = req;
  other.sampling.seed = 100;
  CHECK(request_digest(other, 0) != d0);
}

TEST_CASE("digest hex is sixteen lowercase hex chars") {
  std::string h = digest_hex(0x0123456789abcdefull);
  CHECK(h == "0123456789abcdef");
  CHECK(digest_hex(0).size() == 16);
}

TEST_CASE("scripted backend is a pure function of the request and sample index") {
  ScriptedBackend b;
  ChatRequest req = make_request();
  auto r1 = b.complete_indexed(req, 3);
  auto r2 = b.complete_indexed(req, 3);
  CHECK(r1.content == r2.content);
  CHECK(r1.latency_seconds == r2.latency_seconds);
  auto r3 = b.complete_indexed(req, 4);
  CHECK(r1.content != r3.content);
}

TEST_CASE("scripted latency is digest mod 1000 over 1000") {
  CHECK(ScriptedBackend::scripted_latency(0) == doctest::Approx(0.0));
  CHECK(ScriptedBackend::scripted_latency(1999) == doctest::Approx(0.999));
  CHECK(ScriptedBackend::scripted_latency(42) == doctest::Approx(0.042));
}

TEST_CASE("scripted backend handler override") {
  ScriptedBackend b([](const ChatRequest&, std::uint64_t, int sample) {
    return "reply-" + std::to_string(sample);
  });
  CHECK(b.complete_indexed(make_request(), 7).content == "reply-7");
}

TEST_CASE("complete_batch returns n samples in order and rejects n < 1") {
  ScriptedBackend b;
  ChatRequest req = make_request();
  auto batch = b.complete_batch(req, 4);
  REQUIRE(batch.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(batch[i].content == b.complete_indexed(req, i).content);
  CHECK_THROWS(b.complete_batch(req, 0));
}

TEST_CASE("record then replay round trips exactly") {
  TempDir tmp;
  fs::path cassette = tmp.path / "cassette.jsonl";

  auto inner = std::make_shared<ScriptedBackend>();
  RecordingBackend rec(inner, cassette);
  ChatRequest req = make_request("round trip");
  auto live1 = rec.complete_indexed(req, 0);
  auto live2 = rec.complete_indexed(req, 1);
  // re-recording the same digest must not duplicate entries
  rec.complete_indexed(req, 0);

  ReplayBackend replay(cassette);
  CHECK(replay.size() == 2);
  CHECK(replay.complete_indexed(req, 0).content == live1.content);
  CHECK(replay.complete_indexed(req, 0).latency_seconds ==
        doctest::Approx(live1.latency_seconds));
  CHECK(replay.complete_indexed(req, 1).content == live2.content);
}

TEST_CASE("replay misses raise CacheMissError naming the digest") {
  TempDir tmp;
  fs::path cassette = tmp.path / "empty.jsonl";
  std::ofstream(cassette).close();
  ReplayBackend replay(cassette);
  ChatRequest req = make_request("never recorded");
  try {
    replay.complete_indexed(req, 0);
    FAIL("expected CacheMissError");
  } catch (const CacheMissError& e) {
    CHECK(std::string(e.what()).find(digest_hex(request_digest(req, 0))) != std::string::npos);
  }
}

TEST_CASE("recording appends to an existing cassette without clobbering") {
  TempDir tmp;
  fs::path cassette = tmp.path / "grow.jsonl";
  auto inner = std::make_shared<ScriptedBackend>();
  {
    RecordingBackend rec(inner, cassette);
    rec.complete_indexed(make_request("a"), 0);
  }
  {
    RecordingBackend rec(inner, cassette);
    rec.complete_indexed(make_request("b"), 0);
  }
  ReplayBackend replay(cassette);
  CHECK(replay.size() == 2);
}

TEST_CASE("budget guard enforces the call cap") {
  auto inner = std::make_shared<ScriptedBackend>();
  BudgetGuard guard(inner, 3);
  ChatRequest req = make_request();
  for (int i = 0; i < 3; ++i) guard.complete_indexed(req, i);
  CHECK(guard.calls_made() == 3);
  CHECK_THROWS_AS(guard.complete_indexed(req, 3), BudgetExceeded);
  CHECK(guard.calls_made() == 3);
}

TEST_CASE("budget guard is safe under concurrent callers") {
  auto inner = std::make_shared<ScriptedBackend>();
  BudgetGuard guard(inner, 50);
  std::atomic<int> failures{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t)
    workers.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        try {
          guard.complete_indexed(make_request(std::to_string(t)), i);
        } catch (const BudgetExceeded&) {
          ++failures;
        }
      }
    });
  for (auto& w : workers) w.join();
  CHECK(guard.calls_made() == 50);
  CHECK(failures.load() == 8 * 20 - 50);
}

TEST_CASE("live backend surfaces transport errors for an unreachable host") {
  LiveConfig cfg;
  cfg.base_url = "http://127.0.0.1:9";  // discard port, nothing listens here
  cfg.api_key = "test-key";
  cfg.max_retries = 1;
  cfg.backoff_base_s = 0.0;
  cfg.timeout_s = 2.0;
  LiveBackend live(cfg);
  CHECK_THROWS_AS(live.complete_indexed(make_request(), 0), TransportError);
}
