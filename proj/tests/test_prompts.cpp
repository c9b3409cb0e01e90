#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "privflow/errors.hpp"
#include "privflow/prompts.hpp"

using namespace privflow;

static const PromptRegistry& registry() {
  static PromptRegistry reg = PromptRegistry::load_dir(PRIVFLOW_TEMPLATE_DIR);
  return reg;
}

TEST_CASE("all thirteen templates load with non-empty bodies") {
  for (TemplateId id : all_template_ids()) {
    CHECK_FALSE(registry().body(id).empty());
    CHECK(template_id_from_string(to_string(id)) == id);
  }
  CHECK(all_template_ids().size() == 13);
}

TEST_CASE("placeholders are reported in order of appearance") {
  auto ph = registry().placeholders(TemplateId::SingleBaseline);
  REQUIRE(ph.size() == 1);
  CHECK(ph[0] == "transcript");

  auto ex = registry().placeholders(TemplateId::ExecutorConfaide);
  CHECK(std::find(ex.begin(), ex.end(), "extractor_response") != ex.end());
  CHECK(std::find(ex.begin(), ex.end(), "checker_response") != ex.end());
}

TEST_CASE("render substitutes bindings") {
  Bindings b{{"transcript", "Alice: hi\nBob: hello"}};
  std::string out = registry().render(TemplateId::SingleBaseline, b);
  CHECK(out.find("Alice: hi") != std::string::npos);
  CHECK(out.find("{transcript}") == std::string::npos);
}

TEST_CASE("render throws MissingBinding for an unbound placeholder") {
  CHECK_THROWS_AS(registry().render(TemplateId::SingleBaseline, {}), MissingBinding);
}

TEST_CASE("unknown tokens in braces are literal text") {
  // the PrivacyLens single-agent prompt embeds literal {agent} / {user}
  std::string body = registry().body(TemplateId::SinglePrivacylens);
  REQUIRE(body.find("{agent}") != std::string::npos);
  Bindings b{{"user_instruction", "u"}, {"executable_trajectory", "t"}, {"final_action", "send"}};
  std::string out = registry().render(TemplateId::SinglePrivacylens, b);
  CHECK(out.find("{agent}") != std::string::npos);
}

TEST_CASE("render is injective over distinct transcript bindings") {
  Bindings b1{{"transcript", "one"}};
  Bindings b2{{"transcript", "two"}};
  CHECK(registry().render(TemplateId::SingleBaseline, b1) !=
        registry().render(TemplateId::SingleBaseline, b2));
}

TEST_CASE("extract_final_summary happy path") {
  auto [text, fallback] =
      extract_final_summary("thinking...\n<FINAL_SUMMARY>the summary</FINAL_SUMMARY>\ntail");
  CHECK_FALSE(fallback);
  CHECK(text == "the summary");
}

TEST_CASE("extract_final_summary takes first open and next close") {
  auto [text, fallback] = extract_final_summary(
      "<FINAL_SUMMARY>a</FINAL_SUMMARY><FINAL_SUMMARY>b</FINAL_SUMMARY>");
  CHECK_FALSE(fallback);
  CHECK(text == "a");
}

TEST_CASE("extract_final_summary falls back on missing or malformed tags") {
  SUBCASE("no tags") {
    auto [text, fallback] = extract_final_summary("plain answer");
    CHECK(fallback);
    CHECK(text == "plain answer");
  }
  SUBCASE("only open tag") {
    auto [text, fallback] = extract_final_summary("<FINAL_SUMMARY>dangling");
    CHECK(fallback);
    CHECK(text == "<FINAL_SUMMARY>dangling");
  }
  SUBCASE("close before open") {
    auto [text, fallback] = extract_final_summary("</FINAL_SUMMARY>x<FINAL_SUMMARY>");
    CHECK(fallback);
  }
  SUBCASE("empty region") {
    auto [text, fallback] = extract_final_summary("pre<FINAL_SUMMARY></FINAL_SUMMARY>post");
    CHECK(fallback);
    CHECK_FALSE(text.empty());
  }
}

TEST_CASE("extract_final_summary never yields empty output for non-empty input") {
  for (std::string s : {std::string("x"), std::string("<FINAL_SUMMARY></FINAL_SUMMARY>"),
                        std::string("</FINAL_SUMMARY>"), std::string("<FINAL_SUMMARY> y </FINAL_SUMMARY>")}) {
    auto [text, fallback] = extract_final_summary(s);
    (void)fallback;
    CHECK_FALSE(text.empty());
  }
}

TEST_CASE("load_dir rejects a directory missing a template") {
  CHECK_THROWS(PromptRegistry::load_dir("/nonexistent/templates"));
}
