#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "privflow/core.hpp"

using namespace privflow;

namespace {

InfoItem item(ItemLabel label, std::string phrase, std::vector<std::string> aliases = {}) {
  static int counter = 0;
  InfoItem it;
  it.label = label;
  it.canonical_phrase = std::move(phrase);
  it.aliases = std::move(aliases);
  it.item_id = "item-" + std::to_string(counter++);
  return it;
}

}  // namespace

TEST_CASE("canonicalize basics") {
  CHECK(canonicalize("Hello, World!").normalized == "hello world");
  CHECK(canonicalize("  a\t b\n  c ").normalized == "a b c");
  CHECK(canonicalize("").normalized == "");
  CHECK(canonicalize(" \t\n ").normalized == "");
  CHECK(canonicalize("MiXeD CaSe").normalized == "mixed case");
  CHECK(canonicalize("dots...and---dashes").normalized == "dots and dashes");
}

TEST_CASE("canonicalize handles unicode punctuation and diacritics") {
  // curly quotes, en/em dash, ellipsis all become spaces
  CHECK(canonicalize("“hello”—world…").normalized == "hello world");
  // precomposed and decomposed e-acute normalize identically
  CHECK(canonicalize("café").normalized == canonicalize("café").normalized);
  CHECK(canonicalize("CAFÉ").normalized == canonicalize("café").normalized);
}

TEST_CASE("canonicalize is idempotent") {
  std::mt19937_64 rng(1234);
  const std::string alphabet = "abcXYZ ,.!?\t\n-'\"09";
  for (int i = 0; i < 200; ++i) {
    std::string s;
    size_t len = rng() % 40;
    for (size_t j = 0; j < len; ++j) s += alphabet[rng() % alphabet.size()];
    std::string once = canonicalize(s).normalized;
    CHECK(canonicalize(once).normalized == once);
  }
}

TEST_CASE("contains_item matches canonical phrase as substring") {
  InfoItem it = item(ItemLabel::Private, "surprise party");
  CHECK(contains_item("We planned a Surprise Party for Kate.", it));
  CHECK(contains_item("surprise   party", it));
  CHECK(contains_item("a SURPRISE, PARTY indeed", it));
  CHECK_FALSE(contains_item("a surprise and a party", it));
  CHECK_FALSE(contains_item("", it));
}

TEST_CASE("contains_item matches any alias") {
  InfoItem it = item(ItemLabel::Private, "health condition", {"medical issue", "diagnosis"});
  CHECK(contains_item("her diagnosis came back", it));
  CHECK(contains_item("a medical ISSUE was raised", it));
  CHECK(contains_item("the health condition", it));
  CHECK_FALSE(contains_item("a healthy condition", it));
}

TEST_CASE("contains_item is invariant to case and whitespace of the haystack") {
  InfoItem it = item(ItemLabel::Public, "budget review");
  std::string base = "quarterly budget review next week";
  CHECK(contains_item(base, it));
  CHECK(contains_item("QUARTERLY BUDGET   REVIEW NEXT WEEK", it));
  CHECK(contains_item("quarterly\nbudget\treview next week", it));
}

TEST_CASE("detection is monotone under appending text") {
  InfoItem it = item(ItemLabel::Private, "secret merger");
  std::string hay = "nothing here";
  CHECK_FALSE(contains_item(hay, it));
  hay += " and then the secret merger came up";
  CHECK(contains_item(hay, it));
  // appending more never removes a match
  hay += " plus unrelated trailing content!";
  CHECK(contains_item(hay, it));
}

TEST_CASE("validate_instance flags structural problems") {
  ScenarioInstance inst;
  inst.instance_id = "x1";
  inst.kind = BenchmarkKind::ConfAIde;
  inst.context_text = "a transcript";
  inst.items = {item(ItemLabel::Private, "secret"), item(ItemLabel::Public, "agenda")};
  CHECK(validate_instance(inst).empty());

  SUBCASE("missing id") {
    inst.instance_id.clear();
    CHECK_FALSE(validate_instance(inst).empty());
  }
  SUBCASE("missing context") {
    inst.context_text.clear();
    CHECK_FALSE(validate_instance(inst).empty());
  }
  SUBCASE("needs at least one private item") {
    inst.items = {item(ItemLabel::Public, "agenda")};
    CHECK_FALSE(validate_instance(inst).empty());
  }
  SUBCASE("needs at least one public item") {
    inst.items = {item(ItemLabel::Private, "secret")};
    CHECK_FALSE(validate_instance(inst).empty());
  }
  SUBCASE("empty phrase rejected") {
    inst.items.push_back(item(ItemLabel::Public, ""));
    CHECK_FALSE(validate_instance(inst).empty());
  }
}

TEST_CASE("validate_instance privacylens requirements") {
  ScenarioInstance inst;
  inst.instance_id = "pl1";
  inst.kind = BenchmarkKind::PrivacyLens;
  inst.context_text = "a trajectory";
  inst.items = {item(ItemLabel::Private, "ssn"), item(ItemLabel::Public, "meeting time")};
  CHECK_FALSE(validate_instance(inst).empty());
  inst.user_instruction = "send the update";
  inst.final_action_kind = "send_email";
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("enum round trips") {
  for (auto kind : {BenchmarkKind::ConfAIde, BenchmarkKind::PrivacyLens, BenchmarkKind::Synthetic})
    CHECK(benchmark_kind_from_string(to_string(kind)) == kind);
  for (auto label : {ItemLabel::Private, ItemLabel::Public})
    CHECK(item_label_from_string(to_string(label)) == label);
}
