#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privflow {

enum class ItemLabel { Private, Public };

enum class BenchmarkKind { ConfAIde, PrivacyLens, Synthetic };

std::string to_string(ItemLabel label);
std::string to_string(BenchmarkKind kind);
ItemLabel item_label_from_string(std::string_view s);
BenchmarkKind benchmark_kind_from_string(std::string_view s);

/// One labeled piece of information inside a scenario. Detection matches the
/// canonical phrase or any alias (any-of semantics).
struct InfoItem {
  ItemLabel label = ItemLabel::Public;
  std::string canonical_phrase;
  std::vector<std::string> aliases;
  std::string item_id;
};

/// The five contextual-integrity parameters. All fields are always present;
/// synthetic instances may leave some empty.
struct CIParameters {
  std::string information_type;
  std::string subject;
  std::string sender;
  std::string recipient;
  std::string transmission_principle;
};

struct ScenarioInstance {
  std::string instance_id;
  BenchmarkKind kind = BenchmarkKind::ConfAIde;
  std::string context_text;  // meeting transcript or executable trajectory
  std::optional<std::string> user_instruction;
  std::optional<std::string> final_action_kind;
  std::vector<InfoItem> items;
  CIParameters ci;
};

/// Normalized text. Canonicalizing a CanonicalText's `normalized` field is a
/// no-op (idempotence).
struct CanonicalText {
  std::string normalized;
};

/// Unicode-composed, lowercased, punctuation stripped to single spaces,
/// whitespace collapsed and trimmed. Total and deterministic.
CanonicalText canonicalize(std::string_view raw);

/// True iff the canonicalized haystack contains the canonicalized phrase of
/// the item or of any alias as a contiguous substring.
bool contains_item(std::string_view haystack, const InfoItem& item);

/// Returns the list of violated invariants; empty means valid. Never throws.
std::vector<std::string> validate_instance(const ScenarioInstance& instance);

}  // namespace privflow
