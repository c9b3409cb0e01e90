#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace privflow {

enum class TemplateId {
  SingleBaseline,
  SingleEnhanced,
  SingleCot,
  ExtractorConfaide2Agent,
  ExtractorConfaide3Agent,
  CheckerPublicOnly,
  CheckerAnnotatePrivate,
  ExecutorConfaide,
  SinglePrivacylens,
  ExtractorPrivacylens,
  CheckerPublicOnlyPl,
  CheckerAnnotatePrivatePl,
  ExecutorPrivacylens,
};

std::string to_string(TemplateId id);
TemplateId template_id_from_string(std::string_view s);
const std::vector<TemplateId>& all_template_ids();

/// Placeholder names `{name}` recognized in template bodies. Any other
/// brace-delimited token is literal text (the PrivacyLens system prompt
/// contains literal {agent}/{user}).
const std::vector<std::string>& known_placeholders();

using Bindings = std::map<std::string, std::string>;

/// Read-only registry of prompt bodies, one UTF-8 file per template id.
class PromptRegistry {
 public:
  static PromptRegistry load_dir(const std::filesystem::path& dir);

  const std::string& body(TemplateId id) const;

  /// Substitutes every known placeholder; throws MissingBinding if a
  /// placeholder occurring in the body has no binding.
  std::string render(TemplateId id, const Bindings& bindings) const;

  /// Placeholders occurring in the body of `id`, in order of appearance.
  std::vector<std::string> placeholders(TemplateId id) const;

 private:
  std::map<TemplateId, std::string> bodies_;
};

/// Content strictly between the first <FINAL_SUMMARY> and the next
/// </FINAL_SUMMARY>. If the tags are absent or malformed, returns the full
/// input with the fallback flag set.
std::pair<std::string, bool> extract_final_summary(std::string_view cot_output);

}  // namespace privflow
