#include "privflow/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "privflow/errors.hpp"

namespace privflow {

namespace {

const std::map<TemplateId, std::string> kNames = {
    {TemplateId::SingleBaseline, "single_baseline"},
    {TemplateId::SingleEnhanced, "single_enhanced"},
    {TemplateId::SingleCot, "single_cot"},
    {TemplateId::ExtractorConfaide2Agent, "extractor_confaide_2agent"},
    {TemplateId::ExtractorConfaide3Agent, "extractor_confaide_3agent"},
    {TemplateId::CheckerPublicOnly, "checker_public_only"},
    {TemplateId::CheckerAnnotatePrivate, "checker_annotate_private"},
    {TemplateId::ExecutorConfaide, "executor_confaide"},
    {TemplateId::SinglePrivacylens, "single_privacylens"},
    {TemplateId::ExtractorPrivacylens, "extractor_privacylens"},
    {TemplateId::CheckerPublicOnlyPl, "checker_public_only_pl"},
    {TemplateId::CheckerAnnotatePrivatePl, "checker_annotate_private_pl"},
    {TemplateId::ExecutorPrivacylens, "executor_privacylens"},
};

}  // namespace

std::string to_string(TemplateId id) { return kNames.at(id); }

TemplateId template_id_from_string(std::string_view s) {
  for (const auto& [id, name] : kNames) {
    if (name == s) return id;
  }
  throw UnknownTemplate("unknown template id: " + std::string(s));
}

const std::vector<TemplateId>& all_template_ids() {
  static const std::vector<TemplateId> ids = [] {
    std::vector<TemplateId> v;
    for (const auto& [id, name] : kNames) v.push_back(id);
    return v;
  }();
  return ids;
}

const std::vector<std::string>& known_placeholders() {
  static const std::vector<std::string> names = {
      "transcript",  "extractor_response", "checker_response",
      "user_instruction", "executable_trajectory", "final_action",
  };
  return names;
}

PromptRegistry PromptRegistry::load_dir(const std::filesystem::path& dir) {
  PromptRegistry reg;
  for (TemplateId id : all_template_ids()) {
    const auto path = dir / (to_string(id) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UnknownTemplate("template file not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    reg.bodies_[id] = buf.str();
  }
  return reg;
}

const std::string& PromptRegistry::body(TemplateId id) const {
  auto it = bodies_.find(id);
  if (it == bodies_.end()) throw UnknownTemplate("template not loaded: " + to_string(id));
  return it->second;
}

namespace {

bool is_known_placeholder(std::string_view name) {
  const auto& known = known_placeholders();
  return std::find(known.begin(), known.end(), name) != known.end();
}

// Walks the body calling fn(name, start, end) for each known {name}.
template <typename Fn>
void for_each_placeholder(const std::string& body, Fn&& fn) {
  size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string::npos) {
    size_t close = body.find('}', pos + 1);
    if (close == std::string::npos) break;
    std::string_view name(body.data() + pos + 1, close - pos - 1);
    if (is_known_placeholder(name)) {
      fn(std::string(name), pos, close + 1);
      pos = close + 1;
    } else {
      pos++;
    }
  }
}

}  // namespace

std::string PromptRegistry::render(TemplateId id, const Bindings& bindings) const {
  const std::string& tpl = body(id);
  std::string out;
  out.reserve(tpl.size());
  size_t last = 0;
  for_each_placeholder(tpl, [&](const std::string& name, size_t start, size_t end) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw MissingBinding(name);
    out.append(tpl, last, start - last);
    out.append(it->second);
    last = end;
  });
  out.append(tpl, last, tpl.size() - last);
  return out;
}

std::vector<std::string> PromptRegistry::placeholders(TemplateId id) const {
  std::vector<std::string> names;
  for_each_placeholder(body(id), [&](const std::string& name, size_t, size_t) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  });
  return names;
}

std::pair<std::string, bool> extract_final_summary(std::string_view cot_output) {
  static constexpr std::string_view kOpen = "<FINAL_SUMMARY>";
  static constexpr std::string_view kClose = "</FINAL_SUMMARY>";
  const size_t open = cot_output.find(kOpen);
  if (open != std::string_view::npos) {
    const size_t start = open + kOpen.size();
    const size_t close = cot_output.find(kClose, start);
    // An empty region between the tags counts as malformed and falls back.
    if (close != std::string_view::npos && close > start) {
      return {std::string(cot_output.substr(start, close - start)), false};
    }
  }
  return {std::string(cot_output), true};
}

}  // namespace privflow
