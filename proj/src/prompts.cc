// Copyright 2026 The VulnBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vulnbench/prompts.h"

#include <algorithm>
#include <cctype>
#include <regex>

#include "vulnbench/assets.h"
#include "vulnbench/errors.h"
#include "vulnbench/rng.h"

namespace vulnbench {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string alnum_lower(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string class_list() {
  std::string out;
  for (VulnClass c : kAllVulnClasses) {
    if (!out.empty()) out.push_back('\n');
    out += "- ";
    out += to_string(c);
  }
  return out;
}

// Outcome of reading one Type/Severity field value.
enum class FieldValue { kAbsent, kNone, kMatched, kUnmatched };

bool is_none_word(std::string_view value) {
  static const std::vector<std::string> kNoneWords = {
      "none", "na", "null", "nil", "notapplicable", "notmentioned", "novulnerability", "nothing"};
  const std::string key = alnum_lower(value);
  return key.empty() || std::find(kNoneWords.begin(), kNoneWords.end(), key) != kNoneWords.end();
}

template <typename T, typename Matcher>
FieldValue read_field(const std::optional<std::string>& raw, Matcher match, std::optional<T>& out) {
  if (!raw) return FieldValue::kAbsent;
  const std::string_view value = trim(*raw);
  if (is_none_word(value)) return FieldValue::kNone;
  out = match(value);
  return out ? FieldValue::kMatched : FieldValue::kUnmatched;
}

std::optional<Severity> match_severity_name(std::string_view text) {
  static constexpr std::array<Severity, 3> kLevels = {Severity::kHigh, Severity::kMedium, Severity::kLow};
  for (auto fold : {+[](std::string_view s) { return std::string(s); },
                    +[](std::string_view s) { return lower(s); },
                    +[](std::string_view s) { return alnum_lower(s); }}) {
    const std::string key = fold(text);
    for (Severity s : kLevels) {
      if (fold(to_string(s)) == key) return s;
    }
  }
  return std::nullopt;
}

// Captured value of the last match of `pattern` in `text`.
std::optional<std::string> last_capture(const std::string& text, const std::regex& pattern) {
  std::optional<std::string> value;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator();
       ++it) {
    value = (*it)[1].str();
  }
  return value;
}

}  // namespace

std::string strategy_name(const PromptStrategy& strategy) {
  struct Visitor {
    std::string operator()(const ZeroShot&) const { return "zero_shot"; }
    std::string operator()(const FewShot&) const { return "few_shot"; }
    std::string operator()(const ChainOfThought&) const { return "chain_of_thought"; }
  };
  return std::visit(Visitor{}, strategy);
}

PromptStrategy parse_strategy(const Json& j) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    kind = require_string(j, "kind");
  } else {
    throw ParseError("strategy must be a name or an object");
  }
  if (kind == "zero_shot") return ZeroShot{};
  if (kind == "few_shot") {
    FewShot few;
    if (j.is_object()) {
      few.k = j.value("k", few.k);
      few.exemplar_seed = j.value("seed", few.exemplar_seed);
    }
    if (few.k < 1) throw ParseError("few_shot needs k >= 1");
    return few;
  }
  if (kind == "chain_of_thought") {
    ChainOfThought cot;
    if (j.is_object()) cot.step_template = j.value("steps", cot.step_template);
    return cot;
  }
  throw ParseError("unknown prompting strategy '" + kind + "'");
}

Json to_json(const PromptStrategy& strategy) {
  Json j;
  j["kind"] = strategy_name(strategy);
  if (const auto* few = std::get_if<FewShot>(&strategy)) {
    j["k"] = few->k;
    j["seed"] = few->exemplar_seed;
  } else if (const auto* cot = std::get_if<ChainOfThought>(&strategy)) {
    j["steps"] = cot->step_template;
  }
  return j;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
  }
  return "user";
}

void Conversation::validate() const {
  if (messages.empty() || messages.front().role != Role::kSystem) {
    throw InvalidArgument("conversation must start with a system message");
  }
  for (std::size_t i = 1; i < messages.size(); ++i) {
    const Role expected = (i % 2 == 1) ? Role::kUser : Role::kAssistant;
    if (messages[i].role != expected) {
      throw InvalidArgument("conversation message " + std::to_string(i) + " should be " +
                            std::string(to_string(expected)));
    }
  }
}

Json to_json(const Conversation& conversation) {
  Json messages = Json::array();
  for (const Message& m : conversation.messages) {
    Json entry;
    entry["role"] = std::string(to_string(m.role));
    entry["content"] = m.content;
    messages.push_back(std::move(entry));
  }
  return messages;
}

PromptTemplates PromptTemplates::bundled() {
  PromptTemplates t;
  t.system = std::string(bundled_asset("prompts/system.txt"));
  t.user = std::string(bundled_asset("prompts/user.txt"));
  t.few_shot_user = std::string(bundled_asset("prompts/few_shot_user.txt"));
  t.chain_of_thought_user = std::string(bundled_asset("prompts/chain_of_thought_user.txt"));
  for (const std::string& path : bundled_asset_paths("prompts/steps/")) {
    std::filesystem::path p(path);
    t.steps[p.stem().string()] = std::string(bundled_asset(path));
  }
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InvalidArgument("template directory not found: " + dir.string());
  }
  PromptTemplates t = bundled();
  auto override_with = [&](const char* name, std::string& slot) {
    const auto path = dir / name;
    if (std::filesystem::exists(path)) slot = read_file(path);
  };
  override_with("system.txt", t.system);
  override_with("user.txt", t.user);
  override_with("few_shot_user.txt", t.few_shot_user);
  override_with("chain_of_thought_user.txt", t.chain_of_thought_user);
  if (std::filesystem::is_directory(dir / "steps")) {
    for (const auto& entry : std::filesystem::directory_iterator(dir / "steps")) {
      if (entry.path().extension() == ".txt") {
        t.steps[entry.path().stem().string()] = read_file(entry.path());
      }
    }
  }
  return t;
}

std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    const std::string name(trim(text.substr(open + 2, close - open - 2)));
    auto it = values.find(name);
    out.append(text.substr(pos, open - pos));
    if (it != values.end()) {
      out += it->second;
    } else {
      out.append(text.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(text.substr(std::min(pos, text.size())));
  return std::string(trim(out));
}

std::vector<const LabeledSample*> select_exemplars(std::string_view target_id,
                                                   std::span<const LabeledSample> pool, int k,
                                                   std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("few-shot needs k >= 1");
  std::map<std::string, std::vector<const LabeledSample*>> groups;
  for (const LabeledSample& item : pool) {
    if (item.sample.id == target_id) {
      throw InvalidArgument("exemplar pool contains the evaluation target '" + std::string(target_id) + "'");
    }
    const auto& c = item.label.vuln_class;
    groups[c ? std::string(to_string(*c)) : "None"].push_back(&item);
  }
  if (pool.size() < static_cast<std::size_t>(k)) {
    throw InvalidArgument("exemplar pool has " + std::to_string(pool.size()) + " item(s), need " +
                          std::to_string(k));
  }
  SeededRng rng(seed);
  for (auto& [key, members] : groups) rng.shuffle(std::span<const LabeledSample*>(members));

  std::vector<const LabeledSample*> picked;
  for (std::size_t round = 0; picked.size() < static_cast<std::size_t>(k); ++round) {
    for (auto& [key, members] : groups) {
      if (round < members.size() && picked.size() < static_cast<std::size_t>(k)) {
        picked.push_back(members[round]);
      }
    }
  }
  return picked;
}

Conversation build_prompt(const ContractSample& sample, const PromptStrategy& strategy,
                          std::span<const LabeledSample> exemplar_pool, const PromptTemplates& templates) {
  Conversation conversation;
  conversation.messages.push_back({Role::kSystem, render_template(templates.system, {{"classes", class_list()}})});

  if (std::holds_alternative<ZeroShot>(strategy)) {
    conversation.messages.push_back({Role::kUser, render_template(templates.user, {{"code", sample.normalized}})});
  } else if (const auto* few = std::get_if<FewShot>(&strategy)) {
    for (const LabeledSample* exemplar : select_exemplars(sample.id, exemplar_pool, few->k, few->exemplar_seed)) {
      conversation.messages.push_back(
          {Role::kUser, render_template(templates.user, {{"code", exemplar->sample.normalized}})});
      conversation.messages.push_back({Role::kAssistant, render_gold(exemplar->label)});
    }
    conversation.messages.push_back(
        {Role::kUser, render_template(templates.few_shot_user,
                                      {{"exemplars", std::to_string(few->k)}, {"code", sample.normalized}})});
  } else {
    const auto& cot = std::get<ChainOfThought>(strategy);
    auto steps = templates.steps.find(cot.step_template);
    if (steps == templates.steps.end()) {
      throw InvalidArgument("unknown chain-of-thought step template '" + cot.step_template + "'");
    }
    conversation.messages.push_back(
        {Role::kUser, render_template(templates.chain_of_thought_user,
                                      {{"steps", std::string(trim(steps->second))}, {"code", sample.normalized}})});
  }
  conversation.validate();
  return conversation;
}

std::string fit_code(std::string_view code, std::size_t max_chars, bool truncate) {
  if (max_chars == 0 || code.size() <= max_chars) return std::string(code);
  if (!truncate) {
    throw InvalidArgument("contract of " + std::to_string(code.size()) + " characters exceeds the " +
                          std::to_string(max_chars) + "-character input limit (enable truncation to cut it)");
  }
  std::string_view head = code.substr(0, max_chars);
  const std::size_t cut = head.rfind('\n');
  if (cut != std::string_view::npos && cut > 0) head = head.substr(0, cut);
  return std::string(head);
}

std::string_view to_string(Presence p) {
  switch (p) {
    case Presence::kYes:
      return "Yes";
    case Presence::kNo:
      return "No";
    case Presence::kUnparseable:
      return "Unparseable";
  }
  return "Unparseable";
}

Json to_json(const ModelVerdict& verdict) {
  Json j;
  j["presence"] = std::string(to_string(verdict.presence));
  j["class"] = verdict.vuln_class ? Json(std::string(to_string(*verdict.vuln_class))) : Json(nullptr);
  j["severity"] = verdict.severity ? Json(std::string(to_string(*verdict.severity))) : Json(nullptr);
  j["raw"] = verdict.raw;
  return j;
}

ModelVerdict verdict_from_json(const Json& j) {
  ModelVerdict v;
  const std::string presence = require_string(j, "presence");
  if (presence == "Yes") {
    v.presence = Presence::kYes;
  } else if (presence == "No") {
    v.presence = Presence::kNo;
  } else if (presence == "Unparseable") {
    v.presence = Presence::kUnparseable;
  } else {
    throw ParseError("unknown presence '" + presence + "'");
  }
  if (j.contains("class") && !j["class"].is_null()) {
    v.vuln_class = parse_vuln_class(j["class"].get<std::string>());
    if (!v.vuln_class) throw ParseError("unknown class '" + j["class"].get<std::string>() + "'");
  }
  if (j.contains("severity") && !j["severity"].is_null()) {
    v.severity = parse_severity(j["severity"].get<std::string>());
    if (!v.severity) throw ParseError("unknown severity '" + j["severity"].get<std::string>() + "'");
  }
  v.raw = j.value("raw", std::string());
  return v;
}

std::optional<VulnClass> match_class_name(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  for (auto fold : {+[](std::string_view s) { return std::string(s); },
                    +[](std::string_view s) { return lower(s); },
                    +[](std::string_view s) { return alnum_lower(s); }}) {
    const std::string key = fold(text);
    std::optional<VulnClass> hit;
    int hits = 0;
    for (VulnClass c : kAllVulnClasses) {
      if (fold(to_string(c)) == key) {
        hit = c;
        ++hits;
      }
    }
    if (hits == 1) return hit;
    if (hits > 1) return std::nullopt;
  }
  return std::nullopt;
}

ModelVerdict parse_verdict(std::string_view text) {
  static const std::regex kPresence(
      R"(\bvulnerab(?:le|ility|ilities)?(?:\s+(?:present|detected|found))?\s*[:=]\s*(yes|no|true|false|none)\b)",
      std::regex::ECMAScript | std::regex::icase);
  static const std::regex kType(R"(\b(?:vulnerability\s+)?type\s*[:=][ \t]*([^;,|(){}\n]*))",
                                std::regex::ECMAScript | std::regex::icase);
  static const std::regex kSeverity(R"(\bseverity(?:\s+level)?\s*[:=][ \t]*([^;,|(){}\n]*))",
                                    std::regex::ECMAScript | std::regex::icase);
  static const std::regex kNegative(
      R"(\bno\s+(?:known\s+|security\s+|obvious\s+)?(?:vulnerabilit(?:y|ies)|security\s+issues?|issues?)\s+(?:(?:was|were)\s+)?(?:detected|found|identified|present)\b)"
      R"(|\b(?:is|appears\s+to\s+be|seems\s+to\s+be|seems)\s+not\s+vulnerable\b)"
      R"(|\bdoes\s+not\s+contain\s+any\s+(?:known\s+)?vulnerabilit)",
      std::regex::ECMAScript | std::regex::icase);

  ModelVerdict verdict;
  verdict.raw = std::string(text);
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '*' && c != '`' && c != '"') clean.push_back(c);
  }

  const std::optional<std::string> presence = last_capture(clean, kPresence);
  if (!presence) {
    if (std::regex_search(clean, kNegative)) verdict.presence = Presence::kNo;
    return verdict;
  }
  const std::string answer = lower(*presence);
  if (answer == "no" || answer == "false" || answer == "none") {
    verdict.presence = Presence::kNo;
    return verdict;
  }

  std::optional<VulnClass> vuln_class;
  std::optional<Severity> severity;
  const FieldValue type_field = read_field(last_capture(clean, kType), match_class_name, vuln_class);
  const FieldValue severity_field = read_field(last_capture(clean, kSeverity), match_severity_name, severity);
  if (type_field == FieldValue::kUnmatched || severity_field == FieldValue::kUnmatched) return verdict;
  verdict.presence = Presence::kYes;
  verdict.vuln_class = vuln_class;
  verdict.severity = severity;
  return verdict;
}

std::string render_gold(const LabelRecord& label) {
  if (!label.vulnerable || !label.vuln_class) {
    return "Vulnerability: No\nType: None\nSeverity: None";
  }
  return "Vulnerability: Yes\nType: " + std::string(to_string(*label.vuln_class)) +
         "\nSeverity: " + std::string(to_string(label.severity));
}

}  // namespace vulnbench
