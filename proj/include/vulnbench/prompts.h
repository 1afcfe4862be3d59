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

#ifndef VULNBENCH_PROMPTS_H_
#define VULNBENCH_PROMPTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vulnbench/corpus.h"
#include "vulnbench/label.h"
#include "vulnbench/taxonomy.h"

namespace vulnbench {

struct ZeroShot {
  bool operator==(const ZeroShot&) const = default;
};
struct FewShot {
  int k = 3;
  std::uint64_t exemplar_seed = 0;
  bool operator==(const FewShot&) const = default;
};
struct ChainOfThought {
  std::string step_template = "default";
  bool operator==(const ChainOfThought&) const = default;
};
using PromptStrategy = std::variant<ZeroShot, FewShot, ChainOfThought>;

// "zero_shot", "few_shot" or "chain_of_thought".
std::string strategy_name(const PromptStrategy& strategy);

// Accepts a bare name ("few_shot") or an object such as
// {"kind": "few_shot", "k": 3, "seed": 1} / {"kind": "chain_of_thought",
// "steps": "default"}.
PromptStrategy parse_strategy(const Json& j);
Json to_json(const PromptStrategy& strategy);

enum class Role { kSystem, kUser, kAssistant };
std::string_view to_string(Role role);

struct Message {
  Role role;
  std::string content;
  bool operator==(const Message&) const = default;
};

// First message is the system prompt; user and assistant turns alternate
// after it, starting with user.
struct Conversation {
  std::vector<Message> messages;

  // Throws InvalidArgument when the role order is wrong.
  void validate() const;
  bool operator==(const Conversation&) const = default;
};

// [{"role": ..., "content": ...}, ...]
Json to_json(const Conversation& conversation);

struct LabeledSample {
  ContractSample sample;
  LabelRecord label;
};

// Plain-text prompt templates with {{placeholder}} slots:
//   system.txt                 {{classes}}
//   user.txt                   {{code}}
//   few_shot_user.txt          {{exemplars}} (count), {{code}}
//   chain_of_thought_user.txt  {{steps}}, {{code}}
//   steps/<id>.txt             numbered reasoning steps
struct PromptTemplates {
  std::string system;
  std::string user;
  std::string few_shot_user;
  std::string chain_of_thought_user;
  std::map<std::string, std::string> steps;

  static PromptTemplates bundled();
  // Files missing from `dir` fall back to the bundled version.
  static PromptTemplates load(const std::filesystem::path& dir);
};

// Replaces every {{name}} present in `values`; other text is copied.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& values);

// Class-stratified exemplar choice: the pool is grouped by class (clean
// samples form their own group), each group is shuffled with the seed, and
// groups are visited round-robin in name order until k are picked.
// Throws InvalidArgument when the pool holds the target or fewer than k items.
std::vector<const LabeledSample*> select_exemplars(std::string_view target_id,
                                                   std::span<const LabeledSample> pool, int k,
                                                   std::uint64_t seed);

// Renders one evaluation conversation for `sample` (its normalized text is
// the embedded code). Few-shot prepends k exemplar user/assistant pairs whose
// answers come from render_gold.
Conversation build_prompt(const ContractSample& sample, const PromptStrategy& strategy,
                          std::span<const LabeledSample> exemplar_pool,
                          const PromptTemplates& templates = PromptTemplates::bundled());

// Code passed through unchanged when it fits in `max_chars` (0 = no limit).
// Oversize code is cut at the last line break before the limit when
// `truncate` is set, and is an InvalidArgument otherwise.
std::string fit_code(std::string_view code, std::size_t max_chars, bool truncate);

enum class Presence { kYes, kNo, kUnparseable };
std::string_view to_string(Presence p);

// A model answer reduced to (presence, class, severity). Unparseable carries
// no class or severity; No carries no class.
struct ModelVerdict {
  Presence presence = Presence::kUnparseable;
  std::optional<VulnClass> vuln_class;
  std::optional<Severity> severity;
  std::string raw;

  bool operator==(const ModelVerdict&) const = default;
};

Json to_json(const ModelVerdict& verdict);
ModelVerdict verdict_from_json(const Json& j);

// Three-stage match against canonical class names: exact, then case-folded,
// then with everything but letters and digits removed. nullopt when no stage
// yields exactly one class.
std::optional<VulnClass> match_class_name(std::string_view text);

// Extracts "Vulnerability: <Yes|No>", "Type: <class|None>" and
// "Severity: <High|Medium|Low|None>" fields (case-insensitive, last
// occurrence wins, surrounding prose ignored). Without a presence field only
// explicit negative statements ("no vulnerability detected", "is not
// vulnerable") are recognized. A Type or Severity value that matches nothing
// makes the whole verdict Unparseable.
ModelVerdict parse_verdict(std::string_view text);

// The canonical assistant answer for a label, in the grammar parse_verdict
// reads back.
std::string render_gold(const LabelRecord& label);

}  // namespace vulnbench

#endif  // VULNBENCH_PROMPTS_H_
