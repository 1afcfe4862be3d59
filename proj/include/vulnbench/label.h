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

#ifndef VULNBENCH_LABEL_H_
#define VULNBENCH_LABEL_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vulnbench/jsonl.h"
#include "vulnbench/taxonomy.h"

namespace vulnbench {

// Ground truth for one contract sample: presence, type and severity, plus
// where the issue lives.
//
//   vulnerable == false  =>  no class, severity NotMentioned, no lines
//   vulnerable == true   =>  a class, severity in {High, Medium, Low}
struct LabelRecord {
  std::string contract_id;
  bool vulnerable = false;
  std::optional<VulnClass> vuln_class;
  Severity severity = Severity::kNotMentioned;
  std::optional<std::string> vulnerable_function;
  std::vector<int> vulnerable_lines;
  std::vector<VulnClass> secondary_classes;

  static LabelRecord clean(std::string contract_id);
  static LabelRecord vulnerable_as(std::string contract_id, VulnClass c, Severity s);

  // Throws InvalidArgument describing the first violated invariant.
  void validate() const;

  bool operator==(const LabelRecord&) const = default;
};

Json to_json(const LabelRecord& label);
LabelRecord label_from_json(const Json& j);

std::vector<LabelRecord> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<LabelRecord>& labels);

}  // namespace vulnbench

#endif  // VULNBENCH_LABEL_H_
