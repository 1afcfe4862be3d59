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

#include "vulnbench/label.h"

#include <algorithm>

#include "vulnbench/errors.h"

namespace vulnbench {

LabelRecord LabelRecord::clean(std::string contract_id) {
  LabelRecord label;
  label.contract_id = std::move(contract_id);
  return label;
}

LabelRecord LabelRecord::vulnerable_as(std::string contract_id, VulnClass c, Severity s) {
  LabelRecord label;
  label.contract_id = std::move(contract_id);
  label.vulnerable = true;
  label.vuln_class = c;
  label.severity = s;
  return label;
}

void LabelRecord::validate() const {
  const std::string who = "label '" + contract_id + "': ";
  if (vulnerable) {
    if (!vuln_class) throw InvalidArgument(who + "vulnerable label without a class");
    if (severity == Severity::kNotMentioned) {
      throw InvalidArgument(who + "vulnerable label with severity NotMentioned");
    }
  } else {
    if (vuln_class) throw InvalidArgument(who + "non-vulnerable label with a class");
    if (severity != Severity::kNotMentioned) {
      throw InvalidArgument(who + "non-vulnerable label must have severity NotMentioned");
    }
    if (!vulnerable_lines.empty()) {
      throw InvalidArgument(who + "non-vulnerable label with vulnerable lines");
    }
  }
  if (!std::is_sorted(vulnerable_lines.begin(), vulnerable_lines.end())) {
    throw InvalidArgument(who + "vulnerable lines must be sorted");
  }
}

Json to_json(const LabelRecord& label) {
  Json j;
  j["contract_id"] = label.contract_id;
  j["vulnerable"] = label.vulnerable;
  j["class"] = label.vuln_class ? Json(std::string(to_string(*label.vuln_class))) : Json(nullptr);
  j["severity"] = std::string(to_string(label.severity));
  j["vulnerable_function"] =
      label.vulnerable_function ? Json(*label.vulnerable_function) : Json(nullptr);
  j["vulnerable_lines"] = label.vulnerable_lines;
  Json secondary = Json::array();
  for (VulnClass c : label.secondary_classes) secondary.push_back(std::string(to_string(c)));
  j["secondary_classes"] = std::move(secondary);
  return j;
}

LabelRecord label_from_json(const Json& j) {
  LabelRecord label;
  try {
    label.contract_id = require_string(j, "contract_id");
    label.vulnerable = require_field(j, "vulnerable").get<bool>();
    if (j.contains("class") && !j["class"].is_null()) {
      const std::string name = j["class"].get<std::string>();
      label.vuln_class = parse_vuln_class(name);
      if (!label.vuln_class) throw ParseError("unknown vulnerability class '" + name + "'");
    }
    const std::string severity = require_string(j, "severity");
    const auto parsed = parse_severity(severity);
    if (!parsed) throw ParseError("unknown severity '" + severity + "'");
    label.severity = *parsed;
    if (j.contains("vulnerable_function") && !j["vulnerable_function"].is_null()) {
      label.vulnerable_function = j["vulnerable_function"].get<std::string>();
    }
    if (j.contains("vulnerable_lines")) {
      label.vulnerable_lines = j["vulnerable_lines"].get<std::vector<int>>();
    }
    if (j.contains("secondary_classes")) {
      for (const Json& name : j["secondary_classes"]) {
        const auto c = parse_vuln_class(name.get<std::string>());
        if (!c) throw ParseError("unknown secondary class '" + name.get<std::string>() + "'");
        label.secondary_classes.push_back(*c);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("label record: ") + e.what());
  }
  try {
    label.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return label;
}

std::vector<LabelRecord> read_labels(const std::filesystem::path& path) {
  std::vector<LabelRecord> labels;
  int line = 0;
  for (const Json& j : read_jsonl(path)) {
    ++line;
    try {
      labels.push_back(label_from_json(j));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": record " + std::to_string(line) + ": " + e.what());
    }
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<LabelRecord>& labels) {
  std::vector<Json> records;
  records.reserve(labels.size());
  for (const LabelRecord& label : labels) records.push_back(to_json(label));
  write_jsonl(path, records);
}

}  // namespace vulnbench
