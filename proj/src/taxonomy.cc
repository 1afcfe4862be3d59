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

#include "vulnbench/taxonomy.h"

#include <algorithm>
#include <cctype>

#include "vulnbench/assets.h"
#include "vulnbench/errors.h"

namespace vulnbench {
namespace {

constexpr std::array<std::string_view, kNumVulnClasses> kClassNames = {
    "AccessControl",     "ArithmeticOverflowUnderflow", "BadRandomness", "DenialOfService",
    "FrontRunning",      "GaslessSend",                 "Reentrancy",    "ShortAddresses",
    "TimeManipulation",  "TxOrigin",                    "UncheckedLowLevelCall",
    "UnsafeDelegateCall", "UnsafeSuicide",
};

constexpr std::array<std::string_view, 4> kSeverityNames = {"High", "Medium", "Low", "NotMentioned"};

std::string fold(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  std::string out(s.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

int rank(Severity s) {
  switch (s) {
    case Severity::kLow:
      return 0;
    case Severity::kMedium:
      return 1;
    case Severity::kHigh:
      return 2;
    case Severity::kNotMentioned:
      break;
  }
  return -1;
}

}  // namespace

std::string_view to_string(VulnClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<VulnClass> parse_vuln_class(std::string_view canonical) {
  for (std::size_t k = 0; k < kClassNames.size(); ++k) {
    if (kClassNames[k] == canonical) return static_cast<VulnClass>(k);
  }
  return std::nullopt;
}

std::string_view to_string(Severity s) { return kSeverityNames[static_cast<std::size_t>(s)]; }

std::optional<Severity> parse_severity(std::string_view canonical) {
  for (std::size_t k = 0; k < kSeverityNames.size(); ++k) {
    if (kSeverityNames[k] == canonical) return static_cast<Severity>(k);
  }
  return std::nullopt;
}

std::partial_ordering compare_severity(Severity a, Severity b) {
  if (a == b) return std::partial_ordering::equivalent;
  const int ra = rank(a);
  const int rb = rank(b);
  if (ra < 0 || rb < 0) return std::partial_ordering::unordered;
  return ra <=> rb;
}

const Taxonomy& Taxonomy::defaults() {
  static const Taxonomy kDefaults = [] {
    Json config;
    try {
      config = Json::parse(bundled_asset("config/taxonomy.json"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bundled taxonomy config: ") + e.what());
    }
    Taxonomy empty;
    std::fill(empty.severity_.begin(), empty.severity_.end(), Severity::kNotMentioned);
    Taxonomy t = from_json(config, empty);
    for (VulnClass c : kAllVulnClasses) {
      if (t.severity_[static_cast<std::size_t>(c)] == Severity::kNotMentioned) {
        throw ParseError("bundled taxonomy config has no severity for " + std::string(to_string(c)));
      }
    }
    return t;
  }();
  return kDefaults;
}

Taxonomy Taxonomy::from_json(const Json& config, const Taxonomy& base) {
  if (!config.is_object()) throw ParseError("taxonomy config must be a JSON object");
  Taxonomy t = base;
  if (auto it = config.find("severity"); it != config.end()) {
    if (!it->is_object()) throw ParseError("taxonomy config: 'severity' must be an object");
    for (const auto& [name, value] : it->items()) {
      const auto c = parse_vuln_class(name);
      if (!c) throw ParseError("taxonomy config: unknown class '" + name + "'");
      const auto s = value.is_string() ? parse_severity(value.get<std::string>()) : std::nullopt;
      if (!s || *s == Severity::kNotMentioned) {
        throw ParseError("taxonomy config: severity of '" + name + "' must be High, Medium or Low");
      }
      t.severity_[static_cast<std::size_t>(*c)] = *s;
    }
  }
  if (auto it = config.find("detectors"); it != config.end()) {
    if (!it->is_object()) throw ParseError("taxonomy config: 'detectors' must be an object");
    for (const auto& [detector, table] : it->items()) {
      if (!table.is_object()) {
        throw ParseError("taxonomy config: detector '" + detector + "' must map labels to classes");
      }
      std::map<std::string, VulnClass> mapping;
      std::map<std::string, std::string> spelling;
      for (const auto& [raw, value] : table.items()) {
        const auto c = value.is_string() ? parse_vuln_class(value.get<std::string>()) : std::nullopt;
        if (!c) {
          throw ParseError("taxonomy config: " + detector + "/" + raw + " maps to an unknown class");
        }
        mapping[fold(raw)] = *c;
        spelling[fold(raw)] = raw;
      }
      t.detectors_[fold(detector)] = std::move(mapping);
      t.spellings_[fold(detector)] = std::move(spelling);
    }
  }
  return t;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::string text = read_file(path);
  try {
    return from_json(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

bool Taxonomy::has_detector(std::string_view detector_id) const {
  return detectors_.find(fold(detector_id)) != detectors_.end();
}

std::optional<VulnClass> Taxonomy::normalize_finding(std::string_view detector_id,
                                                     std::string_view raw_label) const {
  auto table = detectors_.find(fold(detector_id));
  if (table == detectors_.end()) {
    throw InvalidArgument("unknown detector '" + std::string(detector_id) + "'");
  }
  auto hit = table->second.find(fold(raw_label));
  if (hit == table->second.end()) return std::nullopt;
  return hit->second;
}

Severity Taxonomy::default_severity(VulnClass c) const {
  return severity_[static_cast<std::size_t>(c)];
}

Json Taxonomy::to_json() const {
  Json j;
  Json severity = Json::object();
  for (VulnClass c : kAllVulnClasses) {
    severity[std::string(to_string(c))] = std::string(to_string(default_severity(c)));
  }
  j["severity"] = std::move(severity);
  Json detectors = Json::object();
  for (const auto& [detector, mapping] : detectors_) {
    Json table = Json::object();
    const auto& spelling = spellings_.at(detector);
    for (const auto& [raw, c] : mapping) table[spelling.at(raw)] = std::string(to_string(c));
    detectors[detector] = std::move(table);
  }
  j["detectors"] = std::move(detectors);
  return j;
}

}  // namespace vulnbench
