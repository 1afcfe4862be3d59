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

#ifndef VULNBENCH_TAXONOMY_H_
#define VULNBENCH_TAXONOMY_H_

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "vulnbench/jsonl.h"

namespace vulnbench {

// The 13 vulnerability classes. Enumerator order equals alphabetical order
// of the canonical names and is the tie-break order everywhere.
enum class VulnClass : std::uint8_t {
  kAccessControl,
  kArithmeticOverflowUnderflow,
  kBadRandomness,
  kDenialOfService,
  kFrontRunning,
  kGaslessSend,
  kReentrancy,
  kShortAddresses,
  kTimeManipulation,
  kTxOrigin,
  kUncheckedLowLevelCall,
  kUnsafeDelegateCall,
  kUnsafeSuicide,
};

inline constexpr std::size_t kNumVulnClasses = 13;

inline constexpr std::array<VulnClass, kNumVulnClasses> kAllVulnClasses = {
    VulnClass::kAccessControl,         VulnClass::kArithmeticOverflowUnderflow,
    VulnClass::kBadRandomness,         VulnClass::kDenialOfService,
    VulnClass::kFrontRunning,          VulnClass::kGaslessSend,
    VulnClass::kReentrancy,            VulnClass::kShortAddresses,
    VulnClass::kTimeManipulation,      VulnClass::kTxOrigin,
    VulnClass::kUncheckedLowLevelCall, VulnClass::kUnsafeDelegateCall,
    VulnClass::kUnsafeSuicide,
};

// Canonical names are the exact strings used in prompts, label files and
// verdict parsing ("Reentrancy", "TxOrigin", ...).
std::string_view to_string(VulnClass c);
std::optional<VulnClass> parse_vuln_class(std::string_view canonical);

enum class Severity : std::uint8_t { kHigh, kMedium, kLow, kNotMentioned };

inline constexpr std::array<Severity, 4> kAllSeverities = {
    Severity::kHigh, Severity::kMedium, Severity::kLow, Severity::kNotMentioned};

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view canonical);

// Low < Medium < High; NotMentioned is unordered against the three levels
// and equivalent only to itself.
std::partial_ordering compare_severity(Severity a, Severity b);

// Detector-label mapping plus per-class default severity. Immutable once
// built, so a single instance can be shared between threads.
class Taxonomy {
 public:
  // The bundled assets/config/taxonomy.json.
  static const Taxonomy& defaults();

  // Applies `config` on top of `base`: severity entries override per class,
  // detector tables replace or add whole detectors.
  static Taxonomy from_json(const Json& config, const Taxonomy& base = defaults());
  static Taxonomy load(const std::filesystem::path& path);

  // Maps a raw detector label into the taxonomy. Returns nullopt when the
  // label is outside the 13-class scope. Throws InvalidArgument for a
  // detector id with no table.
  std::optional<VulnClass> normalize_finding(std::string_view detector_id,
                                             std::string_view raw_label) const;

  bool has_detector(std::string_view detector_id) const;

  // Never NotMentioned.
  Severity default_severity(VulnClass c) const;

  Json to_json() const;

 private:
  Taxonomy() = default;

  std::array<Severity, kNumVulnClasses> severity_{};
  // detector id -> (case-folded raw label -> class)
  std::map<std::string, std::map<std::string, VulnClass>, std::less<>> detectors_;
  // case-folded label -> label as written in the config, for to_json()
  std::map<std::string, std::map<std::string, std::string>, std::less<>> spellings_;
};

}  // namespace vulnbench

#endif  // VULNBENCH_TAXONOMY_H_
