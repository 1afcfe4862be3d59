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

#include <gtest/gtest.h>

#include "test_support.h"
#include "vulnbench/errors.h"

namespace vulnbench {
namespace {

TEST(VulnClass, ThirteenCanonicalNamesRoundTrip) {
  EXPECT_EQ(kAllVulnClasses.size(), 13u);
  std::string previous;
  for (VulnClass c : kAllVulnClasses) {
    const std::string name(to_string(c));
    EXPECT_EQ(parse_vuln_class(name), c);
    EXPECT_LT(previous, name);
    previous = name;
  }
  EXPECT_FALSE(parse_vuln_class("reentrancy").has_value());
  EXPECT_FALSE(parse_vuln_class("").has_value());
}

TEST(Severity, NamesRoundTrip) {
  for (Severity s : kAllSeverities) EXPECT_EQ(parse_severity(to_string(s)), s);
  EXPECT_FALSE(parse_severity("Critical").has_value());
}

TEST(Severity, OrderingIsPartial) {
  EXPECT_EQ(compare_severity(Severity::kLow, Severity::kMedium), std::partial_ordering::less);
  EXPECT_EQ(compare_severity(Severity::kHigh, Severity::kMedium), std::partial_ordering::greater);
  EXPECT_EQ(compare_severity(Severity::kLow, Severity::kHigh), std::partial_ordering::less);
  EXPECT_EQ(compare_severity(Severity::kNotMentioned, Severity::kNotMentioned), std::partial_ordering::equivalent);
  for (Severity s : {Severity::kHigh, Severity::kMedium, Severity::kLow}) {
    EXPECT_EQ(compare_severity(s, Severity::kNotMentioned), std::partial_ordering::unordered);
    EXPECT_EQ(compare_severity(Severity::kNotMentioned, s), std::partial_ordering::unordered);
  }
}

TEST(Taxonomy, MapsKnownDetectorLabels) {
  const Taxonomy& t = Taxonomy::defaults();
  EXPECT_EQ(t.normalize_finding("slither", "reentrancy-eth"), VulnClass::kReentrancy);
  EXPECT_EQ(t.normalize_finding("slither", "tx-origin"), VulnClass::kTxOrigin);
  EXPECT_EQ(t.normalize_finding("mythril", "SWC-101"), VulnClass::kArithmeticOverflowUnderflow);
  EXPECT_EQ(t.normalize_finding("securify", "DAO"), VulnClass::kReentrancy);
  EXPECT_EQ(t.normalize_finding("oyente", "Timestamp Dependency"), VulnClass::kTimeManipulation);
}

TEST(Taxonomy, LabelsAreCaseFolded) {
  EXPECT_EQ(Taxonomy::defaults().normalize_finding("slither", "Reentrancy-ETH"), VulnClass::kReentrancy);
}

TEST(Taxonomy, OutOfScopeLabelIsNullopt) {
  EXPECT_FALSE(Taxonomy::defaults().normalize_finding("slither", "naming-convention").has_value());
}

TEST(Taxonomy, UnknownDetectorIsAnError) {
  EXPECT_THROW(Taxonomy::defaults().normalize_finding("unknown-tool", "reentrancy-eth"), InvalidArgument);
  EXPECT_FALSE(Taxonomy::defaults().has_detector("unknown-tool"));
  EXPECT_TRUE(Taxonomy::defaults().has_detector("mythril"));
}

TEST(Taxonomy, DefaultSeverityIsNeverNotMentioned) {
  for (VulnClass c : kAllVulnClasses) {
    EXPECT_NE(Taxonomy::defaults().default_severity(c), Severity::kNotMentioned) << to_string(c);
  }
  EXPECT_EQ(Taxonomy::defaults().default_severity(VulnClass::kReentrancy), Severity::kHigh);
}

TEST(Taxonomy, SeverityOverrideIsHonored) {
  const Taxonomy t = Taxonomy::from_json(Json::parse(R"({"severity": {"TxOrigin": "Medium"}})"));
  EXPECT_EQ(t.default_severity(VulnClass::kTxOrigin), Severity::kMedium);
  EXPECT_EQ(t.default_severity(VulnClass::kReentrancy), Severity::kHigh);
  EXPECT_EQ(t.normalize_finding("slither", "tx-origin"), VulnClass::kTxOrigin);
}

TEST(Taxonomy, DetectorTableCanBeAdded) {
  const Taxonomy t = Taxonomy::from_json(Json::parse(R"({"detectors": {"mytool": {"RE-1": "Reentrancy"}}})"));
  EXPECT_EQ(t.normalize_finding("mytool", "re-1"), VulnClass::kReentrancy);
  EXPECT_TRUE(t.has_detector("slither"));
}

TEST(Taxonomy, RejectsBadConfigs) {
  EXPECT_THROW(Taxonomy::from_json(Json::parse(R"({"severity": {"Nope": "High"}})")), ParseError);
  EXPECT_THROW(Taxonomy::from_json(Json::parse(R"({"severity": {"TxOrigin": "NotMentioned"}})")), ParseError);
  EXPECT_THROW(Taxonomy::from_json(Json::parse(R"({"detectors": {"x": {"a": "Bogus"}}})")), ParseError);
  EXPECT_THROW(Taxonomy::from_json(Json::parse("[1, 2]")), ParseError);
}

TEST(Taxonomy, JsonRoundTrip) {
  const Taxonomy& t = Taxonomy::defaults();
  const Taxonomy back = Taxonomy::from_json(t.to_json());
  EXPECT_EQ(back.to_json(), t.to_json());
}

TEST(Taxonomy, LoadFromFile) {
  testing::TempDir dir;
  write_file_atomic(dir / "t.json", R"({"severity": {"ShortAddresses": "High"}})");
  EXPECT_EQ(Taxonomy::load(dir / "t.json").default_severity(VulnClass::kShortAddresses), Severity::kHigh);
  write_file_atomic(dir / "bad.json", "{not json");
  EXPECT_THROW(Taxonomy::load(dir / "bad.json"), ParseError);
}

}  // namespace
}  // namespace vulnbench
