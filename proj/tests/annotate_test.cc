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

#include "vulnbench/annotate.h"

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.h"
#include "test_support.h"
#include "vulnbench/errors.h"
#include "vulnbench/rng.h"

namespace vulnbench {
namespace {

const char* kDetectors[] = {"slither", "mythril", "oyente", "securify"};

Finding finding(const std::string& detector, VulnClass c, const std::string& contract = "c1") {
  Finding f;
  f.detector_id = detector;
  f.contract_id = contract;
  f.vuln_class = c;
  f.raw_label = std::string(to_string(c));
  return f;
}

TEST(ConsensusVote, TieGoesToEarlierClassAndLoserIsSecondary) {
  const std::vector<Finding> fs = {
      finding("slither", VulnClass::kReentrancy),
      finding("mythril", VulnClass::kReentrancy),
      finding("oyente", VulnClass::kTxOrigin),
      finding("securify", VulnClass::kTxOrigin),
  };
  const LabelRecord l = consensus_vote("c1", fs, Taxonomy::defaults());
  EXPECT_TRUE(l.vulnerable);
  EXPECT_EQ(l.vuln_class, VulnClass::kReentrancy);
  EXPECT_EQ(l.severity, Severity::kHigh);
  EXPECT_EQ(l.secondary_classes, std::vector<VulnClass>{VulnClass::kTxOrigin});
}

TEST(ConsensusVote, SingleDetectorIsNotEnough) {
  const std::vector<Finding> fs = {finding("slither", VulnClass::kReentrancy),
                                   finding("slither", VulnClass::kReentrancy)};
  const LabelRecord l = consensus_vote("c1", fs, Taxonomy::defaults());
  EXPECT_FALSE(l.vulnerable);
  EXPECT_EQ(l.severity, Severity::kNotMentioned);
  EXPECT_NO_THROW(l.validate());
}

TEST(ConsensusVote, NoFindingsIsClean) {
  EXPECT_EQ(consensus_vote("c1", {}, Taxonomy::defaults()), LabelRecord::clean("c1"));
}

TEST(ConsensusVote, UsesTaxonomySeverityOverride) {
  const Taxonomy t = Taxonomy::from_json(Json::parse(R"({"severity": {"TxOrigin": "Medium"}})"));
  const std::vector<Finding> fs = {finding("slither", VulnClass::kTxOrigin), finding("mythril", VulnClass::kTxOrigin)};
  EXPECT_EQ(consensus_vote("c1", fs, t).severity, Severity::kMedium);
}

TEST(ConsensusVote, Preconditions) {
  const std::vector<Finding> other = {finding("slither", VulnClass::kReentrancy, "c2")};
  EXPECT_THROW(consensus_vote("c1", other, Taxonomy::defaults()), InvalidArgument);
  EXPECT_THROW(consensus_vote("c1", {}, Taxonomy::defaults(), 0), InvalidArgument);
}

TEST(ConsensusVote, MatchesOracleOnRandomFindings) {
  SeededRng rng(99);
  for (int iter = 0; iter < 2000; ++iter) {
    const int threshold = 1 + static_cast<int>(rng.below(4));
    std::vector<Finding> fs;
    std::vector<oracle::Observation> obs;
    const int n = static_cast<int>(rng.below(10));
    for (int k = 0; k < n; ++k) {
      const int d = static_cast<int>(rng.below(4));
      const int c = static_cast<int>(rng.below(5));
      fs.push_back(finding(kDetectors[d], kAllVulnClasses[c]));
      if (std::find(obs.begin(), obs.end(), oracle::Observation{d, c}) == obs.end()) obs.emplace_back(d, c);
    }
    const oracle::Vote want = oracle::consensus(obs, threshold, static_cast<int>(kNumVulnClasses));
    const LabelRecord got = consensus_vote("c1", fs, Taxonomy::defaults(), threshold);
    ASSERT_EQ(got.vulnerable, want.vulnerable);
    if (!want.vulnerable) continue;
    ASSERT_EQ(got.vuln_class, kAllVulnClasses[want.winner]);
    std::vector<VulnClass> secondary;
    for (int c : want.secondary) secondary.push_back(kAllVulnClasses[c]);
    ASSERT_EQ(got.secondary_classes, secondary);
  }
}

TEST(ConsensusVoteAll, FillsCleanLabelsInRequestedOrder) {
  const std::vector<Finding> fs = {finding("slither", VulnClass::kReentrancy, "b"),
                                   finding("mythril", VulnClass::kReentrancy, "b")};
  const std::vector<std::string> ids = {"c", "b", "a"};
  const auto labels = consensus_vote_all(fs, Taxonomy::defaults(), 2, ids);
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels[0], LabelRecord::clean("c"));
  EXPECT_TRUE(labels[1].vulnerable);
  EXPECT_EQ(labels[2], LabelRecord::clean("a"));

  const std::vector<std::string> missing = {"a"};
  EXPECT_THROW(consensus_vote_all(fs, Taxonomy::defaults(), 2, missing), InvalidArgument);
  const auto sorted = consensus_vote_all(fs, Taxonomy::defaults());
  ASSERT_EQ(sorted.size(), 1u);
  EXPECT_EQ(sorted[0].contract_id, "b");
}

AnnotatorLabels annotator(const std::string& name, const std::vector<std::string>& values) {
  AnnotatorLabels a{name, {}};
  for (std::size_t i = 0; i < values.size(); ++i) a.labels["item" + std::to_string(i)] = values[i];
  return a;
}

TEST(CohenKappa, TenBinaryItems) {
  const auto a = annotator("a", {"yes", "yes", "yes", "yes", "no", "no", "no", "no", "yes", "no"});
  const auto b = annotator("b", {"yes", "yes", "yes", "yes", "no", "no", "no", "no", "no", "yes"});
  EXPECT_NEAR(cohen_kappa(a, b), 0.6, 1e-12);
}

TEST(CohenKappa, PerfectAgreementIsOne) {
  const auto a = annotator("a", {"x", "x", "x"});
  EXPECT_DOUBLE_EQ(cohen_kappa(a, a), 1.0);
}

TEST(CohenKappa, Preconditions) {
  EXPECT_THROW(cohen_kappa(annotator("a", {}), annotator("b", {})), InvalidArgument);
  EXPECT_THROW(cohen_kappa(annotator("a", {"x"}), annotator("b", {"x", "y"})), InvalidArgument);
  AnnotatorLabels c = annotator("c", {"x"});
  AnnotatorLabels d{"d", {{"other", "x"}}};
  EXPECT_THROW(cohen_kappa(c, d), InvalidArgument);
}

TEST(CohenKappa, MatchesOracleOnRandomLabelSets) {
  SeededRng rng(5);
  const char* cats[] = {"None", "Reentrancy", "TxOrigin", "AccessControl"};
  int checked = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    const int n = 1 + static_cast<int>(rng.below(30));
    const int k = 2 + static_cast<int>(rng.below(3));
    std::vector<std::string> va, vb;
    for (int i = 0; i < n; ++i) {
      va.push_back(cats[rng.below(k)]);
      vb.push_back(rng.below(3) == 0 ? cats[rng.below(k)] : va.back());
    }
    const auto a = annotator("a", va), b = annotator("b", vb);
    double want;
    try {
      want = oracle::kappa(a.labels, b.labels);
    } catch (const std::domain_error&) {
      EXPECT_THROW(cohen_kappa(a, b), InvalidArgument);
      continue;
    }
    ASSERT_NEAR(cohen_kappa(a, b), want, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 900);
}

TEST(ReadAnnotatorLabels, AcceptsBothRecordShapes) {
  testing::TempDir dir;
  write_file_atomic(dir / "plain.jsonl", "{\"contract_id\": \"a\", \"label\": \"Reentrancy\"}\n{\"id\": \"b\", \"label\": \"None\"}\n");
  const auto plain = read_annotator_labels(dir / "plain.jsonl");
  EXPECT_EQ(plain.labels.at("a"), "Reentrancy");
  EXPECT_EQ(plain.labels.at("b"), "None");

  write_labels(dir / "labels.jsonl", {LabelRecord::clean("a"),
                                      LabelRecord::vulnerable_as("b", VulnClass::kTxOrigin, Severity::kHigh)});
  const auto records = read_annotator_labels(dir / "labels.jsonl");
  EXPECT_EQ(records.labels.at("a"), "None");
  EXPECT_EQ(records.labels.at("b"), "TxOrigin");

  write_file_atomic(dir / "dup.jsonl", "{\"id\": \"a\", \"label\": \"x\"}\n{\"id\": \"a\", \"label\": \"y\"}\n");
  EXPECT_THROW(read_annotator_labels(dir / "dup.jsonl"), ParseError);
}

std::vector<LabelRecord> mixed_labels(int n) {
  std::vector<LabelRecord> out;
  for (int i = 0; i < n; ++i) {
    const std::string id = "c" + std::to_string(i);
    if (i % 2 == 0) {
      out.push_back(LabelRecord::clean(id));
    } else {
      const VulnClass c = kAllVulnClasses[(i / 2) % kNumVulnClasses];
      out.push_back(LabelRecord::vulnerable_as(id, c, Taxonomy::defaults().default_severity(c)));
    }
  }
  return out;
}

TEST(SampleForReview, TenPercentOf1125Is112) {
  const auto labels = mixed_labels(1125);
  const auto subset = sample_for_review(labels, 0.10, 7);
  EXPECT_EQ(subset.size(), 112u);
  EXPECT_EQ(sample_for_review(labels, 0.10, 7), subset);
  std::size_t pos = 0;
  for (const LabelRecord& l : subset) {
    while (pos < labels.size() && labels[pos].contract_id != l.contract_id) ++pos;
    ASSERT_LT(pos, labels.size()) << "subset out of input order";
  }
}

TEST(SampleForReview, StrataGetProportionalShares) {
  const auto labels = mixed_labels(200);
  const auto subset = sample_for_review(labels, 0.5, 1);
  EXPECT_EQ(subset.size(), 100u);
  const auto clean = std::count_if(subset.begin(), subset.end(), [](const LabelRecord& l) { return !l.vulnerable; });
  EXPECT_EQ(clean, 50);
}

TEST(SampleForReview, FractionBounds) {
  const auto labels = mixed_labels(10);
  EXPECT_THROW(sample_for_review(labels, 0.0, 1), InvalidArgument);
  EXPECT_THROW(sample_for_review(labels, 1.5, 1), InvalidArgument);
  EXPECT_EQ(sample_for_review(labels, 1.0, 1).size(), 10u);
  EXPECT_EQ(sample_for_review(labels, 0.29, 1).size(), 2u);
}

TEST(DetectorReport, SlitherFixtureKeepsTwoDropsOne) {
  const DetectorReport r =
      ingest_detector_report(testing::fixture_path("slither_report.jsonl"), "slither", Taxonomy::defaults());
  EXPECT_EQ(r.dropped, 1u);
  ASSERT_EQ(r.findings.size(), 2u);
  EXPECT_EQ(r.findings[0].vuln_class, VulnClass::kReentrancy);
  EXPECT_EQ(r.findings[0].lines, (std::vector<int>{12, 14}));
  EXPECT_EQ(r.findings[0].function_name, "withdraw");
  EXPECT_EQ(r.findings[1].vuln_class, VulnClass::kTxOrigin);
  EXPECT_EQ(r.findings[1].contract_id, "bank");
}

TEST(DetectorReport, EmptyAndMalformedInput) {
  std::istringstream empty("");
  const DetectorReport r = ingest_detector_report(empty, "empty", "slither", Taxonomy::defaults());
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.dropped, 0u);

  std::istringstream missing_label("{\"contract_id\": \"x\"}\n");
  EXPECT_THROW(ingest_detector_report(missing_label, "bad", "slither", Taxonomy::defaults()), ParseError);
  std::istringstream not_json("{oops\n");
  EXPECT_THROW(ingest_detector_report(not_json, "bad", "slither", Taxonomy::defaults()), ParseError);
  std::istringstream fine("");
  EXPECT_THROW(ingest_detector_report(fine, "x", "nope", Taxonomy::defaults()), InvalidArgument);
}

TEST(Findings, JsonRoundTrip) {
  testing::TempDir dir;
  Finding f = finding("slither", VulnClass::kReentrancy);
  f.function_name = "withdraw";
  f.lines = {3, 4};
  write_findings(dir / "f.jsonl", {f});
  EXPECT_EQ(read_findings(dir / "f.jsonl"), std::vector<Finding>{f});
}

}  // namespace
}  // namespace vulnbench
