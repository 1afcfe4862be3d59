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

#include "vulnbench/metrics.h"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"
#include "vulnbench/errors.h"
#include "vulnbench/rng.h"
#include "vulnbench/scoring.h"

namespace vulnbench {
namespace {

constexpr double kTol = 1e-9;

std::vector<std::string> names(int k) {
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

std::string random_sentence(SeededRng& rng, std::size_t max_len) {
  static const char* kWords[] = {"yes", "no", "reentrancy", "high", "low", "type", "Severity", "the", "a"};
  std::string out;
  const std::size_t n = rng.below(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += rng.below(4) == 0 ? "\n" : " ";
    out += kWords[rng.below(std::size(kWords))];
  }
  return out;
}

TEST(Mcc, BinaryExample) {
  EXPECT_NEAR(mcc_binary(BinaryCounts{3, 4, 1, 2}), 10.0 / std::sqrt(600.0), kTol);
  EXPECT_NEAR(mcc_binary(BinaryCounts{3, 4, 1, 2}), 0.408248, 1e-6);
}

TEST(Mcc, DegenerateDenominatorIsZero) {
  EXPECT_EQ(mcc_binary(BinaryCounts{5, 0, 0, 0}), 0.0);
  EXPECT_EQ(mcc_binary(BinaryCounts{0, 0, 3, 0}), 0.0);
}

TEST(Mcc, PerfectAndInverse) {
  EXPECT_DOUBLE_EQ(mcc_binary(BinaryCounts{5, 5, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(mcc_binary(BinaryCounts{0, 0, 5, 5}), -1.0);
}

TEST(Mcc, BinaryMatchesOracle) {
  SeededRng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const BinaryCounts c{static_cast<std::int64_t>(rng.below(60)), static_cast<std::int64_t>(rng.below(60)),
                         static_cast<std::int64_t>(rng.below(60)), static_cast<std::int64_t>(rng.below(60))};
    const double got = mcc_binary(c);
    ASSERT_NEAR(got, oracle::mcc_binary(c.tp, c.tn, c.fp, c.fn), kTol);
    ASSERT_GE(got, -1.0 - kTol);
    ASSERT_LE(got, 1.0 + kTol);
  }
}

TEST(Mcc, MulticlassMatchesOracleAndBinaryForm) {
  SeededRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const int k = 2 + static_cast<int>(rng.below(5));
    ConfusionMatrix cm{names(k), std::vector<std::vector<std::int64_t>>(k, std::vector<std::int64_t>(k))};
    for (auto& row : cm.counts) {
      for (auto& v : row) v = static_cast<std::int64_t>(rng.below(rng.below(2) ? 4 : 40));
    }
    ASSERT_NEAR(mcc_multiclass(cm), oracle::mcc_multiclass(cm.counts), kTol);
    if (k == 2) ASSERT_NEAR(mcc_multiclass(cm), mcc_binary(cm), kTol);
  }
}

TEST(Confusion, BuildsAndValidates) {
  const std::vector<std::string> cls = {"No", "Yes"};
  const std::vector<std::string> gold = {"Yes", "Yes", "No"}, pred = {"Yes", "No", "No"};
  const ConfusionMatrix cm = confusion(gold, pred, cls);
  EXPECT_EQ(cm.counts, (std::vector<std::vector<std::int64_t>>{{1, 0}, {1, 1}}));
  EXPECT_EQ(cm.total(), 3);
  EXPECT_EQ(cm.correct(), 2);
  const BinaryCounts b = cm.binary();
  EXPECT_EQ(b.tp, 1);
  EXPECT_EQ(b.fn, 1);
  EXPECT_EQ(b.tn, 1);
  EXPECT_EQ(b.fp, 0);

  const std::vector<std::string> shorter = {"Yes"}, unknown = {"Maybe", "Yes", "No"};
  EXPECT_THROW(confusion(gold, shorter, cls), InvalidArgument);
  EXPECT_THROW(confusion(gold, unknown, cls), InvalidArgument);
  EXPECT_THROW(confusion({}, {}, cls), InvalidArgument);
  const std::vector<std::string> three = {"a", "b", "c"};
  EXPECT_THROW(confusion(three, three, three).binary(), InvalidArgument);
}

TEST(ClassificationReport, MatchesOracleAndRecallEqualsAccuracy) {
  SeededRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const int k = 2 + static_cast<int>(rng.below(4));
    const auto cls = names(k);
    const std::size_t n = 1 + rng.below(40);
    std::vector<std::string> gold, pred;
    for (std::size_t j = 0; j < n; ++j) {
      gold.push_back(cls[rng.below(k)]);
      pred.push_back(rng.below(2) ? gold.back() : cls[rng.below(k)]);
    }
    const ClassificationReport r = classification_report(gold, pred, cls);
    const oracle::Report o = oracle::classification(gold, pred, cls);
    ASSERT_NEAR(r.accuracy, o.accuracy, kTol);
    ASSERT_NEAR(r.precision, o.precision, kTol);
    ASSERT_NEAR(r.recall, o.recall, kTol);
    ASSERT_NEAR(r.f1, o.f1, kTol);
    ASSERT_NEAR(r.recall, r.accuracy, kTol);
    ASSERT_EQ(r.per_class.size(), cls.size());
    for (const ClassScores& c : r.per_class) {
      ASSERT_NEAR(c.precision, o.per_class.at(c.name)[0], kTol);
      ASSERT_NEAR(c.recall, o.per_class.at(c.name)[1], kTol);
      ASSERT_NEAR(c.f1, o.per_class.at(c.name)[2], kTol);
    }
  }
}

TEST(ClassificationReport, ConstantNoBaseline) {
  std::vector<std::string> gold(1125, "No"), pred(1125, "No");
  for (int i = 0; i < 1125 - 641; ++i) gold[i] = "Yes";
  const std::vector<std::string> cls = {"No", "Yes"};
  const ClassificationReport r = classification_report(gold, pred, cls);
  EXPECT_NEAR(r.accuracy, 641.0 / 1125.0, kTol);
  EXPECT_NEAR(r.accuracy, 0.56978, 1e-5);
  EXPECT_EQ(mcc_binary(confusion(gold, pred, cls)), 0.0);
}

TEST(Bleu, Examples) {
  const std::string cand = "yes reentrancy medium", ref = "yes reentrancy high";
  EXPECT_NEAR(bleu(cand, ref, 1), 2.0 / 3.0, kTol);
  EXPECT_NEAR(bleu(cand, ref, 2), std::sqrt(2.0 / 3.0 * 0.5), kTol);
  EXPECT_NEAR(bleu(cand, ref, 2), 0.577350, 1e-6);
  EXPECT_EQ(bleu(cand, ref, 3), 0.0);
  EXPECT_DOUBLE_EQ(bleu(ref, ref, 3), 1.0);
  EXPECT_EQ(bleu("", ref, 1), 0.0);
  EXPECT_THROW(bleu(cand, "", 1), InvalidArgument);
}

TEST(Bleu, BrevityPenalty) {
  EXPECT_NEAR(bleu("yes", "yes reentrancy high", 1), std::exp(1.0 - 3.0), kTol);
}

TEST(Rouge, Examples) {
  const RougeScores r = rouge("yes high", "yes reentrancy high");
  EXPECT_NEAR(r.rouge1, 0.8, kTol);
  EXPECT_NEAR(r.rouge_l, 0.8, kTol);
  EXPECT_EQ(r.rouge2, 0.0);
  const RougeScores single = rouge("Yes", "yes");
  EXPECT_DOUBLE_EQ(single.rouge2, 1.0);
  const RougeScores empty = rouge("", "yes");
  EXPECT_EQ(empty.rouge1, 0.0);
  EXPECT_THROW(rouge("a", ""), InvalidArgument);
}

TEST(Overlap, MatchOracleOnRandomSentences) {
  SeededRng rng(4);
  int compared = 0;
  for (int i = 0; i < 1500; ++i) {
    const std::string cand = random_sentence(rng, 8);
    std::string ref = random_sentence(rng, 8);
    if (tokenize_for_overlap(ref).empty()) ref = "yes";
    for (int n = 1; n <= 3; ++n) ASSERT_NEAR(bleu(cand, ref, n), oracle::bleu(cand, ref, n), kTol) << cand << " | " << ref;
    const RougeScores r = rouge(cand, ref);
    const auto o = oracle::rouge(cand, ref);
    ASSERT_NEAR(r.rouge1, o[0], kTol);
    ASSERT_NEAR(r.rouge2, o[1], kTol);
    ASSERT_NEAR(r.rouge_l, o[2], kTol);
    for (double v : {r.rouge1, r.rouge2, r.rouge_l}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0 + kTol);
    }
    ++compared;
  }
  EXPECT_EQ(compared, 1500);
}

TEST(GenerationScores, AveragesPairs) {
  const std::vector<std::string> cand = {"yes reentrancy high", "no"}, ref = {"yes reentrancy high", "yes"};
  const GenerationScores g = generation_scores(cand, ref);
  EXPECT_NEAR(g.bleu1, 0.5, kTol);
  EXPECT_NEAR(g.rouge_l, 0.5, kTol);
  EXPECT_THROW(generation_scores(cand, std::span<const std::string>(ref).first(1)), InvalidArgument);
  EXPECT_THROW(generation_scores({}, {}), InvalidArgument);
}

TEST(Improvement, PercentAndFormatting) {
  EXPECT_NEAR(*improvement(0.5, 0.75), 50.0, kTol);
  EXPECT_NEAR(*improvement(-0.5, 0.5), 200.0, kTol);
  EXPECT_FALSE(improvement(0.0, 0.5).has_value());
  EXPECT_EQ(format_improvement(12.345), "12.35");
  EXPECT_EQ(format_improvement(std::nullopt), "n/a");
}

TEST(Improvement, MccRowsOfTheReferenceTable) {
  struct Row {
    double base, tuned, expected;
  };
  const Row rows[] = {
      {-0.048280, 0.607831, 1359.19}, {-0.048280, 0.280900, 682.00}, {0.204124, 0.999999, 389.96},
      {0.314945, 0.717251, 127.74},   {0.600245, 0.999999, 66.60},   {0.082407, 0.599199, 627.14},
      {0.134973, 0.897295, 564.82},   {0.265593, 0.655856, 147.00},  {0.062896, 0.934297, 1385.83},
  };
  for (const Row& r : rows) EXPECT_NEAR(*improvement(r.base, r.tuned), r.expected, 0.5) << r.base;
}

TEST(MetricsJson, RoundTrip) {
  const std::vector<std::string> cls = {"No", "Yes"}, gold = {"Yes", "No", "No"}, pred = {"Yes", "Yes", "No"};
  const ConfusionMatrix cm = confusion(gold, pred, cls);
  EXPECT_EQ(to_json(confusion_from_json(to_json(cm))), to_json(cm));
  const ClassificationReport r = classification_report(cm);
  EXPECT_EQ(to_json(report_from_json(to_json(r))), to_json(r));
  const GenerationScores g{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  EXPECT_EQ(to_json(generation_from_json(to_json(g))), to_json(g));
}

ModelVerdict verdict(Presence p, std::optional<VulnClass> c = std::nullopt, std::optional<Severity> s = std::nullopt) {
  ModelVerdict v;
  v.presence = p;
  v.vuln_class = c;
  v.severity = s;
  v.raw = "x";
  return v;
}

TEST(Scoring, PredictedLabels) {
  const LabelRecord vuln = LabelRecord::vulnerable_as("a", VulnClass::kReentrancy, Severity::kHigh);
  const LabelRecord clean = LabelRecord::clean("b");
  const ModelVerdict junk = verdict(Presence::kUnparseable);
  EXPECT_EQ(predicted_label(Task::kPresence, junk, vuln), "No");
  EXPECT_EQ(predicted_label(Task::kPresence, junk, clean), "Yes");
  EXPECT_EQ(predicted_label(Task::kType, junk, vuln), kUnparseableLabel);
  EXPECT_EQ(predicted_label(Task::kSeverity, junk, vuln), kUnparseableLabel);
  const ModelVerdict no = verdict(Presence::kNo);
  EXPECT_EQ(predicted_label(Task::kType, no, vuln), "None");
  EXPECT_EQ(predicted_label(Task::kSeverity, no, vuln), "NotMentioned");
  const ModelVerdict bare_yes = verdict(Presence::kYes);
  EXPECT_EQ(predicted_label(Task::kType, bare_yes, vuln), kUnparseableLabel);
  EXPECT_EQ(gold_label(Task::kType, clean), "None");
  EXPECT_EQ(gold_label(Task::kSeverity, vuln), "High");
  EXPECT_EQ(task_classes(Task::kType).size(), 15u);
  EXPECT_EQ(task_classes(Task::kSeverity).size(), 5u);
}

TEST(Scoring, PerfectVerdictsScoreOne) {
  std::vector<LabelRecord> gold;
  std::vector<ModelVerdict> verdicts;
  for (int i = 0; i < 26; ++i) {
    const std::string id = "s" + std::to_string(i);
    LabelRecord l = i % 2 ? LabelRecord::clean(id)
                          : LabelRecord::vulnerable_as(id, kAllVulnClasses[i / 2], Severity::kMedium);
    ModelVerdict v = parse_verdict(render_gold(l));
    gold.push_back(l);
    verdicts.push_back(v);
  }
  const VerdictScores s = score_verdicts(gold, verdicts);
  for (Task t : kAllTasks) {
    EXPECT_DOUBLE_EQ(task_scores(s, t).report.accuracy, 1.0) << to_string(t);
    EXPECT_NEAR(task_scores(s, t).mcc, 1.0, kTol) << to_string(t);
  }
  EXPECT_DOUBLE_EQ(s.generation.bleu1, 1.0);
  EXPECT_EQ(s.unparseable, 0u);
  EXPECT_EQ(s.items, 26u);
}

TEST(Scoring, ExcludeNotMentioned) {
  const std::vector<LabelRecord> gold = {LabelRecord::clean("a"), LabelRecord::clean("b")};
  const std::vector<ModelVerdict> v = {verdict(Presence::kNo), verdict(Presence::kUnparseable)};
  const VerdictScores all = score_verdicts(gold, v);
  ASSERT_TRUE(all.severity.has_value());
  EXPECT_EQ(all.unparseable, 1u);
  EXPECT_DOUBLE_EQ(all.presence.report.accuracy, 0.5);
  EXPECT_FALSE(score_verdicts(gold, v, {true}).severity.has_value());
  EXPECT_THROW(score_verdicts(gold, std::span<const ModelVerdict>(v).first(1)), InvalidArgument);
}

}  // namespace
}  // namespace vulnbench
