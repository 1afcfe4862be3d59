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

#ifndef VULNBENCH_METRICS_H_
#define VULNBENCH_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vulnbench/jsonl.h"

namespace vulnbench {

struct BinaryCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

// counts[i][j]: items with gold classes[i] predicted as classes[j].
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> counts;

  std::int64_t total() const;
  std::int64_t correct() const;
  // Two-class view with classes[positive] as the positive class.
  // Throws InvalidArgument unless the matrix is 2x2.
  BinaryCounts binary(std::size_t positive = 1) const;
};

// Throws InvalidArgument on a length mismatch, empty input, or a label that
// is not in `classes`.
ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                          std::span<const std::string> classes);

// Any zero factor in the denominator gives 0.
double mcc_binary(const BinaryCounts& c);
double mcc_binary(const ConfusionMatrix& cm);
// Covariance form over a KxK matrix; zero denominator gives 0.
double mcc_multiclass(const ConfusionMatrix& cm);

struct ClassScores {
  std::string name;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t support = 0;
};

struct ClassificationReport {
  double accuracy = 0;
  double precision = 0;  // support-weighted
  double recall = 0;
  double f1 = 0;
  std::vector<ClassScores> per_class;
  std::int64_t total = 0;
};

// One-vs-rest per class, weighted by gold support. Precision with no
// predictions of the class and recall with no support are 0.
ClassificationReport classification_report(const ConfusionMatrix& cm);
ClassificationReport classification_report(std::span<const std::string> gold,
                                            std::span<const std::string> pred,
                                            std::span<const std::string> classes);

// Lowercased, split on whitespace.
std::vector<std::string> tokenize_for_overlap(std::string_view text);

// Clipped n-gram precisions p_1..p_max_n combined by uniform geometric mean,
// times the brevity penalty. Any p_n of 0 yields 0. An order neither side has
// any n-grams of (both shorter than n tokens) is left out of the mean.
// Empty candidate gives 0; empty reference throws InvalidArgument.
double bleu(std::string_view candidate, std::string_view reference, int max_n);

struct RougeScores {
  double rouge1 = 0;
  double rouge2 = 0;
  double rouge_l = 0;
};

// F1 of clipped unigram/bigram overlap and of the LCS length. When neither
// side has a bigram, ROUGE-2 takes the ROUGE-1 value. Empty candidate gives
// zeros; empty reference throws InvalidArgument.
RougeScores rouge(std::string_view candidate, std::string_view reference);

struct GenerationScores {
  double bleu1 = 0;
  double bleu2 = 0;
  double bleu3 = 0;
  double rouge1 = 0;
  double rouge2 = 0;
  double rouge_l = 0;
};

// Per-sample scores averaged over all pairs. Throws InvalidArgument on a
// length mismatch or empty input.
GenerationScores generation_scores(std::span<const std::string> candidates,
                                   std::span<const std::string> references);

// (finetuned - base) / |base| * 100; nullopt when base is 0.
std::optional<double> improvement(double base, double finetuned);
// Two decimals, or "n/a".
std::string format_improvement(std::optional<double> percent);

Json to_json(const ConfusionMatrix& cm);
Json to_json(const ClassificationReport& report);
Json to_json(const GenerationScores& scores);
ConfusionMatrix confusion_from_json(const Json& j);
ClassificationReport report_from_json(const Json& j);
GenerationScores generation_from_json(const Json& j);

}  // namespace vulnbench

#endif  // VULNBENCH_METRICS_H_
