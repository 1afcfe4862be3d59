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

#ifndef VULNBENCH_PIPELINE_H_
#define VULNBENCH_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vulnbench/label.h"
#include "vulnbench/llm_client.h"
#include "vulnbench/prompts.h"
#include "vulnbench/scoring.h"

namespace vulnbench {

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path labels;
  std::vector<EndpointConfig> endpoints;
  std::vector<PromptStrategy> strategies;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> cache_dir;  // default <output_dir>/cache
  std::optional<std::filesystem::path> templates_dir;
  std::size_t max_code_chars = 0;  // 0 = unlimited
  bool truncate = false;
  std::optional<std::size_t> max_test_samples;
  bool exclude_not_mentioned = false;

  // Throws InvalidArgument.
  void validate() const;
  std::filesystem::path effective_cache_dir() const;

  // Relative paths are resolved against `base_dir`.
  static RunConfig from_json(const Json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  Json to_json() const;
};

struct Split {
  std::vector<LabelRecord> train;
  std::vector<LabelRecord> test;
};

// Stratified by (vulnerable, class). Each stratum of size n sends
// round(n * test_fraction) records to test, clamped to [1, n - 1]; a stratum
// of one record goes to train with a warning. Both halves keep input order.
// Throws InvalidArgument unless 0 < test_fraction < 1.
Split split_dataset(std::span<const LabelRecord> labels, double test_fraction, std::uint64_t seed);

struct BundleItem {
  std::string sample_id;
  std::string strategy;
  std::string model;
  std::string family;
  std::string variant;
  ModelVerdict verdict;
  LabelRecord gold;
};

struct GroupScores {
  std::string model;
  std::string family;
  std::string variant;
  std::string strategy;
  VerdictScores scores;
};

// Verdicts of one run plus the metrics derived from them, one group per
// (model, strategy) in order of first appearance.
struct EvalBundle {
  std::vector<BundleItem> items;
  std::vector<GroupScores> groups;
};

// Scores `items`. Throws InvalidArgument on a repeated (sample, strategy,
// model) triple or empty input.
EvalBundle make_bundle(std::vector<BundleItem> items, const ScoreOptions& options = {});

Json to_json(const BundleItem& item);
BundleItem bundle_item_from_json(const Json& j);
Json metrics_json(const EvalBundle& bundle);
void write_bundle(const std::filesystem::path& path, const EvalBundle& bundle);
// Reads bundle items and recomputes the metrics.
EvalBundle read_bundle(const std::filesystem::path& path, const ScoreOptions& options = {});

struct RunResult {
  EvalBundle bundle;
  ClientStats stats;  // summed over endpoints
};

// Queries every (endpoint, strategy, test sample) and scores the answers.
// Writes run_config.json, raw_responses.jsonl, verdicts.jsonl,
// bundle.jsonl, metrics.json and tables/ under output_dir. When an endpoint
// fails for good, checkpoint.json records progress and the error is
// rethrown; a rerun picks up the cached answers.
RunResult run_benchmark(const RunConfig& config);

enum class TableFormat { kCsv, kMarkdown };
TableFormat parse_table_format(std::string_view text);

struct RenderResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;
};

// presence/type/severity tables (rounded percentages), an MCC table with
// improvement percentages, and one generation table per strategy in
// `strategies`. Strategies with no items are skipped and noted in NOTES.txt.
RenderResult render_tables(const EvalBundle& bundle, TableFormat format, const std::filesystem::path& dir,
                           std::span<const std::string> strategies = {});

struct HumanEvalSummary {
  std::size_t rows = 0;
  double mean_score = 0;
  double accuracy = 0;  // mean / 3
};

// CSV rows "sample_id,evaluator_id,score" with an optional header line.
// Throws ParseError for a malformed row or a score outside 0..3, and
// InvalidArgument for a file with no rows.
HumanEvalSummary ingest_human_eval(const std::filesystem::path& path);
HumanEvalSummary ingest_human_eval(std::istream& in, const std::string& source);

}  // namespace vulnbench

#endif  // VULNBENCH_PIPELINE_H_
