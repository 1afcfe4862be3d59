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

#ifndef VULNBENCH_SCORING_H_
#define VULNBENCH_SCORING_H_

#include <span>
#include <string>
#include <vector>

#include "vulnbench/label.h"
#include "vulnbench/metrics.h"
#include "vulnbench/prompts.h"

namespace vulnbench {

enum class Task { kPresence, kType, kSeverity };
inline constexpr Task kAllTasks[] = {Task::kPresence, Task::kType, Task::kSeverity};
std::string_view to_string(Task task);

// Reserved prediction label for answers the parser could not read.
inline constexpr std::string_view kUnparseableLabel = "Unparseable";

// Class lists per task:
//   presence  No, Yes
//   type      the 13 classes, None, Unparseable
//   severity  High, Medium, Low, NotMentioned, Unparseable
std::vector<std::string> task_classes(Task task);

std::string gold_label(Task task, const LabelRecord& gold);
// An unparseable presence counts as the opposite of the gold answer. Yes
// without a readable type or severity maps to Unparseable for that task; No
// maps to None / NotMentioned.
std::string predicted_label(Task task, const ModelVerdict& verdict, const LabelRecord& gold);

struct TaskScores {
  ConfusionMatrix confusion;
  ClassificationReport report;
  double mcc = 0;  // binary for presence, multiclass otherwise
};

struct ScoreOptions {
  // Drops items with gold severity NotMentioned from the severity task.
  bool exclude_not_mentioned = false;
};

struct VerdictScores {
  TaskScores presence;
  TaskScores type;
  std::optional<TaskScores> severity;  // absent when every item was excluded
  GenerationScores generation;
  std::size_t items = 0;
  std::size_t unparseable = 0;
};

// Item i of `verdicts` answers `gold[i]`. Generation scores compare each raw
// response with render_gold of its label. Throws InvalidArgument on a length
// mismatch or empty input.
VerdictScores score_verdicts(std::span<const LabelRecord> gold, std::span<const ModelVerdict> verdicts,
                             const ScoreOptions& options = {});

const TaskScores& task_scores(const VerdictScores& scores, Task task);

Json to_json(const TaskScores& scores);
Json to_json(const VerdictScores& scores);

}  // namespace vulnbench

#endif  // VULNBENCH_SCORING_H_
