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

#include "vulnbench/scoring.h"

#include "vulnbench/errors.h"

namespace vulnbench {
namespace {

TaskScores score_task(Task task, const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  const auto classes = task_classes(task);
  TaskScores s;
  s.confusion = confusion(gold, pred, classes);
  s.report = classification_report(s.confusion);
  s.mcc = task == Task::kPresence ? mcc_binary(s.confusion) : mcc_multiclass(s.confusion);
  return s;
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kPresence:
      return "presence";
    case Task::kType:
      return "type";
    case Task::kSeverity:
      return "severity";
  }
  return "presence";
}

std::vector<std::string> task_classes(Task task) {
  std::vector<std::string> classes;
  switch (task) {
    case Task::kPresence:
      return {"No", "Yes"};
    case Task::kType:
      for (VulnClass c : kAllVulnClasses) classes.emplace_back(to_string(c));
      classes.emplace_back("None");
      break;
    case Task::kSeverity:
      for (Severity s : kAllSeverities) classes.emplace_back(to_string(s));
      break;
  }
  classes.emplace_back(kUnparseableLabel);
  return classes;
}

std::string gold_label(Task task, const LabelRecord& gold) {
  switch (task) {
    case Task::kPresence:
      return gold.vulnerable ? "Yes" : "No";
    case Task::kType:
      return gold.vuln_class ? std::string(to_string(*gold.vuln_class)) : "None";
    case Task::kSeverity:
      return std::string(to_string(gold.severity));
  }
  return {};
}

std::string predicted_label(Task task, const ModelVerdict& verdict, const LabelRecord& gold) {
  if (task == Task::kPresence) {
    switch (verdict.presence) {
      case Presence::kYes:
        return "Yes";
      case Presence::kNo:
        return "No";
      case Presence::kUnparseable:
        return gold.vulnerable ? "No" : "Yes";
    }
  }
  if (verdict.presence == Presence::kUnparseable) return std::string(kUnparseableLabel);
  if (verdict.presence == Presence::kNo) return task == Task::kType ? "None" : "NotMentioned";
  if (task == Task::kType) {
    return verdict.vuln_class ? std::string(to_string(*verdict.vuln_class)) : std::string(kUnparseableLabel);
  }
  if (!verdict.severity || *verdict.severity == Severity::kNotMentioned) return std::string(kUnparseableLabel);
  return std::string(to_string(*verdict.severity));
}

VerdictScores score_verdicts(std::span<const LabelRecord> gold, std::span<const ModelVerdict> verdicts,
                             const ScoreOptions& options) {
  if (gold.size() != verdicts.size()) {
    throw InvalidArgument("have " + std::to_string(gold.size()) + " gold labels but " +
                          std::to_string(verdicts.size()) + " verdicts");
  }
  if (gold.empty()) throw InvalidArgument("no items to score");
  VerdictScores out;
  out.items = gold.size();
  for (Task task : kAllTasks) {
    std::vector<std::string> g, p;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (task == Task::kSeverity && options.exclude_not_mentioned &&
          gold[i].severity == Severity::kNotMentioned) {
        continue;
      }
      g.push_back(gold_label(task, gold[i]));
      p.push_back(predicted_label(task, verdicts[i], gold[i]));
    }
    if (g.empty()) continue;
    TaskScores s = score_task(task, g, p);
    if (task == Task::kPresence) out.presence = std::move(s);
    if (task == Task::kType) out.type = std::move(s);
    if (task == Task::kSeverity) out.severity = std::move(s);
  }
  std::vector<std::string> candidates, references;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (verdicts[i].presence == Presence::kUnparseable) ++out.unparseable;
    candidates.push_back(verdicts[i].raw);
    references.push_back(render_gold(gold[i]));
  }
  out.generation = generation_scores(candidates, references);
  return out;
}

const TaskScores& task_scores(const VerdictScores& scores, Task task) {
  switch (task) {
    case Task::kPresence:
      return scores.presence;
    case Task::kType:
      return scores.type;
    case Task::kSeverity:
      if (!scores.severity) throw InvalidArgument("severity task has no items");
      return *scores.severity;
  }
  return scores.presence;
}

Json to_json(const TaskScores& scores) {
  Json j;
  j["mcc"] = scores.mcc;
  j["report"] = to_json(scores.report);
  j["confusion"] = to_json(scores.confusion);
  return j;
}

Json to_json(const VerdictScores& scores) {
  Json j;
  j["items"] = scores.items;
  j["unparseable"] = scores.unparseable;
  j["presence"] = to_json(scores.presence);
  j["type"] = to_json(scores.type);
  j["severity"] = scores.severity ? to_json(*scores.severity) : Json(nullptr);
  j["generation"] = to_json(scores.generation);
  return j;
}

}  // namespace vulnbench
