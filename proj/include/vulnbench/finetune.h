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

#ifndef VULNBENCH_FINETUNE_H_
#define VULNBENCH_FINETUNE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "vulnbench/corpus.h"
#include "vulnbench/label.h"
#include "vulnbench/llm_client.h"

namespace vulnbench {

// LoRA/trainer configuration of the open-model fine-tunes. Recorded in job
// metadata and run snapshots; training itself happens elsewhere.
struct FineTuneHyperparams {
  int lora_alpha = 16;
  double lora_dropout = 0.2;
  int lora_rank = 4;
  int bias = 0;
  std::string optimizer = "PagedAdamW-8bit";
  double learning_rate = 1e-3;
  double weight_decay = 0.001;
  bool fp16 = true;
  double max_grad_norm = 0.3;
  int max_steps = 500;
  double warmup_ratio = 0.03;
  std::string scheduler = "cosine";
  int log_steps = 25;

  // Throws InvalidArgument unless every numeric field except bias is > 0.
  void validate() const;
  Json to_json() const;
  static FineTuneHyperparams from_json(const Json& j);
};

// ceil(samples / (per_device_batch * grad_accumulation)) * epochs.
// Throws InvalidArgument if any argument is < 1.
std::int64_t total_steps(std::int64_t samples, std::int64_t per_device_batch,
                         std::int64_t grad_accumulation, std::int64_t epochs);

// {"messages":[{"role":"system",...},{"role":"user",...},{"role":"assistant",...}]}
// where the user turn is the contract's normalized source and the assistant
// turn is render_gold of its label.
Json finetune_record(const ContractSample& sample, const LabelRecord& label, const std::string& system_prompt);

// One record per sample, in sample order. Throws InvalidArgument for a
// sample without a label.
void export_finetune_jsonl(std::ostream& out, std::span<const ContractSample> samples,
                           std::span<const LabelRecord> labels, const std::string& system_prompt);

enum class JobState { kQueued, kRunning, kSucceeded, kFailed };
std::string_view to_string(JobState state);

struct FineTuneJob {
  std::string id;
  JobState state = JobState::kQueued;
  std::string raw_status;  // the endpoint's own status word
  std::optional<std::string> fine_tuned_model;
  std::optional<std::string> error;
};

// Hosted fine-tuning API: file upload plus job create/poll/cancel.
// Non-2xx answers raise Error carrying the endpoint's message.
class FineTuneClient {
 public:
  explicit FineTuneClient(EndpointConfig config);

  // Returns the endpoint's file id.
  std::string upload_file(const std::filesystem::path& path, const std::string& purpose = "fine-tune");

  FineTuneJob create(const std::string& training_file, const std::optional<std::string>& validation_file,
                     const std::string& base_model, const FineTuneHyperparams& hyperparams,
                     std::optional<int> epochs = std::nullopt);
  FineTuneJob poll(const std::string& job_id);
  FineTuneJob cancel(const std::string& job_id);

 private:
  EndpointConfig config_;
};

FineTuneJob job_from_json(const Json& j);
Json to_json(const FineTuneJob& job);

}  // namespace vulnbench

#endif  // VULNBENCH_FINETUNE_H_
