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

#include "vulnbench/finetune.h"

#include <ostream>
#include <unordered_map>

#include "http_endpoint.h"
#include "vulnbench/errors.h"
#include "vulnbench/prompts.h"

namespace vulnbench {
namespace {

Json parse_reply(const httplib::Result& result, const std::string& what) {
  if (!result) {
    throw TransportError(what + ": " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error(what + " rejected (HTTP " + std::to_string(result->status) +
                "): " + internal::error_message(result->body));
  }
  try {
    return Json::parse(result->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(what + ": non-JSON body: " + e.what());
  }
}

std::string number_text(double value) {
  Json j = value;
  return j.dump();
}

}  // namespace

void FineTuneHyperparams::validate() const {
  if (lora_alpha <= 0 || lora_dropout <= 0 || lora_rank <= 0 || learning_rate <= 0 ||
      weight_decay <= 0 || max_grad_norm <= 0 || max_steps <= 0 || warmup_ratio <= 0 || log_steps <= 0) {
    throw InvalidArgument("fine-tune hyperparameters must be positive");
  }
}

Json FineTuneHyperparams::to_json() const {
  Json j;
  j["lora_alpha"] = lora_alpha;
  j["lora_dropout"] = lora_dropout;
  j["lora_rank"] = lora_rank;
  j["bias"] = bias;
  j["optimizer"] = optimizer;
  j["learning_rate"] = learning_rate;
  j["weight_decay"] = weight_decay;
  j["fp16"] = fp16;
  j["max_grad_norm"] = max_grad_norm;
  j["max_steps"] = max_steps;
  j["warmup_ratio"] = warmup_ratio;
  j["scheduler"] = scheduler;
  j["log_steps"] = log_steps;
  return j;
}

FineTuneHyperparams FineTuneHyperparams::from_json(const Json& j) {
  FineTuneHyperparams h;
  try {
    h.lora_alpha = j.value("lora_alpha", h.lora_alpha);
    h.lora_dropout = j.value("lora_dropout", h.lora_dropout);
    h.lora_rank = j.value("lora_rank", h.lora_rank);
    h.bias = j.value("bias", h.bias);
    h.optimizer = j.value("optimizer", h.optimizer);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.weight_decay = j.value("weight_decay", h.weight_decay);
    h.fp16 = j.value("fp16", h.fp16);
    h.max_grad_norm = j.value("max_grad_norm", h.max_grad_norm);
    h.max_steps = j.value("max_steps", h.max_steps);
    h.warmup_ratio = j.value("warmup_ratio", h.warmup_ratio);
    h.scheduler = j.value("scheduler", h.scheduler);
    h.log_steps = j.value("log_steps", h.log_steps);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("hyperparameters: ") + e.what());
  }
  h.validate();
  return h;
}

std::int64_t total_steps(std::int64_t samples, std::int64_t per_device_batch, std::int64_t grad_accumulation,
                         std::int64_t epochs) {
  if (samples < 1 || per_device_batch < 1 || grad_accumulation < 1 || epochs < 1) {
    throw InvalidArgument("total_steps arguments must all be >= 1");
  }
  const std::int64_t per_step = per_device_batch * grad_accumulation;
  return (samples + per_step - 1) / per_step * epochs;
}

Json finetune_record(const ContractSample& sample, const LabelRecord& label, const std::string& system_prompt) {
  Conversation conversation;
  conversation.messages = {{Role::kSystem, system_prompt},
                           {Role::kUser, sample.normalized},
                           {Role::kAssistant, render_gold(label)}};
  Json record;
  record["messages"] = to_json(conversation);
  return record;
}

void export_finetune_jsonl(std::ostream& out, std::span<const ContractSample> samples,
                           std::span<const LabelRecord> labels, const std::string& system_prompt) {
  std::unordered_map<std::string, const LabelRecord*> by_id;
  for (const LabelRecord& label : labels) by_id[label.contract_id] = &label;
  std::vector<Json> records;
  records.reserve(samples.size());
  for (const ContractSample& sample : samples) {
    auto it = by_id.find(sample.id);
    if (it == by_id.end()) throw InvalidArgument("sample '" + sample.id + "' has no label");
    records.push_back(finetune_record(sample, *it->second, system_prompt));
  }
  try {
    write_jsonl(out, records);
  } catch (const nlohmann::json::type_error& e) {
    throw InvalidArgument(std::string("fine-tune export: ") + e.what());
  }
}

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::kQueued:
      return "queued";
    case JobState::kRunning:
      return "running";
    case JobState::kSucceeded:
      return "succeeded";
    case JobState::kFailed:
      return "failed";
  }
  return "failed";
}

FineTuneJob job_from_json(const Json& j) {
  FineTuneJob job;
  job.id = require_string(j, "id");
  job.raw_status = require_string(j, "status");
  static const std::unordered_map<std::string, JobState> kStates = {
      {"validating_files", JobState::kQueued}, {"queued", JobState::kQueued},
      {"pending", JobState::kQueued},          {"running", JobState::kRunning},
      {"succeeded", JobState::kSucceeded},     {"failed", JobState::kFailed},
      {"cancelled", JobState::kFailed},
  };
  auto it = kStates.find(job.raw_status);
  if (it == kStates.end()) throw ProtocolError("unknown fine-tune job status '" + job.raw_status + "'");
  job.state = it->second;
  if (j.contains("fine_tuned_model") && j["fine_tuned_model"].is_string()) {
    job.fine_tuned_model = j["fine_tuned_model"].get<std::string>();
  }
  if (j.contains("error") && j["error"].is_object() && j["error"].contains("message") &&
      j["error"]["message"].is_string()) {
    job.error = j["error"]["message"].get<std::string>();
  }
  return job;
}

Json to_json(const FineTuneJob& job) {
  Json j;
  j["id"] = job.id;
  j["state"] = std::string(to_string(job.state));
  j["status"] = job.raw_status;
  j["fine_tuned_model"] = job.fine_tuned_model ? Json(*job.fine_tuned_model) : Json(nullptr);
  j["error"] = job.error ? Json(*job.error) : Json(nullptr);
  return j;
}

FineTuneClient::FineTuneClient(EndpointConfig config) : config_(std::move(config)) {
  internal::split_base_url(config_.base_url);
}

std::string FineTuneClient::upload_file(const std::filesystem::path& path, const std::string& purpose) {
  httplib::MultipartFormDataItems items = {
      {"purpose", purpose, "", ""},
      {"file", read_file(path), path.filename().string(), "application/jsonl"},
  };
  auto client = internal::make_http_client(config_);
  const Json reply =
      parse_reply(client->Post(internal::split_base_url(config_.base_url).prefix + "/files", items), "file upload");
  return require_string(reply, "id");
}

FineTuneJob FineTuneClient::create(const std::string& training_file, const std::optional<std::string>& validation_file,
                                   const std::string& base_model, const FineTuneHyperparams& hyperparams,
                                   std::optional<int> epochs) {
  if (training_file.empty()) throw InvalidArgument("fine-tune job needs a training file id");
  if (base_model.empty()) throw InvalidArgument("fine-tune job needs a base model");
  hyperparams.validate();
  Json body;
  body["model"] = base_model;
  body["training_file"] = training_file;
  if (validation_file) body["validation_file"] = *validation_file;
  if (epochs) body["hyperparameters"] = Json{{"n_epochs", *epochs}};
  // The hosted API only accepts string metadata values.
  Json metadata = Json::object();
  const Json params = hyperparams.to_json();
  for (const auto& [key, value] : params.items()) {
    metadata[key] = value.is_string() ? value.get<std::string>()
                    : value.is_number() ? number_text(value.get<double>())
                                        : value.dump();
  }
  body["metadata"] = std::move(metadata);
  auto client = internal::make_http_client(config_);
  return job_from_json(parse_reply(
      client->Post(internal::split_base_url(config_.base_url).prefix + "/fine_tuning/jobs", body.dump(),
                   "application/json"),
      "fine-tune job creation"));
}

FineTuneJob FineTuneClient::poll(const std::string& job_id) {
  auto client = internal::make_http_client(config_);
  return job_from_json(
      parse_reply(client->Get(internal::split_base_url(config_.base_url).prefix + "/fine_tuning/jobs/" + job_id),
                  "fine-tune job poll"));
}

FineTuneJob FineTuneClient::cancel(const std::string& job_id) {
  auto client = internal::make_http_client(config_);
  return job_from_json(parse_reply(
      client->Post(internal::split_base_url(config_.base_url).prefix + "/fine_tuning/jobs/" + job_id + "/cancel",
                   "", "application/json"),
      "fine-tune job cancel"));
}

}  // namespace vulnbench
