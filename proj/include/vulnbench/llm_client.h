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

#ifndef VULNBENCH_LLM_CLIENT_H_
#define VULNBENCH_LLM_CLIENT_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vulnbench/jsonl.h"
#include "vulnbench/prompts.h"

namespace vulnbench {

// One chat-completions endpoint (hosted API or any compatible server).
struct EndpointConfig {
  std::string name;  // label in results; defaults to `model`
  std::string family;   // groups base/fine-tuned variants in tables
  std::string variant;  // e.g. "base" or "finetuned"
  std::string base_url = "https://api.openai.com/v1";
  std::string model;
  std::string api_key;
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_output_tokens = 256;
  double request_timeout_s = 120.0;
  int max_retries = 5;
  int max_in_flight = 4;
  std::chrono::milliseconds initial_backoff{500};

  // Throws InvalidArgument: temperature outside [0, 2], max_in_flight < 1, ...
  void validate() const;

  // Reads the JSON form; the key comes from the environment variable named
  // by "api_key_env" (never from the file itself).
  static EndpointConfig from_json(const Json& j);
  // Everything except the key.
  Json to_json() const;
};

// Content-addressed response store. One file per key, written atomically;
// concurrent readers are safe.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string key_for(const std::string& model, double temperature, const Conversation& conversation);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& model, double temperature,
           const std::string& response) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

struct ClientStats {
  std::uint64_t network_calls = 0;  // HTTP requests actually sent
  std::uint64_t retries = 0;
  std::uint64_t cache_hits = 0;
  int peak_in_flight = 0;
};

// Thread-safe chat-completions client with retry, caching and a cap on
// concurrent requests.
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config, std::optional<std::filesystem::path> cache_dir = std::nullopt);

  // Content of choices[0].message.content. HTTP 429/5xx and connection
  // failures are retried with exponential backoff up to max_retries.
  // Throws TransportError once retries are exhausted (or on other 4xx), and
  // ProtocolError when the body is not the expected JSON.
  std::string complete(const Conversation& conversation);

  // Completes all conversations with up to max_in_flight requests at once.
  // Results are in input order. Responses finished before a failure stay in
  // the cache; the first failure is rethrown after all workers stop.
  std::vector<std::string> complete_all(std::span<const Conversation> conversations);

  ClientStats stats() const;
  const EndpointConfig& config() const { return config_; }

 private:
  std::string request(const Conversation& conversation);
  void acquire_slot();
  void release_slot();

  EndpointConfig config_;
  std::optional<ResponseCache> cache_;

  mutable std::mutex mu_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  ClientStats stats_;
};

}  // namespace vulnbench

#endif  // VULNBENCH_LLM_CLIENT_H_
