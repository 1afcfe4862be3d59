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

#include "vulnbench/llm_client.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "http_endpoint.h"
#include "vulnbench/corpus.h"
#include "vulnbench/errors.h"

namespace vulnbench {
namespace internal {

SplitUrl split_base_url(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) throw InvalidArgument("base_url needs a scheme: '" + base_url + "'");
  const std::size_t path = base_url.find('/', scheme + 3);
  SplitUrl split;
  split.origin = base_url.substr(0, path);
  split.prefix = path == std::string::npos ? "" : base_url.substr(path);
  while (!split.prefix.empty() && split.prefix.back() == '/') split.prefix.pop_back();
  return split;
}

std::unique_ptr<httplib::Client> make_http_client(const EndpointConfig& config) {
  auto client = std::make_unique<httplib::Client>(split_base_url(config.base_url).origin);
  const auto timeout = std::chrono::duration<double>(config.request_timeout_s);
  const auto whole = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - whole);
  client->set_connection_timeout(whole.count(), micros.count());
  client->set_read_timeout(whole.count(), micros.count());
  client->set_write_timeout(whole.count(), micros.count());
  if (!config.api_key.empty()) client->set_bearer_token_auth(config.api_key);
  return client;
}

std::string error_message(const std::string& body) {
  try {
    const Json j = Json::parse(body);
    if (j.contains("error")) {
      const Json& e = j["error"];
      if (e.is_object() && e.contains("message") && e["message"].is_string()) {
        return e["message"].get<std::string>();
      }
      if (e.is_string()) return e.get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return body;
}

}  // namespace internal

void EndpointConfig::validate() const {
  if (model.empty()) throw InvalidArgument("endpoint needs a model name");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw InvalidArgument("temperature must be within [0, 2]");
  }
  if (max_in_flight < 1) throw InvalidArgument("max_in_flight must be >= 1");
  if (max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
  if (max_output_tokens < 1) throw InvalidArgument("max_output_tokens must be >= 1");
  if (!(request_timeout_s > 0.0)) throw InvalidArgument("request_timeout must be > 0");
  internal::split_base_url(base_url);
}

EndpointConfig EndpointConfig::from_json(const Json& j) {
  EndpointConfig c;
  try {
    c.model = require_string(j, "model");
    c.name = j.value("name", c.model);
    c.family = j.value("family", c.name);
    c.variant = j.value("variant", std::string("base"));
    c.base_url = j.value("base_url", c.base_url);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.temperature = j.value("temperature", c.temperature);
    c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
    c.request_timeout_s = j.value("request_timeout", c.request_timeout_s);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", 500));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("endpoint config: ") + e.what());
  }
  if (!c.api_key_env.empty()) {
    if (const char* key = std::getenv(c.api_key_env.c_str())) c.api_key = key;
  }
  c.validate();
  return c;
}

Json EndpointConfig::to_json() const {
  Json j;
  j["name"] = name;
  j["family"] = family;
  j["variant"] = variant;
  j["base_url"] = base_url;
  j["model"] = model;
  j["api_key_env"] = api_key_env;
  j["temperature"] = temperature;
  j["max_output_tokens"] = max_output_tokens;
  j["request_timeout"] = request_timeout_s;
  j["max_retries"] = max_retries;
  j["max_in_flight"] = max_in_flight;
  j["initial_backoff_ms"] = initial_backoff.count();
  return j;
}

std::string ResponseCache::key_for(const std::string& model, double temperature,
                                   const Conversation& conversation) {
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.17g", temperature);
  return content_hash(model + "\n" + temp + "\n" + to_json(conversation).dump());
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const Json entry = Json::parse(read_file(path));
    return entry.at("response").get<std::string>();
  } catch (const std::exception& e) {
    spdlog::warn("ignoring unreadable cache entry {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

void ResponseCache::put(const std::string& key, const std::string& model, double temperature,
                        const std::string& response) const {
  Json entry;
  entry["model"] = model;
  entry["temperature"] = temperature;
  entry["response"] = response;
  write_file_atomic(path_for(key), entry.dump());
}

ChatClient::ChatClient(EndpointConfig config, std::optional<std::filesystem::path> cache_dir)
    : config_(std::move(config)) {
  if (config_.name.empty()) config_.name = config_.model;
  config_.validate();
  if (cache_dir) cache_.emplace(*cache_dir);
}

ClientStats ChatClient::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void ChatClient::acquire_slot() {
  std::unique_lock lock(mu_);
  slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
  ++in_flight_;
  stats_.peak_in_flight = std::max(stats_.peak_in_flight, in_flight_);
}

void ChatClient::release_slot() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  slot_free_.notify_one();
}

std::string ChatClient::complete(const Conversation& conversation) {
  std::string key;
  if (cache_) {
    key = ResponseCache::key_for(config_.model, config_.temperature, conversation);
    if (auto hit = cache_->get(key)) {
      std::lock_guard lock(mu_);
      ++stats_.cache_hits;
      return *hit;
    }
  }
  acquire_slot();
  std::string response;
  try {
    response = request(conversation);
  } catch (...) {
    release_slot();
    throw;
  }
  release_slot();
  if (cache_) cache_->put(key, config_.model, config_.temperature, response);
  return response;
}

std::string ChatClient::request(const Conversation& conversation) {
  Json body;
  body["model"] = config_.model;
  body["messages"] = to_json(conversation);
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_output_tokens;
  const std::string payload = body.dump();
  const std::string path = internal::split_base_url(config_.base_url).prefix + "/chat/completions";

  auto client = internal::make_http_client(config_);
  std::chrono::milliseconds backoff = config_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    {
      std::lock_guard lock(mu_);
      ++stats_.network_calls;
    }
    httplib::Result result = client->Post(path, payload, "application/json");
    std::string failure;
    int status = 0;
    std::chrono::milliseconds wait = backoff;
    if (!result) {
      failure = "request to " + config_.base_url + " failed: " + httplib::to_string(result.error());
    } else {
      status = result->status;
      if (status >= 200 && status < 300) {
        Json reply;
        try {
          reply = Json::parse(result->body);
        } catch (const nlohmann::json::parse_error& e) {
          throw ProtocolError("endpoint returned a non-JSON body: " + std::string(e.what()));
        }
        const auto choices = reply.find("choices");
        if (choices == reply.end() || !choices->is_array() || choices->empty()) {
          throw ProtocolError("endpoint response has no choices");
        }
        const Json& first = (*choices)[0];
        if (!first.contains("message") || !first["message"].contains("content") ||
            !first["message"]["content"].is_string()) {
          throw ProtocolError("choices[0].message.content missing or not a string");
        }
        return first["message"]["content"].get<std::string>();
      }
      failure = "HTTP " + std::to_string(status) + ": " + internal::error_message(result->body);
      const bool retryable = status == 429 || status >= 500;
      if (!retryable) throw TransportError(failure, status);
      if (result->has_header("Retry-After")) {
        const int seconds = std::atoi(result->get_header_value("Retry-After").c_str());
        wait = std::max(wait, std::chrono::milliseconds(std::min(seconds, 60) * 1000));
      }
    }
    if (attempt >= config_.max_retries) {
      throw TransportError(failure + " (gave up after " + std::to_string(attempt) + " retries)", status);
    }
    {
      std::lock_guard lock(mu_);
      ++stats_.retries;
    }
    spdlog::debug("{}: {}; retrying in {} ms", config_.name, failure, wait.count());
    std::this_thread::sleep_for(wait);
    backoff = std::min(backoff * 2, std::chrono::milliseconds(30000));
  }
}

std::vector<std::string> ChatClient::complete_all(std::span<const Conversation> conversations) {
  std::vector<std::string> responses(conversations.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= conversations.size()) return;
      try {
        responses[i] = complete(conversations[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config_.max_in_flight), conversations.size());
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return responses;
}

}  // namespace vulnbench
