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

#ifndef VULNBENCH_SRC_HTTP_ENDPOINT_H_
#define VULNBENCH_SRC_HTTP_ENDPOINT_H_

#include <memory>
#include <string>

#include "httplib.h"
#include "vulnbench/llm_client.h"

namespace vulnbench::internal {

// "https://host:port/v1" -> origin "https://host:port", prefix "/v1".
struct SplitUrl {
  std::string origin;
  std::string prefix;
};
SplitUrl split_base_url(const std::string& base_url);

// A configured httplib client for `config` (timeouts, bearer token).
std::unique_ptr<httplib::Client> make_http_client(const EndpointConfig& config);

// Best human-readable message from an error response body: the OpenAI-style
// error.message when present, otherwise the raw body.
std::string error_message(const std::string& body);

}  // namespace vulnbench::internal

#endif  // VULNBENCH_SRC_HTTP_ENDPOINT_H_
