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

#ifndef VULNBENCH_JSONL_H_
#define VULNBENCH_JSONL_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace vulnbench {

using Json = nlohmann::ordered_json;

// Reads a JSON Lines stream. Blank lines are skipped. Parse failures raise
// ParseError naming `source`, the 1-based line and the byte offset within it.
std::vector<Json> read_jsonl(std::istream& in, const std::string& source);
std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Serializes one record per line with stable key order (insertion order of
// the ordered_json object) and a trailing newline after every record.
void write_jsonl(std::ostream& out, const std::vector<Json>& records);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

std::string read_file(const std::filesystem::path& path);

// Writes `content` to `path` through a sibling temporary file and a rename,
// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Typed field access with errors that name the missing/mistyped key.
const Json& require_field(const Json& object, const char* key);
std::string require_string(const Json& object, const char* key);

}  // namespace vulnbench

#endif  // VULNBENCH_JSONL_H_
