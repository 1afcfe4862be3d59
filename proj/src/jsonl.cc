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

#include "vulnbench/jsonl.h"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "vulnbench/errors.h"

namespace vulnbench {

std::vector<Json> read_jsonl(std::istream& in, const std::string& source) {
  std::vector<Json> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source + ":" + std::to_string(line_number) + ": offset " +
                       std::to_string(e.byte) + ": " + e.what());
    }
  }
  return records;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_jsonl(in, path.string());
}

void write_jsonl(std::ostream& out, const std::vector<Json>& records) {
  for (const Json& record : records) out << record.dump() << '\n';
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
  std::ostringstream out;
  write_jsonl(out, records);
  write_file_atomic(path, out.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
         << counter.fetch_add(1);
  std::filesystem::path temp = path;
  temp += suffix.str();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

const Json& require_field(const Json& object, const char* key) {
  if (!object.is_object()) throw ParseError("expected a JSON object");
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const Json& object, const char* key) {
  const Json& value = require_field(object, key);
  if (!value.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return value.get<std::string>();
}

}  // namespace vulnbench
