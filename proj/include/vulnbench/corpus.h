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

#ifndef VULNBENCH_CORPUS_H_
#define VULNBENCH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vulnbench/label.h"
#include "vulnbench/taxonomy.h"

namespace vulnbench {

struct FunctionSpan {
  std::string name;
  int start_line = 0;  // 1-based, inclusive
  int end_line = 0;

  bool operator==(const FunctionSpan&) const = default;
};

// A function declaration with the extra detail the injector needs.
struct FunctionInfo {
  FunctionSpan span;
  bool has_body = false;
  bool is_view_or_pure = false;
  std::string enclosing_contract;  // empty for file-level functions
};

enum class ContractKind { kContract, kAbstractContract, kInterface, kLibrary };

struct ContractSpan {
  ContractKind kind = ContractKind::kContract;
  std::string name;
  int start_line = 0;  // line of the contract/interface/library keyword
  int end_line = 0;    // line of the closing brace
};

struct ContractSample {
  std::string id;
  std::string source;
  std::string normalized;
  std::optional<std::string> compiler_version;
  std::string hash;
  std::vector<FunctionSpan> functions;
  int contracts = 0;
  int loc = 0;
};

// Removes // and /* */ comments (string literals are left untouched), trims
// trailing whitespace and drops lines that end up blank. A block comment is
// replaced by the newlines it contained, or a single space when it had none,
// so tokens on either side never fuse. Lines are joined with '\n' and the
// result has no trailing newline. Idempotent.
// Throws ParseError naming the opening line of an unterminated block comment.
std::string strip_comments(std::string_view source);

// Lowercase hex SHA-256 of the bytes of `normalized`.
std::string content_hash(std::string_view normalized);

// Keeps the first sample for each hash, preserving input order.
std::vector<ContractSample> dedup(std::vector<ContractSample> samples);

// One span per function/constructor/fallback/receive declaration (with or
// without a body). Function-type variables are not declarations.
// Throws ParseError with the line number on unbalanced braces.
std::vector<FunctionSpan> extract_functions(std::string_view normalized);
std::vector<FunctionInfo> scan_functions(std::string_view normalized);
std::vector<ContractSpan> extract_contracts(std::string_view normalized);

// Text following the first `pragma solidity` up to ';', trimmed.
std::optional<std::string> parse_compiler_version(std::string_view normalized);

int count_lines(std::string_view text);

// Normalizes, hashes and analyzes one source unit.
ContractSample make_sample(std::string id, std::string source);

// Reads every *.sol file under `dir` (recursively, sorted by relative path).
// The id of a sample is its relative path without the .sol extension.
// Returns the deduplicated samples and, in `paths`, the file of each.
struct IngestResult {
  std::vector<ContractSample> samples;
  std::vector<std::filesystem::path> paths;
  std::size_t files_read = 0;
};
IngestResult ingest_directory(const std::filesystem::path& dir);

// One line of the corpus manifest.
struct ManifestEntry {
  std::string id;
  std::string path;
  std::optional<std::string> compiler_version;
  std::string hash;
  int loc = 0;
  int functions = 0;
  int contracts = 0;
};

ManifestEntry summarize(const ContractSample& sample, std::string path);
Json to_json(const ManifestEntry& entry);
ManifestEntry manifest_entry_from_json(const Json& j);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Re-reads the sources listed in a manifest (paths relative to the
// manifest's directory unless absolute) and checks each hash still matches.
std::vector<ContractSample> load_manifest_samples(const std::filesystem::path& manifest_path);

struct CorpusStats {
  std::int64_t samples = 0;
  std::int64_t contracts = 0;
  std::int64_t functions = 0;
  std::int64_t loc = 0;
  std::int64_t true_labels = 0;
  std::int64_t false_labels = 0;
  std::map<VulnClass, std::int64_t> type_counts;
  std::map<Severity, std::int64_t> severity_counts;

  bool operator==(const CorpusStats&) const = default;
};

// Throws InvalidArgument when a label names a sample that is not present.
CorpusStats corpus_stats(std::span<const ManifestEntry> samples, std::span<const LabelRecord> labels);
CorpusStats corpus_stats(std::span<const ContractSample> samples, std::span<const LabelRecord> labels);

Json to_json(const CorpusStats& stats);

}  // namespace vulnbench

#endif  // VULNBENCH_CORPUS_H_
