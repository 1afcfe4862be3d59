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

#include "vulnbench/corpus.h"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_set>

#include "solidity_lexer.h"
#include "vulnbench/errors.h"

namespace vulnbench {
namespace {

using internal::Token;
using internal::TokenKind;

bool is_trailing_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

struct ScanResult {
  std::vector<FunctionInfo> functions;
  std::vector<ContractSpan> contracts;
};

// Finds the token that ends a declaration header starting after `from`:
// the '{' of its body or the ';' of a bodyless declaration, at parenthesis
// depth zero. Returns npos when the tokens form a function *type* instead
// (only possible for unnamed `function`), or when the input ends first.
struct HeaderEnd {
  std::size_t index = std::string_view::npos;
  bool is_type = false;
  bool view_or_pure = false;
};

HeaderEnd find_header_end(const std::vector<Token>& toks, std::size_t from, bool named) {
  HeaderEnd end;
  int parens = 0;
  for (std::size_t j = from; j < toks.size(); ++j) {
    const Token& t = toks[j];
    if (t.is_punct('(')) {
      ++parens;
    } else if (t.is_punct(')')) {
      if (--parens < 0) {
        end.is_type = true;
        return end;
      }
    } else if (parens == 0) {
      if (t.is_punct('{') || t.is_punct(';')) {
        if (!named && t.is_punct(';')) end.is_type = true;
        end.index = j;
        return end;
      }
      if (t.is_punct('}') || (!named && (t.is_punct(',') || t.is_punct('=')))) {
        end.is_type = true;
        return end;
      }
      if (t.kind == TokenKind::kIdentifier && (t.is("view") || t.is("pure"))) {
        end.view_or_pure = true;
      }
    }
  }
  return end;
}

// Index of the '}' matching the '{' at `open`.
std::size_t match_brace(const std::vector<Token>& toks, std::size_t open) {
  int depth = 0;
  for (std::size_t k = open; k < toks.size(); ++k) {
    if (toks[k].is_punct('{')) {
      ++depth;
    } else if (toks[k].is_punct('}')) {
      if (--depth == 0) return k;
    }
  }
  throw ParseError("unbalanced braces: '{' opened at line " +
                   std::to_string(toks[open].line) + " is never closed");
}

bool at_member_start(const std::vector<Token>& toks, std::size_t i) {
  if (i == 0) return true;
  const Token& prev = toks[i - 1];
  return prev.is_punct('{') || prev.is_punct('}') || prev.is_punct(';');
}

ScanResult scan(std::string_view text) {
  const std::vector<Token> toks = internal::tokenize(text);
  ScanResult result;
  std::vector<int> open_braces;  // line of each unclosed '{'
  struct OpenContract {
    std::size_t index;
    std::size_t depth;
  };
  std::vector<OpenContract> open_contracts;

  std::size_t i = 0;
  while (i < toks.size()) {
    const Token& t = toks[i];
    if (t.is_punct('{')) {
      open_braces.push_back(t.line);
      ++i;
      continue;
    }
    if (t.is_punct('}')) {
      if (open_braces.empty()) {
        throw ParseError("unbalanced braces: unexpected '}' at line " + std::to_string(t.line));
      }
      open_braces.pop_back();
      if (!open_contracts.empty() && open_contracts.back().depth == open_braces.size()) {
        result.contracts[open_contracts.back().index].end_line = t.line;
        open_contracts.pop_back();
      }
      ++i;
      continue;
    }
    if (t.kind != TokenKind::kIdentifier) {
      ++i;
      continue;
    }
    const bool after_dot = i > 0 && toks[i - 1].is_punct('.');
    const bool next_is_ident = i + 1 < toks.size() && toks[i + 1].kind == TokenKind::kIdentifier;

    if ((t.is("contract") || t.is("interface") || t.is("library")) && next_is_ident && !after_dot) {
      ContractSpan span;
      span.name = std::string(toks[i + 1].text);
      span.start_line = t.line;
      if (t.is("interface")) {
        span.kind = ContractKind::kInterface;
      } else if (t.is("library")) {
        span.kind = ContractKind::kLibrary;
      } else if (i > 0 && toks[i - 1].is("abstract")) {
        span.kind = ContractKind::kAbstractContract;
        span.start_line = toks[i - 1].line;
      }
      std::size_t j = i + 2;
      while (j < toks.size() && !toks[j].is_punct('{') && !toks[j].is_punct(';')) ++j;
      if (j < toks.size() && toks[j].is_punct('{')) {
        open_contracts.push_back({result.contracts.size(), open_braces.size()});
        result.contracts.push_back(std::move(span));
      }
      i = j;
      continue;
    }

    bool declaration = false;
    bool named = true;
    std::string name;
    std::size_t header_from = i + 1;
    if (t.is("function") && !after_dot) {
      declaration = true;
      if (next_is_ident) {
        name = std::string(toks[i + 1].text);
        header_from = i + 2;
      } else {
        named = false;
        name = "fallback";  // pre-0.6 unnamed fallback
      }
    } else if ((t.is("constructor") || t.is("fallback") || t.is("receive")) &&
               i + 1 < toks.size() && toks[i + 1].is_punct('(') && at_member_start(toks, i)) {
      declaration = true;
      name = std::string(t.text);
    }
    if (!declaration) {
      ++i;
      continue;
    }

    const HeaderEnd end = find_header_end(toks, header_from, named);
    if (end.is_type) {
      ++i;
      continue;
    }
    if (end.index == std::string_view::npos) {
      throw ParseError("declaration of '" + name + "' at line " + std::to_string(t.line) +
                       " is not terminated");
    }
    FunctionInfo info;
    info.span.name = std::move(name);
    info.span.start_line = t.line;
    info.is_view_or_pure = end.view_or_pure;
    if (!open_contracts.empty()) {
      info.enclosing_contract = result.contracts[open_contracts.back().index].name;
    }
    std::size_t last = end.index;
    if (toks[end.index].is_punct('{')) {
      info.has_body = true;
      last = match_brace(toks, end.index);
    }
    info.span.end_line = toks[last].line;
    result.functions.push_back(std::move(info));
    i = last + 1;
  }
  if (!open_braces.empty()) {
    throw ParseError("unbalanced braces: '{' opened at line " +
                     std::to_string(open_braces.back()) + " is never closed");
  }
  return result;
}

}  // namespace

std::string strip_comments(std::string_view source) {
  std::string code;
  code.reserve(source.size());
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = source.size();
  while (i < n) {
    const char c = source[i];
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < n && source[i + 1] == '*') {
      const int open_line = line;
      int newlines = 0;
      i += 2;
      while (i < n && !(source[i] == '*' && i + 1 < n && source[i + 1] == '/')) {
        if (source[i] == '\n') ++newlines;
        ++i;
      }
      if (i >= n) {
        throw ParseError("unterminated block comment opened at line " + std::to_string(open_line));
      }
      i += 2;
      line += newlines;
      if (newlines == 0) {
        code.push_back(' ');
      } else {
        code.append(static_cast<std::size_t>(newlines), '\n');
      }
    } else if (c == '"' || c == '\'') {
      code.push_back(c);
      ++i;
      while (i < n && source[i] != c && source[i] != '\n') {
        if (source[i] == '\\' && i + 1 < n && source[i + 1] != '\n') code.push_back(source[i++]);
        code.push_back(source[i++]);
      }
      if (i < n && source[i] == c) code.push_back(source[i++]);
    } else {
      if (c == '\n') ++line;
      code.push_back(c);
      ++i;
    }
  }

  std::string out;
  out.reserve(code.size());
  std::size_t start = 0;
  while (start <= code.size()) {
    std::size_t stop = code.find('\n', start);
    if (stop == std::string::npos) stop = code.size();
    std::size_t last = stop;
    while (last > start && is_trailing_space(code[last - 1])) --last;
    bool blank = true;
    for (std::size_t k = start; k < last; ++k) {
      if (!std::isspace(static_cast<unsigned char>(code[k]))) {
        blank = false;
        break;
      }
    }
    if (!blank) {
      if (!out.empty()) out.push_back('\n');
      out.append(code, start, last - start);
    }
    start = stop + 1;
  }
  return out;
}

std::string content_hash(std::string_view normalized) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(normalized.data(), normalized.size(), digest.data(), &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int k = 0; k < length; ++k) {
    hex.push_back(kHex[digest[k] >> 4]);
    hex.push_back(kHex[digest[k] & 0xf]);
  }
  return hex;
}

std::vector<ContractSample> dedup(std::vector<ContractSample> samples) {
  std::unordered_set<std::string> seen;
  std::vector<ContractSample> kept;
  kept.reserve(samples.size());
  for (auto& sample : samples) {
    if (seen.insert(sample.hash).second) kept.push_back(std::move(sample));
  }
  return kept;
}

std::vector<FunctionInfo> scan_functions(std::string_view normalized) {
  return scan(normalized).functions;
}

std::vector<FunctionSpan> extract_functions(std::string_view normalized) {
  std::vector<FunctionSpan> spans;
  for (auto& info : scan(normalized).functions) spans.push_back(std::move(info.span));
  return spans;
}

std::vector<ContractSpan> extract_contracts(std::string_view normalized) {
  return scan(normalized).contracts;
}

std::optional<std::string> parse_compiler_version(std::string_view normalized) {
  const std::vector<Token> toks = internal::tokenize(normalized);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (!toks[i].is("pragma") || !toks[i + 1].is("solidity")) continue;
    const char* begin = toks[i + 1].text.data() + toks[i + 1].text.size();
    const char* end = begin;
    for (std::size_t j = i + 2; j < toks.size(); ++j) {
      if (toks[j].is_punct(';')) {
        end = toks[j].text.data();
        break;
      }
    }
    std::string_view version(begin, static_cast<std::size_t>(end - begin));
    while (!version.empty() && std::isspace(static_cast<unsigned char>(version.front()))) {
      version.remove_prefix(1);
    }
    while (!version.empty() && std::isspace(static_cast<unsigned char>(version.back()))) {
      version.remove_suffix(1);
    }
    if (version.empty()) return std::nullopt;
    return std::string(version);
  }
  return std::nullopt;
}

int count_lines(std::string_view text) {
  if (text.empty()) return 0;
  int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  if (text.back() != '\n') ++lines;
  return lines;
}

ContractSample make_sample(std::string id, std::string source) {
  ContractSample sample;
  sample.id = std::move(id);
  sample.source = std::move(source);
  sample.normalized = strip_comments(sample.source);
  sample.hash = content_hash(sample.normalized);
  sample.compiler_version = parse_compiler_version(sample.normalized);
  ScanResult scanned = scan(sample.normalized);
  for (auto& info : scanned.functions) sample.functions.push_back(std::move(info.span));
  sample.contracts = static_cast<int>(scanned.contracts.size());
  sample.loc = count_lines(sample.normalized);
  return sample;
}

IngestResult ingest_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InvalidArgument("not a directory: " + dir.string());
  std::vector<fs::path> relative;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sol") {
      relative.push_back(fs::relative(entry.path(), dir));
    }
  }
  std::sort(relative.begin(), relative.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

  IngestResult result;
  std::unordered_set<std::string> seen;
  for (const auto& rel : relative) {
    fs::path id_path = rel;
    id_path.replace_extension();
    ContractSample sample;
    try {
      sample = make_sample(id_path.generic_string(), read_file(dir / rel));
    } catch (const ParseError& e) {
      throw ParseError(rel.generic_string() + ": " + e.what());
    }
    ++result.files_read;
    if (!seen.insert(sample.hash).second) continue;
    result.samples.push_back(std::move(sample));
    result.paths.push_back(dir / rel);
  }
  return result;
}

ManifestEntry summarize(const ContractSample& sample, std::string path) {
  ManifestEntry entry;
  entry.id = sample.id;
  entry.path = std::move(path);
  entry.compiler_version = sample.compiler_version;
  entry.hash = sample.hash;
  entry.loc = sample.loc;
  entry.functions = static_cast<int>(sample.functions.size());
  entry.contracts = sample.contracts;
  return entry;
}

Json to_json(const ManifestEntry& entry) {
  Json j;
  j["id"] = entry.id;
  j["path"] = entry.path;
  j["compiler_version"] = entry.compiler_version ? Json(*entry.compiler_version) : Json(nullptr);
  j["hash"] = entry.hash;
  j["loc"] = entry.loc;
  j["functions"] = entry.functions;
  j["contracts"] = entry.contracts;
  return j;
}

ManifestEntry manifest_entry_from_json(const Json& j) {
  ManifestEntry entry;
  try {
    entry.id = require_string(j, "id");
    entry.path = require_string(j, "path");
    if (j.contains("compiler_version") && !j["compiler_version"].is_null()) {
      entry.compiler_version = j["compiler_version"].get<std::string>();
    }
    entry.hash = require_string(j, "hash");
    entry.loc = require_field(j, "loc").get<int>();
    entry.functions = require_field(j, "functions").get<int>();
    entry.contracts = j.value("contracts", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest entry: ") + e.what());
  }
  return entry;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::vector<ManifestEntry> entries;
  for (const Json& j : read_jsonl(path)) entries.push_back(manifest_entry_from_json(j));
  return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::vector<Json> records;
  records.reserve(entries.size());
  for (const auto& entry : entries) records.push_back(to_json(entry));
  write_jsonl(path, records);
}

std::vector<ContractSample> load_manifest_samples(const std::filesystem::path& manifest_path) {
  const std::filesystem::path base = manifest_path.parent_path();
  std::vector<ContractSample> samples;
  for (const ManifestEntry& entry : read_manifest(manifest_path)) {
    std::filesystem::path source_path(entry.path);
    if (source_path.is_relative()) source_path = base / source_path;
    ContractSample sample = make_sample(entry.id, read_file(source_path));
    if (sample.hash != entry.hash) {
      throw ParseError("source of '" + entry.id + "' (" + source_path.string() +
                       ") changed since the manifest was written");
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

CorpusStats corpus_stats(std::span<const ManifestEntry> samples, std::span<const LabelRecord> labels) {
  CorpusStats stats;
  for (VulnClass c : kAllVulnClasses) stats.type_counts[c] = 0;
  for (Severity s : kAllSeverities) stats.severity_counts[s] = 0;

  std::unordered_set<std::string_view> ids;
  for (const ManifestEntry& entry : samples) {
    ids.insert(entry.id);
    ++stats.samples;
    stats.contracts += entry.contracts;
    stats.functions += entry.functions;
    stats.loc += entry.loc;
  }
  std::unordered_set<std::string_view> labeled;
  for (const LabelRecord& label : labels) {
    if (!ids.contains(label.contract_id)) {
      throw InvalidArgument("label references unknown sample id '" + label.contract_id + "'");
    }
    if (!labeled.insert(label.contract_id).second) {
      throw InvalidArgument("sample '" + label.contract_id + "' has more than one label");
    }
    if (label.vulnerable) {
      ++stats.true_labels;
      if (label.vuln_class) ++stats.type_counts[*label.vuln_class];
    } else {
      ++stats.false_labels;
    }
    ++stats.severity_counts[label.severity];
  }
  return stats;
}

CorpusStats corpus_stats(std::span<const ContractSample> samples, std::span<const LabelRecord> labels) {
  std::vector<ManifestEntry> entries;
  entries.reserve(samples.size());
  for (const ContractSample& sample : samples) entries.push_back(summarize(sample, ""));
  return corpus_stats(std::span<const ManifestEntry>(entries), labels);
}

Json to_json(const CorpusStats& stats) {
  Json j;
  j["samples"] = stats.samples;
  j["contracts"] = stats.contracts;
  j["functions"] = stats.functions;
  j["loc"] = stats.loc;
  j["true_labels"] = stats.true_labels;
  j["false_labels"] = stats.false_labels;
  Json types = Json::object();
  for (const auto& [c, count] : stats.type_counts) types[std::string(to_string(c))] = count;
  j["type_counts"] = std::move(types);
  Json severities = Json::object();
  for (const auto& [s, count] : stats.severity_counts) severities[std::string(to_string(s))] = count;
  j["severity_counts"] = std::move(severities);
  return j;
}

}  // namespace vulnbench
