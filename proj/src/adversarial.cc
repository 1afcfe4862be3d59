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

#include "vulnbench/adversarial.h"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "vulnbench/assets.h"
#include "vulnbench/errors.h"
#include "vulnbench/rng.h"
#include "vulnbench/scoring.h"

namespace vulnbench {
namespace {

constexpr std::string_view kSnippetDir = "snippets/";
constexpr std::string_view kSnippetExt = ".snippet";

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string leading_whitespace(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return std::string(line.substr(0, n));
}

std::string with_uid(std::string text, const std::string& uid) {
  static constexpr std::string_view kSlot = "{{uid}}";
  for (std::size_t pos = text.find(kSlot); pos != std::string::npos; pos = text.find(kSlot, pos + uid.size())) {
    text.replace(pos, kSlot.size(), uid);
  }
  return text;
}

// 1-based line of a brace that sits alone on its line, candidates for `site`.
struct Site {
  int brace_line;
  std::string function_name;  // function-body-end only
};

std::vector<Site> find_sites(const ContractSample& sample, const std::vector<std::string>& lines,
                             InjectionSite site) {
  auto alone = [&](int line) {
    return line >= 1 && line <= static_cast<int>(lines.size()) && trim(lines[line - 1]) == "}";
  };
  std::unordered_map<std::string, ContractKind> kinds;
  const auto contracts = extract_contracts(sample.normalized);
  for (const ContractSpan& c : contracts) kinds.emplace(c.name, c.kind);
  auto stateful = [&](const std::string& name) {
    auto it = kinds.find(name);
    return it != kinds.end() &&
           (it->second == ContractKind::kContract || it->second == ContractKind::kAbstractContract);
  };

  std::vector<Site> sites;
  if (site == InjectionSite::kNewFunction) {
    for (const ContractSpan& c : contracts) {
      if ((c.kind == ContractKind::kContract || c.kind == ContractKind::kAbstractContract) &&
          c.end_line > c.start_line && alone(c.end_line)) {
        sites.push_back({c.end_line, {}});
      }
    }
  } else {
    for (const FunctionInfo& f : scan_functions(sample.normalized)) {
      if (f.has_body && !f.is_view_or_pure && stateful(f.enclosing_contract) &&
          f.span.end_line > f.span.start_line && alone(f.span.end_line)) {
        sites.push_back({f.span.end_line, f.span.name});
      }
    }
  }
  return sites;
}

}  // namespace

bool is_injectable(VulnClass c) {
  return std::find(std::begin(kInjectableClasses), std::end(kInjectableClasses), c) !=
         std::end(kInjectableClasses);
}

std::string_view to_string(InjectionSite site) {
  return site == InjectionSite::kNewFunction ? "new-function" : "function-body-end";
}

InjectionSite parse_injection_site(std::string_view text) {
  if (text == "new-function") return InjectionSite::kNewFunction;
  if (text == "function-body-end") return InjectionSite::kFunctionBodyEnd;
  throw InvalidArgument("unknown injection site '" + std::string(text) + "'");
}

Snippet parse_snippet(std::string id, std::string_view text) {
  Snippet s;
  s.id = std::move(id);
  bool have_class = false, have_site = false;
  for (const std::string& raw : split_lines(text)) {
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (s.lines.empty() && line.starts_with("# ")) {
      const std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) throw ParseError(s.id + ": malformed header '" + raw + "'");
      const std::string_view key = trim(line.substr(2, colon - 2));
      const std::string_view value = trim(line.substr(colon + 1));
      if (key == "class") {
        auto c = parse_vuln_class(value);
        if (!c) throw ParseError(s.id + ": unknown class '" + std::string(value) + "'");
        if (!is_injectable(*c)) throw ParseError(s.id + ": class '" + std::string(value) + "' is not injectable");
        s.target_class = *c;
        have_class = true;
      } else if (key == "site") {
        try {
          s.site = parse_injection_site(value);
        } catch (const InvalidArgument& e) {
          throw ParseError(s.id + ": " + e.what());
        }
        have_site = true;
      } else if (key == "function") {
        s.function_name = std::string(value);
      } else {
        throw ParseError(s.id + ": unknown header '" + std::string(key) + "'");
      }
      continue;
    }
    s.lines.emplace_back(line);
  }
  while (!s.lines.empty() && trim(s.lines.back()).empty()) s.lines.pop_back();
  if (!have_class || !have_site) throw ParseError(s.id + ": missing class or site header");
  if (s.lines.empty()) throw ParseError(s.id + ": empty snippet body");
  if (s.site == InjectionSite::kNewFunction && s.function_name.empty()) {
    throw ParseError(s.id + ": new-function snippet needs a function header");
  }
  return s;
}

const std::vector<Snippet>& snippet_library() {
  static const std::vector<Snippet> library = [] {
    std::vector<Snippet> out;
    for (const std::string& path : bundled_asset_paths(kSnippetDir)) {
      if (!path.ends_with(kSnippetExt)) continue;
      std::string id = path.substr(kSnippetDir.size(), path.size() - kSnippetDir.size() - kSnippetExt.size());
      out.push_back(parse_snippet(std::move(id), bundled_asset(path)));
    }
    std::sort(out.begin(), out.end(), [](const Snippet& a, const Snippet& b) { return a.id < b.id; });
    return out;
  }();
  return library;
}

const Snippet& find_snippet(std::string_view id) {
  for (const Snippet& s : snippet_library()) {
    if (s.id == id) return s;
  }
  throw InvalidArgument("unknown snippet '" + std::string(id) + "'");
}

std::vector<const Snippet*> snippets_for(VulnClass c, InjectionSite site) {
  std::vector<const Snippet*> out;
  for (const Snippet& s : snippet_library()) {
    if (s.target_class == c && s.site == site) out.push_back(&s);
  }
  return out;
}

Mutant inject(const ContractSample& sample, const MutationSpec& spec, const Taxonomy& taxonomy) {
  if (!is_injectable(spec.target_class)) {
    throw InvalidArgument("class " + std::string(to_string(spec.target_class)) + " cannot be injected");
  }
  const Snippet& snippet = find_snippet(spec.snippet_id);
  if (snippet.target_class != spec.target_class) {
    throw InvalidArgument("snippet '" + snippet.id + "' plants " + std::string(to_string(snippet.target_class)) +
                          ", not " + std::string(to_string(spec.target_class)));
  }
  if (snippet.site != spec.site) {
    throw InvalidArgument("snippet '" + snippet.id + "' is a " + std::string(to_string(snippet.site)) +
                          " snippet");
  }

  std::vector<std::string> lines = split_lines(sample.normalized);
  const std::vector<Site> sites = find_sites(sample, lines, spec.site);
  if (sites.empty()) {
    throw InvalidArgument("sample '" + sample.id + "' has no " + std::string(to_string(spec.site)) +
                          " injection site");
  }
  SeededRng rng(spec.seed);
  const Site& chosen = sites[rng.below(sites.size())];

  const std::string uid = "_" + std::to_string(spec.seed);
  const std::string indent = leading_whitespace(lines[chosen.brace_line - 1]) + "    ";
  std::vector<std::string> block;
  for (const std::string& l : snippet.lines) {
    block.push_back(trim(l).empty() ? std::string() : indent + with_uid(l, uid));
  }
  block.erase(std::remove(block.begin(), block.end(), std::string()), block.end());

  Mutant m;
  m.base_id = sample.id;
  m.snippet_id = snippet.id;
  m.id = sample.id + "__" + snippet.id + uid;
  m.start_line = chosen.brace_line;
  m.end_line = chosen.brace_line + static_cast<int>(block.size()) - 1;
  lines.insert(lines.begin() + (chosen.brace_line - 1), block.begin(), block.end());
  m.mutated = join_lines(lines);

  m.ground_truth = LabelRecord::vulnerable_as(m.id, spec.target_class, taxonomy.default_severity(spec.target_class));
  m.ground_truth.vulnerable_function =
      spec.site == InjectionSite::kNewFunction ? with_uid(snippet.function_name, uid) : chosen.function_name;
  for (int l = m.start_line; l <= m.end_line; ++l) m.ground_truth.vulnerable_lines.push_back(l);
  return m;
}

std::string remove_injection(const Mutant& mutant) {
  std::vector<std::string> lines = split_lines(mutant.mutated);
  if (mutant.start_line < 1 || mutant.end_line < mutant.start_line ||
      mutant.end_line > static_cast<int>(lines.size())) {
    throw InvalidArgument("mutant '" + mutant.id + "' has an out-of-range span");
  }
  lines.erase(lines.begin() + (mutant.start_line - 1), lines.begin() + mutant.end_line);
  return join_lines(lines);
}

std::vector<ContractSample> select_clean_samples(std::span<const ContractSample> samples,
                                                 std::span<const LabelRecord> labels, std::size_t n,
                                                 std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("asked for 0 clean samples");
  std::unordered_set<std::string> clean_ids;
  for (const LabelRecord& l : labels) {
    if (!l.vulnerable) clean_ids.insert(l.contract_id);
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (clean_ids.contains(samples[i].id)) pool.push_back(i);
  }
  if (pool.size() < n) {
    throw InvalidArgument("need " + std::to_string(n) + " clean samples, only " + std::to_string(pool.size()) +
                          " available");
  }
  SeededRng rng(seed);
  rng.shuffle(std::span<std::size_t>(pool));
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  std::vector<ContractSample> out;
  out.reserve(n);
  for (std::size_t i : pool) out.push_back(samples[i]);
  return out;
}

std::vector<Mutant> build_mutants(std::span<const ContractSample> clean, std::span<const VulnClass> classes,
                                  InjectionSite site, std::uint64_t seed, std::optional<std::size_t> total_cap,
                                  const Taxonomy& taxonomy) {
  SeededRng rng(seed);
  std::vector<Mutant> out;
  for (const ContractSample& sample : clean) {
    for (VulnClass c : classes) {
      if (total_cap && out.size() >= *total_cap) return out;
      const auto options = snippets_for(c, site);
      if (options.empty()) {
        throw InvalidArgument("no " + std::string(to_string(site)) + " snippet for " + std::string(to_string(c)));
      }
      MutationSpec spec;
      spec.target_class = c;
      spec.site = site;
      spec.snippet_id = options[rng.below(options.size())]->id;
      spec.seed = rng.below(1000000);
      out.push_back(inject(sample, spec, taxonomy));
    }
  }
  return out;
}

RobustnessReport robustness_eval(std::span<const Mutant> mutants,
                                 const std::map<std::string, ModelVerdict>& verdicts) {
  if (verdicts.size() != mutants.size()) {
    throw InvalidArgument("have " + std::to_string(mutants.size()) + " mutants but " +
                          std::to_string(verdicts.size()) + " verdicts");
  }
  std::vector<LabelRecord> gold;
  std::vector<ModelVerdict> pred;
  for (const Mutant& m : mutants) {
    auto it = verdicts.find(m.id);
    if (it == verdicts.end()) throw InvalidArgument("no verdict for mutant '" + m.id + "'");
    gold.push_back(m.ground_truth);
    pred.push_back(it->second);
  }
  const VerdictScores scores = score_verdicts(gold, pred);
  return {scores.presence.report, scores.type.report, scores.severity->report};
}

Json to_json(const Mutant& mutant) {
  Json j;
  j["id"] = mutant.id;
  j["base_id"] = mutant.base_id;
  j["snippet_id"] = mutant.snippet_id;
  j["start_line"] = mutant.start_line;
  j["end_line"] = mutant.end_line;
  j["ground_truth"] = to_json(mutant.ground_truth);
  return j;
}

Json to_json(const RobustnessReport& report) {
  Json j;
  j["presence"] = to_json(report.presence);
  j["type"] = to_json(report.type);
  j["severity"] = to_json(report.severity);
  return j;
}

void write_mutants(const std::filesystem::path& dir, std::span<const Mutant> mutants) {
  std::vector<Json> labels, index;
  for (const Mutant& m : mutants) {
    write_file_atomic(dir / (m.id + ".sol"), m.mutated + "\n");
    labels.push_back(to_json(m.ground_truth));
    index.push_back(to_json(m));
  }
  write_jsonl(dir / "labels.jsonl", labels);
  write_jsonl(dir / "mutants.jsonl", index);
}

}  // namespace vulnbench
