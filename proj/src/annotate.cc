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

#include "vulnbench/annotate.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <unordered_set>

#include "vulnbench/errors.h"
#include "vulnbench/rng.h"

namespace vulnbench {
namespace {

std::vector<int> normalize_lines(std::vector<int> lines) {
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

}  // namespace

Json to_json(const Finding& finding) {
  Json j;
  j["detector_id"] = finding.detector_id;
  j["contract_id"] = finding.contract_id;
  j["class"] = std::string(to_string(finding.vuln_class));
  j["function_name"] = finding.function_name ? Json(*finding.function_name) : Json(nullptr);
  j["lines"] = finding.lines;
  j["raw_label"] = finding.raw_label;
  return j;
}

Finding finding_from_json(const Json& j) {
  Finding finding;
  try {
    finding.detector_id = require_string(j, "detector_id");
    finding.contract_id = require_string(j, "contract_id");
    const std::string name = require_string(j, "class");
    const auto c = parse_vuln_class(name);
    if (!c) throw ParseError("unknown vulnerability class '" + name + "'");
    finding.vuln_class = *c;
    if (j.contains("function_name") && !j["function_name"].is_null()) {
      finding.function_name = j["function_name"].get<std::string>();
    }
    if (j.contains("lines")) finding.lines = normalize_lines(j["lines"].get<std::vector<int>>());
    finding.raw_label = j.value("raw_label", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("finding: ") + e.what());
  }
  return finding;
}

std::vector<Finding> read_findings(const std::filesystem::path& path) {
  std::vector<Finding> findings;
  int record = 0;
  for (const Json& j : read_jsonl(path)) {
    ++record;
    try {
      findings.push_back(finding_from_json(j));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": record " + std::to_string(record) + ": " + e.what());
    }
  }
  return findings;
}

void write_findings(const std::filesystem::path& path, const std::vector<Finding>& findings) {
  std::vector<Json> records;
  records.reserve(findings.size());
  for (const Finding& f : findings) records.push_back(to_json(f));
  write_jsonl(path, records);
}

LabelRecord consensus_vote(const std::string& contract_id, std::span<const Finding> findings,
                           const Taxonomy& taxonomy, int threshold) {
  if (threshold < 1) throw InvalidArgument("vote threshold must be >= 1");
  std::array<std::set<std::string>, kNumVulnClasses> voters;
  for (const Finding& f : findings) {
    if (f.contract_id != contract_id) {
      throw InvalidArgument("finding for '" + f.contract_id + "' passed to the vote for '" +
                            contract_id + "'");
    }
    voters[static_cast<std::size_t>(f.vuln_class)].insert(f.detector_id);
  }

  std::optional<VulnClass> winner;
  std::size_t best = 0;
  std::vector<VulnClass> confirmed;
  for (VulnClass c : kAllVulnClasses) {
    const std::size_t votes = voters[static_cast<std::size_t>(c)].size();
    if (votes < static_cast<std::size_t>(threshold)) continue;
    confirmed.push_back(c);
    if (votes > best) {
      best = votes;
      winner = c;
    }
  }
  if (!winner) return LabelRecord::clean(contract_id);

  LabelRecord label = LabelRecord::vulnerable_as(contract_id, *winner, taxonomy.default_severity(*winner));
  for (VulnClass c : confirmed) {
    if (c != *winner) label.secondary_classes.push_back(c);
  }
  std::map<std::string, int> function_votes;
  for (const Finding& f : findings) {
    if (f.vuln_class != *winner) continue;
    label.vulnerable_lines.insert(label.vulnerable_lines.end(), f.lines.begin(), f.lines.end());
    if (f.function_name) ++function_votes[*f.function_name];
  }
  label.vulnerable_lines = normalize_lines(std::move(label.vulnerable_lines));
  int top = 0;
  for (const auto& [name, count] : function_votes) {  // map order gives the lexicographic tie-break
    if (count > top) {
      top = count;
      label.vulnerable_function = name;
    }
  }
  return label;
}

std::vector<LabelRecord> consensus_vote_all(std::span<const Finding> findings, const Taxonomy& taxonomy,
                                            int threshold, std::span<const std::string> all_ids) {
  std::map<std::string, std::vector<Finding>> by_contract;
  for (const Finding& f : findings) by_contract[f.contract_id].push_back(f);

  std::vector<LabelRecord> labels;
  if (all_ids.empty()) {
    for (const auto& [id, group] : by_contract) {
      labels.push_back(consensus_vote(id, group, taxonomy, threshold));
    }
    return labels;
  }
  std::unordered_set<std::string> known(all_ids.begin(), all_ids.end());
  for (const auto& [id, group] : by_contract) {
    if (!known.contains(id)) throw InvalidArgument("finding for unknown contract '" + id + "'");
  }
  static const std::vector<Finding> kNone;
  for (const std::string& id : all_ids) {
    auto it = by_contract.find(id);
    labels.push_back(consensus_vote(id, it == by_contract.end() ? kNone : it->second, taxonomy, threshold));
  }
  return labels;
}

double cohen_kappa(const AnnotatorLabels& a, const AnnotatorLabels& b) {
  if (a.labels.empty()) throw InvalidArgument("cohen_kappa needs at least one item");
  if (a.labels.size() != b.labels.size()) {
    throw InvalidArgument("annotators '" + a.annotator + "' and '" + b.annotator +
                          "' labeled different item sets");
  }
  std::map<std::string, std::int64_t> count_a;
  std::map<std::string, std::int64_t> count_b;
  std::int64_t agree = 0;
  for (const auto& [id, label_a] : a.labels) {
    auto it = b.labels.find(id);
    if (it == b.labels.end()) {
      throw InvalidArgument("item '" + id + "' labeled by '" + a.annotator + "' but not by '" +
                            b.annotator + "'");
    }
    ++count_a[label_a];
    ++count_b[it->second];
    if (label_a == it->second) ++agree;
  }
  const auto n = static_cast<std::int64_t>(a.labels.size());
  // kappa = (p_o - p_e) / (1 - p_e), scaled by n^2 so everything stays integral
  // until the final division.
  std::int64_t chance = 0;
  for (const auto& [label, na] : count_a) {
    auto it = count_b.find(label);
    if (it != count_b.end()) chance += na * it->second;
  }
  if (chance == n * n) {
    if (agree == n) return 1.0;
    throw InvalidArgument("cohen_kappa undefined: chance agreement is 1 but annotators disagree");
  }
  return static_cast<double>(n * agree - chance) / static_cast<double>(n * n - chance);
}

AnnotatorLabels read_annotator_labels(const std::filesystem::path& path) {
  AnnotatorLabels result;
  result.annotator = path.stem().string();
  int record = 0;
  for (const Json& j : read_jsonl(path)) {
    ++record;
    std::string id;
    std::string category;
    try {
      if (j.contains("vulnerable")) {
        const LabelRecord label = label_from_json(j);
        id = label.contract_id;
        category = label.vuln_class ? std::string(to_string(*label.vuln_class)) : "None";
      } else {
        id = j.contains("contract_id") ? require_string(j, "contract_id") : require_string(j, "id");
        category = require_string(j, "label");
      }
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": record " + std::to_string(record) + ": " + e.what());
    }
    if (!result.labels.emplace(id, category).second) {
      throw ParseError(path.string() + ": item '" + id + "' labeled twice");
    }
  }
  return result;
}

std::vector<LabelRecord> sample_for_review(std::span<const LabelRecord> labels, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("review fraction must be in (0, 1]");
  }
  const std::size_t n = labels.size();
  // The epsilon absorbs products like 0.29 * 100 = 28.999999999999996.
  const auto size = static_cast<std::size_t>(fraction * static_cast<double>(n) + 1e-9);

  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) {
    const LabelRecord& l = labels[i];
    strata[l.vuln_class ? std::string(to_string(*l.vuln_class)) : "None"].push_back(i);
  }

  struct Share {
    std::vector<std::size_t>* members;
    std::size_t take;
    std::size_t remainder;
    std::size_t order;
  };
  std::vector<Share> shares;
  std::size_t allocated = 0;
  for (auto& [key, members] : strata) {
    const std::size_t exact = size * members.size();
    shares.push_back({&members, exact / n, exact % n, shares.size()});
    allocated += exact / n;
  }
  std::vector<Share*> by_remainder;
  for (auto& s : shares) by_remainder.push_back(&s);
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [](const Share* x, const Share* y) { return x->remainder > y->remainder; });
  for (std::size_t k = 0; allocated < size && k < by_remainder.size(); ++k) {
    ++by_remainder[k]->take;
    ++allocated;
  }

  SeededRng rng(seed);
  std::vector<bool> chosen(n, false);
  for (auto& s : shares) {
    std::vector<std::size_t> members = *s.members;
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t k = 0; k < s.take; ++k) chosen[members[k]] = true;
  }
  std::vector<LabelRecord> subset;
  subset.reserve(size);
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i]) subset.push_back(labels[i]);
  }
  return subset;
}

DetectorReport ingest_detector_report(std::istream& in, const std::string& source,
                                      const std::string& detector_id, const Taxonomy& taxonomy) {
  if (!taxonomy.has_detector(detector_id)) {
    throw InvalidArgument("unknown detector '" + detector_id + "'");
  }
  DetectorReport report;
  int record = 0;
  for (const Json& j : read_jsonl(in, source)) {
    ++record;
    Finding finding;
    try {
      finding.detector_id = detector_id;
      finding.contract_id = require_string(j, "contract_id");
      finding.raw_label = require_string(j, "label");
      if (j.contains("function") && !j["function"].is_null()) {
        finding.function_name = j["function"].get<std::string>();
      }
      if (j.contains("lines")) finding.lines = normalize_lines(j["lines"].get<std::vector<int>>());
    } catch (const std::exception& e) {
      throw ParseError(source + ": record " + std::to_string(record) + ": " + e.what());
    }
    const auto c = taxonomy.normalize_finding(detector_id, finding.raw_label);
    if (!c) {
      ++report.dropped;
      continue;
    }
    finding.vuln_class = *c;
    report.findings.push_back(std::move(finding));
  }
  if (report.dropped > 0) {
    spdlog::info("{}: dropped {} finding(s) with labels outside the taxonomy", source, report.dropped);
  }
  return report;
}

DetectorReport ingest_detector_report(const std::filesystem::path& path, const std::string& detector_id,
                                      const Taxonomy& taxonomy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return ingest_detector_report(in, path.string(), detector_id, taxonomy);
}

}  // namespace vulnbench
