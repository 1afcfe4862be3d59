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

#ifndef VULNBENCH_ANNOTATE_H_
#define VULNBENCH_ANNOTATE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vulnbench/label.h"
#include "vulnbench/taxonomy.h"

namespace vulnbench {

// One detector-reported issue, already mapped into the taxonomy.
struct Finding {
  std::string detector_id;
  std::string contract_id;
  VulnClass vuln_class = VulnClass::kAccessControl;
  std::optional<std::string> function_name;
  std::vector<int> lines;  // sorted ascending, unique
  std::string raw_label;

  bool operator==(const Finding&) const = default;
};

Json to_json(const Finding& finding);
Finding finding_from_json(const Json& j);
std::vector<Finding> read_findings(const std::filesystem::path& path);
void write_findings(const std::filesystem::path& path, const std::vector<Finding>& findings);

inline constexpr int kDefaultVoteThreshold = 2;

// Consensus label for one contract. A class is confirmed when at least
// `threshold` distinct detectors report it; repeated findings of one class by
// one detector count once. The confirmed class with the most detectors wins
// (ties go to the earlier class in canonical order) and the other confirmed
// classes are kept in secondary_classes. Severity is the taxonomy default of
// the winning class.
//
// Throws InvalidArgument if threshold < 1 or a finding belongs to another
// contract.
LabelRecord consensus_vote(const std::string& contract_id, std::span<const Finding> findings,
                           const Taxonomy& taxonomy, int threshold = kDefaultVoteThreshold);

// Groups findings by contract and votes each group. With `all_ids`, the
// output follows that order and contracts without findings get a clean label;
// a finding for an id outside `all_ids` is an error. Without it, the output is
// sorted by contract id.
std::vector<LabelRecord> consensus_vote_all(std::span<const Finding> findings, const Taxonomy& taxonomy,
                                            int threshold = kDefaultVoteThreshold,
                                            std::span<const std::string> all_ids = {});

// Labels assigned by one annotator: contract id -> categorical label.
struct AnnotatorLabels {
  std::string annotator;
  std::map<std::string, std::string> labels;
};

// Cohen's kappa between two annotators over the same items.
// Throws InvalidArgument on differing key sets, an empty set, or when chance
// agreement is 1 while the annotators disagree.
double cohen_kappa(const AnnotatorLabels& a, const AnnotatorLabels& b);

// Reads {"contract_id"|"id", "label"} lines, or LabelRecord lines (category
// is the class name, or "None" for clean records).
AnnotatorLabels read_annotator_labels(const std::filesystem::path& path);

// Seeded, class-stratified subset of floor(fraction * n) records, returned in
// input order. Strata are the winning class (or "None" for clean records);
// each stratum gets its proportional share, remainders by largest fraction.
std::vector<LabelRecord> sample_for_review(std::span<const LabelRecord> labels, double fraction,
                                           std::uint64_t seed);

// Reads a raw detector report: JSON Lines with "contract_id", "label" and
// optionally "function" and "lines". Labels outside the taxonomy are dropped
// and counted in `dropped`.
struct DetectorReport {
  std::vector<Finding> findings;
  std::size_t dropped = 0;
};
DetectorReport ingest_detector_report(std::istream& in, const std::string& source,
                                      const std::string& detector_id, const Taxonomy& taxonomy);
DetectorReport ingest_detector_report(const std::filesystem::path& path, const std::string& detector_id,
                                      const Taxonomy& taxonomy);

}  // namespace vulnbench

#endif  // VULNBENCH_ANNOTATE_H_
