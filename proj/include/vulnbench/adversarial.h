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

#ifndef VULNBENCH_ADVERSARIAL_H_
#define VULNBENCH_ADVERSARIAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vulnbench/corpus.h"
#include "vulnbench/label.h"
#include "vulnbench/metrics.h"
#include "vulnbench/prompts.h"
#include "vulnbench/taxonomy.h"

namespace vulnbench {

// Classes the injector can plant.
inline constexpr VulnClass kInjectableClasses[] = {
    VulnClass::kReentrancy, VulnClass::kArithmeticOverflowUnderflow, VulnClass::kTxOrigin};
bool is_injectable(VulnClass c);

enum class InjectionSite { kFunctionBodyEnd, kNewFunction };
std::string_view to_string(InjectionSite site);
InjectionSite parse_injection_site(std::string_view text);

// One bundled bug pattern. Lines are stored without indentation relative to
// the insertion point; {{uid}} is replaced per mutant.
struct Snippet {
  std::string id;
  VulnClass target_class = VulnClass::kReentrancy;
  InjectionSite site = InjectionSite::kNewFunction;
  std::string function_name;  // new-function snippets only
  std::vector<std::string> lines;
};

// Parses the "# class:", "# site:", "# function:" header and body of one
// snippet file. Throws ParseError.
Snippet parse_snippet(std::string id, std::string_view text);
// Everything under assets/snippets, sorted by id.
const std::vector<Snippet>& snippet_library();
// Throws InvalidArgument for an unknown id.
const Snippet& find_snippet(std::string_view id);
std::vector<const Snippet*> snippets_for(VulnClass c, InjectionSite site);

struct MutationSpec {
  VulnClass target_class = VulnClass::kReentrancy;
  std::string snippet_id;
  InjectionSite site = InjectionSite::kNewFunction;
  std::uint64_t seed = 0;
};

struct Mutant {
  std::string id;
  std::string base_id;
  std::string snippet_id;
  std::string mutated;
  int start_line = 0;  // injected lines, 1-based inclusive
  int end_line = 0;
  LabelRecord ground_truth;
};

// Inserts the snippet into the sample's normalized text. new-function puts
// the snippet just above the closing brace of a contract; function-body-end
// puts it just above the closing brace of a state-changing function. Only
// braces alone on their line qualify; the seed picks among them.
// Throws InvalidArgument for a class/snippet/site mismatch, an unknown
// snippet, or a sample with no qualifying site.
Mutant inject(const ContractSample& sample, const MutationSpec& spec,
              const Taxonomy& taxonomy = Taxonomy::defaults());

// The mutated text with the injected lines removed.
std::string remove_injection(const Mutant& mutant);

// Seeded choice of n samples whose label is clean, returned in input order.
// Throws InvalidArgument when n is 0 or fewer than n clean samples exist.
std::vector<ContractSample> select_clean_samples(std::span<const ContractSample> samples,
                                                 std::span<const LabelRecord> labels, std::size_t n,
                                                 std::uint64_t seed);

// One mutant per (sample, class) pair in that order, at most total_cap in
// all. Snippets and per-mutant seeds are drawn from `seed`.
std::vector<Mutant> build_mutants(std::span<const ContractSample> clean, std::span<const VulnClass> classes,
                                  InjectionSite site, std::uint64_t seed,
                                  std::optional<std::size_t> total_cap = std::nullopt,
                                  const Taxonomy& taxonomy = Taxonomy::defaults());

struct RobustnessReport {
  ClassificationReport presence;
  ClassificationReport type;
  ClassificationReport severity;
};

// Scores verdicts (keyed by mutant id) against mutant ground truth. Throws
// InvalidArgument unless the ids match one to one.
RobustnessReport robustness_eval(std::span<const Mutant> mutants,
                                 const std::map<std::string, ModelVerdict>& verdicts);

Json to_json(const Mutant& mutant);  // without the mutated text
Json to_json(const RobustnessReport& report);

// <dir>/<id>.sol for each mutant plus labels.jsonl and mutants.jsonl.
void write_mutants(const std::filesystem::path& dir, std::span<const Mutant> mutants);

}  // namespace vulnbench

#endif  // VULNBENCH_ADVERSARIAL_H_
