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

#ifndef VULNBENCH_TESTS_SUPPORT_ORACLES_H_
#define VULNBENCH_TESTS_SUPPORT_ORACLES_H_

// Reference implementations used only by tests. They are written from the
// textbook definitions and share no code with the library.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace vulnbench::oracle {

double mcc_binary(std::int64_t tp, std::int64_t tn, std::int64_t fp, std::int64_t fn);

// Covariance of the one-hot gold and prediction matrices, summed per class.
double mcc_multiclass(const std::vector<std::vector<std::int64_t>>& counts);

struct Report {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::map<std::string, std::array<double, 3>> per_class;  // p, r, f1
};
Report classification(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                      const std::vector<std::string>& classes);

double bleu(const std::string& candidate, const std::string& reference, int max_n);
// rouge1, rouge2, rougeL
std::array<double, 3> rouge(const std::string& candidate, const std::string& reference);

double kappa(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b);

// (detector index, class index) observations for one contract.
using Observation = std::pair<int, int>;
struct Vote {
  bool vulnerable = false;
  int winner = -1;
  std::vector<int> secondary;  // ascending class index
  int winner_votes = 0;
};
Vote consensus(const std::vector<Observation>& findings, int threshold, int num_classes);

}  // namespace vulnbench::oracle

#endif  // VULNBENCH_TESTS_SUPPORT_ORACLES_H_
