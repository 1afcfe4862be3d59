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

#include "oracles.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vulnbench::oracle {
namespace {

std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) {
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(w);
  }
  return out;
}

std::vector<std::string> grams(const std::vector<std::string>& toks, int n) {
  std::vector<std::string> out;
  for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
    std::string g;
    for (int k = 0; k < n; ++k) g += toks[i + k] + '\x1f';
    out.push_back(g);
  }
  return out;
}

long occurrences(const std::vector<std::string>& v, const std::string& g) {
  return std::count(v.begin(), v.end(), g);
}

long clipped(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  std::set<std::string> distinct(cand.begin(), cand.end());
  long total = 0;
  for (const std::string& g : distinct) total += std::min(occurrences(cand, g), occurrences(ref, g));
  return total;
}

long double harmonic(long double p, long double r) { return p + r == 0 ? 0 : 2 * p * r / (p + r); }

}  // namespace

double mcc_binary(std::int64_t tp, std::int64_t tn, std::int64_t fp, std::int64_t fn) {
  const long double num = static_cast<long double>(tp) * tn - static_cast<long double>(fp) * fn;
  const long double den = static_cast<long double>(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0) return 0.0;
  return static_cast<double>(num / std::sqrt(den));
}

double mcc_multiclass(const std::vector<std::vector<std::int64_t>>& counts) {
  const std::size_t k = counts.size();
  long double n = 0;
  std::vector<long double> mean_gold(k, 0), mean_pred(k, 0);
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t p = 0; p < k; ++p) {
      n += counts[g][p];
      mean_gold[g] += counts[g][p];
      mean_pred[p] += counts[g][p];
    }
  }
  if (n == 0) return 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    mean_gold[c] /= n;
    mean_pred[c] /= n;
  }
  long double cov_gp = 0, cov_gg = 0, cov_pp = 0;
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t p = 0; p < k; ++p) {
      const long double w = counts[g][p];
      if (w == 0) continue;
      for (std::size_t c = 0; c < k; ++c) {
        const long double x = (g == c ? 1.0L : 0.0L) - mean_gold[c];
        const long double y = (p == c ? 1.0L : 0.0L) - mean_pred[c];
        cov_gp += w * x * y;
        cov_gg += w * x * x;
        cov_pp += w * y * y;
      }
    }
  }
  const long double den = cov_gg * cov_pp;
  if (den <= 0) return 0.0;
  return static_cast<double>(cov_gp / std::sqrt(den));
}

Report classification(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                      const std::vector<std::string>& classes) {
  Report r;
  const long double n = static_cast<long double>(gold.size());
  long double hits = 0, wp = 0, wr = 0, wf = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += gold[i] == pred[i];
  for (const std::string& c : classes) {
    long double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == c && gold[i] == c) ++tp;
      if (pred[i] == c && gold[i] != c) ++fp;
      if (pred[i] != c && gold[i] == c) ++fn;
    }
    const long double p = tp + fp > 0 ? tp / (tp + fp) : 0;
    const long double rc = tp + fn > 0 ? tp / (tp + fn) : 0;
    const long double f = harmonic(p, rc);
    const long double support = tp + fn;
    wp += p * support;
    wr += rc * support;
    wf += f * support;
    r.per_class[c] = {static_cast<double>(p), static_cast<double>(rc), static_cast<double>(f)};
  }
  r.accuracy = static_cast<double>(hits / n);
  r.precision = static_cast<double>(wp / n);
  r.recall = static_cast<double>(wr / n);
  r.f1 = static_cast<double>(wf / n);
  return r;
}

double bleu(const std::string& candidate, const std::string& reference, int max_n) {
  const auto ref = words(reference);
  if (ref.empty()) throw std::invalid_argument("empty reference");
  const auto cand = words(candidate);
  if (cand.empty()) return 0.0;
  long double log_sum = 0;
  int used = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto cg = grams(cand, n);
    const auto rg = grams(ref, n);
    if (cg.empty() && rg.empty()) continue;
    if (cg.empty()) return 0.0;
    const long m = clipped(cg, rg);
    if (m == 0) return 0.0;
    log_sum += std::log(static_cast<long double>(m) / cg.size());
    ++used;
  }
  const long double c = cand.size(), r = ref.size();
  const long double bp = c >= r ? 1.0L : std::exp(1.0L - r / c);
  return static_cast<double>(bp * std::exp(log_sum / used));
}

std::array<double, 3> rouge(const std::string& candidate, const std::string& reference) {
  const auto ref = words(reference);
  if (ref.empty()) throw std::invalid_argument("empty reference");
  const auto cand = words(candidate);
  if (cand.empty()) return {0, 0, 0};
  auto rouge_n = [&](int n, long double fallback) -> long double {
    const auto cg = grams(cand, n);
    const auto rg = grams(ref, n);
    if (cg.empty() && rg.empty()) return fallback;
    if (cg.empty() || rg.empty()) return 0;
    const long double m = clipped(cg, rg);
    return harmonic(m / cg.size(), m / rg.size());
  };
  const long double r1 = rouge_n(1, 0);
  const long double r2 = rouge_n(2, r1);

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> lcs = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == cand.size() || j == ref.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t v = cand[i] == ref[j] ? 1 + lcs(i + 1, j + 1) : std::max(lcs(i + 1, j), lcs(i, j + 1));
    memo[key] = v;
    return v;
  };
  const long double l = lcs(0, 0);
  const long double rl = harmonic(l / cand.size(), l / ref.size());
  return {static_cast<double>(r1), static_cast<double>(r2), static_cast<double>(rl)};
}

double kappa(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b) {
  std::set<std::string> cats;
  for (const auto& [k, v] : a) cats.insert(v);
  for (const auto& [k, v] : b) cats.insert(v);
  const long double n = a.size();
  long double agree = 0;
  for (const auto& [k, v] : a) agree += b.at(k) == v;
  const long double po = agree / n;
  long double pe = 0;
  for (const std::string& c : cats) {
    long double na = 0, nb = 0;
    for (const auto& [k, v] : a) na += v == c;
    for (const auto& [k, v] : b) nb += v == c;
    pe += (na / n) * (nb / n);
  }
  if (pe == 1) {
    if (po == 1) return 1.0;
    throw std::domain_error("degenerate");
  }
  return static_cast<double>((po - pe) / (1 - pe));
}

Vote consensus(const std::vector<Observation>& findings, int threshold, int num_classes) {
  int detectors = 0;
  for (const auto& [d, c] : findings) detectors = std::max(detectors, d + 1);
  std::vector<int> votes(num_classes, 0);
  for (int c = 0; c < num_classes; ++c) {
    for (unsigned mask = 0; mask < (1u << detectors); ++mask) {
      bool matches = true;
      for (int d = 0; d < detectors && matches; ++d) {
        const bool reported = std::find(findings.begin(), findings.end(), Observation{d, c}) != findings.end();
        matches = reported == ((mask >> d) & 1u);
      }
      if (matches) votes[c] = __builtin_popcount(mask);
    }
  }
  Vote v;
  for (int c = 0; c < num_classes; ++c) {
    if (votes[c] < threshold) continue;
    if (v.winner < 0 || votes[c] > votes[v.winner]) v.winner = c;
  }
  if (v.winner < 0) return v;
  v.vulnerable = true;
  v.winner_votes = votes[v.winner];
  for (int c = 0; c < num_classes; ++c) {
    if (c != v.winner && votes[c] >= threshold) v.secondary.push_back(c);
  }
  return v;
}

}  // namespace vulnbench::oracle
