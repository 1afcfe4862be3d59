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

#include "vulnbench/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "vulnbench/errors.h"

namespace vulnbench {
namespace {

using NgramCounts = std::map<std::vector<std::string>, std::int64_t>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

std::int64_t clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
  std::int64_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

std::int64_t total_count(const NgramCounts& counts) {
  std::int64_t n = 0;
  for (const auto& [gram, count] : counts) n += count;
  return n;
}

double f1(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

double rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref, std::size_t n,
               double lower_order) {
  const NgramCounts c = ngrams(cand, n);
  const NgramCounts r = ngrams(ref, n);
  const std::int64_t c_total = total_count(c);
  const std::int64_t r_total = total_count(r);
  if (c_total == 0 && r_total == 0) return lower_order;
  if (c_total == 0 || r_total == 0) return 0.0;
  const double overlap = static_cast<double>(clipped_overlap(c, r));
  return f1(overlap / c_total, overlap / r_total);
}

}  // namespace

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts) {
    for (std::int64_t c : row) n += c;
  }
  return n;
}

std::int64_t ConfusionMatrix::correct() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
  return n;
}

BinaryCounts ConfusionMatrix::binary(std::size_t positive) const {
  if (counts.size() != 2 || positive > 1) throw InvalidArgument("binary view needs a 2x2 matrix");
  const std::size_t neg = 1 - positive;
  return {counts[positive][positive], counts[neg][neg], counts[neg][positive], counts[positive][neg]};
}

ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                          std::span<const std::string> classes) {
  if (gold.size() != pred.size()) {
    throw InvalidArgument("gold has " + std::to_string(gold.size()) + " labels, predictions have " +
                          std::to_string(pred.size()));
  }
  if (gold.empty()) throw InvalidArgument("no items to score");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!index.emplace(classes[i], i).second) throw InvalidArgument("duplicate class '" + classes[i] + "'");
  }
  auto lookup = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw InvalidArgument("label '" + label + "' is not in the class list");
    return it->second;
  };
  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  cm.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.counts[lookup(gold[i])][lookup(pred[i])];
  return cm;
}

double mcc_binary(const BinaryCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

double mcc_binary(const ConfusionMatrix& cm) { return mcc_binary(cm.binary()); }

double mcc_multiclass(const ConfusionMatrix& cm) {
  const std::size_t k = cm.counts.size();
  std::vector<double> row_sum(k, 0), col_sum(k, 0);
  double c = 0, s = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = static_cast<double>(cm.counts[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
      s += v;
    }
    c += static_cast<double>(cm.counts[i][i]);
  }
  double pt = 0, pp = 0, tt = 0;
  for (std::size_t i = 0; i < k; ++i) {
    pt += col_sum[i] * row_sum[i];
    pp += col_sum[i] * col_sum[i];
    tt += row_sum[i] * row_sum[i];
  }
  const double den = (s * s - pp) * (s * s - tt);
  if (den <= 0) return 0.0;
  return (c * s - pt) / std::sqrt(den);
}

ClassificationReport classification_report(const ConfusionMatrix& cm) {
  const std::size_t k = cm.counts.size();
  ClassificationReport report;
  report.total = cm.total();
  if (report.total == 0) throw InvalidArgument("no items to score");
  const double n = static_cast<double>(report.total);
  for (std::size_t i = 0; i < k; ++i) {
    std::int64_t support = 0, predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += cm.counts[i][j];
      predicted += cm.counts[j][i];
    }
    const double hit = static_cast<double>(cm.counts[i][i]);
    ClassScores cs;
    cs.name = cm.classes[i];
    cs.support = support;
    cs.precision = predicted > 0 ? hit / predicted : 0.0;
    cs.recall = support > 0 ? hit / support : 0.0;
    cs.f1 = f1(cs.precision, cs.recall);
    report.precision += cs.precision * support / n;
    report.f1 += cs.f1 * support / n;
    report.per_class.push_back(std::move(cs));
  }
  report.accuracy = static_cast<double>(cm.correct()) / n;
  // Support-weighted recall telescopes to correct / total.
  report.recall = report.accuracy;
  return report;
}

ClassificationReport classification_report(std::span<const std::string> gold, std::span<const std::string> pred,
                                            std::span<const std::string> classes) {
  return classification_report(confusion(gold, pred, classes));
}

std::vector<std::string> tokenize_for_overlap(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isspace(u)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
  if (max_n < 1) throw InvalidArgument("BLEU order must be >= 1");
  const auto ref = tokenize_for_overlap(reference);
  if (ref.empty()) throw InvalidArgument("BLEU needs a non-empty reference");
  const auto cand = tokenize_for_overlap(candidate);
  if (cand.empty()) return 0.0;

  double log_sum = 0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const NgramCounts c = ngrams(cand, static_cast<std::size_t>(n));
    const NgramCounts r = ngrams(ref, static_cast<std::size_t>(n));
    const std::int64_t c_total = total_count(c);
    if (c_total == 0 && r.empty()) continue;
    if (c_total == 0) return 0.0;
    const std::int64_t overlap = clipped_overlap(c, r);
    if (overlap == 0) return 0.0;
    log_sum += std::log(static_cast<double>(overlap) / static_cast<double>(c_total));
    ++orders;
  }
  const double c_len = static_cast<double>(cand.size());
  const double r_len = static_cast<double>(ref.size());
  const double bp = c_len < r_len ? std::exp(1.0 - r_len / c_len) : 1.0;
  return bp * std::exp(log_sum / orders);
}

RougeScores rouge(std::string_view candidate, std::string_view reference) {
  const auto ref = tokenize_for_overlap(reference);
  if (ref.empty()) throw InvalidArgument("ROUGE needs a non-empty reference");
  const auto cand = tokenize_for_overlap(candidate);
  RougeScores s;
  if (cand.empty()) return s;
  s.rouge1 = rouge_n(cand, ref, 1, 0.0);
  s.rouge2 = rouge_n(cand, ref, 2, s.rouge1);
  const double lcs = static_cast<double>(lcs_length(cand, ref));
  s.rouge_l = f1(lcs / cand.size(), lcs / ref.size());
  return s;
}

GenerationScores generation_scores(std::span<const std::string> candidates,
                                   std::span<const std::string> references) {
  if (candidates.size() != references.size()) throw InvalidArgument("candidate/reference count mismatch");
  if (candidates.empty()) throw InvalidArgument("no items to score");
  GenerationScores g;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    g.bleu1 += bleu(candidates[i], references[i], 1);
    g.bleu2 += bleu(candidates[i], references[i], 2);
    g.bleu3 += bleu(candidates[i], references[i], 3);
    const RougeScores r = rouge(candidates[i], references[i]);
    g.rouge1 += r.rouge1;
    g.rouge2 += r.rouge2;
    g.rouge_l += r.rouge_l;
  }
  const double n = static_cast<double>(candidates.size());
  for (double* v : {&g.bleu1, &g.bleu2, &g.bleu3, &g.rouge1, &g.rouge2, &g.rouge_l}) *v /= n;
  return g;
}

std::optional<double> improvement(double base, double finetuned) {
  if (base == 0.0) return std::nullopt;
  return (finetuned - base) / std::abs(base) * 100.0;
}

std::string format_improvement(std::optional<double> percent) {
  if (!percent) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", *percent);
  return buf;
}

Json to_json(const ConfusionMatrix& cm) {
  Json j;
  j["classes"] = cm.classes;
  j["counts"] = cm.counts;
  return j;
}

Json to_json(const ClassificationReport& report) {
  Json j;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["total"] = report.total;
  Json classes = Json::array();
  for (const ClassScores& cs : report.per_class) {
    classes.push_back(Json{{"name", cs.name},
                           {"precision", cs.precision},
                           {"recall", cs.recall},
                           {"f1", cs.f1},
                           {"support", cs.support}});
  }
  j["per_class"] = std::move(classes);
  return j;
}

Json to_json(const GenerationScores& s) {
  return Json{{"bleu1", s.bleu1},   {"bleu2", s.bleu2},   {"bleu3", s.bleu3},
              {"rouge1", s.rouge1}, {"rouge2", s.rouge2}, {"rougeL", s.rouge_l}};
}

ConfusionMatrix confusion_from_json(const Json& j) {
  try {
    ConfusionMatrix cm;
    cm.classes = j.at("classes").get<std::vector<std::string>>();
    cm.counts = j.at("counts").get<std::vector<std::vector<std::int64_t>>>();
    return cm;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("confusion matrix: ") + e.what());
  }
}

ClassificationReport report_from_json(const Json& j) {
  try {
    ClassificationReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.total = j.at("total").get<std::int64_t>();
    for (const Json& c : j.at("per_class")) {
      r.per_class.push_back({c.at("name").get<std::string>(), c.at("precision").get<double>(),
                             c.at("recall").get<double>(), c.at("f1").get<double>(),
                             c.at("support").get<std::int64_t>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("classification report: ") + e.what());
  }
}

GenerationScores generation_from_json(const Json& j) {
  try {
    return {j.at("bleu1").get<double>(),  j.at("bleu2").get<double>(),  j.at("bleu3").get<double>(),
            j.at("rouge1").get<double>(), j.at("rouge2").get<double>(), j.at("rougeL").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generation scores: ") + e.what());
  }
}

}  // namespace vulnbench
