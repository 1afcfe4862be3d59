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

#include "vulnbench/pipeline.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "vulnbench/corpus.h"
#include "vulnbench/errors.h"
#include "vulnbench/rng.h"

namespace vulnbench {
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string percent(double v) { return std::to_string(std::lround(v * 100.0)); }

using Row = std::vector<std::string>;

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_table(const Row& header, const std::vector<Row>& rows, TableFormat format) {
  std::string out;
  auto line = [&](const Row& r) {
    if (format == TableFormat::kCsv) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(r[i]);
      }
    } else {
      out += '|';
      for (const std::string& cell : r) out += ' ' + cell + " |";
    }
    out += '\n';
  };
  line(header);
  if (format == TableFormat::kMarkdown) {
    out += '|';
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += '\n';
  }
  for (const Row& r : rows) line(r);
  return out;
}

// "base" and "finetuned" lead, other variants follow in order of appearance.
std::vector<std::string> ordered_variants(const EvalBundle& bundle) {
  std::vector<std::string> seen;
  for (const GroupScores& g : bundle.groups) {
    if (std::find(seen.begin(), seen.end(), g.variant) == seen.end()) seen.push_back(g.variant);
  }
  std::vector<std::string> out;
  for (const char* lead : {"base", "finetuned"}) {
    if (std::find(seen.begin(), seen.end(), lead) != seen.end()) out.emplace_back(lead);
  }
  for (const std::string& v : seen) {
    if (v != "base" && v != "finetuned") out.push_back(v);
  }
  return out;
}

// (family, strategy) pairs in order of first appearance.
std::vector<std::pair<std::string, std::string>> family_rows(const EvalBundle& bundle) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const GroupScores& g : bundle.groups) {
    std::pair<std::string, std::string> key{g.family, g.strategy};
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(std::move(key));
  }
  return rows;
}

const GroupScores* find_group(const EvalBundle& bundle, const std::string& family, const std::string& strategy,
                              const std::string& variant) {
  for (const GroupScores& g : bundle.groups) {
    if (g.family == family && g.strategy == strategy && g.variant == variant) return &g;
  }
  return nullptr;
}

const TaskScores* find_task(const GroupScores* g, Task task) {
  if (!g) return nullptr;
  if (task == Task::kSeverity) return g->scores.severity ? &*g->scores.severity : nullptr;
  return &task_scores(g->scores, task);
}

void write_checkpoint(const fs::path& dir, const std::vector<std::string>& done, const std::string& model,
                      const std::string& strategy, const std::string& error) {
  Json j;
  j["status"] = "failed";
  j["completed_groups"] = done;
  j["failed_group"] = Json{{"model", model}, {"strategy", strategy}};
  j["error"] = error;
  write_file_atomic(dir / "checkpoint.json", j.dump(2) + "\n");
}

}  // namespace

void RunConfig::validate() const {
  if (manifest.empty()) throw InvalidArgument("run config needs a manifest");
  if (labels.empty()) throw InvalidArgument("run config needs a labels file");
  if (output_dir.empty()) throw InvalidArgument("run config needs an output_dir");
  if (endpoints.empty()) throw InvalidArgument("run config needs at least one endpoint");
  if (strategies.empty()) throw InvalidArgument("run config needs at least one strategy");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("test_fraction must be in (0, 1)");
  std::set<std::string> names;
  for (const EndpointConfig& e : endpoints) {
    e.validate();
    if (!names.insert(e.name).second) throw InvalidArgument("duplicate endpoint name '" + e.name + "'");
  }
  std::set<std::string> strategy_names;
  for (const PromptStrategy& s : strategies) {
    if (!strategy_names.insert(strategy_name(s)).second) {
      throw InvalidArgument("strategy '" + strategy_name(s) + "' listed twice");
    }
  }
  if (max_test_samples && *max_test_samples == 0) throw InvalidArgument("max_test_samples must be >= 1");
}

fs::path RunConfig::effective_cache_dir() const { return cache_dir ? *cache_dir : output_dir / "cache"; }

RunConfig RunConfig::from_json(const Json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    c.manifest = resolve(base_dir, require_string(j, "manifest"));
    c.labels = resolve(base_dir, require_string(j, "labels"));
    c.output_dir = resolve(base_dir, require_string(j, "output_dir"));
    if (j.contains("cache_dir")) c.cache_dir = resolve(base_dir, require_string(j, "cache_dir"));
    if (j.contains("templates_dir")) c.templates_dir = resolve(base_dir, require_string(j, "templates_dir"));
    for (const Json& e : require_field(j, "endpoints")) c.endpoints.push_back(EndpointConfig::from_json(e));
    for (const Json& s : require_field(j, "strategies")) c.strategies.push_back(parse_strategy(s));
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.split_seed = j.value("split_seed", c.split_seed);
    c.max_code_chars = j.value("max_code_chars", c.max_code_chars);
    c.truncate = j.value("truncate", c.truncate);
    if (j.contains("max_test_samples")) c.max_test_samples = j["max_test_samples"].get<std::size_t>();
    c.exclude_not_mentioned = j.value("exclude_not_mentioned", c.exclude_not_mentioned);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

Json RunConfig::to_json() const {
  Json j;
  j["manifest"] = manifest.generic_string();
  j["labels"] = labels.generic_string();
  j["output_dir"] = output_dir.generic_string();
  j["cache_dir"] = effective_cache_dir().generic_string();
  if (templates_dir) j["templates_dir"] = templates_dir->generic_string();
  Json eps = Json::array();
  for (const EndpointConfig& e : endpoints) eps.push_back(e.to_json());
  j["endpoints"] = std::move(eps);
  Json strats = Json::array();
  for (const PromptStrategy& s : strategies) strats.push_back(vulnbench::to_json(s));
  j["strategies"] = std::move(strats);
  j["test_fraction"] = test_fraction;
  j["split_seed"] = split_seed;
  j["max_code_chars"] = max_code_chars;
  j["truncate"] = truncate;
  if (max_test_samples) j["max_test_samples"] = *max_test_samples;
  j["exclude_not_mentioned"] = exclude_not_mentioned;
  return j;
}

Split split_dataset(std::span<const LabelRecord> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("test_fraction must be in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const LabelRecord& l = labels[i];
    strata[l.vulnerable && l.vuln_class ? std::string(to_string(*l.vuln_class)) : "None"].push_back(i);
  }
  SeededRng rng(seed);
  std::vector<bool> in_test(labels.size(), false);
  for (auto& [key, members] : strata) {
    const std::size_t n = members.size();
    if (n < 2) {
      spdlog::warn("stratum '{}' has a single record; it goes to train", key);
      continue;
    }
    rng.shuffle(std::span<std::size_t>(members));
    auto take = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction + 0.5));
    take = std::clamp<std::size_t>(take, 1, n - 1);
    for (std::size_t t = 0; t < take; ++t) in_test[members[t]] = true;
  }
  Split split;
  for (std::size_t i = 0; i < labels.size(); ++i) (in_test[i] ? split.test : split.train).push_back(labels[i]);
  return split;
}

EvalBundle make_bundle(std::vector<BundleItem> items, const ScoreOptions& options) {
  if (items.empty()) throw InvalidArgument("bundle has no items");
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const BundleItem& it = items[i];
    if (!seen.emplace(it.sample_id, it.strategy, it.model).second) {
      throw InvalidArgument("duplicate verdict for sample '" + it.sample_id + "', strategy '" + it.strategy +
                            "', model '" + it.model + "'");
    }
    std::pair<std::string, std::string> key{it.model, it.strategy};
    auto [pos, fresh] = members.try_emplace(key);
    if (fresh) order.push_back(key);
    pos->second.push_back(i);
  }
  EvalBundle bundle;
  for (const auto& key : order) {
    const auto& idx = members[key];
    std::vector<LabelRecord> gold;
    std::vector<ModelVerdict> pred;
    for (std::size_t i : idx) {
      gold.push_back(items[i].gold);
      pred.push_back(items[i].verdict);
    }
    const BundleItem& first = items[idx.front()];
    bundle.groups.push_back({first.model, first.family, first.variant, first.strategy,
                             score_verdicts(gold, pred, options)});
  }
  bundle.items = std::move(items);
  return bundle;
}

Json to_json(const BundleItem& item) {
  Json j;
  j["sample_id"] = item.sample_id;
  j["strategy"] = item.strategy;
  j["model"] = item.model;
  j["family"] = item.family;
  j["variant"] = item.variant;
  j["verdict"] = to_json(item.verdict);
  j["gold"] = to_json(item.gold);
  return j;
}

BundleItem bundle_item_from_json(const Json& j) {
  BundleItem item;
  item.sample_id = require_string(j, "sample_id");
  item.strategy = require_string(j, "strategy");
  item.model = require_string(j, "model");
  item.family = j.value("family", item.model);
  item.variant = j.value("variant", std::string("base"));
  item.verdict = verdict_from_json(require_field(j, "verdict"));
  item.gold = label_from_json(require_field(j, "gold"));
  return item;
}

Json metrics_json(const EvalBundle& bundle) {
  Json groups = Json::array();
  for (const GroupScores& g : bundle.groups) {
    Json j;
    j["model"] = g.model;
    j["family"] = g.family;
    j["variant"] = g.variant;
    j["strategy"] = g.strategy;
    j["scores"] = to_json(g.scores);
    groups.push_back(std::move(j));
  }
  return Json{{"groups", std::move(groups)}};
}

void write_bundle(const fs::path& path, const EvalBundle& bundle) {
  std::vector<Json> records;
  records.reserve(bundle.items.size());
  for (const BundleItem& item : bundle.items) records.push_back(to_json(item));
  write_jsonl(path, records);
}

EvalBundle read_bundle(const fs::path& path, const ScoreOptions& options) {
  std::vector<BundleItem> items;
  for (const Json& j : read_jsonl(path)) {
    try {
      items.push_back(bundle_item_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return make_bundle(std::move(items), options);
}

RunResult run_benchmark(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "run_config.json", config.to_json().dump(2) + "\n");

  std::unordered_map<std::string, ContractSample> samples;
  for (ContractSample& s : load_manifest_samples(config.manifest)) {
    s.normalized = fit_code(s.normalized, config.max_code_chars, config.truncate);
    samples.emplace(s.id, std::move(s));
  }
  const std::vector<LabelRecord> labels = read_labels(config.labels);
  for (const LabelRecord& l : labels) {
    if (!samples.contains(l.contract_id)) {
      throw InvalidArgument("label '" + l.contract_id + "' has no sample in the manifest");
    }
  }
  if (labels.size() < samples.size()) {
    spdlog::warn("{} manifest samples have no label and are skipped", samples.size() - labels.size());
  }

  Split split = split_dataset(labels, config.test_fraction, config.split_seed);
  if (config.max_test_samples && split.test.size() > *config.max_test_samples) {
    split.test.resize(*config.max_test_samples);
  }
  if (split.test.empty()) throw InvalidArgument("test split is empty");
  std::vector<LabeledSample> pool;
  for (const LabelRecord& l : split.train) pool.push_back({samples.at(l.contract_id), l});
  const PromptTemplates templates =
      config.templates_dir ? PromptTemplates::load(*config.templates_dir) : PromptTemplates::bundled();

  spdlog::info("{} test samples, {} exemplar pool, {} endpoints x {} strategies", split.test.size(), pool.size(),
               config.endpoints.size(), config.strategies.size());

  RunResult result;
  std::vector<BundleItem> items;
  std::vector<Json> raw_records;
  std::vector<std::string> done;
  for (const EndpointConfig& endpoint : config.endpoints) {
    ChatClient client(endpoint, config.effective_cache_dir());
    for (const PromptStrategy& strategy : config.strategies) {
      const std::string sname = strategy_name(strategy);
      std::vector<Conversation> conversations;
      conversations.reserve(split.test.size());
      for (const LabelRecord& l : split.test) {
        conversations.push_back(build_prompt(samples.at(l.contract_id), strategy, pool, templates));
      }
      std::vector<std::string> responses;
      try {
        responses = client.complete_all(conversations);
      } catch (const std::exception& e) {
        write_checkpoint(config.output_dir, done, endpoint.name, sname, e.what());
        spdlog::error("{} / {} failed: {}; cached answers are kept for the next run", endpoint.name, sname,
                      e.what());
        throw;
      }
      for (std::size_t i = 0; i < responses.size(); ++i) {
        raw_records.push_back(Json{{"sample_id", split.test[i].contract_id},
                                   {"strategy", sname},
                                   {"model", endpoint.name},
                                   {"response", responses[i]}});
      }
      write_jsonl(config.output_dir / "raw_responses.jsonl", raw_records);
      for (std::size_t i = 0; i < responses.size(); ++i) {
        items.push_back({split.test[i].contract_id, sname, endpoint.name, endpoint.family, endpoint.variant,
                         parse_verdict(responses[i]), split.test[i]});
      }
      done.push_back(endpoint.name + "/" + sname);
    }
    const ClientStats s = client.stats();
    result.stats.network_calls += s.network_calls;
    result.stats.retries += s.retries;
    result.stats.cache_hits += s.cache_hits;
    result.stats.peak_in_flight = std::max(result.stats.peak_in_flight, s.peak_in_flight);
  }

  std::vector<Json> verdicts;
  for (const BundleItem& item : items) {
    verdicts.push_back(Json{{"sample_id", item.sample_id},
                            {"strategy", item.strategy},
                            {"model", item.model},
                            {"verdict", to_json(item.verdict)}});
  }
  write_jsonl(config.output_dir / "verdicts.jsonl", verdicts);

  ScoreOptions options;
  options.exclude_not_mentioned = config.exclude_not_mentioned;
  result.bundle = make_bundle(std::move(items), options);
  write_bundle(config.output_dir / "bundle.jsonl", result.bundle);
  write_file_atomic(config.output_dir / "metrics.json", metrics_json(result.bundle).dump(2) + "\n");
  std::vector<std::string> names;
  for (const PromptStrategy& s : config.strategies) names.push_back(strategy_name(s));
  render_tables(result.bundle, TableFormat::kCsv, config.output_dir / "tables", names);
  fs::remove(config.output_dir / "checkpoint.json");
  return result;
}

TableFormat parse_table_format(std::string_view text) {
  if (text == "csv") return TableFormat::kCsv;
  if (text == "markdown" || text == "md") return TableFormat::kMarkdown;
  throw InvalidArgument("unknown table format '" + std::string(text) + "'");
}

RenderResult render_tables(const EvalBundle& bundle, TableFormat format, const fs::path& dir,
                           std::span<const std::string> strategies) {
  if (bundle.groups.empty()) throw InvalidArgument("bundle has no scored groups");
  const std::string ext = format == TableFormat::kCsv ? ".csv" : ".md";
  const std::vector<std::string> variants = ordered_variants(bundle);
  const auto rows = family_rows(bundle);
  RenderResult out;
  auto emit = [&](const std::string& name, const Row& header, const std::vector<Row>& body) {
    const fs::path path = dir / (name + ext);
    write_file_atomic(path, render_table(header, body, format));
    out.files.push_back(path);
  };

  for (Task task : kAllTasks) {
    Row header = {"Model", "Strategy"};
    for (const std::string& v : variants) {
      for (const char* m : {"Accuracy", "Precision", "Recall", "F1"}) header.push_back(v + " " + m);
    }
    std::vector<Row> body;
    for (const auto& [family, strategy] : rows) {
      Row r = {family, strategy};
      for (const std::string& v : variants) {
        const TaskScores* t = find_task(find_group(bundle, family, strategy, v), task);
        if (!t) {
          r.insert(r.end(), 4, "-");
          continue;
        }
        r.push_back(percent(t->report.accuracy));
        r.push_back(percent(t->report.precision));
        r.push_back(percent(t->report.recall));
        r.push_back(percent(t->report.f1));
      }
      body.push_back(std::move(r));
    }
    emit(std::string(to_string(task)), header, body);
  }

  const bool paired = std::find(variants.begin(), variants.end(), "base") != variants.end() &&
                      std::find(variants.begin(), variants.end(), "finetuned") != variants.end();
  Row header = {"Model", "Strategy"};
  for (Task task : kAllTasks) {
    for (const std::string& v : variants) header.push_back(std::string(to_string(task)) + " " + v);
    if (paired) header.push_back(std::string(to_string(task)) + " improvement %");
  }
  std::vector<Row> body;
  for (const auto& [family, strategy] : rows) {
    Row r = {family, strategy};
    for (Task task : kAllTasks) {
      for (const std::string& v : variants) {
        const TaskScores* t = find_task(find_group(bundle, family, strategy, v), task);
        r.push_back(t ? fixed(t->mcc, 6) : "-");
      }
      if (paired) {
        const TaskScores* b = find_task(find_group(bundle, family, strategy, "base"), task);
        const TaskScores* f = find_task(find_group(bundle, family, strategy, "finetuned"), task);
        r.push_back(b && f ? format_improvement(improvement(b->mcc, f->mcc)) : "-");
      }
    }
    body.push_back(std::move(r));
  }
  emit("mcc", header, body);

  std::vector<std::string> wanted(strategies.begin(), strategies.end());
  if (wanted.empty()) {
    for (const GroupScores& g : bundle.groups) {
      if (std::find(wanted.begin(), wanted.end(), g.strategy) == wanted.end()) wanted.push_back(g.strategy);
    }
  }
  for (const std::string& strategy : wanted) {
    std::vector<Row> gen;
    for (const GroupScores& g : bundle.groups) {
      if (g.strategy != strategy) continue;
      const GenerationScores& s = g.scores.generation;
      gen.push_back({g.family, g.variant, fixed(s.bleu1, 4), fixed(s.bleu2, 4), fixed(s.bleu3, 4),
                     fixed(s.rouge1, 4), fixed(s.rouge2, 4), fixed(s.rouge_l, 4)});
    }
    if (gen.empty()) {
      out.notes.push_back("generation table for strategy '" + strategy + "' omitted: no verdicts");
      continue;
    }
    emit("generation_" + strategy,
         {"Model", "Variant", "BLEU-1", "BLEU-2", "BLEU-3", "ROUGE-1", "ROUGE-2", "ROUGE-L"}, gen);
  }
  if (!out.notes.empty()) {
    std::string text;
    for (const std::string& n : out.notes) text += n + "\n";
    write_file_atomic(dir / "NOTES.txt", text);
    out.files.push_back(dir / "NOTES.txt");
  }
  return out;
}

HumanEvalSummary ingest_human_eval(std::istream& in, const std::string& source) {
  HumanEvalSummary summary;
  std::int64_t total = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) {
      const auto b = f.find_first_not_of(" \t");
      const auto e = f.find_last_not_of(" \t");
      fields.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
    }
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != 3) throw ParseError(where + ": expected sample_id,evaluator_id,score");
    if (summary.rows == 0 && total == 0 && fields[2] == "score") continue;
    int score = -1;
    const std::string& f = fields[2];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), score);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw ParseError(where + ": score '" + f + "' is not an integer");
    }
    if (score < 0 || score > 3) throw ParseError(where + ": score " + f + " is outside 0..3");
    if (fields[0].empty()) throw ParseError(where + ": empty sample id");
    total += score;
    ++summary.rows;
  }
  if (summary.rows == 0) throw InvalidArgument(source + ": no human evaluation rows");
  summary.mean_score = static_cast<double>(total) / static_cast<double>(summary.rows);
  summary.accuracy = summary.mean_score / 3.0;
  return summary;
}

HumanEvalSummary ingest_human_eval(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return ingest_human_eval(in, path.string());
}

}  // namespace vulnbench
