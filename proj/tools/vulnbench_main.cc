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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vulnbench/adversarial.h"
#include "vulnbench/annotate.h"
#include "vulnbench/corpus.h"
#include "vulnbench/errors.h"
#include "vulnbench/finetune.h"
#include "vulnbench/label.h"
#include "vulnbench/llm_client.h"
#include "vulnbench/metrics.h"
#include "vulnbench/pipeline.h"
#include "vulnbench/prompts.h"
#include "vulnbench/scoring.h"
#include "vulnbench/taxonomy.h"

namespace fs = std::filesystem;
using namespace vulnbench;

namespace {

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

Taxonomy load_taxonomy(const std::string& path) {
  return path.empty() ? Taxonomy::defaults() : Taxonomy::load(path);
}

PromptTemplates load_templates(const std::string& dir) {
  return dir.empty() ? PromptTemplates::bundled() : PromptTemplates::load(dir);
}

std::vector<VulnClass> parse_class_list(const std::string& csv) {
  static const std::map<std::string, VulnClass> kAliases = {
      {"reentrancy", VulnClass::kReentrancy},
      {"arithmetic", VulnClass::kArithmeticOverflowUnderflow},
      {"txorigin", VulnClass::kTxOrigin},
      {"tx.origin", VulnClass::kTxOrigin},
  };
  std::vector<VulnClass> out;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    std::string lower;
    for (char c : item) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (auto it = kAliases.find(lower); it != kAliases.end()) {
      out.push_back(it->second);
    } else if (auto c = match_class_name(item)) {
      out.push_back(*c);
    } else {
      throw InvalidArgument("unknown class '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("no classes given");
  return out;
}

EndpointConfig endpoint_from_flags(const std::string& base_url, const std::string& model, double temperature,
                                   int max_in_flight, const std::string& key_env) {
  EndpointConfig c;
  c.base_url = base_url;
  c.model = model;
  c.name = model;
  c.family = model;
  c.variant = "base";
  c.temperature = temperature;
  c.max_in_flight = max_in_flight;
  c.api_key_env = key_env;
  if (const char* key = std::getenv(key_env.c_str())) c.api_key = key;
  c.validate();
  return c;
}

// Samples from either a manifest or a directory of .sol files.
std::vector<ContractSample> load_samples(const std::string& manifest, const std::string& dir) {
  if (!manifest.empty()) return load_manifest_samples(manifest);
  if (!dir.empty()) return ingest_directory(dir).samples;
  throw InvalidArgument("give --manifest or --corpus");
}

std::vector<BundleItem> read_prediction_items(const fs::path& pred_path, const std::vector<LabelRecord>& gold) {
  std::map<std::string, const LabelRecord*> by_id;
  for (const LabelRecord& l : gold) by_id[l.contract_id] = &l;
  std::vector<BundleItem> items;
  for (const Json& j : read_jsonl(pred_path)) {
    BundleItem item;
    item.sample_id = j.contains("sample_id") ? require_string(j, "sample_id") : require_string(j, "contract_id");
    item.model = j.value("model", std::string("model"));
    item.strategy = j.value("strategy", std::string("unspecified"));
    item.family = j.value("family", item.model);
    item.variant = j.value("variant", std::string("base"));
    if (j.contains("verdict")) {
      item.verdict = verdict_from_json(j["verdict"]);
    } else if (j.contains("presence")) {
      item.verdict = verdict_from_json(j);
    } else {
      item.verdict = parse_verdict(require_string(j, "response"));
    }
    auto it = by_id.find(item.sample_id);
    if (it == by_id.end()) throw InvalidArgument("prediction for unknown sample '" + item.sample_id + "'");
    item.gold = *it->second;
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("vulnbench"));
  CLI::App app{"Smart-contract vulnerability benchmark for LLMs"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  std::string taxonomy_path;
  app.add_option("--taxonomy", taxonomy_path, "Taxonomy config JSON (default: bundled)");

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Ingest Solidity sources and report statistics");
  corpus->require_subcommand(1);
  std::string ingest_dir, manifest_out;
  auto* c_ingest = corpus->add_subcommand("ingest", "Normalize, hash and deduplicate a directory of .sol files");
  c_ingest->add_option("dir", ingest_dir, "Source directory")->required()->check(CLI::ExistingDirectory);
  c_ingest->add_option("--out", manifest_out, "Manifest JSONL")->required();
  std::string stats_manifest, stats_labels;
  auto* c_stats = corpus->add_subcommand("stats", "Dataset statistics");
  c_stats->add_option("--manifest", stats_manifest)->required()->check(CLI::ExistingFile);
  c_stats->add_option("--labels", stats_labels)->check(CLI::ExistingFile);

  // taxonomy
  auto* tax = app.add_subcommand("taxonomy", "Show the taxonomy in use");
  tax->add_subcommand("dump", "Print classes, default severities and detector tables");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Consensus labeling and label quality");
  annotate->require_subcommand(1);
  std::string a_report, a_detector, a_findings_out;
  auto* a_ingest = annotate->add_subcommand("ingest", "Map a raw detector report into findings");
  a_ingest->add_option("--report", a_report)->required()->check(CLI::ExistingFile);
  a_ingest->add_option("--detector", a_detector, "slither, mythril, oyente, securify, ...")->required();
  a_ingest->add_option("--out", a_findings_out)->required();
  std::vector<std::string> v_findings;
  std::string v_out, v_manifest;
  int v_threshold = kDefaultVoteThreshold;
  auto* a_vote = annotate->add_subcommand("vote", "Consensus labels from findings");
  a_vote->add_option("--findings", v_findings, "Findings JSONL (repeatable)")->required()->check(CLI::ExistingFile);
  a_vote->add_option("--out", v_out)->required();
  a_vote->add_option("--threshold", v_threshold, "Detectors needed to confirm a class");
  a_vote->add_option("--manifest", v_manifest, "Also emit clean labels for contracts without findings")
      ->check(CLI::ExistingFile);
  std::string k_a, k_b;
  auto* a_kappa = annotate->add_subcommand("kappa", "Cohen's kappa between two annotators");
  a_kappa->add_option("--a", k_a)->required()->check(CLI::ExistingFile);
  a_kappa->add_option("--b", k_b)->required()->check(CLI::ExistingFile);
  std::string r_labels, r_out;
  double r_fraction = 0.10;
  std::uint64_t r_seed = 7;
  auto* a_review = annotate->add_subcommand("review", "Stratified sample for manual validation");
  a_review->add_option("--labels", r_labels)->required()->check(CLI::ExistingFile);
  a_review->add_option("--fraction", r_fraction)->check(CLI::Range(0.0, 1.0));
  a_review->add_option("--seed", r_seed);
  a_review->add_option("--out", r_out, "Write the subset here instead of stdout");

  // prompt / query
  std::string p_file, p_strategy = "zero_shot", p_templates, p_pool_manifest, p_pool_labels;
  int p_k = 3;
  std::uint64_t p_seed = 0;
  std::size_t p_max_chars = 0;
  bool p_truncate = false;
  auto add_prompt_options = [&](CLI::App* cmd) {
    cmd->add_option("file", p_file, "Solidity source")->required()->check(CLI::ExistingFile);
    cmd->add_option("--strategy", p_strategy, "zero_shot, few_shot or chain_of_thought");
    cmd->add_option("--k", p_k, "Few-shot exemplar count");
    cmd->add_option("--exemplar-seed", p_seed);
    cmd->add_option("--templates", p_templates, "Prompt template directory")->check(CLI::ExistingDirectory);
    cmd->add_option("--pool-manifest", p_pool_manifest, "Exemplar pool manifest (few_shot)");
    cmd->add_option("--pool-labels", p_pool_labels, "Exemplar pool labels (few_shot)");
    cmd->add_option("--max-code-chars", p_max_chars, "0 = unlimited");
    cmd->add_flag("--truncate", p_truncate, "Cut oversize code instead of failing");
  };
  auto* prompt = app.add_subcommand("prompt", "Render the conversation for one contract");
  add_prompt_options(prompt);
  std::string q_base_url = "https://api.openai.com/v1", q_model, q_key_env = "OPENAI_API_KEY", q_cache;
  double q_temperature = 0.0;
  int q_in_flight = 4;
  auto add_endpoint_options = [&](CLI::App* cmd, bool need_model) {
    cmd->add_option("--base-url", q_base_url);
    auto* m = cmd->add_option("--model", q_model);
    if (need_model) m->required();
    cmd->add_option("--temperature", q_temperature)->check(CLI::Range(0.0, 2.0));
    cmd->add_option("--max-in-flight", q_in_flight)->check(CLI::PositiveNumber);
    cmd->add_option("--api-key-env", q_key_env, "Environment variable holding the API key");
  };
  auto* query = app.add_subcommand("query", "Ask an endpoint about one contract and parse the answer");
  add_prompt_options(query);
  add_endpoint_options(query, true);
  query->add_option("--cache", q_cache, "Response cache directory");

  // finetune
  auto* ft = app.add_subcommand("finetune", "Fine-tuning data and hosted jobs");
  ft->require_subcommand(1);
  std::string fe_manifest, fe_labels, fe_out, fe_system;
  auto* f_export = ft->add_subcommand("export", "Write chat-format fine-tuning JSONL");
  f_export->add_option("--manifest", fe_manifest)->required()->check(CLI::ExistingFile);
  f_export->add_option("--labels", fe_labels)->required()->check(CLI::ExistingFile);
  f_export->add_option("--out", fe_out)->required();
  f_export->add_option("--system-prompt", fe_system, "File with the system prompt (default: bundled)")
      ->check(CLI::ExistingFile);
  std::int64_t fs_n = 0, fs_b = 1, fs_g = 1, fs_e = 1;
  auto* f_steps = ft->add_subcommand("steps", "Total optimizer steps for a run");
  f_steps->add_option("--samples", fs_n)->required();
  f_steps->add_option("--batch", fs_b);
  f_steps->add_option("--grad-accum", fs_g);
  f_steps->add_option("--epochs", fs_e);
  f_steps->add_flag_callback("--hyperparams", [] { print_json(FineTuneHyperparams{}.to_json()); },
                             "Also print the LoRA configuration");
  std::string fu_file;
  auto* f_upload = ft->add_subcommand("upload", "Upload a training file");
  f_upload->add_option("--file", fu_file)->required()->check(CLI::ExistingFile);
  add_endpoint_options(f_upload, false);
  std::string fc_train, fc_valid;
  int fc_epochs = 0;
  auto* f_create = ft->add_subcommand("create", "Start a fine-tuning job");
  f_create->add_option("--training-file", fc_train)->required();
  f_create->add_option("--validation-file", fc_valid);
  f_create->add_option("--epochs", fc_epochs);
  add_endpoint_options(f_create, true);
  std::string fj_id;
  auto* f_poll = ft->add_subcommand("poll", "Show a job's status");
  f_poll->add_option("--job", fj_id)->required();
  add_endpoint_options(f_poll, false);
  auto* f_cancel = ft->add_subcommand("cancel", "Cancel a job");
  f_cancel->add_option("--job", fj_id)->required();
  add_endpoint_options(f_cancel, false);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Score predictions");
  metrics->require_subcommand(1);
  std::string m_gold, m_pred, m_out, m_tables;
  bool m_exclude_nm = false;
  auto* m_score = metrics->add_subcommand("score", "Classification, MCC and generation metrics");
  m_score->add_option("--gold", m_gold)->required()->check(CLI::ExistingFile);
  m_score->add_option("--pred", m_pred, "Verdicts or raw responses JSONL")->required()->check(CLI::ExistingFile);
  m_score->add_option("--out", m_out, "Report JSON (default: stdout)");
  m_score->add_option("--tables", m_tables, "Also write CSV tables to this directory");
  m_score->add_flag("--exclude-not-mentioned", m_exclude_nm, "Drop clean items from the severity task");

  // inject
  std::string i_labels, i_corpus, i_manifest, i_classes = "reentrancy,arithmetic,txorigin", i_out,
                                                i_site = "new-function";
  std::size_t i_n = 50;
  std::uint64_t i_seed = 7;
  std::optional<std::size_t> i_cap;
  auto* inj = app.add_subcommand("inject", "Plant known bugs into clean contracts");
  inj->add_option("--labels", i_labels)->required()->check(CLI::ExistingFile);
  inj->add_option("--corpus", i_corpus, "Directory of .sol files")->check(CLI::ExistingDirectory);
  inj->add_option("--manifest", i_manifest)->check(CLI::ExistingFile);
  inj->add_option("--classes", i_classes);
  inj->add_option("--n", i_n, "Clean samples to mutate");
  inj->add_option("--seed", i_seed);
  inj->add_option("--site", i_site, "new-function or function-body-end");
  inj->add_option("--total-cap", i_cap, "Upper bound on mutants");
  inj->add_option("--out", i_out)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "End-to-end benchmark runs");
  bench->require_subcommand(1);
  std::string b_config;
  auto* b_run = bench->add_subcommand("run", "Query, parse, score and render");
  b_run->add_option("--config", b_config)->required()->check(CLI::ExistingFile);
  std::string b_bundle, b_format = "csv", b_out;
  auto* b_render = bench->add_subcommand("render", "Render tables from a bundle");
  b_render->add_option("--bundle", b_bundle)->required()->check(CLI::ExistingFile);
  b_render->add_option("--format", b_format, "csv or markdown");
  b_render->add_option("--out", b_out, "Output directory (default: tables/ beside the bundle)");
  std::string b_scores;
  auto* b_human = bench->add_subcommand("human", "Summarize human evaluation scores");
  b_human->add_option("--scores", b_scores)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const Taxonomy taxonomy = load_taxonomy(taxonomy_path);

    if (c_ingest->parsed()) {
      IngestResult r = ingest_directory(ingest_dir);
      const fs::path base = fs::absolute(fs::path(manifest_out)).parent_path();
      std::vector<ManifestEntry> entries;
      for (std::size_t i = 0; i < r.samples.size(); ++i) {
        entries.push_back(
            summarize(r.samples[i], fs::relative(fs::absolute(r.paths[i]), base).generic_string()));
      }
      write_manifest(manifest_out, entries);
      spdlog::info("{} files read, {} unique samples", r.files_read, r.samples.size());
    } else if (c_stats->parsed()) {
      const auto entries = read_manifest(stats_manifest);
      const auto labels = stats_labels.empty() ? std::vector<LabelRecord>{} : read_labels(stats_labels);
      print_json(to_json(corpus_stats(entries, labels)));
    } else if (tax->parsed()) {
      print_json(taxonomy.to_json());
    } else if (a_ingest->parsed()) {
      const DetectorReport r = ingest_detector_report(fs::path(a_report), a_detector, taxonomy);
      write_findings(a_findings_out, r.findings);
      spdlog::info("{} findings kept, {} out-of-scope labels dropped", r.findings.size(), r.dropped);
    } else if (a_vote->parsed()) {
      std::vector<Finding> findings;
      for (const std::string& f : v_findings) {
        auto part = read_findings(f);
        findings.insert(findings.end(), part.begin(), part.end());
      }
      std::vector<std::string> ids;
      if (!v_manifest.empty()) {
        for (const ManifestEntry& e : read_manifest(v_manifest)) ids.push_back(e.id);
      }
      write_labels(v_out, consensus_vote_all(findings, taxonomy, v_threshold, ids));
    } else if (a_kappa->parsed()) {
      const double kappa = cohen_kappa(read_annotator_labels(k_a), read_annotator_labels(k_b));
      print_json(Json{{"kappa", kappa}});
    } else if (a_review->parsed()) {
      const auto subset = sample_for_review(read_labels(r_labels), r_fraction, r_seed);
      if (r_out.empty()) {
        for (const LabelRecord& l : subset) std::cout << to_json(l).dump() << "\n";
      } else {
        write_labels(r_out, subset);
      }
    } else if (prompt->parsed() || query->parsed()) {
      Json strategy_json = Json{{"kind", p_strategy}};
      if (p_strategy == "few_shot") {
        strategy_json["k"] = p_k;
        strategy_json["seed"] = p_seed;
      }
      const PromptStrategy strategy = parse_strategy(strategy_json);
      ContractSample sample = make_sample(fs::path(p_file).stem().string(), read_file(p_file));
      sample.normalized = fit_code(sample.normalized, p_max_chars, p_truncate);
      std::vector<LabeledSample> pool;
      if (!p_pool_manifest.empty()) {
        if (p_pool_labels.empty()) throw InvalidArgument("--pool-manifest needs --pool-labels");
        std::map<std::string, LabelRecord> by_id;
        for (LabelRecord& l : read_labels(p_pool_labels)) by_id.emplace(l.contract_id, std::move(l));
        for (ContractSample& s : load_manifest_samples(p_pool_manifest)) {
          auto it = by_id.find(s.id);
          if (it == by_id.end() || s.id == sample.id) continue;
          s.normalized = fit_code(s.normalized, p_max_chars, p_truncate);
          pool.push_back({std::move(s), it->second});
        }
      }
      const Conversation conversation = build_prompt(sample, strategy, pool, load_templates(p_templates));
      if (prompt->parsed()) {
        print_json(to_json(conversation));
      } else {
        ChatClient client(endpoint_from_flags(q_base_url, q_model, q_temperature, q_in_flight, q_key_env),
                          q_cache.empty() ? std::nullopt : std::optional<fs::path>(q_cache));
        const std::string response = client.complete(conversation);
        print_json(to_json(parse_verdict(response)));
      }
    } else if (f_export->parsed()) {
      const std::string system =
          fe_system.empty() ? render_template(PromptTemplates::bundled().system, {}) : read_file(fe_system);
      const auto samples = load_manifest_samples(fe_manifest);
      const auto labels = read_labels(fe_labels);
      std::ostringstream out;
      export_finetune_jsonl(out, samples, labels, system);
      write_file_atomic(fe_out, out.str());
      spdlog::info("{} fine-tuning records written", samples.size());
    } else if (f_steps->parsed()) {
      print_json(Json{{"total_steps", total_steps(fs_n, fs_b, fs_g, fs_e)}});
    } else if (f_upload->parsed() || f_create->parsed() || f_poll->parsed() || f_cancel->parsed()) {
      if (q_model.empty()) q_model = "fine-tune";
      FineTuneClient client(endpoint_from_flags(q_base_url, q_model, q_temperature, q_in_flight, q_key_env));
      if (f_upload->parsed()) {
        print_json(Json{{"file_id", client.upload_file(fu_file)}});
      } else if (f_create->parsed()) {
        const auto job = client.create(fc_train, fc_valid.empty() ? std::nullopt : std::optional(fc_valid), q_model,
                                       FineTuneHyperparams{},
                                       fc_epochs > 0 ? std::optional(fc_epochs) : std::nullopt);
        print_json(to_json(job));
      } else if (f_poll->parsed()) {
        print_json(to_json(client.poll(fj_id)));
      } else {
        print_json(to_json(client.cancel(fj_id)));
      }
    } else if (m_score->parsed()) {
      const auto gold = read_labels(m_gold);
      ScoreOptions options;
      options.exclude_not_mentioned = m_exclude_nm;
      const EvalBundle bundle = make_bundle(read_prediction_items(m_pred, gold), options);
      const Json report = metrics_json(bundle);
      if (m_out.empty()) {
        print_json(report);
      } else {
        write_file_atomic(m_out, report.dump(2) + "\n");
      }
      if (!m_tables.empty()) render_tables(bundle, TableFormat::kCsv, m_tables);
    } else if (inj->parsed()) {
      const auto samples = load_samples(i_manifest, i_corpus);
      const auto labels = read_labels(i_labels);
      const auto clean = select_clean_samples(samples, labels, i_n, i_seed);
      const auto classes = parse_class_list(i_classes);
      const auto mutants = build_mutants(clean, classes, parse_injection_site(i_site), i_seed, i_cap, taxonomy);
      write_mutants(i_out, mutants);
      spdlog::info("{} mutants from {} clean samples written to {}", mutants.size(), clean.size(), i_out);
    } else if (b_run->parsed()) {
      const RunResult r = run_benchmark(RunConfig::load(b_config));
      print_json(Json{{"verdicts", r.bundle.items.size()},
                      {"network_calls", r.stats.network_calls},
                      {"cache_hits", r.stats.cache_hits},
                      {"retries", r.stats.retries}});
    } else if (b_render->parsed()) {
      const EvalBundle bundle = read_bundle(b_bundle);
      const fs::path dir = b_out.empty() ? fs::path(b_bundle).parent_path() / "tables" : fs::path(b_out);
      const std::vector<std::string> strategies = {"zero_shot", "few_shot", "chain_of_thought"};
      const RenderResult r = render_tables(bundle, parse_table_format(b_format), dir, strategies);
      for (const fs::path& f : r.files) std::cout << f.string() << "\n";
      for (const std::string& n : r.notes) spdlog::info("{}", n);
    } else if (b_human->parsed()) {
      const HumanEvalSummary s = ingest_human_eval(fs::path(b_scores));
      print_json(Json{{"rows", s.rows}, {"mean_score", s.mean_score}, {"accuracy", s.accuracy}});
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
