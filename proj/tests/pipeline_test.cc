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

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "test_support.h"
#include "vulnbench/errors.h"
#include "vulnbench/rng.h"

namespace vulnbench {
namespace {

namespace fs = std::filesystem;
using testing::StubServer;
using testing::TempDir;

std::vector<LabelRecord> two_class_labels(int clean, int vulnerable) {
  std::vector<LabelRecord> out;
  for (int i = 0; i < clean + vulnerable; ++i) {
    const std::string id = "r" + std::to_string(i);
    out.push_back(i < clean ? LabelRecord::clean(id)
                            : LabelRecord::vulnerable_as(id, VulnClass::kReentrancy, Severity::kHigh));
  }
  return out;
}

TEST(Split, FifthOfHundred) {
  const auto labels = two_class_labels(50, 50);
  const Split s = split_dataset(labels, 0.2, 1);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.test.size(), 20u);
  const auto test_clean = std::count_if(s.test.begin(), s.test.end(), [](const LabelRecord& l) { return !l.vulnerable; });
  EXPECT_EQ(test_clean, 10);
}

TEST(Split, TwoRecordsOneClassHalf) {
  const auto labels = two_class_labels(2, 0);
  const Split s = split_dataset(labels, 0.5, 3);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Split, SingletonStratumGoesToTrain) {
  auto labels = two_class_labels(10, 0);
  labels.push_back(LabelRecord::vulnerable_as("lonely", VulnClass::kTxOrigin, Severity::kHigh));
  const Split s = split_dataset(labels, 0.3, 0);
  EXPECT_TRUE(std::any_of(s.train.begin(), s.train.end(), [](const LabelRecord& l) { return l.contract_id == "lonely"; }));
}

TEST(Split, PropertyPartitionPreservingOrder) {
  SeededRng rng(8);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<LabelRecord> labels;
    const int n = 2 + static_cast<int>(rng.below(60));
    for (int i = 0; i < n; ++i) {
      const std::string id = "x" + std::to_string(i);
      const auto c = rng.below(4);
      labels.push_back(c == 0 ? LabelRecord::clean(id)
                              : LabelRecord::vulnerable_as(id, kAllVulnClasses[c], Severity::kMedium));
    }
    const double f = 0.05 + 0.9 * static_cast<double>(rng.below(1000)) / 1000.0;
    const std::uint64_t seed = rng.next();
    const Split s = split_dataset(labels, f, seed);
    ASSERT_EQ(s.train.size() + s.test.size(), labels.size());
    std::vector<std::string> merged;
    std::size_t a = 0, b = 0;
    for (const LabelRecord& l : labels) {
      if (a < s.train.size() && s.train[a].contract_id == l.contract_id) {
        ++a;
      } else {
        ASSERT_LT(b, s.test.size());
        ASSERT_EQ(s.test[b].contract_id, l.contract_id);
        ++b;
      }
    }
    const Split again = split_dataset(labels, f, seed);
    ASSERT_EQ(again.test, s.test);
  }
}

TEST(Split, FractionBounds) {
  const auto labels = two_class_labels(4, 4);
  EXPECT_THROW(split_dataset(labels, 0.0, 0), InvalidArgument);
  EXPECT_THROW(split_dataset(labels, 1.0, 0), InvalidArgument);
}

EndpointConfig stub_endpoint(const StubServer& stub, const std::string& name = "stub-model") {
  EndpointConfig e;
  e.name = name;
  e.family = name;
  e.variant = "base";
  e.model = name;
  e.base_url = stub.base_url();
  e.api_key = "k";
  e.max_retries = 0;
  e.initial_backoff = std::chrono::milliseconds(1);
  e.max_in_flight = 4;
  return e;
}

RunConfig run_config(const testing::GeneratedCorpus& corpus, const fs::path& out, const EndpointConfig& endpoint) {
  RunConfig c;
  c.manifest = corpus.manifest;
  c.labels = corpus.labels_path;
  c.endpoints = {endpoint};
  c.strategies = {ZeroShot{}, FewShot{2, 1}, ChainOfThought{}};
  c.test_fraction = 0.3;
  c.split_seed = 5;
  c.output_dir = out;
  c.cache_dir = out / "cache";
  return c;
}

TEST(RunBenchmark, OracleEndpointScoresPerfectly) {
  TempDir dir;
  const auto corpus = testing::write_corpus(dir / "corpus", 20, 26);
  StubServer stub(testing::oracle_handler(corpus.samples, corpus.labels));
  const RunResult r = run_benchmark(run_config(corpus, dir / "run", stub_endpoint(stub)));
  ASSERT_EQ(r.bundle.groups.size(), 3u);
  for (const GroupScores& g : r.bundle.groups) {
    for (Task t : kAllTasks) {
      EXPECT_DOUBLE_EQ(task_scores(g.scores, t).report.accuracy, 1.0) << g.strategy << " " << to_string(t);
      EXPECT_DOUBLE_EQ(task_scores(g.scores, t).report.f1, 1.0);
    }
    EXPECT_EQ(g.scores.unparseable, 0u);
  }
  for (const char* f : {"run_config.json", "raw_responses.jsonl", "verdicts.jsonl", "bundle.jsonl", "metrics.json",
                        "tables/presence.csv", "tables/mcc.csv", "tables/generation_few_shot.csv"}) {
    EXPECT_TRUE(fs::exists(dir / ("run/" + std::string(f)))) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "run/checkpoint.json"));
  const EvalBundle back = read_bundle(dir / "run/bundle.jsonl");
  EXPECT_EQ(metrics_json(back), metrics_json(r.bundle));
}

TEST(RunBenchmark, CardinalityIsStrategiesTimesModelsTimesSamples) {
  TempDir dir;
  const auto corpus = testing::write_corpus(dir / "corpus", 30, 26);
  StubServer stub(testing::oracle_handler(corpus.samples, corpus.labels));
  RunConfig c = run_config(corpus, dir / "run", stub_endpoint(stub));
  c.strategies = {ZeroShot{}, ChainOfThought{}};
  c.max_test_samples = 10;
  const RunResult r = run_benchmark(c);
  EXPECT_EQ(r.bundle.items.size(), 20u);
  EXPECT_EQ(read_jsonl(dir / "run/verdicts.jsonl").size(), 20u);
  EXPECT_EQ(stub.chat_calls(), 20);
}

TEST(RunBenchmark, InterruptedRunResumesToIdenticalOutput) {
  TempDir dir;
  const auto corpus = testing::write_corpus(dir / "corpus", 20, 13);
  const auto oracle = testing::oracle_handler(corpus.samples, corpus.labels);

  StubServer healthy(oracle);
  run_benchmark(run_config(corpus, dir / "reference", stub_endpoint(healthy)));

  StubServer flaky([&](const Json& req, int call) -> StubServer::Reply {
    if (call >= 12) return {500, R"({"error": {"message": "overloaded"}})", {}};
    return oracle(req, call);
  });
  RunConfig c = run_config(corpus, dir / "resumed", stub_endpoint(flaky));
  c.endpoints[0].max_in_flight = 1;
  EXPECT_THROW(run_benchmark(c), TransportError);
  ASSERT_TRUE(fs::exists(dir / "resumed/checkpoint.json"));

  StubServer recovered(oracle);
  c.endpoints[0].base_url = recovered.base_url();
  run_benchmark(c);
  EXPECT_FALSE(fs::exists(dir / "resumed/checkpoint.json"));
  EXPECT_LT(recovered.chat_calls(), healthy.chat_calls());
  for (const char* f : {"raw_responses.jsonl", "verdicts.jsonl", "bundle.jsonl", "metrics.json", "tables/presence.csv",
                        "tables/mcc.csv"}) {
    EXPECT_EQ(read_file(dir / ("resumed/" + std::string(f))), read_file(dir / ("reference/" + std::string(f)))) << f;
  }
}

TEST(RunBenchmark, ConfigFromJsonResolvesPaths) {
  TempDir dir;
  write_file_atomic(dir / "cfg/run.json", R"({
    "manifest": "data/manifest.jsonl", "labels": "/abs/labels.jsonl", "output_dir": "out",
    "endpoints": [{"model": "m1"}, {"model": "m2", "variant": "finetuned"}],
    "strategies": ["zero_shot", {"kind": "few_shot", "k": 2}]
  })");
  const RunConfig c = RunConfig::load(dir / "cfg/run.json");
  EXPECT_EQ(c.manifest, dir / "cfg/data/manifest.jsonl");
  EXPECT_EQ(c.labels, fs::path("/abs/labels.jsonl"));
  EXPECT_EQ(c.effective_cache_dir(), dir / "cfg/out/cache");
  EXPECT_EQ(c.endpoints[1].variant, "finetuned");
  EXPECT_EQ(c.strategies.size(), 2u);

  RunConfig dup = c;
  dup.endpoints[1].name = "m1";
  EXPECT_THROW(dup.validate(), InvalidArgument);
}

BundleItem item(const std::string& id, bool gold_yes, bool pred_yes, const std::string& strategy = "zero_shot",
                const std::string& variant = "base") {
  const LabelRecord gold = gold_yes ? LabelRecord::vulnerable_as(id, VulnClass::kReentrancy, Severity::kHigh)
                                    : LabelRecord::clean(id);
  const std::string answer = pred_yes ? "Vulnerability: Yes\nType: Reentrancy\nSeverity: High"
                                      : "Vulnerability: No\nType: None\nSeverity: None";
  return {id, strategy, "m-" + variant, "m", variant, parse_verdict(answer), gold};
}

TEST(MakeBundle, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(make_bundle({}), InvalidArgument);
  EXPECT_THROW(make_bundle({item("a", true, true), item("a", true, false)}), InvalidArgument);
  const EvalBundle b = make_bundle({item("a", true, true), item("a", true, true, "few_shot")});
  EXPECT_EQ(b.groups.size(), 2u);
  EXPECT_EQ(b.groups[0].strategy, "zero_shot");
}

TEST(RenderTables, PresenceGoldenAndOmittedStrategyNote) {
  TempDir dir;
  const EvalBundle b = make_bundle({item("a", true, true), item("b", true, false), item("c", false, false),
                                    item("d", false, false)});
  const std::vector<std::string> strategies = {"zero_shot", "chain_of_thought"};
  const RenderResult r = render_tables(b, TableFormat::kCsv, dir.path(), strategies);
  EXPECT_EQ(read_file(dir / "presence.csv"),
            "Model,Strategy,base Accuracy,base Precision,base Recall,base F1\n"
            "m,zero_shot,75,83,75,73\n");
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_NE(r.notes[0].find("chain_of_thought"), std::string::npos);
  EXPECT_NE(read_file(dir / "NOTES.txt").find("chain_of_thought"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "generation_zero_shot.csv"));
  EXPECT_FALSE(fs::exists(dir / "generation_chain_of_thought.csv"));
  const std::string mcc = read_file(dir / "mcc.csv");
  EXPECT_EQ(mcc.substr(0, mcc.find('\n')), "Model,Strategy,presence base,type base,severity base");
}

TEST(RenderTables, ImprovementColumnWhenBothVariantsExist) {
  TempDir dir;
  const EvalBundle b = make_bundle({item("a", true, false), item("b", false, false), item("c", true, true),
                                    item("a", true, true, "zero_shot", "finetuned"),
                                    item("b", false, false, "zero_shot", "finetuned"),
                                    item("c", true, true, "zero_shot", "finetuned")});
  render_tables(b, TableFormat::kMarkdown, dir.path());
  const std::string mcc = read_file(dir / "mcc.md");
  EXPECT_NE(mcc.find("presence improvement %"), std::string::npos);
  EXPECT_NE(mcc.find("| 100.00 |"), std::string::npos) << mcc;
  EXPECT_EQ(parse_table_format("md"), TableFormat::kMarkdown);
  EXPECT_THROW(parse_table_format("xlsx"), InvalidArgument);
}

TEST(HumanEval, MeanAndAccuracy) {
  std::istringstream in("sample_id,evaluator_id,score\ns1,e1,3\ns2,e1,3\ns3,e2,3\ns4,e2,2\ns5,e3,2\n");
  const HumanEvalSummary s = ingest_human_eval(in, "scores.csv");
  EXPECT_EQ(s.rows, 5u);
  EXPECT_NEAR(s.mean_score, 2.6, 1e-12);
  EXPECT_NEAR(s.accuracy * 100, 86.67, 0.005);
}

TEST(HumanEval, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(ingest_human_eval(empty, "e"), InvalidArgument);
  std::istringstream out_of_range("s1,e1,4\n");
  EXPECT_THROW(ingest_human_eval(out_of_range, "e"), ParseError);
  std::istringstream short_row("s1,3\n");
  EXPECT_THROW(ingest_human_eval(short_row, "e"), ParseError);
  std::istringstream fractional("s1,e1,2.5\n");
  EXPECT_THROW(ingest_human_eval(fractional, "e"), ParseError);
}

}  // namespace
}  // namespace vulnbench
