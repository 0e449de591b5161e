// Copyright 2026 The Typelink Authors.
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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "worlds.hpp"

namespace {

using namespace typelink;
using nlohmann::json;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new worlds::TempDir("cli");
    auto [rc, out] = run("synth --seed 3 --out " + w());
    ASSERT_EQ(rc, 0) << out;
    auto [lrc, lout] = run("learnability --corpus " + w("corpus.jsonl") + " --graph " + w() + " --out " +
                           w("pool.tsv") + " --max-roots 40 --runs 2 --seed 1");
    ASSERT_EQ(lrc, 0) << lout;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static std::pair<int, std::string> run(const std::string& args) {
    return worlds::run_command(std::string(TYPELINK_CLI) + " " + args);
  }
  static std::string w(const std::string& name = {}) {
    return name.empty() ? dir_->path.string() : (dir_->path / name).string();
  }
  static std::string world_flags() {
    return " --graph " + w() + " --links " + w("links.tsv") + " --corpus " + w("corpus.jsonl");
  }

  static worlds::TempDir* dir_;
};

worlds::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, SynthWritesAWorld) {
  for (const char* f : {"entities.tsv", "edges.tsv", "links.tsv", "corpus.jsonl", "latent_system.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir_->path / f)) << f;
  }
  auto graph = load_graph(dir_->path);
  auto corpus = load_corpus(dir_->path / "corpus.jsonl");
  auto expect = generate_synthetic_world(3, standard_world_config());
  EXPECT_TRUE(graph == expect.graph);
  EXPECT_EQ(corpus, expect.corpus);
}

TEST_F(Cli, EvaluateEmptySystemIsGreedy) {
  auto [rc, out] = run("evaluate" + world_flags());
  ASSERT_EQ(rc, 0) << out;
  auto j = json::parse(out);
  EXPECT_EQ(j["s_oracle"], j["s_greedy"]);
  auto world = generate_synthetic_world(3, standard_world_config());
  EXPECT_DOUBLE_EQ(j["s_greedy"].get<double>(),
                   s_greedy(EvalSet::build(world.corpus, world.stats, world.graph)).value());
}

TEST_F(Cli, LearnabilityIsWorkerIndependent) {
  auto [rc, out] = run("--workers 4 learnability --corpus " + w("corpus.jsonl") + " --graph " + w() + " --out " +
                       w("pool4.tsv") + " --max-roots 40 --runs 2 --seed 1");
  ASSERT_EQ(rc, 0) << out;
  EXPECT_EQ(slurp(dir_->path / "pool.tsv"), slurp(dir_->path / "pool4.tsv"));
  std::ifstream in(dir_->path / "pool.tsv");
  EXPECT_FALSE(read_learnability_tsv(in, "pool.tsv").empty());
}

TEST_F(Cli, SearchIsReproducible) {
  for (const char* method : {"greedy", "cem", "ga"}) {
    const std::string base = std::string(" --method ") + method + " --pool " + w("pool.tsv") + world_flags() +
                             " --seed 2 --cem-samples 60 --cem-elites 12 --ga-population 30 --ga-generations 5";
    auto [rc1, out1] = run("--workers 1 search" + base + " --out " + w("a.json") + " --trace " + w("a.tsv"));
    ASSERT_EQ(rc1, 0) << out1;
    auto [rc2, out2] = run("--workers 4 search" + base + " --out " + w("b.json") + " --trace " + w("b.tsv"));
    ASSERT_EQ(rc2, 0) << out2;
    EXPECT_EQ(slurp(dir_->path / "a.json"), slurp(dir_->path / "b.json")) << method;
    EXPECT_EQ(slurp(dir_->path / "a.tsv"), slurp(dir_->path / "b.tsv")) << method;
    EXPECT_NO_THROW(load_system(dir_->path / "a.json"));
  }
  auto [rc, out] = run("search --method random --random-k 3 --random-trials 5 --pool " + w("pool.tsv") +
                       world_flags() + " --out " + w("r.json"));
  ASSERT_EQ(rc, 0) << out;
  EXPECT_EQ(load_system(dir_->path / "r.json").axes.size(), 3u);
}

TEST_F(Cli, LambdaSweepOneLambdaTwoSeeds) {
  auto [rc, out] = run("lambda-sweep --method greedy --lambdas 0.001 --seeds 2 --pool " + w("pool.tsv") +
                       world_flags() + " --out " + w("sweep.tsv"));
  ASSERT_EQ(rc, 0) << out;
  const auto text = slurp(dir_->path / "sweep.tsv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.rfind("lambda\taccuracy_mean", 0), 0u);
  // Greedy ignores the seed, so the two runs agree.
  const std::string line = text.substr(text.find('\n') + 1, text.size() - text.find('\n') - 2);
  const auto row = split(line, '\t');
  ASSERT_EQ(row.size(), 7u);
  EXPECT_EQ(row[2], "0");
}

TEST_F(Cli, TrainPredictFitLink) {
  auto [rs, os] = run("search --method greedy --max-axes 6 --pool " + w("pool.tsv") + world_flags() + " --out " +
                      w("sys.json"));
  ASSERT_EQ(rs, 0) << os;
  auto [rt, ot] = run("train --corpus " + w("corpus.jsonl") + " --graph " + w() + " --system " + w("sys.json") +
                      " --out " + w("model.json") + " --loss " + w("loss.tsv") +
                      " --epochs 1 --dim 8 --hidden 8 --radius 2 --lr 0.01");
  ASSERT_EQ(rt, 0) << ot;
  auto [rp, op] = run("predict --model " + w("model.json") + " --corpus " + w("corpus.jsonl") + " --out " +
                      w("beliefs.jsonl"));
  ASSERT_EQ(rp, 0) << op;
  std::ifstream beliefs(dir_->path / "beliefs.jsonl");
  std::string first;
  std::getline(beliefs, first);
  EXPECT_TRUE(json::parse(first).contains("beliefs"));
  auto [rf, of] = run("fit --corpus " + w("corpus.jsonl") + " --model " + w("model.json") + " --system " +
                      w("sys.json") + " --links " + w("links.tsv") + " --graph " + w() + " --out " +
                      w("params.json") + " --alphas 0,1 --betas 0,0.5");
  ASSERT_EQ(rf, 0) << of;
  EXPECT_NO_THROW(load_params(w("params.json")));
  auto [rl, ol] = run("link --corpus " + w("corpus.jsonl") + " --model " + w("model.json") + " --system " +
                      w("sys.json") + " --links " + w("links.tsv") + " --graph " + w() + " --params " +
                      w("params.json") + " --out " + w("decisions.jsonl"));
  ASSERT_EQ(rl, 0) << ol;
  auto summary = json::parse(ol.substr(ol.find('{')));
  EXPECT_GE(summary["accuracy"].get<double>(), summary["s_greedy"].get<double>());
  auto [rq, oq] = run("link --pure-product --corpus " + w("corpus.jsonl") + " --model " + w("model.json") +
                      " --system " + w("sys.json") + " --links " + w("links.tsv") + " --graph " + w() + " --out " +
                      w("product.jsonl"));
  ASSERT_EQ(rq, 0) << oq;
  EXPECT_TRUE(std::filesystem::exists(dir_->path / "product.jsonl"));
}

TEST_F(Cli, SimplifyWritesReport) {
  auto [rc, out] = run("simplify --graph " + w() + " --links " + w("links.tsv") + " --out " + w("simple.tsv") +
                       " --report " + w("report.tsv"));
  ASSERT_EQ(rc, 0) << out;
  const auto report = slurp(dir_->path / "report.tsv");
  EXPECT_EQ(report.rfind("step\treplacements\tlinks_changed", 0), 0u);
  auto graph = load_graph(dir_->path);
  EXPECT_NO_THROW(load_links(dir_->path / "simple.tsv", graph));
}

TEST_F(Cli, ErrorsExitNonZero) {
  auto [rc, out] = run("evaluate --graph /nonexistent --links x --corpus y");
  EXPECT_EQ(rc, 1);
  EXPECT_NE(out.find("error [io_error]"), std::string::npos) << out;
  auto [rc2, out2] = run("search --method anneal --pool x --graph y --corpus z --links q --out o");
  EXPECT_NE(rc2, 0);
  auto [rc3, out3] = run("no-such-command");
  EXPECT_NE(rc3, 0);
}

}  // namespace
