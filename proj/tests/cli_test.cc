// Copyright 2026 The Stylomask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the stylomask binary as a subprocess.

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  static int counter = 0;
  const std::string log = ::testing::TempDir() + "/cli_out_" + std::to_string(::getpid()) +
                          "_" + std::to_string(counter++) + ".txt";
  const std::string cmd = std::string(STYLOMASK_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(log);
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::path(::testing::TempDir()) / ("stylomask_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    ASSERT_EQ(RunCli("synth --out-dir " + P("data") + " --seed 3 --authors-per-class 40").code, 0);
    ASSERT_EQ(RunCli("train --corpus " + P("data/substitute.jsonl") + " --out " + P("sub.model"))
                  .code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string P(const std::string& rel) { return (dir_ / rel).string(); }

  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(RunCli("--help").code, 0);
  EXPECT_EQ(RunCli("attack --help").code, 0);
  EXPECT_EQ(RunCli("").code, 1);
  EXPECT_EQ(RunCli("frobnicate").code, 1);
  EXPECT_EQ(RunCli("toy-lm --vocab /dev/null --port 70000").code, 1);
}

TEST_F(CliTest, SynthWritesTheExpectedFiles) {
  for (const char* f : {"substitute.jsonl", "target.jsonl", "vocab.txt", "embeddings.txt",
                        "markers.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "data" / f)) << f;
  }
}

TEST_F(CliTest, TrainIsDeterministicAndReportsAccuracy) {
  const auto r = RunCli("train --corpus " + P("data/substitute.jsonl") + " --out " + P("again.model"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("accuracy"), std::string::npos) << r.out;
  EXPECT_EQ(Slurp(P("sub.model")), Slurp(P("again.model")));
  EXPECT_TRUE(fs::exists(P("again.model.manifest.json")));
}

TEST_F(CliTest, DataErrorsExitTwo) {
  EXPECT_EQ(RunCli("train --corpus " + P("missing.jsonl") + " --out " + P("x.model")).code, 2);
  EXPECT_EQ(RunCli("attack --model " + P("missing.model") + " --docs " + P("data/target.jsonl") +
                " --out " + P("x.jsonl") + " --generator leet")
                .code,
            2);
  std::ofstream(P("empty.jsonl")).close();
  EXPECT_EQ(RunCli("eval --target " + P("sub.model") + " --docs " + P("empty.jsonl") + " --out " +
                P("empty.tsv"))
                .code,
            2);
}

TEST_F(CliTest, ConfigAndProviderErrors) {
  const std::string base = "attack --model " + P("sub.model") + " --docs " +
                           P("data/target.jsonl") + " --out " + P("x.jsonl") + " --sample 3";
  EXPECT_EQ(RunCli(base + " --generator mb").code, 1);
  EXPECT_EQ(RunCli(base + " --generator ws").code, 1);
  EXPECT_EQ(RunCli(base + " --generator bogus").code, 1);
  EXPECT_EQ(RunCli(base + " --generator mb --lm 127.0.0.1:1").code, 3);
  EXPECT_EQ(RunCli(base + " --generator leet").code, 0);
}

TEST_F(CliTest, AttackTwiceIsByteIdentical) {
  const std::string base = "attack --model " + P("sub.model") + " --docs " +
                           P("data/target.jsonl") + " --sample 20 --embeddings " +
                           P("data/embeddings.txt") + " --seed 4";
  ASSERT_EQ(RunCli(base + " --out " + P("a1.jsonl") + " --workers 1").code, 0);
  ASSERT_EQ(RunCli(base + " --out " + P("a2.jsonl") + " --workers 4").code, 0);
  EXPECT_EQ(Slurp(P("a1.jsonl")), Slurp(P("a2.jsonl")));
  EXPECT_FALSE(Slurp(P("a1.jsonl")).empty());
  const auto m1 = nlohmann::json::parse(Slurp(P("a1.jsonl.manifest.json")));
  EXPECT_EQ(m1["config"]["seed"], 4);

  const std::string mb = "attack --model " + P("sub.model") + " --docs " +
                         P("data/target.jsonl") + " --sample 5 --generator mb --lm toy:" +
                         P("data/vocab.txt");
  ASSERT_EQ(RunCli(mb + " --out " + P("m1.jsonl")).code, 0);
  ASSERT_EQ(RunCli(mb + " --out " + P("m2.jsonl")).code, 0);
  EXPECT_EQ(Slurp(P("m1.jsonl")), Slurp(P("m2.jsonl")));

  const auto e = RunCli("eval --target " + P("sub.model") + " --substitute " + P("sub.model") +
                     " --docs " + P("a1.jsonl") + " --out " + P("report.tsv") +
                     " --condition ws/loop_nocheck");
  ASSERT_EQ(e.code, 0) << e.out;
  const std::string tsv = Slurp(P("report.tsv"));
  EXPECT_NE(tsv.find("ws/loop_nocheck"), std::string::npos);

  ASSERT_EQ(RunCli("eval --target " + P("sub.model") + " --docs " + P("a1.jsonl") + " --out " +
                   P("default.tsv") + " --no-encoding")
                .code,
            0);
  EXPECT_NE(Slurp(P("default.tsv")).find("\nattacked\t"), std::string::npos);
}

TEST_F(CliTest, UnattackedEvalHasEqualPreAndPost) {
  ASSERT_EQ(RunCli("prepare --input " + P("data/target.jsonl") + " --out " + P("tgt") +
                " --sample 10").code,
            0);
  const auto e = RunCli("eval --target " + P("sub.model") + " --docs " + P("tgt.sample.jsonl") +
                     " --out " + P("plain.tsv") + " --no-encoding");
  ASSERT_EQ(e.code, 0) << e.out;
  std::istringstream in(Slurp(P("plain.tsv")));
  std::vector<std::vector<std::string>> table;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, '\t');) cells.push_back(cell);
    table.push_back(cells);
  }
  ASSERT_EQ(table.size(), 2u);
  ASSERT_EQ(table[0].size(), table[1].size());
  std::map<std::string, std::string> row;
  for (size_t i = 0; i < table[0].size(); ++i) row[table[0][i]] = table[1][i];
  EXPECT_EQ(row["target_pre"], row["target_post"]);
  EXPECT_EQ(row["condition"], "unattacked");
}

}  // namespace
