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

#include "stylomask/batch.h"

#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "stylomask/errors.h"
#include "stylomask/synth.h"
#include "stylomask/toy_lm.h"

namespace stylomask {
namespace {

struct Setup {
  SynthOutput synth;
  Corpus train, test;
  TextClassifier model;
};

const Setup& Shared() {
  static const Setup s = [] {
    Setup s;
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.authors_per_class = 80;
    s.synth = GenerateSynthetic(cfg);
    std::tie(s.train, s.test) = SplitCorpus(BuildCorpus("synthetic", s.synth.substitute));
    s.model = TrainTextClassifier(s.train.documents, TrainSpec{});
    return s;
  }();
  return s;
}

std::vector<Document> FirstDocs(size_t n) {
  // Held-out documents; training documents sit far from the boundary.
  const auto& docs = Shared().test.documents;
  return {docs.begin(), docs.begin() + static_cast<long>(n)};
}

TEST(AttackConfigJson, RoundTripAndDefaults) {
  AttackConfig c;
  c.generator = Generator::kDropout;
  c.mode = AttackMode::kLoopCheck;
  c.k_targets = 7;
  c.delta = 0.25;
  c.rerank = Rerank::kMlmSim;
  c.seed = 1234567890123ULL;
  const auto back = AttackConfigFromJson(AttackConfigToJson(c));
  EXPECT_EQ(AttackConfigToJson(back), AttackConfigToJson(c));
  const auto defaults = AttackConfigFromJson(nlohmann::json::object());
  EXPECT_EQ(AttackConfigToJson(defaults), AttackConfigToJson(AttackConfig{}));
  EXPECT_THROW(AttackConfigFromJson({{"mode", "sideways"}}), ConfigError);
  EXPECT_THROW(AttackConfigFromJson({{"k_targets", "many"}}), ConfigError);
  EXPECT_THROW(AttackConfigFromJson({{"delta", 3.0}}), ConfigError);
}

TEST(RunAttackBatch, WorkerCountDoesNotChangeResults) {
  const auto docs = FirstDocs(24);
  AttackConfig cfg;
  const auto& s = Shared();
  const auto one = RunAttackBatch(s.model, docs, cfg, &s.synth.embeddings, {}, 1);
  const auto many = RunAttackBatch(s.model, docs, cfg, &s.synth.embeddings, {}, 6);
  ASSERT_EQ(one.size(), docs.size());
  std::stringstream a, b;
  WriteAttackResults(a, docs, one);
  WriteAttackResults(b, docs, many);
  EXPECT_EQ(a.str(), b.str());
  size_t flipped = 0;
  for (const auto& r : one) flipped += r.flipped;
  EXPECT_GT(flipped, 0u);
}

TEST(RunAttackBatch, LanguageModelWorkersGetTheirOwnProvider) {
  const auto docs = FirstDocs(6);
  const auto& s = Shared();
  AttackConfig cfg;
  cfg.generator = Generator::kMasked;
  cfg.k_targets = 5;
  std::atomic<int> made{0};
  ProviderFactory factory = [&] {
    ++made;
    return std::make_unique<ToyLm>(s.synth.vocabulary);
  };
  const auto r1 = RunAttackBatch(s.model, docs, cfg, nullptr, factory, 1);
  const auto r3 = RunAttackBatch(s.model, docs, cfg, nullptr, factory, 3);
  EXPECT_EQ(made.load(), 4);
  for (size_t i = 0; i < docs.size(); ++i) EXPECT_EQ(r1[i].edits, r3[i].edits);
  EXPECT_THROW(RunAttackBatch(s.model, docs, cfg, nullptr, {}, 2), ConfigError);
}

TEST(RunAttackBatch, FailuresPropagate) {
  auto docs = FirstDocs(3);
  const auto& s = Shared();
  docs[1].label.reset();
  EXPECT_THROW(RunAttackBatch(s.model, docs, AttackConfig{}, &s.synth.embeddings, {}, 2),
               DataError);
  docs = FirstDocs(3);
  AttackConfig cfg;
  cfg.generator = Generator::kMasked;
  ProviderFactory broken = []() -> std::unique_ptr<LmProvider> {
    throw ProviderError("no server");
  };
  EXPECT_THROW(RunAttackBatch(s.model, docs, cfg, nullptr, broken, 2), ProviderError);
}

TEST(AttackResultsFile, RoundTripReplaysEdits) {
  const auto docs = FirstDocs(5);
  const auto& s = Shared();
  const auto results = RunAttackBatch(s.model, docs, AttackConfig{}, &s.synth.embeddings, {}, 1);
  std::stringstream ss;
  WriteAttackResults(ss, docs, results);
  const auto back = ReadAttackResults(ss);
  ASSERT_EQ(back.size(), docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    EXPECT_EQ(back[i].original, docs[i]);
    EXPECT_EQ(back[i].adversarial, results[i].adversarial);
    EXPECT_EQ(back[i].edits, results[i].edits);
    EXPECT_EQ(back[i].queries, results[i].substitute_queries);
  }
}

TEST(AttackResultsFile, DetectsTampering) {
  const auto docs = FirstDocs(1);
  AttackResult r;
  r.adversarial = docs[0];
  r.edits = {{0, docs[0].tokens[0].surface, "tampered"}};
  auto j = AttackRecordToJson(0, docs[0], r);  // adversarial omits the edit
  std::stringstream ss(j.dump() + "\n");
  EXPECT_THROW(ReadAttackResults(ss), DataError);
  std::stringstream junk("{\"index\": 0}\n");
  EXPECT_THROW(ReadAttackResults(junk), DataError);
  EXPECT_THROW(ReadAttackResultsFile("/nonexistent/results.jsonl"), DataError);
  std::vector<AttackResult> none;
  std::stringstream out;
  EXPECT_THROW(WriteAttackResults(out, docs, none), ConfigError);
}

}  // namespace
}  // namespace stylomask
