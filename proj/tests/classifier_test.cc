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

#include "stylomask/classifier.h"

#include <gtest/gtest.h>

#include <sstream>

#include "stylomask/errors.h"
#include "stylomask/rng.h"
#include "test_util.h"

namespace stylomask {
namespace {

SparseVector Dense1(double v) {
  SparseVector x;
  x.indices = {0};
  x.values = {v};
  return x;
}

TEST(LinearClassifier, ZeroWeightsGiveBias) {
  LinearClassifier m({0.0, 0.0}, 0.25, LossKind::kLogistic, {"neg", "pos"});
  EXPECT_DOUBLE_EQ(m.Logit(Dense1(1.0), "pos"), 0.25);
  EXPECT_DOUBLE_EQ(m.Logit(Dense1(1.0), "neg"), -0.25);
}

TEST(LinearClassifier, AntisymmetricLogitsAndTies) {
  LinearClassifier m({1.0}, -0.5, LossKind::kLogistic, {"neg", "pos"});
  const auto x = Dense1(0.5);
  EXPECT_EQ(m.DecisionValue(x), 0.0);
  EXPECT_EQ(m.Logit(x, "pos"), -m.Logit(x, "neg"));
  EXPECT_EQ(m.Predict(x), "pos");
  EXPECT_EQ(m.Predict(Dense1(0.4)), "neg");
}

TEST(LinearClassifier, HandComputedDotProduct) {
  const auto space = FeatureSpace::FromParts(FeatureConfig::WordUniBigram(),
                                             {"w:a", "w:a b", "w:b"}, {1.0, 2.0, 1.5});
  TextClassifier tc(space, LinearClassifier({3.0, -1.0, 0.5}, 0.1, LossKind::kLogistic,
                                            {"neg", "pos"}));
  const std::vector<std::string> doc = {"a", "b"};
  const double n = std::sqrt(1.0 + 4.0 + 2.25);
  EXPECT_NEAR(tc.Logit(doc, "pos"), (3.0 * 1.0 - 1.0 * 2.0 + 0.5 * 1.5) / n + 0.1, 1e-15);
}

TEST(LinearClassifier, ScaleInvariantArgmax) {
  SplitMix64 rng(3);
  std::vector<double> w(5);
  for (double& x : w) x = rng.Uniform() - 0.5;
  LinearClassifier a(w, 0.1, LossKind::kLogistic, {"neg", "pos"});
  for (double& x : w) x *= 7.5;
  LinearClassifier b(w, 0.75, LossKind::kLogistic, {"neg", "pos"});
  for (int t = 0; t < 100; ++t) {
    SparseVector x;
    for (uint32_t k = 0; k < 5; ++k) {
      x.indices.push_back(k);
      x.values.push_back(rng.Uniform() - 0.5);
    }
    EXPECT_EQ(a.Predict(x), b.Predict(x));
  }
}

TEST(LinearClassifier, RejectsBadLabels) {
  EXPECT_THROW(LinearClassifier({1.0}, 0.0, LossKind::kLogistic, {"only"}), ConfigError);
  LinearClassifier m({1.0}, 0.0, LossKind::kLogistic, {"neg", "pos"});
  EXPECT_THROW(m.Logit(Dense1(1.0), "other"), ConfigError);
}

TEST(TrainLogistic, SymmetricDataHasZeroBias) {
  const std::vector<SparseVector> x = {Dense1(1.0), Dense1(-1.0)};
  const std::vector<std::string> y = {"pos", "neg"};
  const auto m = TrainLogistic(x, y, 1);
  EXPECT_NEAR(m.bias(), 0.0, 1e-9);
  EXPECT_GT(m.weights()[0], 0.0);
}

TEST(TrainLogistic, WeightSignFollowsPositiveExample) {
  const std::vector<SparseVector> x = {Dense1(1.0), Dense1(-1.0)};
  const std::vector<std::string> y = {"neg", "pos"};
  const auto m = TrainLogistic(x, y, 1);
  EXPECT_LT(m.weights()[0], 0.0);
}

TEST(TrainLogistic, SeparableSetFitsPerfectlyAndMonotone) {
  SplitMix64 rng(11);
  std::vector<SparseVector> x;
  std::vector<std::string> y;
  for (int i = 0; i < 60; ++i) {
    SparseVector v;
    const bool pos = i % 2 == 0;
    v.indices = {0, 1, 2};
    v.values = {pos ? 1.0 + rng.Uniform() : -1.0 - rng.Uniform(), rng.Uniform() - 0.5,
                rng.Uniform() - 0.5};
    x.push_back(v);
    y.push_back(pos ? "pos" : "neg");
  }
  TrainTrace trace;
  const auto m = TrainLogistic(x, y, 3, {.C = 10.0}, &trace);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_EQ(m.Predict(x[i]), y[i]);
  ASSERT_GE(trace.objective.size(), 2u);
  for (size_t i = 1; i < trace.objective.size(); ++i) {
    EXPECT_LT(trace.objective[i], trace.objective[i - 1]);
  }
  EXPECT_LE(trace.iterations, 1000);
}

TEST(TrainLogistic, SingleClassIsAnError) {
  const std::vector<SparseVector> x = {Dense1(1.0), Dense1(2.0)};
  const std::vector<std::string> y = {"pos", "pos"};
  EXPECT_THROW(TrainLogistic(x, y, 1), DataError);
}

TEST(TrainLogistic, Deterministic) {
  const std::vector<SparseVector> x = {Dense1(1.0), Dense1(-0.5), Dense1(0.2)};
  const std::vector<std::string> y = {"pos", "neg", "neg"};
  const auto a = TrainLogistic(x, y, 1), b = TrainLogistic(x, y, 1);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
}

TEST(TrainHingeSvm, SymmetryAndSign) {
  const std::vector<SparseVector> x = {Dense1(1.0), Dense1(-1.0)};
  EXPECT_EQ(TrainHingeSvm(x, std::vector<std::string>{"pos", "neg"}, 1).bias(), 0.0);
  EXPECT_GT(TrainHingeSvm(x, std::vector<std::string>{"pos", "neg"}, 1).weights()[0], 0.0);
  EXPECT_LT(TrainHingeSvm(x, std::vector<std::string>{"neg", "pos"}, 1).weights()[0], 0.0);
}

TEST(TrainHingeSvm, SeparableSet) {
  SplitMix64 rng(5);
  std::vector<SparseVector> x;
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) {
    const bool pos = i % 3 == 0;
    SparseVector v;
    v.indices = {0, 1};
    v.values = {pos ? 2.0 + rng.Uniform() : -2.0 - rng.Uniform(), rng.Uniform()};
    x.push_back(v);
    y.push_back(pos ? "pos" : "neg");
  }
  const auto m = TrainHingeSvm(x, y, 2);
  EXPECT_EQ(m.kind(), LossKind::kHinge);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_EQ(m.Predict(x[i]), y[i]);
}

TEST(TextClassifier, SaveLoadRoundTripIsExact) {
  std::vector<Document> docs = {testing::MakeDoc({"i", "love", "it"}, "pos"),
                                testing::MakeDoc({"i", "hate", "it"}, "neg"),
                                testing::MakeDoc({"love", "love"}, "pos"),
                                testing::MakeDoc({"hate", "this"}, "neg")};
  for (const auto kind : {LossKind::kLogistic, LossKind::kHinge}) {
    TrainSpec spec{kind, kind == LossKind::kHinge ? FeatureConfig::NGram()
                                                  : FeatureConfig::WordUniBigram(), 1.0};
    const auto tc = TrainTextClassifier(docs, spec);
    std::stringstream a;
    tc.Save(a);
    const auto back = TextClassifier::Load(a);
    std::stringstream b;
    back.Save(b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(back.model().weights(), tc.model().weights());
    EXPECT_EQ(back.space().idf(), tc.space().idf());
    for (const auto& d : docs) EXPECT_EQ(back.Logit(d, "pos"), tc.Logit(d, "pos"));
  }
}

TEST(TextClassifier, LoadRejectsGarbage) {
  std::stringstream s("{\"format\":\"something-else\"}");
  EXPECT_THROW(TextClassifier::Load(s), DataError);
}

TEST(LossKind, Names) {
  EXPECT_EQ(ParseLossKind("lr"), LossKind::kLogistic);
  EXPECT_EQ(ParseLossKind("svm"), LossKind::kHinge);
  EXPECT_EQ(LossKindName(LossKind::kHinge), "hinge");
  EXPECT_THROW(ParseLossKind("tree"), ConfigError);
}

TEST(Sigmoid, Values) {
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_NEAR(Sigmoid(2.0) + Sigmoid(-2.0), 1.0, 1e-15);
  EXPECT_GT(Sigmoid(800.0), 0.99);
  EXPECT_GE(Sigmoid(-800.0), 0.0);
}

}  // namespace
}  // namespace stylomask
