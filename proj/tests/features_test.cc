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

#include "stylomask/features.h"

#include <gtest/gtest.h>

#include <cmath>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

using Docs = std::vector<std::vector<std::string>>;

TEST(FeatureSpace, IdfFormula) {
  const Docs docs = {{"a", "b"}, {"a"}, {"a", "c"}};
  FeatureConfig cfg;
  cfg.word_ngram_orders = {1};
  const auto space = FeatureSpace::Fit(docs, cfg);
  EXPECT_DOUBLE_EQ(space.idf()[*space.IndexOf("w:a")], 1.0);
  EXPECT_NEAR(space.idf()[*space.IndexOf("w:b")], std::log(2.0) + 1.0, 1e-12);
  EXPECT_NEAR(space.idf()[*space.IndexOf("w:b")], 1.6931, 1e-4);
}

TEST(FeatureSpace, MinDfDropsHapaxes) {
  const Docs docs = {{"a", "b"}, {"a"}, {"a", "c"}};
  FeatureConfig cfg;
  cfg.word_ngram_orders = {1};
  cfg.min_df = 2;
  const auto space = FeatureSpace::Fit(docs, cfg);
  EXPECT_TRUE(space.IndexOf("w:a").has_value());
  EXPECT_FALSE(space.IndexOf("w:b").has_value());
  EXPECT_EQ(space.dimension(), 1u);
}

TEST(FeatureSpace, EmptyCorpusIsAnError) {
  EXPECT_THROW(FeatureSpace::Fit(Docs{}, FeatureConfig::WordUniBigram()), DataError);
}

TEST(FeatureSpace, IndicesAreDenseAndSorted) {
  const auto space = FeatureSpace::Fit(Docs{{"z", "y", "x"}, {"x", "q"}},
                                       FeatureConfig::WordUniBigram());
  for (size_t i = 0; i < space.dimension(); ++i) {
    EXPECT_EQ(*space.IndexOf(space.features()[i]), i);
    if (i) {
      EXPECT_LT(space.features()[i - 1], space.features()[i]);
    }
    EXPECT_GT(space.idf()[i], 0.0);
  }
}

TEST(Vectorize, OutOfVocabularyIsZero) {
  const auto space = FeatureSpace::Fit(Docs{{"a"}}, FeatureConfig::WordUniBigram());
  const std::vector<std::string> doc = {"zzz", "qqq"};
  const auto v = space.Vectorize(doc);
  EXPECT_EQ(v.nnz(), 0u);
  EXPECT_EQ(v.Norm(), 0.0);
}

TEST(Vectorize, SingleTokenIsUnit) {
  const auto space = FeatureSpace::Fit(Docs{{"a"}, {"b"}}, FeatureConfig::WordUniBigram());
  const std::vector<std::string> doc = {"a"};
  const auto v = space.Vectorize(doc);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_DOUBLE_EQ(v.values[0], 1.0);
}

TEST(Vectorize, SublinearTwoFeatures) {
  FeatureConfig cfg;
  cfg.word_ngram_orders = {1};
  cfg.sublinear_tf = true;
  const auto space = FeatureSpace::FromParts(cfg, {"w:a", "w:b"}, {1.0, 1.0});
  const std::vector<std::string> doc = {"a", "b", "a"};
  const auto v = space.Vectorize(doc);
  const double a = 1.0 + std::log(2.0), b = 1.0, n = std::sqrt(a * a + b * b);
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_NEAR(v.values[0], a / n, 1e-15);
  EXPECT_NEAR(v.values[1], b / n, 1e-15);
  EXPECT_NEAR(a, 1.6931, 1e-4);
}

TEST(Vectorize, NormIsZeroOrOne) {
  const Docs docs = {{"the", "cat", "sat"}, {"a", "dog", "sat", "down"}, {"the", "end"}};
  const auto space = FeatureSpace::Fit(docs, FeatureConfig::NGram());
  for (const auto& d : docs) EXPECT_NEAR(space.Vectorize(d).Norm(), 1.0, 1e-12);
  const std::vector<std::string> none = {"q"};
  EXPECT_EQ(space.Vectorize(none).Norm(), 0.0);
}

TEST(ExtractNgrams, CharGramsSpanTheJoinedSequence) {
  FeatureConfig cfg;
  cfg.word_ngram_orders = {};
  cfg.char_ngram_orders = {6};
  const std::vector<std::string> doc = {"<user>", "hi"};
  const auto grams = ExtractNgrams(doc, cfg);
  // "<user> hi" has 9 code points, so 4 six-grams.
  EXPECT_EQ(grams, (std::vector<std::string>{"c:<user>", "c:user> ", "c:ser> h", "c:er> hi"}));
}

TEST(ExtractNgrams, CharGramsCountCodePoints) {
  FeatureConfig cfg;
  cfg.word_ngram_orders = {};
  cfg.char_ngram_orders = {2};
  const std::vector<std::string> doc = {"éa"};
  EXPECT_EQ(ExtractNgrams(doc, cfg), (std::vector<std::string>{"c:éa"}));
}

TEST(ExtractNgrams, SpacedSurfacesSplitIntoWords) {
  FeatureConfig cfg;
  cfg.word_ngram_orders = {1, 2};
  const std::vector<std::string> doc = {"he llo", "x"};
  EXPECT_EQ(ExtractNgrams(doc, cfg),
            (std::vector<std::string>{"w:he", "w:llo", "w:x", "w:he llo", "w:llo x"}));
}

TEST(FeatureConfig, Validation) {
  FeatureConfig cfg;
  cfg.word_ngram_orders = {0};
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = FeatureConfig{};
  cfg.min_df = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

}  // namespace
}  // namespace stylomask
