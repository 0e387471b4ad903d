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

#include "stylomask/corpus.h"

#include <gtest/gtest.h>

#include <sstream>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

std::vector<std::string> Surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

TEST(Preprocess, EmptyInput) { EXPECT_TRUE(Preprocess("").empty()); }

TEST(Preprocess, DropsUrlsAndMasksMentions) {
  const auto t = Preprocess("Check http://t.co/x @Bob");
  EXPECT_EQ(Surfaces(t), (std::vector<std::string>{"check", "<user>"}));
  EXPECT_EQ(t[1].kind, TokenKind::kMentionSpecial);
}

TEST(Preprocess, SplitsHashtags) {
  const auto t = Preprocess("#Win today !");
  EXPECT_EQ(Surfaces(t), (std::vector<std::string>{"#", "win", "today", "!"}));
  EXPECT_EQ(t[0].kind, TokenKind::kHashtagMarker);
  EXPECT_EQ(t[1].kind, TokenKind::kWord);
  EXPECT_EQ(t[3].kind, TokenKind::kPunct);
}

TEST(Preprocess, PeelsPunctuationBothSides) {
  EXPECT_EQ(Surfaces(Preprocess("(Hello), world!!")),
            (std::vector<std::string>{"(", "hello", ")", ",", "world", "!", "!"}));
}

TEST(Preprocess, WwwUrlsAndTrailingPunctAfterUrl) {
  EXPECT_EQ(Surfaces(Preprocess("see www.example.com. now")),
            (std::vector<std::string>{"see", "now"}));
}

TEST(Preprocess, KeepsNonAsciiBytes) {
  const auto t = Preprocess("Café 😀");
  EXPECT_EQ(Surfaces(t), (std::vector<std::string>{"café", "😀"}));
  EXPECT_EQ(t[1].kind, TokenKind::kWord);
}

TEST(Preprocess, IdempotentOnSurfaces) {
  const std::string text = "OMG @someone #Great day!!! http://x.y/z (really) <user>";
  const auto once = Preprocess(text);
  std::string joined;
  for (const auto& t : once) joined += t.surface + " ";
  EXPECT_EQ(Preprocess(joined), once);
}

std::vector<RawTweet> Timeline(size_t n, const std::string& author = "u1",
                               const std::string& label = "female") {
  std::vector<RawTweet> out;
  for (size_t i = 0; i < n; ++i) out.push_back({author, "tweet " + std::to_string(i), label});
  return out;
}

TEST(ChunkAuthor, HundredTweetChunks) {
  const auto docs = ChunkAuthor(Timeline(250));
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[0].tweet_count, 100u);
  EXPECT_EQ(docs[1].tweet_count, 100u);
  EXPECT_EQ(docs[2].tweet_count, 50u);
  EXPECT_EQ(docs[2].tokens.front().surface, "tweet");
  EXPECT_EQ(docs[2].tokens[1].surface, "200");
}

TEST(ChunkAuthor, SingleTweetAndLongTimeline) {
  EXPECT_EQ(ChunkAuthor(Timeline(1)).size(), 1u);
  EXPECT_EQ(ChunkAuthor(Timeline(2500)).size(), 25u);
  EXPECT_TRUE(ChunkAuthor({}).empty());
}

TEST(ChunkAuthor, BoundariesSortedAndInRange) {
  auto tweets = Timeline(5);
  tweets[2].text = "http://only.a/url";
  const auto docs = ChunkAuthor(tweets);
  ASSERT_EQ(docs.size(), 1u);
  const auto& d = docs[0];
  EXPECT_EQ(d.tweet_count, 5u);
  EXPECT_EQ(d.tweet_boundaries, (std::vector<size_t>{0, 2, 4, 6}));
  for (size_t b : d.tweet_boundaries) EXPECT_LT(b, d.tokens.size());
}

TEST(ChunkAuthor, PreservesOrderAndCount) {
  const auto docs = ChunkAuthor(Timeline(230));
  size_t tweets = 0, expected = 0;
  for (const auto& d : docs) {
    tweets += d.tweet_count;
    for (size_t b : d.tweet_boundaries) {
      EXPECT_EQ(d.tokens[b + 1].surface, std::to_string(expected++));
    }
  }
  EXPECT_EQ(tweets, 230u);
}

TEST(ChunkAuthor, RejectsMixedAuthors) {
  auto tweets = Timeline(3);
  tweets[1].author_id = "other";
  EXPECT_THROW(ChunkAuthor(tweets), DataError);
}

TEST(BuildCorpus, GroupsByFirstAppearance) {
  std::vector<RawTweet> tweets = {{"b", "x", "male"}, {"a", "y", "female"}, {"b", "z", "male"}};
  const Corpus c = BuildCorpus("c", tweets);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.documents[0].author_id, "b");
  EXPECT_EQ(c.documents[0].size(), 2u);
  EXPECT_EQ(c.label_set, (std::vector<std::string>{"female", "male"}));
}

TEST(BuildCorpus, InconsistentLabelIsAnError) {
  std::vector<RawTweet> tweets = {{"a", "x", "male"}, {"a", "y", "female"}};
  EXPECT_THROW(BuildCorpus("c", tweets), DataError);
}

Corpus Numbered(size_t n) {
  Corpus c;
  c.name = "n";
  c.label_set = {"female", "male"};
  for (size_t i = 0; i < n; ++i) {
    Document d;
    d.author_id = std::to_string(i);
    d.label = i % 2 ? "male" : "female";
    c.documents.push_back(d);
  }
  return c;
}

TEST(SplitCorpus, FloorSplitNoShuffle) {
  auto [tr, te] = SplitCorpus(Numbered(10));
  EXPECT_EQ(tr.size(), 8u);
  EXPECT_EQ(te.size(), 2u);
  EXPECT_EQ(te.documents[0].author_id, "8");
  auto [tr5, te5] = SplitCorpus(Numbered(5));
  EXPECT_EQ(tr5.size(), 4u);
  EXPECT_EQ(te5.size(), 1u);
  auto [tr0, te0] = SplitCorpus(Numbered(0));
  EXPECT_EQ(tr0.size() + te0.size(), 0u);
}

TEST(SplitCorpus, LargeSplitArithmetic) {
  auto [tr, te] = SplitCorpus(Numbered(59075));
  EXPECT_EQ(tr.size(), 47260u);
  EXPECT_EQ(te.size(), 11815u);
  // The published 47,298 / 11,777 split is within 0.1% of this.
  EXPECT_NEAR(static_cast<double>(tr.size()), 47298.0, 59075 * 0.001);
}

TEST(SplitCorpus, InvalidFraction) {
  EXPECT_THROW(SplitCorpus(Numbered(3), 0.0), ConfigError);
  EXPECT_THROW(SplitCorpus(Numbered(3), 1.0), ConfigError);
}

TEST(SampleAttackSet, LastN) {
  const Corpus c = Numbered(1000);
  const auto s = SampleAttackSet(c, 200);
  ASSERT_EQ(s.size(), 200u);
  EXPECT_EQ(s.front().author_id, "800");
  EXPECT_EQ(s.back().author_id, "999");
  EXPECT_EQ(SampleAttackSet(c, 1000).size(), 1000u);
  EXPECT_THROW(SampleAttackSet(c, 1001), DataError);
}

TEST(DocumentStore, RoundTrip) {
  const Corpus c = BuildCorpus("x", Timeline(120, "u", "male"));
  std::stringstream ss;
  WriteDocuments(ss, c);
  const Corpus back = ReadDocuments(ss);
  EXPECT_EQ(back.name, "x");
  EXPECT_EQ(back.label_set, c.label_set);
  EXPECT_EQ(back.documents, c.documents);
}

TEST(DocumentStore, RejectsMissingHeader) {
  std::stringstream ss("{\"author_id\":\"a\"}\n");
  EXPECT_THROW(ReadDocuments(ss), DataError);
}

TEST(Tweets, RoundTripAndErrors) {
  auto tweets = Timeline(3);
  tweets[0].text = "quote \" and \\ and ünïcode";
  std::stringstream ss;
  WriteTweets(ss, tweets);
  const auto back = ReadTweets(ss);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].text, tweets[0].text);
  std::stringstream bad("{not json}\n");
  EXPECT_THROW(ReadTweets(bad), DataError);
  std::stringstream no_author("{\"author_id\":\"\",\"text\":\"x\",\"label\":\"m\"}\n");
  EXPECT_THROW(ReadTweets(no_author), DataError);
}

}  // namespace
}  // namespace stylomask
