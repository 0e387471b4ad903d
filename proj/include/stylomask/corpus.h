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

#ifndef STYLOMASK_CORPUS_H_
#define STYLOMASK_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace stylomask {

inline constexpr std::string_view kUserSentinel = "<user>";
inline constexpr std::string_view kHashtagMarker = "#";

enum class TokenKind { kWord, kMentionSpecial, kHashtagMarker, kPunct };

std::string_view TokenKindName(TokenKind kind);
TokenKind ParseTokenKind(std::string_view name);

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::kWord;

  bool operator==(const Token&) const = default;
};

struct RawTweet {
  std::string author_id;
  std::string text;
  std::string label;
};

// One chunk of an author timeline. `tweet_boundaries` holds the token offset
// at which each non-empty source tweet starts; tweets that preprocess to
// nothing still count toward `tweet_count` but own no boundary.
struct Document {
  std::string author_id;
  std::vector<Token> tokens;
  std::optional<std::string> label;
  std::vector<size_t> tweet_boundaries;
  size_t tweet_count = 0;

  size_t size() const { return tokens.size(); }
  std::vector<std::string> Surfaces() const;
  // Space-joined surfaces.
  std::string Text() const;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<std::string> label_set;  // sorted, unique
  std::vector<Document> documents;

  size_t size() const { return documents.size(); }
};

// Lowercases, drops URLs, replaces @-mentions with "<user>", splits "#tag"
// into "#" + "tag", and peels leading/trailing punctuation into separate
// tokens. Lowercasing is ASCII-only; other bytes pass through untouched.
std::vector<Token> Preprocess(std::string_view text);

// Rebuilds tokens from surfaces produced by Preprocess (or edits of them)
// without dropping or splitting anything.
Token ClassifySurface(std::string surface);

// Splits one author's timeline into documents of at most `max_tweets`.
std::vector<Document> ChunkAuthor(std::span<const RawTweet> tweets,
                                  size_t max_tweets = 100);

// Groups tweets by author (first-appearance order), keeps timeline order
// within an author, and chunks each timeline.
Corpus BuildCorpus(std::string name, std::span<const RawTweet> tweets,
                   size_t max_tweets = 100);

// First floor(n * train_fraction) documents go to train, the rest to test.
// No shuffling.
std::pair<Corpus, Corpus> SplitCorpus(const Corpus& corpus,
                                      double train_fraction = 0.8);

// The last n documents of `test`, in order. Throws DataError when n > |test|.
std::vector<Document> SampleAttackSet(const Corpus& test, size_t n = 200);

// ---- file formats -------------------------------------------------------

// Tweet files: one JSON object per line, {"author_id", "text", "label"}.
std::vector<RawTweet> ReadTweets(std::istream& in);
std::vector<RawTweet> ReadTweetsFile(const std::string& path);
void WriteTweets(std::ostream& out, std::span<const RawTweet> tweets);

// Document stores: a header line {"format":"stylomask-docs","version":1,...}
// followed by one JSON object per document.
void WriteDocuments(std::ostream& out, const Corpus& corpus);
nlohmann::json DocumentToJson(const Document& doc);
// A missing "kinds" field re-derives kinds from the surfaces.
Document DocumentFromJson(const nlohmann::json& j);
Corpus ReadDocuments(std::istream& in);

// Loads either a tweet file (chunked on the fly) or a document store.
Corpus LoadCorpusFile(const std::string& path);
void SaveDocumentsFile(const std::string& path, const Corpus& corpus);

}  // namespace stylomask

#endif  // STYLOMASK_CORPUS_H_
