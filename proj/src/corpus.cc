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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"
#include "stylomask/errors.h"

namespace stylomask {
namespace {

using nlohmann::json;

bool IsAsciiPunct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsUrl(std::string_view s) {
  return s.starts_with("http://") || s.starts_with("https://") ||
         s.starts_with("www.");
}

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

void EmitPunct(std::string_view run, std::vector<Token>& out) {
  for (char c : run) out.push_back(ClassifySurface(std::string(1, c)));
}

void TokenizeChunk(std::string_view chunk, std::vector<Token>& out) {
  if (IsUrl(chunk)) return;
  if (chunk == kUserSentinel) {
    out.push_back({std::string(kUserSentinel), TokenKind::kMentionSpecial});
    return;
  }
  size_t end = chunk.size();
  while (end > 0 && IsAsciiPunct(chunk[end - 1])) --end;
  const std::string_view trailing = chunk.substr(end);
  std::string_view core = chunk.substr(0, end);

  size_t begin = 0;
  while (begin < core.size() && IsAsciiPunct(core[begin])) {
    const char c = core[begin];
    if ((c == '@' || c == '#') && begin + 1 < core.size() &&
        !IsAsciiPunct(core[begin + 1])) {
      break;
    }
    ++begin;
  }
  EmitPunct(core.substr(0, begin), out);
  core = core.substr(begin);

  if (!core.empty()) {
    if (IsUrl(core)) {
      // "(http://...)": the URL goes, its brackets stay.
    } else if (core.front() == '@') {
      out.push_back({std::string(kUserSentinel), TokenKind::kMentionSpecial});
    } else if (core.front() == '#') {
      out.push_back({std::string(kHashtagMarker), TokenKind::kHashtagMarker});
      out.push_back({std::string(core.substr(1)), TokenKind::kWord});
    } else {
      out.push_back({std::string(core), TokenKind::kWord});
    }
  }
  EmitPunct(trailing, out);
}

std::optional<std::string> OptionalLabel(const std::string& label) {
  if (label.empty()) return std::nullopt;
  return label;
}

std::vector<std::string> CollectLabels(std::span<const Document> docs) {
  std::set<std::string> labels;
  for (const auto& d : docs) {
    if (d.label) labels.insert(*d.label);
  }
  return {labels.begin(), labels.end()};
}

char KindCode(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord: return 'w';
    case TokenKind::kMentionSpecial: return 'm';
    case TokenKind::kHashtagMarker: return 'h';
    case TokenKind::kPunct: return 'p';
  }
  return 'w';
}

TokenKind KindFromCode(char c) {
  switch (c) {
    case 'w': return TokenKind::kWord;
    case 'm': return TokenKind::kMentionSpecial;
    case 'h': return TokenKind::kHashtagMarker;
    case 'p': return TokenKind::kPunct;
  }
  throw DataError(std::string("unknown token kind code '") + c + "'");
}

}  // namespace

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord: return "word";
    case TokenKind::kMentionSpecial: return "mention_special";
    case TokenKind::kHashtagMarker: return "hashtag_marker";
    case TokenKind::kPunct: return "punct";
  }
  return "word";
}

TokenKind ParseTokenKind(std::string_view name) {
  if (name == "word") return TokenKind::kWord;
  if (name == "mention_special") return TokenKind::kMentionSpecial;
  if (name == "hashtag_marker") return TokenKind::kHashtagMarker;
  if (name == "punct") return TokenKind::kPunct;
  throw DataError("unknown token kind: " + std::string(name));
}

std::vector<std::string> Document::Surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::string Document::Text() const {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

std::vector<Token> Preprocess(std::string_view text) {
  const std::string lowered = AsciiLower(text);
  std::vector<Token> out;
  size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && IsAsciiSpace(lowered[i])) ++i;
    size_t j = i;
    while (j < lowered.size() && !IsAsciiSpace(lowered[j])) ++j;
    if (j > i) TokenizeChunk(std::string_view(lowered).substr(i, j - i), out);
    i = j;
  }
  return out;
}

Token ClassifySurface(std::string surface) {
  if (surface == kUserSentinel) return {std::move(surface), TokenKind::kMentionSpecial};
  if (surface == kHashtagMarker) return {std::move(surface), TokenKind::kHashtagMarker};
  const bool all_punct = !surface.empty() &&
                         std::all_of(surface.begin(), surface.end(), IsAsciiPunct);
  return {std::move(surface), all_punct ? TokenKind::kPunct : TokenKind::kWord};
}

std::vector<Document> ChunkAuthor(std::span<const RawTweet> tweets,
                                  size_t max_tweets) {
  if (max_tweets == 0) throw ConfigError("max_tweets must be positive");
  std::vector<Document> docs;
  for (size_t start = 0; start < tweets.size(); start += max_tweets) {
    const size_t stop = std::min(tweets.size(), start + max_tweets);
    Document doc;
    doc.author_id = tweets[start].author_id;
    doc.label = OptionalLabel(tweets[start].label);
    for (size_t k = start; k < stop; ++k) {
      if (tweets[k].author_id != doc.author_id) {
        throw DataError("ChunkAuthor: tweets from more than one author");
      }
      auto toks = Preprocess(tweets[k].text);
      if (!toks.empty()) {
        doc.tweet_boundaries.push_back(doc.tokens.size());
        std::move(toks.begin(), toks.end(), std::back_inserter(doc.tokens));
      }
      ++doc.tweet_count;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

Corpus BuildCorpus(std::string name, std::span<const RawTweet> tweets,
                   size_t max_tweets) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<RawTweet>> by_author;
  for (const auto& t : tweets) {
    if (t.author_id.empty()) throw DataError("tweet with empty author_id");
    auto [it, inserted] = by_author.try_emplace(t.author_id);
    if (inserted) order.push_back(t.author_id);
    if (!it->second.empty() && it->second.front().label != t.label) {
      throw DataError("author " + t.author_id + " has inconsistent labels");
    }
    it->second.push_back(t);
  }
  Corpus corpus;
  corpus.name = std::move(name);
  for (const auto& author : order) {
    auto docs = ChunkAuthor(by_author[author], max_tweets);
    std::move(docs.begin(), docs.end(), std::back_inserter(corpus.documents));
  }
  corpus.label_set = CollectLabels(corpus.documents);
  return corpus;
}

std::pair<Corpus, Corpus> SplitCorpus(const Corpus& corpus,
                                      double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<size_t>(
      std::floor(static_cast<double>(corpus.size()) * train_fraction));
  Corpus train{corpus.name, corpus.label_set, {}};
  Corpus test{corpus.name, corpus.label_set, {}};
  train.documents.assign(corpus.documents.begin(),
                         corpus.documents.begin() + static_cast<ptrdiff_t>(n_train));
  test.documents.assign(corpus.documents.begin() + static_cast<ptrdiff_t>(n_train),
                        corpus.documents.end());
  return {std::move(train), std::move(test)};
}

std::vector<Document> SampleAttackSet(const Corpus& test, size_t n) {
  if (n > test.size()) {
    throw DataError("attack sample of " + std::to_string(n) +
                    " requested but the test split has only " +
                    std::to_string(test.size()) + " documents");
  }
  return {test.documents.end() - static_cast<ptrdiff_t>(n), test.documents.end()};
}

std::vector<RawTweet> ReadTweets(std::istream& in) {
  std::vector<RawTweet> tweets;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      RawTweet t;
      t.author_id = j.at("author_id").get<std::string>();
      t.text = j.at("text").get<std::string>();
      if (t.author_id.empty()) {
        throw DataError("tweet line " + std::to_string(lineno) + ": empty author_id");
      }
      if (j.contains("label") && !j["label"].is_null()) {
        t.label = j["label"].get<std::string>();
      }
      tweets.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw DataError("tweet line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return tweets;
}

std::vector<RawTweet> ReadTweetsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ReadTweets(in);
}

void WriteTweets(std::ostream& out, std::span<const RawTweet> tweets) {
  for (const auto& t : tweets) {
    json j = {{"author_id", t.author_id}, {"text", t.text}, {"label", t.label}};
    out << j.dump() << '\n';
  }
}

nlohmann::json DocumentToJson(const Document& d) {
  std::string kinds;
  kinds.reserve(d.tokens.size());
  for (const auto& t : d.tokens) kinds += KindCode(t.kind);
  return {{"author_id", d.author_id},
          {"label", d.label ? json(*d.label) : json(nullptr)},
          {"tokens", d.Surfaces()},
          {"kinds", kinds},
          {"tweet_boundaries", d.tweet_boundaries},
          {"tweet_count", d.tweet_count}};
}

Document DocumentFromJson(const nlohmann::json& j) {
  Document d;
  d.author_id = j.at("author_id").get<std::string>();
  if (j.contains("label") && !j.at("label").is_null()) d.label = j["label"].get<std::string>();
  const auto surfaces = j.at("tokens").get<std::vector<std::string>>();
  const auto kinds = j.value("kinds", std::string());
  if (!kinds.empty() && kinds.size() != surfaces.size()) {
    throw DataError("kinds/tokens length mismatch");
  }
  for (size_t i = 0; i < surfaces.size(); ++i) {
    if (kinds.empty()) {
      d.tokens.push_back(ClassifySurface(surfaces[i]));
    } else {
      d.tokens.push_back({surfaces[i], KindFromCode(kinds[i])});
    }
  }
  d.tweet_boundaries = j.value("tweet_boundaries", std::vector<size_t>{});
  d.tweet_count = j.value("tweet_count", size_t{0});
  return d;
}

void WriteDocuments(std::ostream& out, const Corpus& corpus) {
  json header = {{"format", "stylomask-docs"},
                 {"version", 1},
                 {"name", corpus.name},
                 {"label_set", corpus.label_set}};
  out << header.dump() << '\n';
  for (const auto& d : corpus.documents) out << DocumentToJson(d).dump() << '\n';
}

Corpus ReadDocuments(std::istream& in) {
  Corpus corpus;
  std::string line;
  size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("format", "") != "stylomask-docs") {
          throw DataError("not a document store (missing header)");
        }
        if (j.at("version").get<int>() != 1) {
          throw DataError("unsupported document store version");
        }
        corpus.name = j.value("name", "");
        corpus.label_set = j.value("label_set", std::vector<std::string>{});
        have_header = true;
        continue;
      }
      Document d = DocumentFromJson(j);
      corpus.documents.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw DataError("document line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw DataError("empty document store");
  if (corpus.label_set.empty()) corpus.label_set = CollectLabels(corpus.documents);
  return corpus;
}

Corpus LoadCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string first;
  while (std::getline(in, first)) {
    if (first.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  in.clear();
  in.seekg(0);
  bool is_store = false;
  try {
    const json j = json::parse(first);
    is_store = j.is_object() && j.value("format", "") == "stylomask-docs";
  } catch (const json::exception&) {
    throw DataError(path + ": first line is not JSON");
  }
  if (is_store) return ReadDocuments(in);
  auto tweets = ReadTweets(in);
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  return BuildCorpus(name, tweets);
}

void SaveDocumentsFile(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  WriteDocuments(out, corpus);
}

}  // namespace stylomask
