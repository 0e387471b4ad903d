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

#include "stylomask/pos_tagger.h"

#include <algorithm>
#include <array>
#include <istream>
#include <utility>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

constexpr std::array kClosedClass = {
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his",
    "her", "its", "our", "their", "i", "me", "you", "he", "she", "it", "we",
    "they", "him", "us", "them", "myself", "yourself", "in", "on", "at", "by",
    "for", "with", "about", "against", "between", "into", "through", "during",
    "before", "after", "above", "below", "to", "from", "up", "down", "of",
    "off", "over", "under", "and", "but", "or", "nor", "if", "because", "as",
    "until", "while", "than", "what", "which", "who", "whom", "whose", "when",
    "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "only", "own", "same", "lol", "omg",
};

constexpr std::array kVerbs = {
    "be", "is", "am", "are", "was", "were", "been", "have", "has", "had",
    "do", "does", "did", "go", "goes", "went", "get", "gets", "got", "make",
    "made", "need", "want", "know", "knew", "think", "thought", "love",
    "like", "see", "saw", "say", "said", "come", "came", "take", "took",
    "feel", "felt", "give", "gave", "tell", "told", "let", "keep", "put",
    "will", "would", "can", "could", "should", "must", "might", "may", "shall",
};

constexpr std::array kAdjectives = {
    "good", "bad", "great", "new", "old", "happy", "sad", "better", "best",
    "big", "little", "small", "long", "short", "high", "low", "young", "nice",
    "ready", "cute", "hot", "cold",
};

constexpr std::array kAdverbs = {
    "very", "really", "so", "too", "not", "just", "now", "then", "here",
    "there", "already", "always", "never", "also", "still", "again", "soon",
    "ever", "almost", "often", "asap",
};

constexpr std::array kModalsAndTo = {
    "to", "will", "would", "can", "could", "should", "must", "might", "may",
    "shall", "gonna", "wanna",
};

struct SuffixRule {
  std::string_view suffix;
  PosTag tag;
};

// Checked in order; the first match wins.
constexpr std::array kSuffixRules = {
    SuffixRule{"tion", PosTag::kNoun}, SuffixRule{"sion", PosTag::kNoun},
    SuffixRule{"ness", PosTag::kNoun}, SuffixRule{"ment", PosTag::kNoun},
    SuffixRule{"ity", PosTag::kNoun},  SuffixRule{"ship", PosTag::kNoun},
    SuffixRule{"ly", PosTag::kAdv},    SuffixRule{"ing", PosTag::kVerb},
    SuffixRule{"ed", PosTag::kVerb},   SuffixRule{"ize", PosTag::kVerb},
    SuffixRule{"ise", PosTag::kVerb},  SuffixRule{"ify", PosTag::kVerb},
    SuffixRule{"ous", PosTag::kAdj},   SuffixRule{"ful", PosTag::kAdj},
    SuffixRule{"ive", PosTag::kAdj},   SuffixRule{"able", PosTag::kAdj},
    SuffixRule{"ible", PosTag::kAdj},  SuffixRule{"less", PosTag::kAdj},
    SuffixRule{"ish", PosTag::kAdj},   SuffixRule{"ic", PosTag::kAdj},
    SuffixRule{"al", PosTag::kAdj},
};

bool HasLetter(std::string_view w) {
  return std::any_of(w.begin(), w.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (static_cast<unsigned char>(c) & 0x80);
  });
}

}  // namespace

std::string_view PosTagName(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "NOUN";
    case PosTag::kVerb: return "VERB";
    case PosTag::kAdj: return "ADJ";
    case PosTag::kAdv: return "ADV";
    case PosTag::kOther: return "OTHER";
  }
  return "OTHER";
}

PosTag ParsePosTag(std::string_view name) {
  if (name == "NOUN") return PosTag::kNoun;
  if (name == "VERB") return PosTag::kVerb;
  if (name == "ADJ") return PosTag::kAdj;
  if (name == "ADV") return PosTag::kAdv;
  if (name == "OTHER") return PosTag::kOther;
  throw DataError("unknown POS tag: " + std::string(name));
}

LexiconTagger::LexiconTagger() {
  for (const char* w : kClosedClass) lexicon_.emplace(w, PosTag::kOther);
  for (const char* w : kVerbs) lexicon_.emplace(w, PosTag::kVerb);
  for (const char* w : kAdjectives) lexicon_.emplace(w, PosTag::kAdj);
  for (const char* w : kAdverbs) lexicon_.emplace(w, PosTag::kAdv);
}

PosTag LexiconTagger::TagWord(std::string_view word) const {
  if (auto it = lexicon_.find(std::string(word)); it != lexicon_.end()) {
    return it->second;
  }
  if (!HasLetter(word)) return PosTag::kOther;
  for (const auto& rule : kSuffixRules) {
    if (word.size() > rule.suffix.size() + 2 && word.ends_with(rule.suffix)) {
      return rule.tag;
    }
  }
  return PosTag::kNoun;
}

PosTag LexiconTagger::Tag(std::span<const std::string> tokens, size_t index) const {
  const std::string& word = tokens[index];
  const bool known = lexicon_.contains(word);
  PosTag tag = TagWord(word);
  if (!known && index > 0 && tag == PosTag::kNoun) {
    const auto& prev = tokens[index - 1];
    if (std::find(kModalsAndTo.begin(), kModalsAndTo.end(), prev) !=
        kModalsAndTo.end()) {
      tag = PosTag::kVerb;
    }
  }
  return tag;
}

void LexiconTagger::LoadLexicon(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("lexicon line without tab: " + line);
    std::string tag = line.substr(tab + 1);
    if (!tag.empty() && tag.back() == '\r') tag.pop_back();
    Add(line.substr(0, tab), ParsePosTag(tag));
  }
}

}  // namespace stylomask
