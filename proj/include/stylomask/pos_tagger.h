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

#ifndef STYLOMASK_POS_TAGGER_H_
#define STYLOMASK_POS_TAGGER_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

namespace stylomask {

enum class PosTag { kNoun, kVerb, kAdj, kAdv, kOther };

std::string_view PosTagName(PosTag tag);
PosTag ParsePosTag(std::string_view name);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // Tag of tokens[index] in the context of the whole sequence.
  virtual PosTag Tag(std::span<const std::string> tokens, size_t index) const = 0;
};

// Closed-class lexicon first, then suffix rules, then a couple of context
// rules ("to"/modal + unknown word reads as a verb). Unknown words default to
// NOUN. Extra entries can be loaded as "word<TAB>TAG" lines.
class LexiconTagger : public PosTagger {
 public:
  LexiconTagger();

  PosTag Tag(std::span<const std::string> tokens, size_t index) const override;
  PosTag TagWord(std::string_view word) const;

  void Add(std::string word, PosTag tag) { lexicon_[std::move(word)] = tag; }
  void LoadLexicon(std::istream& in);

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
};

}  // namespace stylomask

#endif  // STYLOMASK_POS_TAGGER_H_
