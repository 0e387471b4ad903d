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

#include "stylomask/heuristics.h"

#include <vector>

namespace stylomask {
namespace {

std::vector<std::string_view> CodePoints(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    size_t j = i + 1;
    while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string Leet(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    switch (c) {
      case 'a': c = '4'; break;
      case 'e': c = '3'; break;
      case 'i': c = '1'; break;
      case 'o': c = '0'; break;
      case 's': c = '5'; break;
      case 't': c = '7'; break;
      case 'b': c = '8'; break;
      case 'g': c = '9'; break;
      default: break;
    }
  }
  return out;
}

std::string Flip(std::string_view word) {
  auto cps = CodePoints(word);
  if (cps.size() < 4) return std::string(word);
  const size_t i = (cps.size() - 1) / 2;
  std::swap(cps[i], cps[i + 1]);
  std::string out;
  out.reserve(word.size());
  for (auto cp : cps) out += cp;
  return out;
}

std::string RandomSpace(std::string_view word, SplitMix64& rng) {
  auto cps = CodePoints(word);
  if (cps.size() < 2) return std::string(word);
  const size_t split = 1 + static_cast<size_t>(rng.Below(cps.size() - 1));
  std::string out;
  out.reserve(word.size() + 1);
  for (size_t k = 0; k < cps.size(); ++k) {
    if (k == split) out += ' ';
    out += cps[k];
  }
  return out;
}

}  // namespace stylomask
