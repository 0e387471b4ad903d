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

#ifndef STYLOMASK_HEURISTICS_H_
#define STYLOMASK_HEURISTICS_H_

#include <string>
#include <string_view>

#include "stylomask/rng.h"

namespace stylomask {

// a->4 e->3 i->1 o->0 s->5 t->7 b->8 g->9, every occurrence.
std::string Leet(std::string_view word);

// Swaps the two middle characters (code points i and i+1, i = (n-1)/2) of
// words with at least four characters. First and last never move.
std::string Flip(std::string_view word);

// Inserts one space at a uniformly drawn interior code point boundary.
// Words shorter than two characters come back unchanged.
std::string RandomSpace(std::string_view word, SplitMix64& rng);

}  // namespace stylomask

#endif  // STYLOMASK_HEURISTICS_H_
