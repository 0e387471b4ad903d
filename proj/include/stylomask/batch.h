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

#ifndef STYLOMASK_BATCH_H_
#define STYLOMASK_BATCH_H_

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "stylomask/attack.h"
#include "stylomask/eval.h"

namespace stylomask {

nlohmann::json AttackConfigToJson(const AttackConfig& config);
// Missing keys keep their defaults. Validates the result.
AttackConfig AttackConfigFromJson(const nlohmann::json& j);

// Makes one provider per worker. May be empty when no generator needs one.
using ProviderFactory = std::function<std::unique_ptr<LmProvider>()>;

// Attacks every labeled document with its own label. Documents are handed
// out to `workers` threads but results come back in input order, and each
// attack depends only on its document, so the output does not depend on the
// worker count.
std::vector<AttackResult> RunAttackBatch(const TextClassifier& substitute,
                                         std::span<const Document> docs,
                                         const AttackConfig& config,
                                         const EmbeddingStore* embeddings,
                                         const ProviderFactory& make_provider,
                                         size_t workers);

// Attack result files: one JSON object per document with the original and
// adversarial documents, edits, flip flag and bookkeeping.
nlohmann::json AttackRecordToJson(size_t index, const Document& original,
                                  const AttackResult& result);
void WriteAttackResults(std::ostream& out, std::span<const Document> originals,
                        std::span<const AttackResult> results);
std::vector<AttackedDocument> ReadAttackResults(std::istream& in);
std::vector<AttackedDocument> ReadAttackResultsFile(const std::string& path);

}  // namespace stylomask

#endif  // STYLOMASK_BATCH_H_
