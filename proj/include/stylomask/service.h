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

#ifndef STYLOMASK_SERVICE_H_
#define STYLOMASK_SERVICE_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylomask/attack.h"
#include "stylomask/batch.h"
#include "stylomask/classifier.h"
#include "stylomask/corpus.h"

namespace stylomask {

inline constexpr int kServiceSchemaVersion = 1;

// Carries the HTTP status the REST layer should answer with.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Hands out the lock in arrival order, so requests on one session are
// served first come, first served.
class FifoMutex {
 public:
  void lock();
  void unlock();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  uint64_t next_ticket_ = 0;
  uint64_t serving_ = 0;
};

struct ServiceOptions {
  std::chrono::seconds ttl{1800};
  size_t max_sessions = 1024;
  // Injectable clock for eviction tests.
  std::function<std::chrono::steady_clock::time_point()> now =
      [] { return std::chrono::steady_clock::now(); };
};

// In-memory editing sessions for the interactive workflow. All JSON returned
// here is what the REST layer sends verbatim. Probabilities are the logistic
// link applied to o_y, also for hinge models, where they are not calibrated.
class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});

  void AddModel(const std::string& id, std::shared_ptr<const TextClassifier> model);
  void SetEmbeddings(std::shared_ptr<const EmbeddingStore> store);
  void SetProviderFactory(ProviderFactory factory);
  std::vector<std::string> ModelIds() const;

  // Body: {"text", "label", "model"?}. "model" may be omitted when exactly
  // one model is loaded.
  nlohmann::json CreateSession(const nlohmann::json& body);
  nlohmann::json Importance(const std::string& id);
  nlohmann::json Candidates(const std::string& id, size_t position,
                            const std::string& generator, size_t top_k);
  // A second edit at the same position replaces the first.
  nlohmann::json ApplyEdit(const std::string& id, size_t position,
                           const std::string& surface);
  // Pops the latest edit; a no-op on an untouched session.
  nlohmann::json Revert(const std::string& id);
  // Runs the greedy attack on the working document and passes each suggested
  // edit to `sink`, then a summary line. Suggestions are not applied. The
  // sink returns false to cancel.
  void AutoAttack(const std::string& id, const nlohmann::json& config,
                  const std::function<bool(const nlohmann::json&)>& sink);
  nlohmann::json Export(const std::string& id);

  size_t EvictExpired();
  size_t session_count() const;

 private:
  struct Session {
    std::string id;
    std::string model_id;
    std::shared_ptr<const TextClassifier> model;
    std::string label;
    Document original;
    Document working;
    std::vector<Edit> stack;
    std::optional<ImportanceRanking> importance;
    std::chrono::steady_clock::time_point last_used;
    FifoMutex mu;
  };

  std::shared_ptr<Session> Find(const std::string& id);
  nlohmann::json State(const Session& s) const;
  static void Rebuild(Session& s);
  std::string NewId();

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const TextClassifier>> models_;
  std::shared_ptr<const EmbeddingStore> embeddings_;
  ProviderFactory provider_factory_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  uint64_t id_counter_ = 0;
  uint64_t id_salt_;
};

// Effective edit list: the latest edit per position, in first-edit order.
std::vector<Edit> CollapseEdits(const std::vector<Edit>& stack);

}  // namespace stylomask

#endif  // STYLOMASK_SERVICE_H_
