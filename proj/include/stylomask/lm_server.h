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

#ifndef STYLOMASK_LM_SERVER_H_
#define STYLOMASK_LM_SERVER_H_

#include <atomic>
#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "stylomask/lm_provider.h"

namespace stylomask {

// Serves an LmProvider over the framed protocol. Each connection gets its own
// thread, so the provider must tolerate concurrent calls (ToyLm does).
//
// Requests that arrive together are answered as a batch in reverse arrival
// order. Clients therefore have to match responses by request_id, which is
// what the protocol promises anyway.
class LmServer {
 public:
  LmServer(LmProvider& provider, std::string agent, size_t dim);
  ~LmServer();
  LmServer(const LmServer&) = delete;
  LmServer& operator=(const LmServer&) = delete;

  // Handles one connection until EOF or a protocol violation. A malformed
  // frame gets an error reply, then the connection is closed. Per-request
  // failures get an error reply and the connection stays open.
  void ServeConnection(int read_fd, int write_fd);

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  uint16_t Listen(const std::string& host, uint16_t port);
  // Accept loop; returns after Stop().
  void Run();
  // Listen + Run on a background thread.
  uint16_t Start(const std::string& host = "127.0.0.1", uint16_t port = 0);
  void Stop();

  uint64_t connections_served() const { return connections_served_.load(); }

 private:
  LmProvider& provider_;
  std::string agent_;
  size_t dim_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::atomic<uint64_t> connections_served_{0};
  std::thread accept_thread_;
  std::mutex mu_;
  std::set<int> live_fds_;
  std::vector<std::thread> workers_;
};

}  // namespace stylomask

#endif  // STYLOMASK_LM_SERVER_H_
