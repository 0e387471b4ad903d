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

#ifndef STYLOMASK_LM_CLIENT_H_
#define STYLOMASK_LM_CLIENT_H_

#include <sys/types.h>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "stylomask/lm_protocol.h"
#include "stylomask/lm_provider.h"

namespace stylomask {

// A bidirectional byte stream over one or two file descriptors (a socket, or
// a pair of pipes to a child process). Owns the descriptors.
class FdChannel {
 public:
  FdChannel(int read_fd, int write_fd, pid_t child = -1);
  FdChannel(FdChannel&& other) noexcept;
  FdChannel& operator=(FdChannel&&) = delete;
  FdChannel(const FdChannel&) = delete;
  ~FdChannel();

  void WriteAll(std::string_view bytes);
  // Blocks up to `timeout_ms` (negative: forever). Returns "" at EOF and
  // throws TimeoutError when nothing arrived in time.
  std::string ReadSome(int timeout_ms);
  void Close();

 private:
  int read_fd_;
  int write_fd_;
  pid_t child_;
};

struct ClientOptions {
  int timeout_ms = 30000;
  std::string agent = "stylomask-client";
};

// Client side of the model-server protocol. Performs the version handshake on
// construction. Requests get fresh ids from a per-client counter; responses
// may arrive in any order and are matched back by id. Not thread-safe: use
// one client per worker.
class LmClient : public LmProvider {
 public:
  // Endpoints: "tcp://host:port", "host:port", "unix:/path/to/socket", or
  // "exec:<shell command>" (child speaks the protocol on stdin/stdout).
  static std::unique_ptr<LmClient> Connect(const std::string& endpoint,
                                           const ClientOptions& options = {});
  static std::unique_ptr<LmClient> FromChannel(FdChannel channel,
                                               const ClientOptions& options = {});

  // Pipelined interface. Send returns the id the response will carry.
  uint64_t Send(FillRequest request);
  uint64_t Send(EncodeRequest request);
  // Blocks until the response to `id` arrives. An error reply for that id is
  // rethrown as ProviderError.
  Message Await(uint64_t id);

  FillResponse Fill(const FillRequest& request) override;
  EncodeResponse Encode(const EncodeRequest& request) override;

  const Hello& server_hello() const { return server_hello_; }
  size_t outstanding() const { return pending_.size(); }

 private:
  LmClient(FdChannel channel, const ClientOptions& options);
  void Handshake();
  Message ReadMessage();
  [[noreturn]] void Fail(const std::string& why);

  FdChannel channel_;
  ClientOptions options_;
  FrameDecoder decoder_;
  Hello server_hello_;
  uint64_t next_id_ = 1;
  bool broken_ = false;
  std::map<uint64_t, std::variant<FillRequest, EncodeRequest>> pending_;
  std::map<uint64_t, Message> arrived_;
};

}  // namespace stylomask

#endif  // STYLOMASK_LM_CLIENT_H_
