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

#include "stylomask/lm_client.h"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

std::string Errno(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

int ConnectTcp(const std::string& host, const std::string& port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw ProviderError("cannot resolve " + host + ":" + port + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(res);
  if (fd < 0) throw ProviderError(Errno("cannot connect to " + host + ":" + port));
  return fd;
}

int ConnectUnix(const std::string& path) {
  int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw ProviderError(Errno("socket"));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    ::close(fd);
    throw ConfigError("unix socket path too long");
  }
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    throw ProviderError(Errno("cannot connect to unix:" + path));
  }
  return fd;
}

FdChannel SpawnChild(const std::string& command) {
  // Writes to a pipe whose reader died must fail with EPIPE, not kill us.
  ::signal(SIGPIPE, SIG_IGN);
  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw ProviderError(Errno("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ProviderError(Errno("pipe"));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw ProviderError(Errno("fork"));
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return FdChannel(from_child[0], to_child[1], pid);
}

}  // namespace

FdChannel::FdChannel(int read_fd, int write_fd, pid_t child)
    : read_fd_(read_fd), write_fd_(write_fd), child_(child) {}

FdChannel::FdChannel(FdChannel&& other) noexcept
    : read_fd_(other.read_fd_), write_fd_(other.write_fd_), child_(other.child_) {
  other.read_fd_ = -1;
  other.write_fd_ = -1;
  other.child_ = -1;
}

FdChannel::~FdChannel() { Close(); }

void FdChannel::Close() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  read_fd_ = write_fd_ = -1;
  if (child_ > 0) {
    // The child sees EOF on stdin and should exit; give it a moment.
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(child_, nullptr, WNOHANG) == child_) {
        child_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(child_, SIGKILL);
    ::waitpid(child_, nullptr, 0);
    child_ = -1;
  }
}

void FdChannel::WriteAll(std::string_view bytes) {
  if (write_fd_ < 0) throw ProviderError("channel is closed");
  size_t done = 0;
  while (done < bytes.size()) {
    ssize_t n = ::send(write_fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) {
      n = ::write(write_fd_, bytes.data() + done, bytes.size() - done);
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProviderError(Errno("write to model server"));
    }
    done += static_cast<size_t>(n);
  }
}

std::string FdChannel::ReadSome(int timeout_ms) {
  if (read_fd_ < 0) throw ProviderError("channel is closed");
  pollfd pfd{read_fd_, POLLIN, 0};
  for (;;) {
    const int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProviderError(Errno("poll"));
    }
    if (rc == 0) throw TimeoutError("model server did not answer in time");
    break;
  }
  char buf[65536];
  for (;;) {
    const ssize_t n = ::read(read_fd_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return {};
      throw ProviderError(Errno("read from model server"));
    }
    return std::string(buf, static_cast<size_t>(n));
  }
}

std::unique_ptr<LmClient> LmClient::Connect(const std::string& endpoint,
                                            const ClientOptions& options) {
  if (endpoint.empty()) throw ConfigError("empty model-server endpoint");
  if (endpoint.starts_with("exec:")) {
    return FromChannel(SpawnChild(endpoint.substr(5)), options);
  }
  if (endpoint.starts_with("unix:")) {
    const int fd = ConnectUnix(endpoint.substr(5));
    return FromChannel(FdChannel(fd, fd), options);
  }
  std::string hostport = endpoint;
  if (hostport.starts_with("tcp://")) hostport = hostport.substr(6);
  const auto colon = hostport.rfind(':');
  if (colon == std::string::npos || colon + 1 == hostport.size()) {
    throw ConfigError("endpoint must look like host:port, got '" + endpoint + "'");
  }
  const int fd = ConnectTcp(hostport.substr(0, colon), hostport.substr(colon + 1));
  return FromChannel(FdChannel(fd, fd), options);
}

std::unique_ptr<LmClient> LmClient::FromChannel(FdChannel channel,
                                                const ClientOptions& options) {
  std::unique_ptr<LmClient> client(new LmClient(std::move(channel), options));
  client->Handshake();
  return client;
}

LmClient::LmClient(FdChannel channel, const ClientOptions& options)
    : channel_(std::move(channel)), options_(options) {}

void LmClient::Fail(const std::string& why) {
  broken_ = true;
  channel_.Close();
  throw ProtocolError(why);
}

Message LmClient::ReadMessage() {
  for (;;) {
    std::optional<Message> m;
    try {
      m = decoder_.Next();
    } catch (const ProtocolError& e) {
      Fail(e.what());
    }
    if (m) return std::move(*m);
    std::string bytes = channel_.ReadSome(options_.timeout_ms);
    if (bytes.empty()) {
      broken_ = true;
      throw ProviderError("model server closed the connection");
    }
    decoder_.Feed(bytes);
  }
}

void LmClient::Handshake() {
  channel_.WriteAll(EncodeFrame(Hello{kProtocolVersion, options_.agent, 0}));
  Message reply = ReadMessage();
  if (auto* err = std::get_if<ErrorMessage>(&reply)) {
    Fail("handshake rejected: " + err->code + ": " + err->message);
  }
  auto* hello = std::get_if<Hello>(&reply);
  if (!hello) Fail("expected hello, got " + std::string(MessageType(reply)));
  if (hello->version != kProtocolVersion) {
    Fail("server speaks protocol version " + std::to_string(hello->version));
  }
  server_hello_ = *hello;
}

uint64_t LmClient::Send(FillRequest request) {
  if (broken_) throw ProviderError("connection is unusable");
  request.request_id = next_id_++;
  ValidateRequest(request);
  channel_.WriteAll(EncodeFrame(request));
  const uint64_t id = request.request_id;
  pending_.emplace(id, std::move(request));
  return id;
}

uint64_t LmClient::Send(EncodeRequest request) {
  if (broken_) throw ProviderError("connection is unusable");
  request.request_id = next_id_++;
  ValidateRequest(request);
  channel_.WriteAll(EncodeFrame(request));
  const uint64_t id = request.request_id;
  pending_.emplace(id, std::move(request));
  return id;
}

Message LmClient::Await(uint64_t id) {
  auto pending = pending_.find(id);
  if (pending == pending_.end()) throw ConfigError("no outstanding request with that id");
  while (!arrived_.contains(id)) {
    if (broken_) throw ProviderError("connection is unusable");
    Message m = ReadMessage();
    std::optional<uint64_t> rid;
    if (auto* f = std::get_if<FillResponse>(&m)) rid = f->request_id;
    if (auto* e = std::get_if<EncodeResponse>(&m)) rid = e->request_id;
    if (auto* err = std::get_if<ErrorMessage>(&m)) {
      if (!err->request_id) Fail("server error: " + err->code + ": " + err->message);
      rid = err->request_id;
    }
    if (!rid) Fail("unexpected " + std::string(MessageType(m)) + " message");
    if (!pending_.contains(*rid) || arrived_.contains(*rid)) {
      Fail("response for unknown request id " + std::to_string(*rid));
    }
    arrived_.emplace(*rid, std::move(m));
  }
  Message m = std::move(arrived_.at(id));
  arrived_.erase(id);
  auto request = std::move(pending->second);
  pending_.erase(pending);

  if (auto* err = std::get_if<ErrorMessage>(&m)) {
    throw ProviderError("model server error " + err->code + ": " + err->message);
  }
  if (auto* fr = std::get_if<FillRequest>(&request)) {
    auto* resp = std::get_if<FillResponse>(&m);
    if (!resp) Fail("fill request answered with " + std::string(MessageType(m)));
    ValidateResponse(*fr, *resp);
  } else {
    auto& er = std::get<EncodeRequest>(request);
    auto* resp = std::get_if<EncodeResponse>(&m);
    if (!resp) Fail("encode request answered with " + std::string(MessageType(m)));
    ValidateResponse(er, *resp);
  }
  return m;
}

FillResponse LmClient::Fill(const FillRequest& request) {
  return std::get<FillResponse>(Await(Send(request)));
}

EncodeResponse LmClient::Encode(const EncodeRequest& request) {
  return std::get<EncodeResponse>(Await(Send(request)));
}

}  // namespace stylomask
