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

#include "stylomask/lm_server.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <optional>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

bool WriteAll(int fd, std::string_view bytes) {
  size_t done = 0;
  while (done < bytes.size()) {
    ssize_t n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<size_t>(n);
  }
  return true;
}

std::string ErrorFrame(std::optional<uint64_t> id, std::string code, std::string message) {
  return EncodeFrame(ErrorMessage{id, std::move(code), std::move(message)});
}

}  // namespace

LmServer::LmServer(LmProvider& provider, std::string agent, size_t dim)
    : provider_(provider), agent_(std::move(agent)), dim_(dim) {}

LmServer::~LmServer() { Stop(); }

void LmServer::ServeConnection(int read_fd, int write_fd) {
  connections_served_.fetch_add(1);
  FrameDecoder decoder;
  bool greeted = false;
  char buf[65536];
  for (;;) {
    const ssize_t n = ::read(read_fd, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return;
    decoder.Feed(std::string_view(buf, static_cast<size_t>(n)));

    std::vector<Message> batch;
    std::string fatal;
    try {
      while (auto m = decoder.Next()) batch.push_back(std::move(*m));
    } catch (const ProtocolError& e) {
      fatal = e.what();
    }

    std::string out;
    std::vector<std::string> replies;
    for (auto& m : batch) {
      if (auto* hello = std::get_if<Hello>(&m)) {
        if (greeted) {
          fatal = "duplicate hello";
          break;
        }
        if (hello->version != kProtocolVersion) {
          WriteAll(write_fd, ErrorFrame(std::nullopt, "version_mismatch",
                                        "server speaks version " +
                                            std::to_string(kProtocolVersion)));
          return;
        }
        greeted = true;
        out += EncodeFrame(Hello{kProtocolVersion, agent_, dim_});
        continue;
      }
      if (!greeted) {
        fatal = "request before hello";
        break;
      }
      std::optional<uint64_t> id;
      try {
        if (auto* fill = std::get_if<FillRequest>(&m)) {
          id = fill->request_id;
          replies.push_back(EncodeFrame(provider_.Fill(*fill)));
        } else if (auto* enc = std::get_if<EncodeRequest>(&m)) {
          id = enc->request_id;
          replies.push_back(EncodeFrame(provider_.Encode(*enc)));
        } else {
          fatal = "unexpected " + std::string(MessageType(m)) + " from client";
          break;
        }
      } catch (const ProviderError& e) {
        replies.push_back(ErrorFrame(id, "bad_request", e.what()));
      } catch (const std::exception& e) {
        replies.push_back(ErrorFrame(id, "internal", e.what()));
      }
    }
    for (auto it = replies.rbegin(); it != replies.rend(); ++it) out += *it;
    if (!fatal.empty()) out += ErrorFrame(std::nullopt, "protocol_error", fatal);
    if (!out.empty() && !WriteAll(write_fd, out)) return;
    if (!fatal.empty()) return;
  }
}

uint16_t LmServer::Listen(const std::string& host, uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw ProviderError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw ConfigError("not an IPv4 address: " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw ProviderError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

void LmServer::Run() {
  while (!stopping_.load()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 100);
    if (rc <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    std::lock_guard lock(mu_);
    if (stopping_.load()) {
      ::close(fd);
      break;
    }
    live_fds_.insert(fd);
    workers_.emplace_back([this, fd] {
      ServeConnection(fd, fd);
      std::lock_guard lock(mu_);
      live_fds_.erase(fd);
      ::close(fd);
    });
  }
}

uint16_t LmServer::Start(const std::string& host, uint16_t port) {
  const uint16_t bound = Listen(host, port);
  accept_thread_ = std::thread([this] { Run(); });
  return bound;
}

void LmServer::Stop() {
  stopping_.store(true);
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (int fd : live_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

}  // namespace stylomask
