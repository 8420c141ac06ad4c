// Copyright 2026 The privcomp Authors
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

#include "privcomp/transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>

#include "privcomp/error.h"

namespace privcomp {

InProcessTransport::InProcessTransport(std::vector<const ServerEngine*> engines)
    : engines_(std::move(engines)) {}

std::vector<Frame> InProcessTransport::Exchange(const std::vector<AddressedFrame>& requests) {
  std::vector<Frame> out;
  out.reserve(requests.size());
  for (const AddressedFrame& r : requests) {
    if (r.server == 0 || r.server > engines_.size()) {
      throw Error(ErrorCode::kTransportError, "no engine for server " + std::to_string(r.server));
    }
    out.push_back(engines_[r.server - 1]->HandleRequest(r.bytes));
  }
  return out;
}

Endpoint ParseEndpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::kConfigError, "endpoint '" + text + "' is not host:port");
  }
  Endpoint e;
  e.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    const unsigned long port = std::stoul(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || port == 0 || port > 65535) throw std::out_of_range("");
    e.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfigError, "bad port in endpoint '" + text + "'");
  }
  return e;
}

namespace {

std::string ErrnoText(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

void WriteAll(int fd, const Frame& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransportError, ErrnoText("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

Frame ReadToEof(int fd) {
  Frame out;
  std::uint8_t buffer[1 << 16];
  for (;;) {
    const ssize_t n = ::recv(fd, buffer, sizeof(buffer), 0);
    if (n == 0) break;
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransportError, ErrnoText("recv"));
    }
    out.insert(out.end(), buffer, buffer + n);
  }
  return out;
}

int Connect(const Endpoint& endpoint) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(endpoint.port);
  if (::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &found) != 0) {
    throw Error(ErrorCode::kTransportError, "cannot resolve " + endpoint.host);
  }
  int fd = -1;
  for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) {
    throw Error(ErrorCode::kTransportError,
                "cannot connect to " + endpoint.host + ":" + port);
  }
  return fd;
}

class FdCloser {
 public:
  explicit FdCloser(std::vector<int>& fds) : fds_(fds) {}
  ~FdCloser() {
    for (int fd : fds_) {
      if (fd >= 0) ::close(fd);
    }
  }

 private:
  std::vector<int>& fds_;
};

}  // namespace

TcpTransport::TcpTransport(std::vector<Endpoint> endpoints)
    : endpoints_(std::move(endpoints)) {}

std::vector<Frame> TcpTransport::Exchange(const std::vector<AddressedFrame>& requests) {
  std::vector<int> fds;
  FdCloser closer(fds);
  for (const AddressedFrame& r : requests) {
    if (r.server == 0 || r.server > endpoints_.size()) {
      throw Error(ErrorCode::kTransportError, "no endpoint for server " + std::to_string(r.server));
    }
    fds.push_back(Connect(endpoints_[r.server - 1]));
    WriteAll(fds.back(), r.bytes);
    ::shutdown(fds.back(), SHUT_WR);
  }
  std::vector<Frame> out;
  out.reserve(fds.size());
  for (std::size_t i = 0; i < fds.size(); ++i) {
    out.push_back(ReadToEof(fds[i]));
    if (out.back().empty()) {
      throw Error(ErrorCode::kTransportError,
                  "server " + std::to_string(requests[i].server) + " closed without answering");
    }
  }
  return out;
}

TcpServer::TcpServer(const ServerEngine& engine, const std::string& host,
                     std::uint16_t port, ErrorSink on_error)
    : engine_(engine), on_error_(std::move(on_error)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::kBindError, ErrnoText("socket"));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(ErrorCode::kBindError, "bind address must be IPv4: " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string text = ErrnoText("bind " + host + ":" + std::to_string(port));
    ::close(listen_fd_);
    throw Error(ErrorCode::kBindError, text);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { AcceptLoop(); });
}

TcpServer::~TcpServer() { Stop(); }

void TcpServer::AcceptLoop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard<std::mutex> lock(sessions_mu_);
    sessions_.emplace_back([this, fd] { Serve(fd); });
  }
}

void TcpServer::Serve(int fd) {
  try {
    const Frame request = ReadToEof(fd);
    WriteAll(fd, engine_.HandleRequest(request));
  } catch (const std::exception& e) {
    if (on_error_) on_error_(e.what());
  }
  ::close(fd);
}

void TcpServer::Stop() {
  if (stopping_.exchange(true)) {
    return;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> sessions;
  {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    sessions.swap(sessions_);
  }
  for (auto& t : sessions) t.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void TcpServer::Wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

}  // namespace privcomp
