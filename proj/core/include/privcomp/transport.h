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
#ifndef PRIVCOMP_TRANSPORT_H_
#define PRIVCOMP_TRANSPORT_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "privcomp/server.h"

namespace privcomp {

using Frame = std::vector<std::uint8_t>;

struct AddressedFrame {
  std::uint16_t server = 0;  // 1-based
  Frame bytes;
};

// Delivers request frames and returns the response frames in the same order.
// Every request is handed over before any response is consumed.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::size_t servers() const = 0;
  virtual std::vector<Frame> Exchange(const std::vector<AddressedFrame>& requests) = 0;
};

// Calls engines directly on the same bytes the socket path would carry.
class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(std::vector<const ServerEngine*> engines);
  std::size_t servers() const override { return engines_.size(); }
  std::vector<Frame> Exchange(const std::vector<AddressedFrame>& requests) override;

 private:
  std::vector<const ServerEngine*> engines_;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

// "host:port"; throws kConfigError.
Endpoint ParseEndpoint(const std::string& text);

// One TCP connection per request: the client writes the frame, half-closes,
// and reads the response until the server closes.
class TcpTransport : public Transport {
 public:
  explicit TcpTransport(std::vector<Endpoint> endpoints);
  std::size_t servers() const override { return endpoints_.size(); }
  // Throws kTransportError on connection or I/O failure.
  std::vector<Frame> Exchange(const std::vector<AddressedFrame>& requests) override;

 private:
  std::vector<Endpoint> endpoints_;
};

// Accepts sessions on a background thread and answers each on its own
// thread. A failing session is closed without a reply; the server keeps
// running.
class TcpServer {
 public:
  using ErrorSink = std::function<void(const std::string&)>;

  // Port 0 picks an ephemeral port. Throws kBindError.
  TcpServer(const ServerEngine& engine, const std::string& host, std::uint16_t port,
            ErrorSink on_error = {});
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  // Stops accepting and joins every session.
  void Stop();
  // Blocks until Stop() is called from another thread.
  void Wait();

 private:
  void AcceptLoop();
  void Serve(int fd);

  const ServerEngine& engine_;
  ErrorSink on_error_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex sessions_mu_;
  std::vector<std::thread> sessions_;
};

}  // namespace privcomp

#endif  // PRIVCOMP_TRANSPORT_H_
