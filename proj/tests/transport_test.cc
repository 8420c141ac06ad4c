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
#include <gtest/gtest.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "test_util.h"

namespace privcomp {
namespace {

using testing::Deployment;
using testing::ErrorCodeOf;

// One TcpServer per replica on loopback.
class Cluster {
 public:
  explicit Cluster(const Deployment& d, TcpServer::ErrorSink sink = {}) {
    for (std::uint16_t n = 0; n < d.shape().servers; ++n) {
      servers_.push_back(std::make_unique<TcpServer>(d.engine(), "127.0.0.1", 0, sink));
      endpoints_.push_back({"127.0.0.1", servers_.back()->port()});
    }
  }
  const std::vector<Endpoint>& endpoints() const { return endpoints_; }
  TcpServer& server(std::size_t i) { return *servers_[i]; }

 private:
  std::vector<std::unique_ptr<TcpServer>> servers_;
  std::vector<Endpoint> endpoints_;
};

// Writes raw bytes to a server and returns whatever it sends back.
std::vector<std::uint8_t> RawExchange(std::uint16_t port, const std::vector<std::uint8_t>& bytes) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  EXPECT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  if (!bytes.empty()) EXPECT_GT(::send(fd, bytes.data(), bytes.size(), 0), 0);
  ::shutdown(fd, SHUT_WR);
  std::vector<std::uint8_t> reply;
  std::uint8_t buffer[256];
  ssize_t got;
  while ((got = ::recv(fd, buffer, sizeof(buffer), 0)) > 0) {
    reply.insert(reply.end(), buffer, buffer + got);
  }
  ::close(fd);
  return reply;
}

TEST(EndpointTest, Parsing) {
  const Endpoint e = ParseEndpoint("127.0.0.1:8080");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 8080);
  EXPECT_EQ(ErrorCodeOf([] { ParseEndpoint("localhost"); }), ErrorCode::kConfigError);
  EXPECT_EQ(ErrorCodeOf([] { ParseEndpoint("host:99999"); }), ErrorCode::kConfigError);
  EXPECT_EQ(ErrorCodeOf([] { ParseEndpoint("host:12ab"); }), ErrorCode::kConfigError);
}

TEST(TcpTransportTest, MatchesInProcessBytes) {
  const PrimeField f(65537);
  const Deployment d(f, {3, 2, 3}, 31);
  Cluster cluster(d);
  TcpTransport tcp(cluster.endpoints());
  InProcessTransport local(d.engines());
  RetrievalConfig config;
  config.theta = 2;
  config.seed = 17;
  const Transcript over_tcp = Retrieve(f, d.matrix(), d.spec(), d.length(), config, tcp);
  const Transcript in_process = Retrieve(f, d.matrix(), d.spec(), d.length(), config, local);
  EXPECT_EQ(over_tcp.requests, in_process.requests);
  EXPECT_EQ(over_tcp.responses, in_process.responses);
  EXPECT_EQ(over_tcp.decoded, d.Truth(2));
}

TEST(TcpServerTest, BadFrameClosesOnlyThatSession) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 2}, 32);
  std::atomic<int> errors{0};
  Cluster cluster(d, [&](const std::string&) { ++errors; });
  const std::vector<std::uint8_t> garbage = {'n', 'o', 'p', 'e'};
  EXPECT_TRUE(RawExchange(cluster.endpoints()[0].port, garbage).empty());
  const std::vector<std::uint8_t> truncated = {'P', 'C', 'Q', '1', 0x01};
  EXPECT_TRUE(RawExchange(cluster.endpoints()[0].port, truncated).empty());
  for (int i = 0; i < 100 && errors < 2; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  EXPECT_EQ(errors.load(), 2);

  TcpTransport tcp(cluster.endpoints());
  RetrievalConfig config;
  config.theta = 1;
  EXPECT_EQ(Retrieve(f, d.matrix(), d.spec(), d.length(), config, tcp).decoded, d.Truth(1));
}

TEST(TcpServerTest, ConcurrentSessions) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 4}, 33);
  Cluster cluster(d);
  std::atomic<int> ok{0};
  std::vector<std::thread> clients;
  for (int c = 0; c < 6; ++c) {
    clients.emplace_back([&, c] {
      TcpTransport tcp(cluster.endpoints());
      RetrievalConfig config;
      config.theta = 1 + c % 4;
      config.seed = c;
      const Transcript t = Retrieve(f, d.matrix(), d.spec(), d.length(), config, tcp);
      if (t.decoded == d.Truth(config.theta)) ++ok;
    });
  }
  for (auto& t : clients) t.join();
  EXPECT_EQ(ok.load(), 6);
}

TEST(TcpTransportTest, UnreachableServerIsTransportError) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 2}, 34);
  std::uint16_t port;
  {
    Cluster cluster(d);
    port = cluster.endpoints()[0].port;
    cluster.server(0).Stop();
    cluster.server(1).Stop();
  }
  TcpTransport tcp({{"127.0.0.1", port}, {"127.0.0.1", port}});
  RetrievalConfig config;
  EXPECT_EQ(ErrorCodeOf([&] { Retrieve(f, d.matrix(), d.spec(), d.length(), config, tcp); }),
            ErrorCode::kTransportError);
}

TEST(TcpServerTest, BindFailureIsReported) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 2}, 35);
  TcpServer first(d.engine(), "127.0.0.1", 0);
  EXPECT_EQ(ErrorCodeOf([&] { TcpServer second(d.engine(), "127.0.0.1", first.port()); }),
            ErrorCode::kBindError);
  EXPECT_EQ(ErrorCodeOf([&] { TcpServer bad(d.engine(), "not-an-ip", 0); }),
            ErrorCode::kBindError);
}

}  // namespace
}  // namespace privcomp
