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
#ifndef PRIVCOMP_TOOLS_COMMANDS_H_
#define PRIVCOMP_TOOLS_COMMANDS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace privcomp::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // decode mismatch, rate gap, audit failure
inline constexpr int kExitConfig = 2;       // bad flags or config file
inline constexpr int kExitRuntime = 3;      // file, socket or protocol errors

struct RunConfig {
  std::uint16_t servers = 2;
  std::uint16_t datasets = 2;
  std::uint16_t messages = 4;
  std::uint64_t modulus = 65537;
  std::uint16_t theta = 1;
  std::uint64_t seed = 1;
  std::string transport = "inprocess";  // inprocess | socket
  std::vector<std::string> endpoints;
  std::string data_path;
  std::string matrix_path;
  std::string out_path;
  std::string decoded_path;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::uint64_t rounds = 1;
  std::uint64_t length = 0;  // retrieve: total symbols, 0 = one round
  std::uint64_t samples = 10000;
  std::uint64_t budget = 100000;
  std::string layout = "blocks";  // blocks | tree
  bool grid = false;
  bool identity_randomizer = false;
  bool uncompressed = false;
  bool unsigned_table = false;
  bool leak_mutant = false;
};

// Each command validates its own slice of the configuration and throws
// privcomp::Error(kConfigError) on bad input. The return value is the exit
// status.
int RunDemo(const RunConfig& config);
int RunServe(const RunConfig& config);
int RunRetrieve(const RunConfig& config);
int RunAudit(const RunConfig& config);
int RunTable(const RunConfig& config);

}  // namespace privcomp::cli

#endif  // PRIVCOMP_TOOLS_COMMANDS_H_
