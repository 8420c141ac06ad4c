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

// privcomp: private linear computation over replicated servers.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.h"
#include "json.hpp"
#include "privcomp/error.h"

namespace {

using privcomp::Error;
using privcomp::ErrorCode;
using privcomp::cli::RunConfig;

// Finds the --config value before flag parsing so file values act as
// defaults that explicit flags override.
std::string FindConfigPath(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

template <typename T>
void Take(const nlohmann::json& value, T& field, const std::string& key) {
  try {
    field = value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kConfigError, "config key '" + key + "' has the wrong type");
  }
}

void LoadConfigFile(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, path + ": expected a JSON object");
  const std::map<std::string, std::function<void(const nlohmann::json&)>> setters = {
      {"n", [&](const auto& v) { Take(v, c.servers, "n"); }},
      {"k", [&](const auto& v) { Take(v, c.datasets, "k"); }},
      {"m", [&](const auto& v) { Take(v, c.messages, "m"); }},
      {"p", [&](const auto& v) { Take(v, c.modulus, "p"); }},
      {"theta", [&](const auto& v) { Take(v, c.theta, "theta"); }},
      {"seed", [&](const auto& v) { Take(v, c.seed, "seed"); }},
      {"transport", [&](const auto& v) { Take(v, c.transport, "transport"); }},
      {"endpoints",
       [&](const auto& v) {
         if (v.is_string()) {
           c.endpoints = {v.template get<std::string>()};
         } else {
           Take(v, c.endpoints, "endpoints");
         }
       }},
      {"data", [&](const auto& v) { Take(v, c.data_path, "data"); }},
      {"matrix", [&](const auto& v) { Take(v, c.matrix_path, "matrix"); }},
      {"out", [&](const auto& v) { Take(v, c.out_path, "out"); }},
      {"decoded", [&](const auto& v) { Take(v, c.decoded_path, "decoded"); }},
      {"host", [&](const auto& v) { Take(v, c.host, "host"); }},
      {"port", [&](const auto& v) { Take(v, c.port, "port"); }},
      {"rounds", [&](const auto& v) { Take(v, c.rounds, "rounds"); }},
      {"length", [&](const auto& v) { Take(v, c.length, "length"); }},
      {"samples", [&](const auto& v) { Take(v, c.samples, "samples"); }},
      {"budget", [&](const auto& v) { Take(v, c.budget, "budget"); }},
      {"layout", [&](const auto& v) { Take(v, c.layout, "layout"); }},
      {"grid", [&](const auto& v) { Take(v, c.grid, "grid"); }},
      {"identity_randomizer",
       [&](const auto& v) { Take(v, c.identity_randomizer, "identity_randomizer"); }},
      {"uncompressed", [&](const auto& v) { Take(v, c.uncompressed, "uncompressed"); }},
      {"unsigned", [&](const auto& v) { Take(v, c.unsigned_table, "unsigned"); }},
      {"leak_mutant", [&](const auto& v) { Take(v, c.leak_mutant, "leak_mutant"); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
    it->second(value);
  }
}

void AddShapeFlags(CLI::App* app, RunConfig& c) {
  app->add_option("--n", c.servers, "Number of servers N");
  app->add_option("--k", c.datasets, "Number of independent datasets K");
  app->add_option("--m", c.messages, "Number of messages M");
}

void AddCommon(CLI::App* app, RunConfig& c) {
  app->add_option("--p", c.modulus, "Prime field modulus");
  app->add_option("--seed", c.seed, "Seed for data, matrices and randomizers");
  app->add_option("--out", c.out_path, "Write the report to this file");
  app->add_option("--config", "JSON file of flag defaults; explicit flags win");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  try {
    const std::string config_path = FindConfigPath(argc, argv);
    if (!config_path.empty()) LoadConfigFile(config_path, config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return privcomp::cli::kExitConfig;
  }

  CLI::App app{"privcomp: private computation of linear functions over replicated servers"};
  app.require_subcommand(1);

  CLI::App* demo = app.add_subcommand("demo", "Generate data and run a full retrieval");
  AddShapeFlags(demo, config);
  AddCommon(demo, config);
  demo->add_option("--theta", config.theta, "Desired message (1-based)");
  demo->add_option("--transport", config.transport, "inprocess or socket");
  demo->add_option("--rounds", config.rounds, "Rounds of N^M symbols");
  demo->add_flag("--grid", config.grid, "Run the default parameter grid");
  demo->add_flag("--identity-randomizer", config.identity_randomizer,
                 "Disable the private permutation and signs");
  demo->add_flag("--uncompressed", config.uncompressed, "Download every query value");

  CLI::App* serve = app.add_subcommand("serve", "Answer queries over TCP");
  serve->add_option("--n", config.servers, "Number of servers N");
  AddCommon(serve, config);
  serve->add_option("--data", config.data_path, "Dataset file");
  serve->add_option("--matrix", config.matrix_path, "Combination matrix file");
  serve->add_option("--host", config.host, "IPv4 bind address");
  serve->add_option("--port", config.port, "TCP port (0 picks one)");
  serve->add_option("--endpoints", config.endpoints, "Ignored by serve");
  serve->add_option("--transport", config.transport, "Ignored by serve");
  serve->add_flag("--uncompressed", config.uncompressed, "Download every query value");

  CLI::App* retrieve = app.add_subcommand("retrieve", "Retrieve one message from live servers");
  retrieve->add_option("--n", config.servers, "Number of servers N");
  AddCommon(retrieve, config);
  retrieve->add_option("--theta", config.theta, "Desired message (1-based)");
  retrieve->add_option("--endpoints", config.endpoints, "host:port per server, in order");
  retrieve->add_option("--transport", config.transport, "Only socket is meaningful here");
  retrieve->add_option("--matrix", config.matrix_path, "Combination matrix file");
  retrieve->add_option("--data", config.data_path, "Dataset file used to verify the result");
  retrieve->add_option("--decoded", config.decoded_path, "Write decoded symbols here");
  retrieve->add_option("--length", config.length, "Total symbols stored per dataset");
  retrieve->add_option("--rounds", config.rounds, "Rounds of N^M symbols if --length is unset");
  retrieve->add_flag("--identity-randomizer", config.identity_randomizer,
                     "Disable the private permutation and signs");
  retrieve->add_flag("--uncompressed", config.uncompressed, "Download every query value");

  CLI::App* audit = app.add_subcommand("audit", "Run the privacy audits");
  AddShapeFlags(audit, config);
  AddCommon(audit, config);
  audit->add_option("--samples", config.samples, "Samples per theta for the sampled audit");
  audit->add_option("--budget", config.budget, "Largest enumeration per theta");
  audit->add_flag("--leak-mutant", config.leak_mutant,
                  "Negative control: leak the desired term's sign");

  CLI::App* table = app.add_subcommand("table", "Print a plan table");
  AddShapeFlags(table, config);
  AddCommon(table, config);
  table->add_option("--theta", config.theta, "Desired message (1-based)");
  table->add_option("--layout", config.layout, "blocks or tree");
  table->add_flag("--unsigned", config.unsigned_table, "Show the plan before sign assignment");
  table->add_flag("--identity-randomizer", config.identity_randomizer,
                  "Required: tables show the unrandomized plan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : privcomp::cli::kExitConfig;
  }

  try {
    if (*demo) return privcomp::cli::RunDemo(config);
    if (*serve) return privcomp::cli::RunServe(config);
    if (*retrieve) return privcomp::cli::RunRetrieve(config);
    if (*audit) return privcomp::cli::RunAudit(config);
    if (*table) return privcomp::cli::RunTable(config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool config_error = e.code() == ErrorCode::kConfigError ||
                              e.code() == ErrorCode::kInvalidArgument ||
                              e.code() == ErrorCode::kNotPrime;
    return config_error ? privcomp::cli::kExitConfig : privcomp::cli::kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return privcomp::cli::kExitRuntime;
  }
  return privcomp::cli::kExitConfig;
}
