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

#include "commands.h"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "privcomp/analysis.h"
#include "privcomp/client.h"
#include "privcomp/error.h"
#include "privcomp/model.h"
#include "privcomp/planner.h"
#include "privcomp/privacy.h"
#include "privcomp/redundancy.h"
#include "privcomp/server.h"
#include "privcomp/transport.h"

namespace privcomp::cli {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void ConfigFail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

PrimeField MakeField(std::uint64_t modulus) {
  try {
    return PrimeField(modulus);
  } catch (const Error& e) {
    ConfigFail(std::string("--p: ") + e.what());
  }
}

void CheckShape(std::uint16_t servers, std::uint16_t datasets, std::uint16_t messages) {
  if (servers == 0) ConfigFail("--n must be at least 1");
  if (datasets == 0) ConfigFail("--k must be at least 1");
  if (messages < datasets) {
    ConfigFail("--m " + std::to_string(messages) + " is below --k " + std::to_string(datasets) +
               "; need M >= K");
  }
}

void CheckTheta(std::uint16_t theta, std::uint16_t messages) {
  if (theta == 0 || theta > messages) {
    ConfigFail("--theta " + std::to_string(theta) + " outside 1.." + std::to_string(messages));
  }
}

void WarnSingleServer(std::uint16_t servers) {
  if (servers == 1) {
    std::cerr << "warning: N=1 downloads every dataset; privacy is vacuous\n";
  }
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFileError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kFileError, "write to " + path + " failed");
}

// Loopback servers for the socket transport, one per replica.
class LoopbackCluster {
 public:
  LoopbackCluster(const ServerEngine& engine, std::uint16_t servers) {
    std::vector<Endpoint> endpoints;
    for (std::uint16_t n = 0; n < servers; ++n) {
      servers_.push_back(std::make_unique<TcpServer>(engine, "127.0.0.1", 0, [](const std::string& e) {
        std::cerr << "session error: " << e << "\n";
      }));
      endpoints.push_back({"127.0.0.1", servers_.back()->port()});
    }
    transport_ = std::make_unique<TcpTransport>(std::move(endpoints));
  }
  Transport& transport() { return *transport_; }

 private:
  std::vector<std::unique_ptr<TcpServer>> servers_;
  std::unique_ptr<TcpTransport> transport_;
};

struct DemoOutcome {
  Transcript transcript;
  RateReport report;
  bool decoded = false;
  bool rate_ok = false;
};

DemoOutcome RunOneDemo(const PrimeField& field, std::uint16_t servers, std::uint16_t datasets,
                       std::uint16_t messages, std::uint16_t theta, std::uint64_t seed,
                       const RunConfig& config) {
  const std::uint64_t length = SymbolsPerRound(servers, messages) * config.rounds;
  const CombinationMatrix matrix(
      field, RandomCombinationMatrix(field, seed, messages, datasets, false));
  const DatasetStore store = GenerateDatasets(field, seed + 1, datasets, length);
  const CompressionSpec spec =
      config.uncompressed ? CompressionSpec::Uncompressed(field, servers, messages, datasets)
                          : CompressionSpec::Build(field, servers, matrix.normalized());
  const ServerEngine engine(field, store, matrix, spec);

  RetrievalConfig retrieval;
  retrieval.theta = theta;
  retrieval.seed = seed;
  retrieval.identity_randomizer = config.identity_randomizer;

  DemoOutcome outcome;
  if (config.transport == "socket") {
    LoopbackCluster cluster(engine, servers);
    outcome.transcript = Retrieve(field, matrix, spec, length, retrieval, cluster.transport());
  } else {
    InProcessTransport transport(std::vector<const ServerEngine*>(servers, &engine));
    outcome.transcript = Retrieve(field, matrix, spec, length, retrieval, transport);
  }
  const MessageView view(field, store, matrix);
  outcome.decoded = outcome.transcript.decoded == view.Message(matrix.internal_index(theta));
  outcome.report = MakeRateReport(outcome.transcript);
  outcome.rate_ok = config.uncompressed ? outcome.report.rate == outcome.report.pir1_rate
                                        : outcome.report.match;
  return outcome;
}

void CheckTransport(const std::string& transport) {
  if (transport != "inprocess" && transport != "socket") {
    ConfigFail("--transport must be inprocess or socket, got '" + transport + "'");
  }
}

int RunGrid(const RunConfig& config) {
  const PrimeField field = MakeField(config.modulus);
  std::vector<RateReport> reports;
  Json points = Json::array();
  bool all_ok = true;
  for (std::uint16_t servers : {2, 3}) {
    for (std::uint16_t datasets = 1; datasets <= 3; ++datasets) {
      for (std::uint16_t messages = datasets; messages <= datasets + 3; ++messages) {
        bool decoded = true;
        bool rate_ok = true;
        RateReport report;
        for (std::uint16_t theta = 1; theta <= messages; ++theta) {
          const DemoOutcome o =
              RunOneDemo(field, servers, datasets, messages, theta, config.seed, config);
          decoded &= o.decoded;
          rate_ok &= o.rate_ok;
          report = o.report;
        }
        all_ok &= decoded && rate_ok;
        reports.push_back(report);
        Json point = Json::parse(RenderJson(report));
        point["decode_ok_all_theta"] = decoded;
        points.push_back(point);
      }
    }
  }
  std::cout << RenderTable(reports);
  std::cout << "grid: " << reports.size() << " points, "
            << (all_ok ? "every theta decoded exactly at capacity" : "FAILURES present") << "\n";
  WriteText(config.out_path, points.dump(2) + "\n");
  return all_ok ? kExitOk : kExitCheckFailed;
}

std::vector<std::string> SplitEndpoints(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const std::string& item : raw) {
    std::stringstream in(item);
    std::string piece;
    while (std::getline(in, piece, ',')) {
      if (!piece.empty()) out.push_back(piece);
    }
  }
  return out;
}

std::atomic<bool> g_stop{false};

extern "C" void HandleStopSignal(int) { g_stop = true; }

}  // namespace

int RunDemo(const RunConfig& config) {
  CheckTransport(config.transport);
  if (config.rounds == 0) ConfigFail("--rounds must be at least 1");
  if (config.grid) return RunGrid(config);
  CheckShape(config.servers, config.datasets, config.messages);
  CheckTheta(config.theta, config.messages);
  const PrimeField field = MakeField(config.modulus);
  WarnSingleServer(config.servers);

  const DemoOutcome o = RunOneDemo(field, config.servers, config.datasets, config.messages,
                                   config.theta, config.seed, config);
  const Transcript& t = o.transcript;
  std::cout << "demo N=" << t.servers << " K=" << t.datasets << " M=" << t.messages
            << " p=" << t.modulus << " theta=" << config.theta << " seed=" << config.seed
            << " transport=" << config.transport << " rounds=" << t.rounds << "\n";
  const Json summary = Json::parse(TranscriptJson(t));
  for (const auto& s : summary["servers"]) {
    std::cout << "server " << s["server"].get<int>() << ": " << s["answers"].get<std::uint64_t>()
              << " answers, digest " << s["digest"].get<std::string>() << "\n";
  }
  std::cout << "decode " << (o.decoded ? "OK" : "MISMATCH") << " (" << t.decoded.size()
            << " symbols)\n";
  std::cout << RenderText(o.report);

  Json out;
  out["transcript"] = summary;
  out["report"] = Json::parse(RenderJson(o.report));
  out["decode_ok"] = o.decoded;
  WriteText(config.out_path, out.dump(2) + "\n");
  return o.decoded && o.rate_ok ? kExitOk : kExitCheckFailed;
}

int RunServe(const RunConfig& config) {
  if (config.data_path.empty()) ConfigFail("serve needs --data");
  if (config.matrix_path.empty()) ConfigFail("serve needs --matrix");
  if (config.servers == 0) ConfigFail("--n must be at least 1");
  const PrimeField field = MakeField(config.modulus);
  const DatasetStore store = ReadDatasetFile(config.data_path, field);
  const CombinationMatrix matrix(field, ReadMatrixFile(config.matrix_path, field));
  if (store.datasets() != matrix.datasets()) {
    throw Error(ErrorCode::kShapeMismatch, "dataset file holds " +
                                                std::to_string(store.datasets()) +
                                                " datasets, matrix has " +
                                                std::to_string(matrix.datasets()) + " columns");
  }
  const CompressionSpec spec =
      config.uncompressed
          ? CompressionSpec::Uncompressed(field, config.servers, matrix.messages(),
                                          matrix.datasets())
          : CompressionSpec::Build(field, config.servers, matrix.normalized());
  const ServerEngine engine(field, store, matrix, spec);

  std::signal(SIGINT, HandleStopSignal);
  std::signal(SIGTERM, HandleStopSignal);
  TcpServer server(engine, config.host, config.port, [](const std::string& e) {
    std::cerr << "session error: " << e << "\n";
  });
  std::cout << "serving N=" << config.servers << " K=" << matrix.datasets()
            << " M=" << matrix.messages() << " p=" << field.modulus() << " L=" << store.length()
            << " on " << config.host << ":" << server.port() << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.Stop();
  std::cout << "stopped" << std::endl;
  return kExitOk;
}

int RunRetrieve(const RunConfig& config) {
  if (config.matrix_path.empty()) ConfigFail("retrieve needs --matrix");
  const std::vector<std::string> endpoints = SplitEndpoints(config.endpoints);
  if (endpoints.size() != config.servers) {
    ConfigFail("--endpoints lists " + std::to_string(endpoints.size()) +
               " servers but --n is " + std::to_string(config.servers));
  }
  std::vector<Endpoint> parsed;
  for (const std::string& e : endpoints) parsed.push_back(ParseEndpoint(e));
  const PrimeField field = MakeField(config.modulus);
  const CombinationMatrix matrix(field, ReadMatrixFile(config.matrix_path, field));
  CheckShape(config.servers, static_cast<std::uint16_t>(matrix.datasets()),
             static_cast<std::uint16_t>(matrix.messages()));
  CheckTheta(config.theta, static_cast<std::uint16_t>(matrix.messages()));
  WarnSingleServer(config.servers);
  const std::uint64_t length =
      config.length != 0 ? config.length
                         : SymbolsPerRound(config.servers, matrix.messages()) * config.rounds;
  const CompressionSpec spec =
      config.uncompressed
          ? CompressionSpec::Uncompressed(field, config.servers, matrix.messages(),
                                          matrix.datasets())
          : CompressionSpec::Build(field, config.servers, matrix.normalized());

  TcpTransport transport(parsed);
  RetrievalConfig retrieval;
  retrieval.theta = config.theta;
  retrieval.seed = config.seed;
  retrieval.identity_randomizer = config.identity_randomizer;
  const Transcript t = Retrieve(field, matrix, spec, length, retrieval, transport);

  const std::string transcript = TranscriptJson(t) + "\n";
  if (config.out_path.empty()) {
    std::cout << transcript;
  } else {
    WriteText(config.out_path, transcript);
  }
  if (!config.decoded_path.empty()) {
    std::ostringstream text;
    for (std::size_t i = 0; i < t.decoded.size(); ++i) text << (i ? " " : "") << t.decoded[i];
    WriteText(config.decoded_path, text.str() + "\n");
  }
  if (!config.data_path.empty()) {
    const DatasetStore store = ReadDatasetFile(config.data_path, field);
    const MessageView view(field, store, matrix);
    const bool ok = t.decoded == view.Message(matrix.internal_index(config.theta));
    std::cerr << "decode " << (ok ? "OK" : "MISMATCH") << " against " << config.data_path
              << "\n";
    if (!ok) return kExitCheckFailed;
  }
  return kExitOk;
}

int RunAudit(const RunConfig& config) {
  CheckShape(config.servers, config.datasets, config.messages);
  const PrimeField field = MakeField(config.modulus);
  WarnSingleServer(config.servers);
  std::vector<AuditReport> reports;
  std::vector<std::string> notes;

  reports.push_back(StructuralAudit(field, config.servers, config.datasets, config.messages));
  try {
    reports.push_back(
        EnumerationAudit(field, config.servers, config.datasets, config.messages, config.budget));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBudgetExceeded) throw;
    notes.push_back(std::string("enumeration skipped: ") + e.what());
  }
  SampledAuditOptions sampled;
  sampled.samples = config.samples;
  sampled.seed = config.seed;
  sampled.wire.leak_theta_sign = config.leak_mutant;
  reports.push_back(
      SampledAudit(field, config.servers, config.datasets, config.messages, sampled).report);
  try {
    reports.push_back(AnswerObliviousnessAudit(field, config.servers, config.datasets,
                                               config.messages, config.seed));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFieldTooSmall) throw;
    notes.push_back(std::string("answer audit skipped: ") + e.what());
  }

  std::ostringstream text;
  bool failed = false;
  for (const AuditReport& r : reports) {
    text << r.Render() << "\n";
    failed |= !r.inconclusive && !r.passed();
  }
  for (const std::string& note : notes) text << "note " << note << "\n";
  text << "overall " << (failed ? "FAIL" : "PASS") << "\n";
  std::cout << text.str();
  WriteText(config.out_path, text.str());
  return failed ? kExitCheckFailed : kExitOk;
}

int RunTable(const RunConfig& config) {
  if (!config.identity_randomizer) {
    ConfigFail("table prints presentation-only plans; pass --identity-randomizer");
  }
  if (config.servers == 0 || config.messages == 0) ConfigFail("--n and --m must be positive");
  CheckTheta(config.theta, config.messages);
  if (config.layout != "blocks" && config.layout != "tree") {
    ConfigFail("--layout must be blocks or tree, got '" + config.layout + "'");
  }
  const PrimeField field = MakeField(config.modulus);
  std::string text;
  if (config.layout == "blocks") {
    std::shared_ptr<const QueryTree> tree =
        config.unsigned_table
            ? std::make_shared<const QueryTree>(
                  BuildTree(config.theta, config.servers, config.messages))
            : BuildSignedTree(field, config.theta, config.servers, config.messages);
    const QueryPlan plan(tree, Randomizer::Identity(tree->length));
    text = RenderBlocksTable(plan);
  } else {
    const QueryPlan plan = MakePlan(field, config.theta, config.servers, config.messages, 0, true);
    text = RenderTreeTable(plan, !config.unsigned_table);
  }
  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    WriteText(config.out_path, text);
  }
  return kExitOk;
}

}  // namespace privcomp::cli
