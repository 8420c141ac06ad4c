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

#include "privcomp/client.h"

#include <cstdio>
#include <random>

#include "json.hpp"
#include "privcomp/analysis.h"
#include "privcomp/error.h"

namespace privcomp {
namespace {

bool SameSignStructure(const QueryVertex& a, const QueryVertex& b) {
  if (a.queries.size() != b.queries.size()) return false;
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    const Query& x = a.queries[i];
    const Query& y = b.queries[i];
    if (x.desired != y.desired || x.side_sign != y.side_sign ||
        x.terms.size() != y.terms.size()) {
      return false;
    }
    for (std::size_t t = 0; t < x.terms.size(); ++t) {
      if (x.terms[t].sign != y.terms[t].sign) return false;
    }
  }
  return true;
}

// Value of the parent's source query for a desired query, or 0 at level 1.
Element ParentValue(const QueryTree& tree, const QueryVertex& v, const Query& q,
                    const SideInfoLedger& ledger) {
  if (v.parent == kNoParent) return 0;
  const auto& parent = ledger.values[v.parent];
  if (parent.empty()) {
    throw Error(ErrorCode::kInternal, "side information read before it was decoded");
  }
  (void)tree;
  return parent[q.parent_query];
}

}  // namespace

DecodeContext::DecodeContext(const PrimeField& field, std::shared_ptr<const QueryTree> tree,
                             const FieldMatrix& normalized, const CompressionSpec& spec)
    : field_(field), tree_(std::move(tree)), spec_(spec) {
  const QueryTree& t = *tree_;
  if (spec.messages() != t.messages || spec.servers() != t.servers ||
      normalized.rows() != t.messages || normalized.cols() != spec.datasets()) {
    throw Error(ErrorCode::kShapeMismatch, "tree, matrix and compression disagree");
  }
  if (!t.signed_plan) throw Error(ErrorCode::kInvalidArgument, "tree carries no signs");

  // Every vertex of a level must share the first vertex's sign structure.
  std::vector<std::uint32_t> first(t.messages, kNoParent);
  for (std::uint32_t id = 0; id < t.vertices.size(); ++id) {
    const QueryVertex& v = t.vertices[id];
    if (first[v.level - 1] == kNoParent) {
      first[v.level - 1] = id;
    } else if (!SameSignStructure(t.vertices[first[v.level - 1]], v)) {
      throw Error(ErrorCode::kInternal, "vertices of one level differ in sign structure");
    }
  }

  answer_offset_.resize(t.vertices.size());
  for (const auto& ids : t.by_server) {
    std::size_t offset = 0;
    for (std::uint32_t id : ids) {
      answer_offset_[id] = offset;
      offset += spec.level(t.vertices[id].level).rows;
    }
  }

  desired_is_zero_ = true;
  for (std::size_t k = 0; k < normalized.cols(); ++k) {
    desired_is_zero_ &= normalized(t.theta - 1, k) == 0;
  }
  relations_.resize(t.messages);
  inverses_.resize(t.messages);
  bool any_compressed = false;
  for (const auto& lc : spec.levels()) any_compressed |= !lc.identity;
  if (desired_is_zero_ || !any_compressed) return;

  const BasisSelection basis = SelectBasis(field, t.theta, normalized);
  const FieldMatrix coords = BasisCoordinates(field, basis, normalized);
  relations_ = LevelRelationRows(field, t, basis, coords);
  std::vector<bool> populated(t.messages, false);
  for (const QueryVertex& v : t.vertices) populated[v.level - 1] = true;
  for (std::size_t m = 1; m <= t.messages; ++m) {
    const LevelCompression& lc = spec.level(m);
    if (lc.identity || !populated[m - 1]) continue;
    const auto& rows = relations_[m - 1];
    if (lc.rows + rows.size() != lc.cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "level " + std::to_string(m) + " relation count does not complete the system");
    }
    FieldMatrix relation(rows.size(), lc.cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::copy(rows[r].row.begin(), rows[r].row.end(), relation.row(r).begin());
    }
    inverses_[m - 1] = Inverse(field, lc.matrix.StackBelow(relation));
  }
}

void DecodeVertex(const DecodeContext& context, std::uint32_t vertex,
                  std::span<const Element> answers, SideInfoLedger& ledger) {
  const PrimeField& field = context.field();
  const QueryTree& tree = context.tree();
  const QueryVertex& v = tree.vertices.at(vertex);
  const LevelCompression& lc = context.spec().level(v.level);
  if (answers.size() != lc.rows) {
    throw Error(ErrorCode::kIncompleteAnswers, "vertex answer block has the wrong length");
  }
  if (ledger.values.size() != tree.vertices.size()) ledger.values.resize(tree.vertices.size());
  if (lc.identity) {
    ledger.values[vertex].assign(answers.begin(), answers.end());
    return;
  }
  if (context.desired_is_zero()) {
    // Compressed levels cannot be inverted without a basis; only the desired
    // values, which are known, would be read from this vertex.
    ledger.values[vertex].assign(lc.cols, 0);
    return;
  }
  std::vector<Element> parent(v.queries.size(), 0);
  for (std::size_t x = 0; x < v.queries.size(); ++x) {
    if (v.queries[x].desired) parent[x] = ParentValue(tree, v, v.queries[x], ledger);
  }
  std::vector<Element> stacked(answers.begin(), answers.end());
  for (const RelationRow& rel : context.level_relations(v.level)) {
    Element rhs = 0;
    for (std::size_t x = 0; x < parent.size(); ++x) {
      if (rel.rhs_weights[x] != 0) rhs = field.Add(rhs, field.Mul(rel.rhs_weights[x], parent[x]));
    }
    stacked.push_back(rhs);
  }
  ledger.values[vertex] = Multiply(field, context.level_inverse(v.level), stacked);
}

std::vector<Element> DesiredSymbols(const PrimeField& field, const QueryTree& tree,
                                    const SideInfoLedger& ledger) {
  std::vector<Element> out(tree.length, 0);
  for (std::uint64_t i = 1; i <= tree.length; ++i) {
    const auto [vid, pos] = tree.desired_origin[i - 1];
    const QueryVertex& v = tree.vertices[vid];
    const Query& q = v.queries[pos];
    if (ledger.values.size() <= vid || ledger.values[vid].empty()) {
      throw Error(ErrorCode::kInternal, "desired symbol requested from an undecoded vertex");
    }
    const Element side = field.Signed(q.side_sign, ParentValue(tree, v, q, ledger));
    out[i - 1] = field.Signed(q.desired_term().sign, field.Sub(ledger.values[vid][pos], side));
  }
  return out;
}

std::vector<Element> Unrandomize(const PrimeField& field, const Randomizer& randomizer,
                                 std::span<const Element> desired) {
  std::vector<Element> out(desired.size(), 0);
  for (std::size_t i = 0; i < desired.size(); ++i) {
    out[randomizer.permutation[i] - 1] = field.Signed(randomizer.signs[i], desired[i]);
  }
  return out;
}

std::vector<Element> Decode(const DecodeContext& context, const QueryPlan& plan,
                            const std::vector<std::vector<Element>>& answers) {
  const QueryTree& tree = context.tree();
  if (&tree != &plan.tree()) {
    throw Error(ErrorCode::kInvalidArgument, "plan and decode context use different trees");
  }
  const std::uint64_t per_server = context.spec().PerServerDownload();
  if (answers.size() != tree.servers) {
    throw Error(ErrorCode::kIncompleteAnswers, "answers missing for some servers");
  }
  for (const auto& a : answers) {
    if (a.size() != per_server) {
      throw Error(ErrorCode::kIncompleteAnswers,
                  "expected " + std::to_string(per_server) + " answers, got " +
                      std::to_string(a.size()));
    }
  }
  if (context.desired_is_zero()) return std::vector<Element>(tree.length, 0);
  SideInfoLedger ledger;
  ledger.values.resize(tree.vertices.size());
  for (std::uint32_t id = 0; id < tree.vertices.size(); ++id) {
    const QueryVertex& v = tree.vertices[id];
    const std::size_t rows = context.spec().level(v.level).rows;
    const auto& server_answers = answers[v.server() - 1];
    DecodeVertex(context, id,
                 std::span<const Element>(server_answers).subspan(context.answer_offset(id), rows),
                 ledger);
  }
  const PrimeField& field = context.field();
  return Unrandomize(field, plan.randomizer(), DesiredSymbols(field, tree, ledger));
}

std::vector<Element> DecodeUncompressedOracle(const PrimeField& field, const QueryPlan& plan,
                                              const std::vector<std::vector<Element>>& raw) {
  const QueryTree& tree = plan.tree();
  if (raw.size() != tree.servers) {
    throw Error(ErrorCode::kIncompleteAnswers, "answers missing for some servers");
  }
  SideInfoLedger ledger;
  ledger.values.resize(tree.vertices.size());
  for (std::uint16_t n = 1; n <= tree.servers; ++n) {
    std::size_t offset = 0;
    for (std::uint32_t id : tree.by_server[n - 1]) {
      const std::size_t size = tree.vertices[id].queries.size();
      if (offset + size > raw[n - 1].size()) {
        throw Error(ErrorCode::kIncompleteAnswers, "raw answers too short");
      }
      ledger.values[id].assign(raw[n - 1].begin() + offset, raw[n - 1].begin() + offset + size);
      offset += size;
    }
  }
  return Unrandomize(field, plan.randomizer(), DesiredSymbols(field, tree, ledger));
}

Transcript Retrieve(const PrimeField& field, const CombinationMatrix& matrix,
                    const CompressionSpec& spec, std::uint64_t total_length,
                    const RetrievalConfig& config, Transport& transport) {
  const auto servers = static_cast<std::uint16_t>(spec.servers());
  const auto messages = static_cast<std::uint16_t>(matrix.messages());
  if (transport.servers() != servers) {
    throw Error(ErrorCode::kInvalidArgument, "transport reaches " +
                                                 std::to_string(transport.servers()) +
                                                 " servers, plan needs " +
                                                 std::to_string(servers));
  }
  const std::uint64_t round_length = SymbolsPerRound(servers, messages);
  if (total_length == 0 || total_length % round_length != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "store length " + std::to_string(total_length) + " is not a multiple of N^M=" +
                    std::to_string(round_length));
  }
  const auto theta = static_cast<std::uint16_t>(matrix.internal_index(config.theta));
  auto tree = BuildSignedTree(field, theta, servers, messages);
  DecodeContext context(field, tree, matrix.normalized(), spec);

  Transcript t;
  t.servers = servers;
  t.datasets = static_cast<std::uint16_t>(matrix.datasets());
  t.messages = messages;
  t.modulus = field.modulus();
  t.round_length = round_length;
  t.rounds = total_length / round_length;
  t.theta = config.theta;
  t.uncompressed = spec.uncompressed();

  RequestHeader header;
  header.modulus_check = static_cast<std::uint32_t>(field.modulus());
  header.servers = servers;
  header.datasets = t.datasets;
  header.messages = messages;
  header.length = total_length;

  std::mt19937_64 seeds(config.seed);
  std::vector<QueryPlan> plans;
  std::vector<AddressedFrame> outgoing;
  for (std::uint64_t r = 0; r < t.rounds; ++r) {
    const std::uint64_t round_seed = seeds();
    Randomizer randomizer = config.identity_randomizer
                                ? Randomizer::Identity(round_length)
                                : Randomizer::Random(round_length, round_seed, field);
    plans.emplace_back(tree, std::move(randomizer), r * round_length);
    auto wire = ToWire(plans.back(), config.wire);
    t.requests.emplace_back();
    for (std::uint16_t n = 1; n <= servers; ++n) {
      Request request{header, std::move(wire[n - 1])};
      t.requests.back().push_back(EncodeRequest(request));
      outgoing.push_back({n, t.requests.back().back()});
    }
  }

  const std::vector<Frame> incoming = transport.Exchange(outgoing);
  t.decoded.reserve(total_length);
  for (std::uint64_t r = 0; r < t.rounds; ++r) {
    std::vector<std::vector<Element>> answers;
    t.responses.emplace_back();
    for (std::uint16_t n = 1; n <= servers; ++n) {
      const Frame& frame = incoming[r * servers + (n - 1)];
      t.responses.back().push_back(frame);
      try {
        answers.push_back(DecodeResponse(frame));
      } catch (const Error& e) {
        throw Error(ErrorCode::kDecodeError,
                    "server " + std::to_string(n) + " response: " + e.what());
      }
      t.download_total += answers.back().size();
    }
    std::vector<Element> round;
    try {
      round = Decode(context, plans[r], answers);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kIncompleteAnswers) throw;
      throw Error(ErrorCode::kDecodeError, e.what());
    }
    t.decoded.insert(t.decoded.end(), round.begin(), round.end());
  }
  return t;
}

std::string TranscriptJson(const Transcript& t) {
  const RateReport report = MakeRateReport(t);
  nlohmann::ordered_json j;
  j["parameters"] = {{"N", t.servers},       {"K", t.datasets},
                     {"M", t.messages},      {"p", t.modulus},
                     {"L", t.round_length},  {"rounds", t.rounds},
                     {"theta", "redacted"},  {"mode", t.uncompressed ? "uncompressed" : "compressed"}};
  j["download_total"] = t.download_total;
  j["rate"] = FormatRational(report.rate);
  j["capacity"] = FormatRational(report.capacity);
  j["match"] = report.match;
  nlohmann::ordered_json servers = nlohmann::ordered_json::array();
  for (std::uint16_t n = 1; n <= t.servers; ++n) {
    std::vector<std::uint8_t> all;
    std::uint64_t count = 0;
    for (const auto& round : t.responses) {
      const Frame& f = round[n - 1];
      all.insert(all.end(), f.begin(), f.end());
      if (f.size() >= 8) count += DecodeResponse(f).size();
    }
    char digest[17];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(Fingerprint(all)));
    servers.push_back({{"server", n}, {"answers", count}, {"digest", digest}});
  }
  j["servers"] = servers;
  return j.dump(2);
}

}  // namespace privcomp
