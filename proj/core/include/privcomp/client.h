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
#ifndef PRIVCOMP_CLIENT_H_
#define PRIVCOMP_CLIENT_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "privcomp/gf.h"
#include "privcomp/model.h"
#include "privcomp/planner.h"
#include "privcomp/redundancy.h"
#include "privcomp/transport.h"

namespace privcomp {

// Everything about a desired message that decoding needs and that does not
// change between rounds: the signed tree, and per level the inverse of the
// compression rows stacked on the relation rows.
class DecodeContext {
 public:
  // Throws kInternal if vertices of one level differ in sign structure and
  // kSingular if a level's stacked system is not invertible.
  DecodeContext(const PrimeField& field, std::shared_ptr<const QueryTree> tree,
                const FieldMatrix& normalized, const CompressionSpec& spec);

  const PrimeField& field() const { return field_; }
  const QueryTree& tree() const { return *tree_; }
  const CompressionSpec& spec() const { return spec_; }
  // The desired row is zero, so every desired symbol is zero.
  bool desired_is_zero() const { return desired_is_zero_; }

  const FieldMatrix& level_inverse(std::size_t m) const { return inverses_[m - 1]; }
  const std::vector<RelationRow>& level_relations(std::size_t m) const {
    return relations_[m - 1];
  }
  // Offset of the vertex's answers inside its server's response.
  std::size_t answer_offset(std::uint32_t vertex) const { return answer_offset_[vertex]; }

 private:
  PrimeField field_;
  std::shared_ptr<const QueryTree> tree_;
  const CompressionSpec& spec_;
  bool desired_is_zero_ = false;
  std::vector<FieldMatrix> inverses_;
  std::vector<std::vector<RelationRow>> relations_;
  std::vector<std::size_t> answer_offset_;
};

// Recovered raw query values per vertex, filled level by level.
struct SideInfoLedger {
  std::vector<std::vector<Element>> values;  // by vertex id; empty = not yet decoded
};

// Recovers every raw query value of one vertex from its compressed answers.
// Reads parent values from the ledger (kInternal if missing) and stores the
// result there.
void DecodeVertex(const DecodeContext& context, std::uint32_t vertex,
                  std::span<const Element> answers, SideInfoLedger& ledger);

// The desired symbols u_theta(1..L) held by a decoded ledger.
std::vector<Element> DesiredSymbols(const PrimeField& field, const QueryTree& tree,
                                    const SideInfoLedger& ledger);

// Maps desired symbols back through the randomizer: out[pi(i)-1] = sigma_i u(i).
std::vector<Element> Unrandomize(const PrimeField& field, const Randomizer& randomizer,
                                 std::span<const Element> desired);

// Full decode of one round. answers[n-1] is server n's compressed response.
// Throws kIncompleteAnswers if a response has the wrong length.
std::vector<Element> Decode(const DecodeContext& context, const QueryPlan& plan,
                            const std::vector<std::vector<Element>>& answers);

// Reference decode from uncompressed per-query values, reading desired
// symbols straight off the tree.
std::vector<Element> DecodeUncompressedOracle(const PrimeField& field,
                                              const QueryPlan& plan,
                                              const std::vector<std::vector<Element>>& raw);

struct RetrievalConfig {
  std::size_t theta = 1;  // in caller (user) order
  std::uint64_t seed = 0;
  bool identity_randomizer = false;
  WireOptions wire;
};

struct Transcript {
  std::uint16_t servers = 0;
  std::uint16_t datasets = 0;
  std::uint16_t messages = 0;
  std::uint64_t modulus = 0;
  std::uint64_t round_length = 0;  // N^M
  std::uint64_t rounds = 0;
  std::size_t theta = 0;  // user order; never serialized
  bool uncompressed = false;
  std::vector<std::vector<Frame>> requests;   // [round][server]
  std::vector<std::vector<Frame>> responses;  // [round][server]
  std::vector<Element> decoded;               // all rounds, position order
  std::uint64_t download_total = 0;           // field symbols
};

// Plans, exchanges and decodes every round of a store of `total_length`
// symbols. Throws kInvalidArgument if the length is not a multiple of N^M,
// kTransportError, and kDecodeError for malformed or short responses.
Transcript Retrieve(const PrimeField& field, const CombinationMatrix& matrix,
                    const CompressionSpec& spec, std::uint64_t total_length,
                    const RetrievalConfig& config, Transport& transport);

// Parameters, download, exact rate and capacity, per-server answer counts
// and FNV-1a digests. The desired index is redacted.
std::string TranscriptJson(const Transcript& transcript);

}  // namespace privcomp

#endif  // PRIVCOMP_CLIENT_H_
