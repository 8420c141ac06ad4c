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
#ifndef PRIVCOMP_PLANNER_H_
#define PRIVCOMP_PLANNER_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "privcomp/gf.h"
#include "privcomp/wire.h"

namespace privcomp {

// Sorted 1-based message indices.
using MessageSet = std::vector<std::uint16_t>;

std::uint64_t Binomial(std::uint64_t n, std::uint64_t k);
// All size-k subsets of {1..n} in lexicographic order.
std::vector<MessageSet> Subsets(std::size_t n, std::size_t k);
// 0-based lexicographic rank of a sorted subset of {1..n}.
std::size_t SubsetRank(const MessageSet& subset, std::size_t n);

// Largest L = N^M the planner accepts.
inline constexpr std::uint64_t kMaxSymbolsPerRound = std::uint64_t{1} << 24;

// N^M, or kInvalidArgument if it exceeds kMaxSymbolsPerRound.
std::uint64_t SymbolsPerRound(std::size_t servers, std::size_t messages);

inline constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

struct Term {
  std::uint16_t message = 0;
  std::uint64_t index = 0;  // virtual symbol index in [1:L]
  std::int8_t sign = 1;

  bool operator==(const Term&) const = default;
};

struct Query {
  std::vector<Term> terms;  // ascending message
  bool desired = false;     // contains the desired message
  std::uint16_t delta = 0;  // 1-based position of the desired term, 0 if absent
  std::uint16_t sub_block = 0;
  // For desired queries above level 1: position of the source query inside
  // the parent vertex, and the common sign ratio between this query's
  // non-desired terms and that source query.
  std::uint32_t parent_query = kNoParent;
  std::int8_t side_sign = 1;

  std::size_t block() const { return terms.size(); }
  MessageSet messages() const;
  // The desired term; only valid when desired is set.
  const Term& desired_term() const { return terms[delta - 1]; }
};

struct QueryVertex {
  std::vector<std::uint16_t> chain;  // (n_B, ..., n_1); chain[0] owns the vertex
  std::uint16_t level = 0;
  std::uint32_t parent = kNoParent;  // vertex id one level down
  std::vector<Query> queries;        // every level-subset of [1:M], lex order

  std::uint16_t server() const { return chain.front(); }
};

// Allocates fresh desired-symbol indices in visit order.
class IndexAllocator {
 public:
  IndexAllocator(std::uint64_t first, std::uint64_t limit)
      : next_(first), limit_(limit) {}
  // Throws kAllocatorExhausted past the limit.
  std::uint64_t Next();
  std::uint64_t issued_through() const { return next_ - 1; }

 private:
  std::uint64_t next_;
  std::uint64_t limit_;
};

// Desired queries built on top of the source queries, in source order, each
// with a fresh desired-symbol index. Signs are all +.
std::vector<Query> ExploitSi(const std::vector<Query>& sources, std::uint16_t theta,
                             IndexAllocator& allocator);

// Interference queries completing a level-B vertex from its desired queries.
// Throws kMissingSource if a required desired query is absent.
std::vector<Query> MSym(const std::vector<Query>& desired, std::uint16_t theta,
                        std::size_t block, std::size_t messages);

// The index-assigned query tree for one choice of desired message.
struct QueryTree {
  std::uint16_t theta = 0;
  std::uint16_t servers = 0;
  std::uint16_t messages = 0;
  std::uint64_t length = 0;  // N^M
  bool signed_plan = false;
  std::vector<QueryVertex> vertices;  // ordered by level, server, chain
  // by_server[n-1]: vertex ids of server n in transmission order.
  std::vector<std::vector<std::uint32_t>> by_server;
  // desired_origin[i-1]: (vertex id, query position) carrying u_theta(i).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> desired_origin;

  // Vertex ids at `level` for server n, in chain order.
  std::vector<std::uint32_t> LevelVertices(std::uint16_t server,
                                           std::uint16_t level) const;
};

// Unsigned tree (all signs +). Throws kInvalidArgument unless
// 1 <= theta <= M, N >= 1 and N^M within limits.
QueryTree BuildTree(std::uint16_t theta, std::uint16_t servers, std::uint16_t messages);

// Applies the four-step sign rule in place and records side_sign on every
// desired query. Over F_2 all signs stay +. Throws kInternal if the sign
// propagation is inconsistent.
void SignAssign(const PrimeField& field, QueryTree& tree);

// BuildTree followed by SignAssign.
std::shared_ptr<const QueryTree> BuildSignedTree(const PrimeField& field,
                                                 std::uint16_t theta,
                                                 std::uint16_t servers,
                                                 std::uint16_t messages);

// Private symbol permutation and signs: u_m(i) = sign[i] * W_m(perm[i]).
struct Randomizer {
  std::vector<std::uint64_t> permutation;  // permutation[i-1] = pi(i)
  std::vector<std::int8_t> signs;          // signs[i-1] = sigma_i
  bool identity = false;

  static Randomizer Identity(std::uint64_t length);
  // Uniform permutation by std::shuffle and uniform signs from a seeded
  // mt19937_64. Over F_2 the signs are fixed to +.
  static Randomizer Random(std::uint64_t length, std::uint64_t seed,
                           const PrimeField& field);
};

// A signed tree bound to a randomizer and a storage offset (for rounds).
class QueryPlan {
 public:
  QueryPlan(std::shared_ptr<const QueryTree> tree, Randomizer randomizer,
            std::uint64_t offset = 0);

  const QueryTree& tree() const { return *tree_; }
  const std::shared_ptr<const QueryTree>& shared_tree() const { return tree_; }
  const Randomizer& randomizer() const { return randomizer_; }
  std::uint64_t offset() const { return offset_; }

  std::uint16_t theta() const { return tree_->theta; }
  std::uint16_t servers() const { return tree_->servers; }
  std::uint16_t messages() const { return tree_->messages; }
  std::uint64_t length() const { return tree_->length; }

 private:
  std::shared_ptr<const QueryTree> tree_;
  Randomizer randomizer_;
  std::uint64_t offset_;
};

// Convenience: signed tree plus either the identity or a seeded randomizer.
QueryPlan MakePlan(const PrimeField& field, std::uint16_t theta, std::uint16_t servers,
                   std::uint16_t messages, std::uint64_t seed,
                   bool identity_randomizer = false);

struct WireOptions {
  // Negative control: the last block's desired term is sent without its
  // private sign when theta != 1.
  bool leak_theta_sign = false;
};

// Transmission order for one server (1-based).
std::vector<WireQuery> ServerWire(const QueryPlan& plan, std::uint16_t server,
                                  const WireOptions& options = {});
std::vector<std::vector<WireQuery>> ToWire(const QueryPlan& plan,
                                           const WireOptions& options = {});

// Per-server query counts by construction, for cross-checks.
std::uint64_t QueriesPerServer(std::size_t servers, std::size_t messages);

// Plan tables with the randomizer applied. The blocks layout lists every
// block by sub-block with one column per server; the tree layout lists each
// vertex's desired and interference partitions.
std::string RenderBlocksTable(const QueryPlan& plan);
std::string RenderTreeTable(const QueryPlan& plan, bool with_signs);

// "a".."z" for M <= 26, otherwise "u<m>".
std::string MessageLetter(std::size_t message, std::size_t messages);

}  // namespace privcomp

#endif  // PRIVCOMP_PLANNER_H_
