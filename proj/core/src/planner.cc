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

#include "privcomp/planner.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "privcomp/error.h"

namespace privcomp {

std::uint64_t Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

std::vector<MessageSet> Subsets(std::size_t n, std::size_t k) {
  std::vector<MessageSet> out;
  if (k > n) return out;
  MessageSet current(k);
  std::iota(current.begin(), current.end(), std::uint16_t{1});
  for (;;) {
    out.push_back(current);
    std::size_t i = k;
    while (i > 0 && current[i - 1] == n - k + i) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

std::size_t SubsetRank(const MessageSet& subset, std::size_t n) {
  const std::size_t k = subset.size();
  std::size_t rank = 0;
  std::size_t previous = 0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t x = previous + 1; x < subset[j]; ++x) {
      rank += Binomial(n - x, k - j - 1);
    }
    previous = subset[j];
  }
  return rank;
}

std::uint64_t SymbolsPerRound(std::size_t servers, std::size_t messages) {
  if (servers == 0 || messages == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need N >= 1 and M >= 1");
  }
  std::uint64_t length = 1;
  for (std::size_t i = 0; i < messages; ++i) {
    length *= servers;
    if (length > kMaxSymbolsPerRound) {
      throw Error(ErrorCode::kInvalidArgument,
                  "N^M exceeds " + std::to_string(kMaxSymbolsPerRound));
    }
  }
  return length;
}

std::uint64_t QueriesPerServer(std::size_t servers, std::size_t messages) {
  std::uint64_t total = 0;
  std::uint64_t fan = 1;
  for (std::size_t m = 1; m <= messages; ++m) {
    total += fan * Binomial(messages, m);
    fan *= servers - 1;
  }
  return total;
}

MessageSet Query::messages() const {
  MessageSet out;
  out.reserve(terms.size());
  for (const Term& t : terms) out.push_back(t.message);
  return out;
}

std::uint64_t IndexAllocator::Next() {
  if (next_ > limit_) {
    throw Error(ErrorCode::kAllocatorExhausted,
                "more than " + std::to_string(limit_) + " desired symbols requested");
  }
  return next_++;
}

namespace {

std::uint16_t DeltaOf(const Query& q, std::uint16_t theta) {
  for (std::size_t t = 0; t < q.terms.size(); ++t) {
    if (q.terms[t].message == theta) return static_cast<std::uint16_t>(t + 1);
  }
  return 0;
}

// Sub-block label for a query of the given block with the given delta.
// Positive deltas are numbered in descending order; delta 0 comes last.
std::uint16_t SubBlockOf(std::size_t messages, std::uint16_t theta, std::size_t block,
                         std::uint16_t delta) {
  const std::size_t above = messages - theta;
  const std::size_t lo = block > above ? block - above : 1;
  const std::size_t hi = std::min<std::size_t>(block, theta);
  if (delta == 0) return static_cast<std::uint16_t>(hi - lo + 2);
  return static_cast<std::uint16_t>(hi - delta + 1);
}

// Chains (n_{B-1}, ..., n_1) below a level-B vertex owned by `server`, lex.
void EnumerateChains(std::uint16_t servers, std::size_t length, std::uint16_t avoid,
                     std::vector<std::uint16_t>& prefix,
                     std::vector<std::vector<std::uint16_t>>& out) {
  if (prefix.size() == length) {
    out.push_back(prefix);
    return;
  }
  for (std::uint16_t n = 1; n <= servers; ++n) {
    if (n == avoid) continue;
    prefix.push_back(n);
    EnumerateChains(servers, length, n, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Query> ExploitSi(const std::vector<Query>& sources, std::uint16_t theta,
                             IndexAllocator& allocator) {
  std::vector<Query> out;
  out.reserve(sources.size());
  for (const Query& source : sources) {
    Query q;
    q.desired = true;
    q.terms.reserve(source.terms.size() + 1);
    const Term fresh{theta, allocator.Next(), 1};
    bool placed = false;
    for (const Term& t : source.terms) {
      if (t.message == theta) {
        throw Error(ErrorCode::kInvalidArgument,
                    "source query already holds the desired message");
      }
      if (!placed && t.message > theta) {
        q.terms.push_back(fresh);
        placed = true;
      }
      q.terms.push_back({t.message, t.index, 1});
    }
    if (!placed) q.terms.push_back(fresh);
    q.delta = DeltaOf(q, theta);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Query> MSym(const std::vector<Query>& desired, std::uint16_t theta,
                        std::size_t block, std::size_t messages) {
  std::map<MessageSet, std::uint64_t> theta_index;
  for (const Query& q : desired) {
    MessageSet rest;
    std::uint64_t index = 0;
    for (const Term& t : q.terms) {
      if (t.message == theta) {
        index = t.index;
      } else {
        rest.push_back(t.message);
      }
    }
    theta_index.emplace(std::move(rest), index);
  }

  std::vector<Query> out;
  for (const MessageSet& subset : Subsets(messages, block)) {
    if (std::find(subset.begin(), subset.end(), theta) != subset.end()) continue;
    Query q;
    for (std::size_t l = 0; l < subset.size(); ++l) {
      MessageSet rest;
      for (std::size_t r = 0; r < subset.size(); ++r) {
        if (r != l) rest.push_back(subset[r]);
      }
      const auto it = theta_index.find(rest);
      if (it == theta_index.end()) {
        throw Error(ErrorCode::kMissingSource, "no desired query over the message set");
      }
      q.terms.push_back({subset[l], it->second, 1});
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<std::uint32_t> QueryTree::LevelVertices(std::uint16_t server,
                                                    std::uint16_t level) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t id : by_server.at(server - 1)) {
    if (vertices[id].level == level) out.push_back(id);
  }
  return out;
}

QueryTree BuildTree(std::uint16_t theta, std::uint16_t servers, std::uint16_t messages) {
  if (messages == 0 || theta == 0 || theta > messages) {
    throw Error(ErrorCode::kInvalidArgument, "desired message " + std::to_string(theta) +
                                                 " outside [1:" +
                                                 std::to_string(messages) + "]");
  }
  QueryTree tree;
  tree.theta = theta;
  tree.servers = servers;
  tree.messages = messages;
  tree.length = SymbolsPerRound(servers, messages);
  tree.by_server.resize(servers);
  tree.desired_origin.resize(tree.length);

  std::map<std::vector<std::uint16_t>, std::uint32_t> by_chain;
  auto add_vertex = [&](QueryVertex vertex) {
    const auto id = static_cast<std::uint32_t>(tree.vertices.size());
    for (std::uint32_t pos = 0; pos < vertex.queries.size(); ++pos) {
      const Query& q = vertex.queries[pos];
      if (q.desired) tree.desired_origin[q.desired_term().index - 1] = {id, pos};
    }
    by_chain.emplace(vertex.chain, id);
    tree.by_server[vertex.server() - 1].push_back(id);
    tree.vertices.push_back(std::move(vertex));
  };

  for (std::uint16_t n = 1; n <= servers; ++n) {
    QueryVertex v;
    v.chain = {n};
    v.level = 1;
    for (std::uint16_t m = 1; m <= messages; ++m) {
      Query q;
      q.terms.push_back({m, n, 1});
      q.desired = m == theta;
      q.delta = q.desired ? 1 : 0;
      q.sub_block = SubBlockOf(messages, theta, 1, q.delta);
      v.queries.push_back(std::move(q));
    }
    add_vertex(std::move(v));
  }

  IndexAllocator allocator(servers + 1, tree.length);
  for (std::uint16_t level = 2; level <= messages; ++level) {
    for (std::uint16_t n = 1; n <= servers; ++n) {
      std::vector<std::vector<std::uint16_t>> chains;
      std::vector<std::uint16_t> prefix;
      EnumerateChains(servers, level - 1, n, prefix, chains);
      for (const auto& below : chains) {
        const std::uint32_t parent_id = by_chain.at(below);
        std::vector<Query> sources;
        std::vector<std::uint32_t> source_pos;
        const auto& parent_queries = tree.vertices[parent_id].queries;
        for (std::uint32_t pos = 0; pos < parent_queries.size(); ++pos) {
          if (!parent_queries[pos].desired) {
            sources.push_back(parent_queries[pos]);
            source_pos.push_back(pos);
          }
        }
        std::vector<Query> desired = ExploitSi(sources, theta, allocator);
        for (std::size_t i = 0; i < desired.size(); ++i) {
          desired[i].parent_query = source_pos[i];
        }
        std::vector<Query> interference = MSym(desired, theta, level, messages);

        QueryVertex v;
        v.chain.push_back(n);
        v.chain.insert(v.chain.end(), below.begin(), below.end());
        v.level = level;
        v.parent = parent_id;
        v.queries.resize(Binomial(messages, level));
        for (auto* group : {&desired, &interference}) {
          for (Query& q : *group) {
            q.delta = DeltaOf(q, theta);
            q.sub_block = SubBlockOf(messages, theta, level, q.delta);
            v.queries[SubsetRank(q.messages(), messages)] = std::move(q);
          }
        }
        add_vertex(std::move(v));
      }
    }
  }
  if (allocator.issued_through() != tree.length) {
    throw Error(ErrorCode::kInternal, "desired symbols do not cover [1:L]");
  }
  return tree;
}

void SignAssign(const PrimeField& field, QueryTree& tree) {
  if (tree.signed_plan) {
    throw Error(ErrorCode::kInvalidArgument, "tree already carries signs");
  }
  tree.signed_plan = true;
  if (field.is_binary()) return;

  const std::uint64_t stride = tree.length + 1;
  std::vector<bool> negated((tree.messages + 1) * stride, false);
  auto key = [stride](const Term& t) { return t.message * stride + t.index; };

  // Step 1: alternate signs inside queries without the desired message.
  for (QueryVertex& v : tree.vertices) {
    for (Query& q : v.queries) {
      if (q.delta != 0) continue;
      for (std::size_t t = 1; t < q.terms.size(); t += 2) {
        q.terms[t].sign = -1;
        negated[key(q.terms[t])] = true;
      }
    }
  }
  for (const QueryVertex& v : tree.vertices) {
    for (const Query& q : v.queries) {
      if (q.delta != 0) continue;
      for (std::size_t t = 0; t < q.terms.size(); t += 2) {
        if (negated[key(q.terms[t])]) {
          throw Error(ErrorCode::kInternal, "symbol needs two different signs");
        }
      }
    }
  }

  const bool theta_not_first = tree.theta != 1;
  for (QueryVertex& v : tree.vertices) {
    for (Query& q : v.queries) {
      // Step 2: propagate negations.
      for (Term& t : q.terms) {
        if (negated[key(t)]) t.sign = -1;
      }
      if (q.delta == 0) continue;
      // Step 3: whole-query factor by sub-block.
      if ((q.sub_block + (theta_not_first ? 1 : 0)) % 2 == 1) {
        for (Term& t : q.terms) t.sign = static_cast<std::int8_t>(-t.sign);
      }
      // Step 4: the desired term's sign follows its position.
      q.terms[q.delta - 1].sign = q.delta % 2 == 1 ? 1 : -1;
    }
  }

  for (QueryVertex& v : tree.vertices) {
    if (v.parent == kNoParent) continue;
    const QueryVertex& parent = tree.vertices[v.parent];
    for (Query& q : v.queries) {
      if (!q.desired) continue;
      const Query& source = parent.queries[q.parent_query];
      int ratio = 0;
      std::size_t s = 0;
      for (const Term& t : q.terms) {
        if (t.message == tree.theta) continue;
        const int r = t.sign * source.terms[s++].sign;
        if (ratio != 0 && r != ratio) {
          throw Error(ErrorCode::kInternal, "side information carries mixed signs");
        }
        ratio = r;
      }
      q.side_sign = static_cast<std::int8_t>(ratio);
    }
  }
}

std::shared_ptr<const QueryTree> BuildSignedTree(const PrimeField& field,
                                                 std::uint16_t theta,
                                                 std::uint16_t servers,
                                                 std::uint16_t messages) {
  auto tree = std::make_shared<QueryTree>(BuildTree(theta, servers, messages));
  SignAssign(field, *tree);
  return tree;
}

Randomizer Randomizer::Identity(std::uint64_t length) {
  Randomizer r;
  r.permutation.resize(length);
  std::iota(r.permutation.begin(), r.permutation.end(), std::uint64_t{1});
  r.signs.assign(length, 1);
  r.identity = true;
  return r;
}

Randomizer Randomizer::Random(std::uint64_t length, std::uint64_t seed,
                              const PrimeField& field) {
  Randomizer r;
  std::mt19937_64 rng(seed);
  r.permutation.resize(length);
  std::iota(r.permutation.begin(), r.permutation.end(), std::uint64_t{1});
  std::shuffle(r.permutation.begin(), r.permutation.end(), rng);
  r.signs.assign(length, 1);
  if (!field.is_binary()) {
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& s : r.signs) s = coin(rng) ? 1 : -1;
  }
  return r;
}

QueryPlan::QueryPlan(std::shared_ptr<const QueryTree> tree, Randomizer randomizer,
                     std::uint64_t offset)
    : tree_(std::move(tree)), randomizer_(std::move(randomizer)), offset_(offset) {
  if (!tree_) throw Error(ErrorCode::kInvalidArgument, "null query tree");
  if (randomizer_.permutation.size() != tree_->length ||
      randomizer_.signs.size() != tree_->length) {
    throw Error(ErrorCode::kShapeMismatch, "randomizer length differs from N^M");
  }
}

QueryPlan MakePlan(const PrimeField& field, std::uint16_t theta, std::uint16_t servers,
                   std::uint16_t messages, std::uint64_t seed, bool identity_randomizer) {
  auto tree = BuildSignedTree(field, theta, servers, messages);
  const std::uint64_t length = tree->length;
  return QueryPlan(std::move(tree),
                   identity_randomizer ? Randomizer::Identity(length)
                                       : Randomizer::Random(length, seed, field));
}

namespace {

WireTerm ToWireTerm(const QueryPlan& plan, const Term& t, bool keep_scheme_sign) {
  const Randomizer& r = plan.randomizer();
  WireTerm w;
  w.message = t.message;
  w.position = plan.offset() + r.permutation[t.index - 1];
  w.sign = keep_scheme_sign ? t.sign : static_cast<std::int8_t>(t.sign * r.signs[t.index - 1]);
  return w;
}

}  // namespace

std::vector<WireQuery> ServerWire(const QueryPlan& plan, std::uint16_t server,
                                  const WireOptions& options) {
  const QueryTree& tree = plan.tree();
  if (server == 0 || server > tree.servers) {
    throw Error(ErrorCode::kIndexOutOfRange, "server index out of range");
  }
  const bool leak = options.leak_theta_sign && tree.theta != 1;
  std::vector<WireQuery> out;
  for (std::uint32_t id : tree.by_server[server - 1]) {
    for (const Query& q : tree.vertices[id].queries) {
      WireQuery w;
      w.terms.reserve(q.terms.size());
      for (const Term& t : q.terms) {
        const bool raw = leak && q.block() == tree.messages && t.message == tree.theta;
        w.terms.push_back(ToWireTerm(plan, t, raw));
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<std::vector<WireQuery>> ToWire(const QueryPlan& plan,
                                           const WireOptions& options) {
  std::vector<std::vector<WireQuery>> out;
  for (std::uint16_t n = 1; n <= plan.servers(); ++n) {
    out.push_back(ServerWire(plan, n, options));
  }
  return out;
}

std::string MessageLetter(std::size_t message, std::size_t messages) {
  if (messages <= 26) return std::string(1, static_cast<char>('a' + message - 1));
  return "u" + std::to_string(message);
}

namespace {

std::string FormatTerm(const QueryPlan& plan, const Term& t) {
  const WireTerm w = ToWireTerm(plan, t, false);
  return MessageLetter(w.message, plan.messages()) + "_" + std::to_string(w.position);
}

int WireSign(const QueryPlan& plan, const Term& t) {
  return ToWireTerm(plan, t, false).sign;
}

std::string FormatQuery(const QueryPlan& plan, const Query& q, bool with_signs) {
  std::string out;
  for (std::size_t i = 0; i < q.terms.size(); ++i) {
    const bool negative = with_signs && WireSign(plan, q.terms[i]) < 0;
    if (i == 0) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    out += FormatTerm(plan, q.terms[i]);
  }
  return out;
}

std::string ChainLabel(const QueryVertex& v) {
  std::string out;
  for (std::size_t i = 0; i < v.chain.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v.chain[i]);
  }
  return out;
}

}  // namespace

std::string RenderBlocksTable(const QueryPlan& plan) {
  const QueryTree& tree = plan.tree();
  std::ostringstream out;
  out << "theta=" << tree.theta << "\n";
  out << "B | S(delta)";
  for (std::uint16_t n = 1; n <= tree.servers; ++n) out << " | Server " << n;
  out << "\n";

  // Block 1: the desired singleton first, then the rest by message.
  out << "1 | ...";
  for (std::uint16_t n = 1; n <= tree.servers; ++n) {
    const QueryVertex& v = tree.vertices[tree.LevelVertices(n, 1).front()];
    std::vector<const Query*> order;
    order.push_back(&v.queries[tree.theta - 1]);
    for (const Query& q : v.queries) {
      if (!q.desired) order.push_back(&q);
    }
    out << " | ";
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i) out << ", ";
      out << FormatQuery(plan, *order[i], true);
    }
  }
  out << "\n";

  for (std::uint16_t level = 2; level <= tree.messages; ++level) {
    std::vector<std::vector<std::uint32_t>> columns;
    for (std::uint16_t n = 1; n <= tree.servers; ++n) {
      columns.push_back(tree.LevelVertices(n, level));
    }
    for (std::size_t slot = 0; slot < columns.front().size(); ++slot) {
      const QueryVertex& lead = tree.vertices[columns[0][slot]];
      std::vector<std::size_t> rows(lead.queries.size());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return lead.queries[a].sub_block < lead.queries[b].sub_block;
      });
      for (std::size_t row : rows) {
        const Query& q = lead.queries[row];
        out << level << " | " << q.sub_block << "(" << q.delta << ")";
        for (const auto& column : columns) {
          out << " | " << FormatQuery(plan, tree.vertices[column[slot]].queries[row], true);
        }
        out << "\n";
      }
    }
  }
  return out.str();
}

std::string RenderTreeTable(const QueryPlan& plan, bool with_signs) {
  const QueryTree& tree = plan.tree();
  std::ostringstream out;
  out << "theta=" << tree.theta << "\n";
  for (const QueryVertex& v : tree.vertices) {
    for (const bool desired : {true, false}) {
      std::vector<std::string> parts;
      for (const Query& q : v.queries) {
        if (q.desired == desired) parts.push_back(FormatQuery(plan, q, with_signs));
      }
      if (parts.empty()) continue;
      out << "Q(" << ChainLabel(v) << "," << (desired ? "M" : "I") << "): ";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out << ", ";
        out << parts[i];
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace privcomp
