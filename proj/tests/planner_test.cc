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

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "test_util.h"

namespace privcomp {
namespace {

using testing::ErrorCodeOf;

// (message, index, sign) triples.
Query MakeQuery(std::initializer_list<std::tuple<int, int, int>> terms) {
  Query q;
  for (const auto& [m, i, s] : terms) {
    q.terms.push_back({static_cast<std::uint16_t>(m), static_cast<std::uint64_t>(i),
                       static_cast<std::int8_t>(s)});
  }
  return q;
}

std::vector<std::vector<Term>> TermsOf(const std::vector<Query>& queries) {
  std::vector<std::vector<Term>> out;
  for (const Query& q : queries) out.push_back(q.terms);
  return out;
}

const QueryVertex& FindVertex(const QueryTree& tree, std::vector<std::uint16_t> chain) {
  for (const QueryVertex& v : tree.vertices) {
    if (v.chain == chain) return v;
  }
  ADD_FAILURE() << "missing vertex";
  return tree.vertices.front();
}

std::vector<const Query*> Desired(const QueryVertex& v) {
  std::vector<const Query*> out;
  for (const Query& q : v.queries) {
    if (q.desired) out.push_back(&q);
  }
  return out;
}

TEST(CombinatoricsTest, BinomialAndSubsets) {
  EXPECT_EQ(Binomial(6, 3), 20u);
  EXPECT_EQ(Binomial(3, 5), 0u);
  EXPECT_EQ(Binomial(5, 0), 1u);
  const auto subsets = Subsets(4, 2);
  ASSERT_EQ(subsets.size(), 6u);
  EXPECT_EQ(subsets.front(), (MessageSet{1, 2}));
  EXPECT_EQ(subsets.back(), (MessageSet{3, 4}));
  for (std::size_t i = 0; i < subsets.size(); ++i) EXPECT_EQ(SubsetRank(subsets[i], 4), i);
  const auto big = Subsets(8, 4);
  for (std::size_t i = 0; i < big.size(); ++i) EXPECT_EQ(SubsetRank(big[i], 8), i);
}

TEST(CombinatoricsTest, SymbolsPerRoundLimit) {
  EXPECT_EQ(SymbolsPerRound(2, 4), 16u);
  EXPECT_EQ(SymbolsPerRound(1, 7), 1u);
  EXPECT_EQ(ErrorCodeOf([] { SymbolsPerRound(2, 25); }), ErrorCode::kInvalidArgument);
}

TEST(ExploitSiTest, ExampleAServerTwo) {
  IndexAllocator alloc(3, 16);
  const auto out = ExploitSi({MakeQuery({{2, 2, 1}})}, 1, alloc);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].terms, MakeQuery({{1, 3, 1}, {2, 2, 1}}).terms);
  EXPECT_TRUE(out[0].desired);
  EXPECT_EQ(out[0].delta, 1);
  EXPECT_EQ(alloc.issued_through(), 3u);
}

TEST(ExploitSiTest, TreeVertexFromLevelOneInterference) {
  IndexAllocator alloc(10, 81);
  const auto out = ExploitSi(
      {MakeQuery({{2, 1, 1}}), MakeQuery({{3, 1, 1}}), MakeQuery({{4, 1, 1}})}, 1, alloc);
  EXPECT_EQ(TermsOf(out), TermsOf({MakeQuery({{1, 10, 1}, {2, 1, 1}}),
                                   MakeQuery({{1, 11, 1}, {3, 1, 1}}),
                                   MakeQuery({{1, 12, 1}, {4, 1, 1}})}));
}

TEST(ExploitSiTest, EmptySourcesAndExhaustion) {
  IndexAllocator alloc(1, 1);
  EXPECT_TRUE(ExploitSi({}, 1, alloc).empty());
  EXPECT_EQ(alloc.Next(), 1u);
  EXPECT_EQ(ErrorCodeOf([&] { alloc.Next(); }), ErrorCode::kAllocatorExhausted);
}

TEST(MSymTest, ExampleALevelTwo) {
  const auto out = MSym({MakeQuery({{1, 3, 1}, {2, 2, 1}}), MakeQuery({{1, 4, 1}, {3, 2, 1}}),
                         MakeQuery({{1, 5, 1}, {4, 2, 1}})},
                        1, 2, 4);
  EXPECT_EQ(TermsOf(out), TermsOf({MakeQuery({{2, 4, 1}, {3, 3, 1}}),
                                   MakeQuery({{2, 5, 1}, {4, 3, 1}}),
                                   MakeQuery({{3, 5, 1}, {4, 4, 1}})}));
  for (const Query& q : out) EXPECT_FALSE(q.desired);
}

TEST(MSymTest, ExampleALevelThree) {
  const auto out = MSym({MakeQuery({{1, 9, 1}, {2, 7, 1}, {3, 6, 1}}),
                         MakeQuery({{1, 10, 1}, {2, 8, 1}, {4, 6, 1}}),
                         MakeQuery({{1, 11, 1}, {3, 8, 1}, {4, 7, 1}})},
                        1, 3, 4);
  EXPECT_EQ(TermsOf(out), TermsOf({MakeQuery({{2, 11, 1}, {3, 10, 1}, {4, 9, 1}})}));
}

TEST(MSymTest, FullBlockHasNoInterference) {
  EXPECT_TRUE(
      MSym({MakeQuery({{1, 15, 1}, {2, 14, 1}, {3, 13, 1}, {4, 12, 1}})}, 1, 4, 4).empty());
}

TEST(MSymTest, MissingSourceIsReported) {
  EXPECT_EQ(ErrorCodeOf([] { MSym({MakeQuery({{1, 3, 1}, {2, 2, 1}})}, 1, 2, 4); }),
            ErrorCode::kMissingSource);
}

TEST(BuildTreeTest, ThreeServerTreeVertex) {
  const QueryTree tree = BuildTree(1, 3, 4);
  const QueryVertex& v = FindVertex(tree, {3, 1, 2});
  const auto desired = Desired(v);
  ASSERT_EQ(desired.size(), 3u);
  EXPECT_EQ(desired[0]->terms, MakeQuery({{1, 46, 1}, {2, 5, 1}, {3, 4, 1}}).terms);
  EXPECT_EQ(desired[1]->terms, MakeQuery({{1, 47, 1}, {2, 6, 1}, {4, 4, 1}}).terms);
  EXPECT_EQ(desired[2]->terms, MakeQuery({{1, 48, 1}, {3, 6, 1}, {4, 5, 1}}).terms);
  EXPECT_EQ(tree.length, 81u);
}

TEST(BuildTreeTest, SingleMessage) {
  const QueryTree tree = BuildTree(1, 3, 1);
  ASSERT_EQ(tree.vertices.size(), 3u);
  for (std::uint16_t n = 1; n <= 3; ++n) {
    const QueryVertex& v = tree.vertices[tree.by_server[n - 1].front()];
    ASSERT_EQ(v.queries.size(), 1u);
    EXPECT_EQ(v.queries[0].terms, MakeQuery({{1, n, 1}}).terms);
  }
}

TEST(BuildTreeTest, Errors) {
  EXPECT_EQ(ErrorCodeOf([] { BuildTree(0, 2, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ErrorCodeOf([] { BuildTree(4, 2, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ErrorCodeOf([] { BuildTree(1, 0, 3); }), ErrorCode::kInvalidArgument);
}

// Structural invariants over a grid of shapes and every desired message.
class TreeInvariantTest : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(TreeInvariantTest, CoverageCountsAndOrder) {
  const auto [servers, messages] = GetParam();
  const PrimeField field(65537);
  for (std::uint16_t theta = 1; theta <= messages; ++theta) {
    const auto tree = BuildSignedTree(field, theta, servers, messages);
    // Every desired index is used exactly once across all servers.
    std::vector<int> used(tree->length + 1, 0);
    std::vector<std::uint64_t> per_server(servers, 0);
    for (const QueryVertex& v : tree->vertices) {
      per_server[v.server() - 1] += v.queries.size();
      for (std::size_t i = 0; i < v.queries.size(); ++i) {
        const Query& q = v.queries[i];
        EXPECT_EQ(q.block(), v.level);
        EXPECT_TRUE(std::is_sorted(q.terms.begin(), q.terms.end(),
                                   [](const Term& a, const Term& b) {
                                     return a.message < b.message;
                                   }));
        if (i > 0) EXPECT_LT(v.queries[i - 1].messages(), q.messages());
        for (const Term& t : q.terms) {
          if (t.message == theta) ++used[t.index];
        }
        EXPECT_EQ(q.desired, q.delta != 0);
        if (q.desired) {
          EXPECT_EQ(q.desired_term().message, theta);
          EXPECT_EQ(q.desired_term().sign, (q.delta % 2 == 1) ? 1 : -1);
        }
      }
    }
    for (std::uint64_t i = 1; i <= tree->length; ++i) EXPECT_EQ(used[i], 1) << "index " << i;
    for (std::uint64_t count : per_server) {
      EXPECT_EQ(count, QueriesPerServer(servers, messages));
    }
    std::uint64_t expected = 0;
    for (int m = 1; m <= messages; ++m) {
      expected += static_cast<std::uint64_t>(std::pow(servers - 1, m - 1)) *
                  (Binomial(messages - 1, m) + Binomial(messages - 1, m - 1));
    }
    EXPECT_EQ(QueriesPerServer(servers, messages), expected);
    EXPECT_EQ(tree->desired_origin.size(), tree->length);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, TreeInvariantTest,
                         ::testing::Values(std::pair{1, 3}, std::pair{2, 1}, std::pair{2, 4},
                                           std::pair{2, 6}, std::pair{3, 4}, std::pair{3, 5},
                                           std::pair{4, 4}));

TEST(SignAssignTest, PrintedSignedQueries) {
  const PrimeField field(65537);
  const QueryPlan plan3 = MakePlan(field, 3, 2, 4, 0, true);
  const QueryVertex& v3 = FindVertex(plan3.tree(), {1, 2, 1});
  bool found = false;
  for (const Query& q : v3.queries) {
    if (q.terms == MakeQuery({{1, 8, -1}, {3, 10, -1}, {4, 6, 1}}).terms) found = true;
  }
  EXPECT_TRUE(found) << "-a_8 - c_10 + d_6 missing";

  const QueryPlan plan1 = MakePlan(field, 1, 2, 4, 0, true);
  const QueryVertex& v1 = FindVertex(plan1.tree(), {1, 2, 1, 2});
  ASSERT_EQ(v1.level, 4);
  EXPECT_EQ(v1.queries[0].terms,
            MakeQuery({{1, 15, 1}, {2, 14, -1}, {3, 13, 1}, {4, 12, -1}}).terms);
}

TEST(SignAssignTest, BinaryFieldKeepsAllSignsPositive) {
  const PrimeField field(2);
  for (std::uint16_t theta = 1; theta <= 4; ++theta) {
    const auto tree = BuildSignedTree(field, theta, 2, 4);
    for (const QueryVertex& v : tree->vertices) {
      for (const Query& q : v.queries) {
        for (const Term& t : q.terms) EXPECT_EQ(t.sign, 1);
      }
    }
  }
}

TEST(SignAssignTest, SymbolSignIsConsistentAcrossOccurrences) {
  const PrimeField field(65537);
  for (std::uint16_t theta = 1; theta <= 5; ++theta) {
    const auto tree = BuildSignedTree(field, theta, 3, 5);
    // Within one server's interference queries, a symbol keeps its sign
    // relative to the query's leading term wherever it is reused below.
    for (const QueryVertex& v : tree->vertices) {
      for (const Query& q : v.queries) {
        if (!q.desired || q.parent_query == kNoParent) continue;
        const Query& source = tree->vertices[v.parent].queries[q.parent_query];
        std::size_t j = 0;
        for (const Term& t : q.terms) {
          if (t.message == theta) continue;
          ASSERT_LT(j, source.terms.size());
          EXPECT_EQ(t.index, source.terms[j].index);
          EXPECT_EQ(t.sign, q.side_sign * source.terms[j].sign);
          ++j;
        }
      }
    }
  }
}

TEST(RandomizerTest, DeterministicPerSeed) {
  const PrimeField field(65537);
  const Randomizer a = Randomizer::Random(64, 42, field);
  const Randomizer b = Randomizer::Random(64, 42, field);
  const Randomizer c = Randomizer::Random(64, 43, field);
  EXPECT_EQ(a.permutation, b.permutation);
  EXPECT_EQ(a.signs, b.signs);
  EXPECT_NE(a.permutation, c.permutation);
  std::vector<std::uint64_t> sorted = a.permutation;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint64_t i = 0; i < 64; ++i) EXPECT_EQ(sorted[i], i + 1);
  EXPECT_FALSE(a.identity);
  EXPECT_TRUE(Randomizer::Identity(4).identity);
}

TEST(RandomizerTest, BinaryFieldSignsArePositive) {
  const Randomizer r = Randomizer::Random(32, 1, PrimeField(2));
  for (auto s : r.signs) EXPECT_EQ(s, 1);
}

TEST(RandomizerTest, PermutationsOfFourAreUniform) {
  const PrimeField field(65537);
  constexpr int kSamples = 100000;
  std::map<std::vector<std::uint64_t>, int> counts;
  int negative = 0;
  for (int s = 0; s < kSamples; ++s) {
    const Randomizer r = Randomizer::Random(4, 1000 + s, field);
    ++counts[r.permutation];
    negative += r.signs[0] < 0;
  }
  ASSERT_EQ(counts.size(), 24u);
  // One goodness-of-fit test over all 24 cells, rejecting at tail 1e-6.
  const double mean = kSamples / 24.0;
  double chi_square = 0.0;
  for (const auto& [perm, count] : counts) {
    chi_square += (count - mean) * (count - mean) / mean;
  }
  EXPECT_LT(chi_square, boost::math::quantile(
                            boost::math::complement(boost::math::chi_squared(23), 1e-6)));
  EXPECT_LT(std::abs(negative - kSamples / 2.0), 5 * std::sqrt(kSamples * 0.25));
}

TEST(ToWireTest, IdentityPlanSingletonBlockIsSortedByMessage) {
  const PrimeField field(65537);
  const QueryPlan plan = MakePlan(field, 3, 2, 4, 0, true);
  const auto wire = ServerWire(plan, 2);
  ASSERT_EQ(wire.size(), QueriesPerServer(2, 4));
  for (std::uint16_t m = 1; m <= 4; ++m) {
    ASSERT_EQ(wire[m - 1].terms.size(), 1u);
    EXPECT_EQ(wire[m - 1].terms[0].message, m);
    EXPECT_EQ(wire[m - 1].terms[0].position, 2u);
  }
}

TEST(ToWireTest, RandomizerIsAppliedToEveryTerm) {
  const PrimeField field(65537);
  const QueryPlan identity = MakePlan(field, 2, 2, 3, 0, true);
  const QueryPlan random = MakePlan(field, 2, 2, 3, 77, false);
  const Randomizer& r = random.randomizer();
  for (std::uint16_t n = 1; n <= 2; ++n) {
    const auto plain = ServerWire(identity, n);
    const auto mapped = ServerWire(random, n);
    ASSERT_EQ(plain.size(), mapped.size());
    for (std::size_t q = 0; q < plain.size(); ++q) {
      ASSERT_EQ(plain[q].terms.size(), mapped[q].terms.size());
      for (std::size_t t = 0; t < plain[q].terms.size(); ++t) {
        const WireTerm& a = plain[q].terms[t];
        const WireTerm& b = mapped[q].terms[t];
        EXPECT_EQ(b.message, a.message);
        EXPECT_EQ(b.position, r.permutation[a.position - 1]);
        EXPECT_EQ(b.sign, a.sign * r.signs[a.position - 1]);
      }
    }
  }
}

TEST(ToWireTest, PositionsDifferAcrossDesiredMessages) {
  const PrimeField field(65537);
  const auto one = ServerWire(MakePlan(field, 1, 2, 4, 0, true), 1);
  const auto three = ServerWire(MakePlan(field, 3, 2, 4, 0, true), 1);
  EXPECT_NE(one, three);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t q = 0; q < one.size(); ++q) {
    EXPECT_EQ(one[q].terms.size(), three[q].terms.size());
  }
}

TEST(MessageLetterTest, Names) {
  EXPECT_EQ(MessageLetter(1, 4), "a");
  EXPECT_EQ(MessageLetter(26, 26), "z");
  EXPECT_EQ(MessageLetter(3, 27), "u3");
}

}  // namespace
}  // namespace privcomp
