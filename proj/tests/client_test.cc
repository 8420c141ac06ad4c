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

#include <gtest/gtest.h>

#include <functional>

#include "test_util.h"

namespace privcomp {
namespace {

using testing::Deployment;
using testing::ErrorCodeOf;
using testing::Shape;

// Raw and compressed answers of every server for one plan.
struct Answers {
  std::vector<std::vector<Element>> raw;
  std::vector<std::vector<Element>> compressed;
};

Answers Collect(const Deployment& d, const QueryPlan& plan) {
  Answers a;
  for (std::uint16_t n = 1; n <= plan.servers(); ++n) {
    a.raw.push_back(d.engine().Evaluate(ServerWire(plan, n)));
    a.compressed.push_back(d.engine().Compress(a.raw.back()));
  }
  return a;
}

// Passes frames through to in-process engines, then lets a hook edit them.
class TamperingTransport : public Transport {
 public:
  TamperingTransport(std::vector<const ServerEngine*> engines,
                     std::function<void(std::vector<Frame>&)> hook)
      : inner_(std::move(engines)), hook_(std::move(hook)) {}
  std::size_t servers() const override { return inner_.servers(); }
  std::vector<Frame> Exchange(const std::vector<AddressedFrame>& requests) override {
    std::vector<Frame> out = inner_.Exchange(requests);
    hook_(out);
    return out;
  }

 private:
  InProcessTransport inner_;
  std::function<void(std::vector<Frame>&)> hook_;
};

class DecodeGridTest : public ::testing::TestWithParam<Shape> {};

TEST_P(DecodeGridTest, RecoversEveryMessageExactly) {
  const Shape shape = GetParam();
  const PrimeField f(65537);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Deployment d(f, shape, seed * 1000 + shape.messages);
    const MessageView view(f, d.store(), d.matrix());
    for (std::uint16_t theta = 1; theta <= shape.messages; ++theta) {
      SCOPED_TRACE(::testing::Message() << "seed " << seed << " theta " << theta);
      const auto shared = BuildSignedTree(f, theta, shape.servers, shape.messages);
      const QueryPlan plan(shared, Randomizer::Random(shared->length, seed + theta, f));
      const DecodeContext context(f, shared, d.matrix().normalized(), d.spec());
      const Answers a = Collect(d, plan);
      const auto decoded = Decode(context, plan, a.compressed);
      EXPECT_EQ(decoded, view.Message(theta));
      EXPECT_EQ(DecodeUncompressedOracle(f, plan, a.raw), decoded);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, DecodeGridTest,
                         ::testing::Values(Shape{2, 1, 1}, Shape{2, 1, 3}, Shape{2, 2, 2},
                                           Shape{2, 2, 4}, Shape{2, 3, 5}, Shape{3, 2, 4},
                                           Shape{3, 3, 5}, Shape{4, 2, 3}, Shape{1, 2, 4},
                                           Shape{1, 1, 3}));

TEST(DecodeTest, DesiredSymbolsPerLevel) {
  const PrimeField f(65537);
  const auto tree = BuildSignedTree(f, 2, 2, 4);
  std::vector<int> per_level(5, 0);
  for (const QueryVertex& v : tree->vertices) {
    for (const Query& q : v.queries) per_level[v.level] += q.desired;
  }
  EXPECT_EQ(per_level, (std::vector<int>{0, 2, 6, 6, 2}));
}

TEST(DecodeTest, ZeroDataDecodesToZero) {
  const PrimeField f(65537);
  DatasetStore zeros({std::vector<Element>(16, 0), std::vector<Element>(16, 0)});
  const Deployment d(f, {2, 2, 4}, std::move(zeros), RandomCombinationMatrix(f, 8, 4, 2, false));
  for (std::size_t theta = 1; theta <= 4; ++theta) {
    EXPECT_EQ(d.Run(theta, 3).decoded, std::vector<Element>(16, 0));
  }
}

TEST(DecodeTest, ZeroCombinationRowDecodesToZero) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 3}, GenerateDatasets(f, 4, 2, 8),
                     FieldMatrix::FromRows({{1, 0}, {0, 1}, {0, 0}}));
  EXPECT_EQ(d.Run(3, 1).decoded, std::vector<Element>(8, 0));
  EXPECT_EQ(d.Run(2, 1).decoded, d.Truth(2));
}

TEST(DecodeTest, SingleMessageReadsOneSymbolPerServer) {
  const PrimeField f(65537);
  const Deployment d(f, {3, 1, 1}, 5, false, true);
  const QueryPlan plan = MakePlan(f, 1, 3, 1, 0, true);
  const Answers a = Collect(d, plan);
  std::vector<Element> expected;
  for (const auto& server : a.raw) expected.push_back(server.at(0));
  EXPECT_EQ(DecodeUncompressedOracle(f, plan, a.raw), expected);
  EXPECT_EQ(expected, d.Truth(1));
}

TEST(DecodeTest, IncompleteAnswersAreReported) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 3}, 6);
  const auto shared = BuildSignedTree(f, 1, 2, 3);
  const QueryPlan plan(shared, Randomizer::Identity(shared->length));
  const DecodeContext context(f, shared, d.matrix().normalized(), d.spec());
  Answers a = Collect(d, plan);
  a.compressed[1].pop_back();
  EXPECT_EQ(ErrorCodeOf([&] { Decode(context, plan, a.compressed); }),
            ErrorCode::kIncompleteAnswers);
  a.compressed.pop_back();
  EXPECT_EQ(ErrorCodeOf([&] { Decode(context, plan, a.compressed); }),
            ErrorCode::kIncompleteAnswers);
}

TEST(UnrandomizeTest, InvertsPermutationAndSigns) {
  const PrimeField f(7);
  Randomizer r;
  r.permutation = {3, 1, 2};
  r.signs = {1, -1, 1};
  const std::vector<Element> desired = {4, 5, 6};
  // out[pi(i)-1] = sigma_i u(i).
  EXPECT_EQ(Unrandomize(f, r, desired), (std::vector<Element>{2, 6, 4}));
}

TEST(RetrieveTest, RatesAndRounds) {
  const PrimeField f(65537);
  const Deployment two(f, {2, 2, 4}, 7, false, false, 3);
  const Transcript t = two.Run(3, 11);
  EXPECT_EQ(t.rounds, 3u);
  EXPECT_EQ(t.round_length, 16u);
  EXPECT_EQ(t.download_total, 3u * 24);
  EXPECT_EQ(t.decoded, two.Truth(3));
  ASSERT_EQ(t.requests.size(), 3u);
  ASSERT_EQ(t.requests[0].size(), 2u);

  const Deployment three(f, {3, 2, 4}, 8);
  EXPECT_EQ(three.Run(1, 1).download_total, 108u);
}

TEST(RetrieveTest, RejectsLengthOutsideRounds) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 2}, 9);
  InProcessTransport transport(d.engines());
  RetrievalConfig config;
  config.theta = 1;
  EXPECT_EQ(ErrorCodeOf([&] { Retrieve(f, d.matrix(), d.spec(), 6, config, transport); }),
            ErrorCode::kInvalidArgument);
}

TEST(RetrieveTest, ShortOrGarbledResponsesAreDecodeErrors) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 3}, 10);
  RetrievalConfig config;
  config.theta = 2;
  TamperingTransport short_answer(d.engines(), [](std::vector<Frame>& frames) {
    auto values = DecodeResponse(frames[1]);
    values.pop_back();
    frames[1] = EncodeResponse(values);
  });
  EXPECT_EQ(ErrorCodeOf([&] {
              Retrieve(f, d.matrix(), d.spec(), d.length(), config, short_answer);
            }),
            ErrorCode::kDecodeError);
  TamperingTransport garbled(d.engines(),
                             [](std::vector<Frame>& frames) { frames[0].resize(5); });
  EXPECT_EQ(ErrorCodeOf([&] {
              Retrieve(f, d.matrix(), d.spec(), d.length(), config, garbled);
            }),
            ErrorCode::kDecodeError);
}

TEST(RetrieveTest, RequestsDoNotDependOnSeedStructure) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 4}, 12);
  const Transcript a = d.Run(1, 5);
  const Transcript b = d.Run(4, 5);
  ASSERT_EQ(a.requests[0].size(), b.requests[0].size());
  for (std::size_t n = 0; n < 2; ++n) {
    EXPECT_EQ(a.requests[0][n].size(), b.requests[0][n].size());
    EXPECT_EQ(a.responses[0][n].size(), b.responses[0][n].size());
  }
}

TEST(TranscriptJsonTest, RedactsDesiredIndex) {
  const PrimeField f(65537);
  const Deployment d(f, {2, 2, 4}, 13);
  const std::string json = TranscriptJson(d.Run(3, 2));
  EXPECT_NE(json.find("\"redacted\""), std::string::npos);
  EXPECT_NE(json.find("\"2/3\""), std::string::npos);
  EXPECT_NE(json.find("\"download_total\": 24"), std::string::npos) << json;
}

}  // namespace
}  // namespace privcomp
