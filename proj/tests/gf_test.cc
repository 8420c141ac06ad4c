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

#include "privcomp/gf.h"

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "privcomp/error.h"

namespace privcomp {
namespace {

ErrorCode CodeOf(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

FieldMatrix RandomMatrix(const PrimeField& f, std::mt19937_64& rng, std::size_t rows,
                         std::size_t cols) {
  FieldMatrix a(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) a(r, c) = rng() % f.modulus();
  }
  return a;
}

TEST(PrimeFieldTest, AcceptsPrimes) {
  EXPECT_EQ(PrimeField(65537).modulus(), 65537u);
  EXPECT_TRUE(PrimeField(2).is_binary());
  EXPECT_FALSE(PrimeField(3).is_binary());
}

TEST(PrimeFieldTest, RejectsCompositeAndOutOfRange) {
  EXPECT_EQ(CodeOf([] { PrimeField f(15); }), ErrorCode::kNotPrime);
  EXPECT_EQ(CodeOf([] { PrimeField f(1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { PrimeField f(PrimeField::kMaxModulus + 2); }),
            ErrorCode::kInvalidArgument);
}

TEST(PrimeFieldTest, InverseExamples) {
  EXPECT_EQ(PrimeField(5).Inv(2), 3u);
  EXPECT_EQ(PrimeField(5).Inv(1), 1u);
  EXPECT_EQ(PrimeField(7).Inv(3), 5u);
  EXPECT_EQ(CodeOf([] { PrimeField(7).Inv(0); }), ErrorCode::kDivisionByZero);
}

TEST(PrimeFieldTest, InverseRoundTripsOverWholeSmallField) {
  const PrimeField f(257);
  for (Element x = 1; x < 257; ++x) EXPECT_EQ(f.Mul(x, f.Inv(x)), 1u) << x;
}

TEST(PrimeFieldTest, SignedArithmetic) {
  const PrimeField f(5);
  EXPECT_EQ(f.FromSigned(-1), 4u);
  EXPECT_EQ(f.FromSigned(-7), 3u);
  EXPECT_EQ(f.FromSign(-1), 4u);
  EXPECT_EQ(f.Signed(-1, 2), 3u);
  EXPECT_EQ(f.Neg(0), 0u);
  EXPECT_EQ(PrimeField(2).FromSign(-1), 1u);
}

TEST(PrimeFieldTest, ArithmeticNearLargestModulus) {
  const PrimeField f(PrimeField::kMaxModulus);
  const Element big = PrimeField::kMaxModulus - 1;
  EXPECT_EQ(f.Mul(big, big), 1u);
  EXPECT_EQ(f.Add(big, big), big - 1);
}

TEST(IsPrimeTest, SmallValues) {
  EXPECT_FALSE(IsPrime(0));
  EXPECT_FALSE(IsPrime(1));
  EXPECT_TRUE(IsPrime(2));
  EXPECT_TRUE(IsPrime(65537));
  EXPECT_FALSE(IsPrime(65535));
}

TEST(DeterminantTest, Examples) {
  const PrimeField f(65537);
  EXPECT_EQ(Determinant(f, FieldMatrix::Identity(3)), 1u);
  EXPECT_EQ(Determinant(f, FieldMatrix::FromRows({{3, 5}, {7, 11}})),
            f.FromSigned(3 * 11 - 5 * 7));
  EXPECT_EQ(Determinant(f, FieldMatrix::FromRows({{1, 2, 3}, {4, 5, 6}, {1, 2, 3}})), 0u);
  EXPECT_EQ(CodeOf([&] { Determinant(f, FieldMatrix(2, 3)); }), ErrorCode::kNotSquare);
}

TEST(DeterminantTest, MultiplicativeOnRandomMatrices) {
  const PrimeField f(65537);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldMatrix a = RandomMatrix(f, rng, 4, 4);
    const FieldMatrix b = RandomMatrix(f, rng, 4, 4);
    EXPECT_EQ(Determinant(f, Multiply(f, a, b)),
              f.Mul(Determinant(f, a), Determinant(f, b)));
  }
}

TEST(SolveTest, IdentityReturnsRightHandSide) {
  const PrimeField f(65537);
  const std::vector<Element> b = {4, 8, 15};
  EXPECT_EQ(Solve(f, FieldMatrix::Identity(3), b), b);
}

TEST(SolveTest, RecoversKnownSolution) {
  const PrimeField f(65537);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldMatrix a = RandomMatrix(f, rng, 5, 5);
    if (Determinant(f, a) == 0) continue;
    std::vector<Element> x(5);
    for (Element& v : x) v = rng() % f.modulus();
    EXPECT_EQ(Solve(f, a, Multiply(f, a, x)), x);
  }
}

TEST(SolveTest, Errors) {
  const PrimeField f(7);
  const std::vector<Element> b = {1, 2};
  EXPECT_EQ(CodeOf([&] { Solve(f, FieldMatrix::FromRows({{1, 2}, {2, 4}}), b); }),
            ErrorCode::kSingular);
  EXPECT_EQ(CodeOf([&] { Solve(f, FieldMatrix(2, 3), b); }), ErrorCode::kNotSquare);
  const std::vector<Element> short_b = {1};
  EXPECT_EQ(CodeOf([&] { Solve(f, FieldMatrix::Identity(2), short_b); }),
            ErrorCode::kShapeMismatch);
}

TEST(SolveAnyTest, ConsistentAndInconsistentSystems) {
  const PrimeField f(7);
  const FieldMatrix a = FieldMatrix::FromRows({{1, 1, 0}, {2, 2, 0}});
  const std::vector<Element> good = {3, 6};
  const auto x = SolveAny(f, a, good);
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ(Multiply(f, a, *x), good);
  const std::vector<Element> bad = {3, 5};
  EXPECT_FALSE(SolveAny(f, a, bad).has_value());
}

TEST(InverseTest, ProductIsIdentity) {
  const PrimeField f(65537);
  std::mt19937_64 rng(5);
  const FieldMatrix a = RandomMatrix(f, rng, 6, 6);
  ASSERT_NE(Determinant(f, a), 0u);
  EXPECT_EQ(Multiply(f, a, Inverse(f, a)), FieldMatrix::Identity(6));
}

TEST(NullspaceTest, Examples) {
  EXPECT_TRUE(Nullspace(PrimeField(5), FieldMatrix::Identity(3)).empty());
  const auto basis = Nullspace(PrimeField(5), FieldMatrix::FromRows({{1, 1}}));
  ASSERT_EQ(basis.size(), 1u);
  // Bases are unique up to scaling; normalize the first coordinate to 1.
  const PrimeField f(5);
  ASSERT_NE(basis[0][0], 0u);
  const Element scale = f.Inv(basis[0][0]);
  EXPECT_EQ(f.Mul(scale, basis[0][0]), 1u);
  EXPECT_EQ(f.Mul(scale, basis[0][1]), 4u);
}

TEST(NullspaceTest, RankNullityAndAnnihilation) {
  const PrimeField f(13);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + rng() % 5;
    const std::size_t cols = 1 + rng() % 5;
    FieldMatrix a = RandomMatrix(f, rng, rows, cols);
    if (trial % 3 == 0 && rows > 1) {
      for (std::size_t c = 0; c < cols; ++c) a(rows - 1, c) = a(0, c);
    }
    const auto basis = Nullspace(f, a);
    EXPECT_EQ(Rank(f, a) + basis.size(), cols);
    for (const auto& v : basis) {
      for (Element e : Multiply(f, a, v)) EXPECT_EQ(e, 0u);
    }
  }
}

TEST(RankTest, Examples) {
  const PrimeField f(65537);
  EXPECT_EQ(Rank(f, FieldMatrix::Identity(4)), 4u);
  EXPECT_EQ(Rank(f, FieldMatrix(3, 5)), 0u);
}

TEST(RankTest, VandermondeWithDistinctNodesHasFullRank) {
  const PrimeField f(101);
  for (std::size_t t = 1; t <= 8; ++t) {
    FieldMatrix v(t, t);
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t c = 0; c < t; ++c) v(r, c) = f.Pow(r + 1, c);
    }
    EXPECT_EQ(Rank(f, v), t);
    EXPECT_NE(Determinant(f, v), 0u);
  }
}

TEST(FieldMatrixTest, ShapeChecksAndHelpers) {
  EXPECT_EQ(CodeOf([] { FieldMatrix m(2, 2, {1, 2, 3}); }), ErrorCode::kShapeMismatch);
  const FieldMatrix a = FieldMatrix::FromRows({{1, 2}, {3, 4}, {5, 6}});
  const std::vector<std::size_t> pick = {2, 0};
  EXPECT_EQ(a.SelectRows(pick), FieldMatrix::FromRows({{5, 6}, {1, 2}}));
  EXPECT_EQ(a.Transpose(), FieldMatrix::FromRows({{1, 3, 5}, {2, 4, 6}}));
  EXPECT_EQ(a.StackBelow(FieldMatrix::FromRows({{7, 8}})).rows(), 4u);
}

TEST(ReduceRowEchelonTest, PivotColumns) {
  const PrimeField f(7);
  FieldMatrix a = FieldMatrix::FromRows({{0, 1, 2}, {0, 2, 4}, {1, 0, 1}});
  EXPECT_EQ(ReduceRowEchelon(f, a), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(a, FieldMatrix::FromRows({{1, 0, 1}, {0, 1, 2}, {0, 0, 0}}));
}

}  // namespace
}  // namespace privcomp
