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

#include "privcomp/model.h"

#include <gtest/gtest.h>

#include <fstream>

#include "test_util.h"

namespace privcomp {
namespace {

using testing::ErrorCodeOf;

TEST(CombinationMatrixTest, IdentityTopIsUnchanged) {
  const PrimeField f(65537);
  const FieldMatrix raw = FieldMatrix::FromRows({{1, 0}, {0, 1}, {12, 34}, {56, 78}});
  const CombinationMatrix m(f, raw);
  EXPECT_EQ(m.normalized(), raw);
  EXPECT_EQ(m.evaluation(), raw);
  EXPECT_EQ(m.basis_change(), FieldMatrix::Identity(2));
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_EQ(m.internal_index(i), i);
}

TEST(CombinationMatrixTest, DependentTopRowsAreReordered) {
  const PrimeField f(65537);
  const FieldMatrix raw = FieldMatrix::FromRows({{1, 2}, {2, 4}, {0, 1}, {3, 5}});
  const CombinationMatrix m(f, raw);
  const FieldMatrix top = m.normalized().SelectRows(std::vector<std::size_t>{0, 1});
  EXPECT_EQ(top, FieldMatrix::Identity(2));
  EXPECT_EQ(Multiply(f, m.normalized(), m.basis_change()), m.evaluation());
  for (std::size_t internal = 1; internal <= 4; ++internal) {
    const std::size_t user = m.user_index(internal);
    EXPECT_EQ(m.internal_index(user), internal);
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_EQ(m.evaluation()(internal - 1, c), raw(user - 1, c));
    }
  }
  EXPECT_NE(m.user_index(2), 2u);
}

TEST(CombinationMatrixTest, RandomMatricesNormalize) {
  const PrimeField f(65537);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CombinationMatrix m(f, RandomCombinationMatrix(f, seed, 6, 3, false));
    EXPECT_EQ(Multiply(f, m.normalized(), m.basis_change()), m.evaluation());
    EXPECT_EQ(m.normalized().SelectRows(std::vector<std::size_t>{0, 1, 2}),
              FieldMatrix::Identity(3));
  }
}

TEST(CombinationMatrixTest, Errors) {
  const PrimeField f(7);
  EXPECT_EQ(ErrorCodeOf([&] { CombinationMatrix(f, FieldMatrix::FromRows({{1, 2}, {2, 4}})); }),
            ErrorCode::kRankDeficient);
  EXPECT_EQ(ErrorCodeOf([&] { CombinationMatrix(f, FieldMatrix::FromRows({{1, 2}})); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(ErrorCodeOf([&] { CombinationMatrix(f, FieldMatrix(3, 0)); }),
            ErrorCode::kInvalidArgument);
}

TEST(RandomCombinationMatrixTest, IdentityTopKeepsIdentity) {
  const PrimeField f(65537);
  const FieldMatrix raw = RandomCombinationMatrix(f, 4, 5, 2, true);
  EXPECT_EQ(raw.SelectRows(std::vector<std::size_t>{0, 1}), FieldMatrix::Identity(2));
  EXPECT_EQ(raw, RandomCombinationMatrix(f, 4, 5, 2, true));
}

TEST(GenerateDatasetsTest, DeterministicPerSeed) {
  const PrimeField f(65537);
  const DatasetStore a = GenerateDatasets(f, 9, 3, 50);
  const DatasetStore b = GenerateDatasets(f, 9, 3, 50);
  const DatasetStore c = GenerateDatasets(f, 10, 3, 50);
  EXPECT_EQ(a.dataset(1), b.dataset(1));
  EXPECT_EQ(a.dataset(3), b.dataset(3));
  EXPECT_NE(a.dataset(1), c.dataset(1));
  for (std::size_t k = 1; k <= 3; ++k) {
    for (Element x : a.dataset(k)) EXPECT_LT(x, 65537u);
  }
}

TEST(GenerateDatasetsTest, RejectsEmptyShapes) {
  const PrimeField f(65537);
  EXPECT_EQ(ErrorCodeOf([&] { GenerateDatasets(f, 1, 0, 4); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ErrorCodeOf([&] { GenerateDatasets(f, 1, 2, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ErrorCodeOf([] { DatasetStore({{1, 2}, {3}}); }), ErrorCode::kInvalidArgument);
}

TEST(MessageViewTest, BasisMessagesAreTheDatasets) {
  const PrimeField f(65537);
  const DatasetStore store = GenerateDatasets(f, 2, 2, 8);
  const CombinationMatrix m(f, FieldMatrix::FromRows({{1, 0}, {0, 1}, {3, 4}}));
  const MessageView view(f, store, m);
  for (std::size_t l = 1; l <= 8; ++l) {
    EXPECT_EQ(view.Symbol(1, l), store.at(1, l));
    EXPECT_EQ(view.Symbol(2, l), store.at(2, l));
    EXPECT_EQ(view.Symbol(3, l), f.Add(f.Mul(3, store.at(1, l)), f.Mul(4, store.at(2, l))));
  }
  EXPECT_EQ(ErrorCodeOf([&] { view.Symbol(4, 1); }), ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(ErrorCodeOf([&] { view.Symbol(1, 9); }), ErrorCode::kIndexOutOfRange);
}

TEST(MessageViewTest, ZeroDataGivesZeroMessages) {
  const PrimeField f(65537);
  const DatasetStore store({{0, 0, 0}, {0, 0, 0}});
  const CombinationMatrix m(f, RandomCombinationMatrix(f, 1, 4, 2, false));
  const MessageView view(f, store, m);
  for (std::size_t msg = 1; msg <= 4; ++msg) {
    EXPECT_EQ(view.Message(msg), (std::vector<Element>{0, 0, 0}));
  }
}

TEST(FileFormatTest, DatasetRoundTrip) {
  const PrimeField f(65537);
  const std::string path = ::testing::TempDir() + "/privcomp_data.txt";
  const DatasetStore store = GenerateDatasets(f, 5, 2, 16);
  WriteDatasetFile(path, store, f.modulus());
  const std::string text = testing::ReadFile(path);
  EXPECT_EQ(text.substr(0, text.find('\n')), "2 16 65537");
  const DatasetStore back = ReadDatasetFile(path, f);
  EXPECT_EQ(back.dataset(1), store.dataset(1));
  EXPECT_EQ(back.dataset(2), store.dataset(2));
}

TEST(FileFormatTest, MatrixRoundTrip) {
  const PrimeField f(65537);
  const std::string path = ::testing::TempDir() + "/privcomp_matrix.txt";
  const FieldMatrix raw = FieldMatrix::FromRows({{1, 0}, {0, 1}, {7, 9}});
  WriteMatrixFile(path, raw);
  EXPECT_EQ(testing::ReadFile(path), "1 0\n0 1\n7 9\n");
  EXPECT_EQ(ReadMatrixFile(path, f), raw);
}

TEST(FileFormatTest, BadFilesReportFileError) {
  const PrimeField f(65537);
  EXPECT_EQ(ErrorCodeOf([&] { ReadDatasetFile("/nonexistent/privcomp.txt", f); }),
            ErrorCode::kFileError);
  const std::string path = ::testing::TempDir() + "/privcomp_bad.txt";
  std::ofstream(path) << "2 3 65537\n1 2 x\n4 5 6\n";
  EXPECT_EQ(ErrorCodeOf([&] { ReadDatasetFile(path, f); }), ErrorCode::kFileError);
  std::ofstream(path) << "2 3 65537\n1 2 3\n";
  EXPECT_EQ(ErrorCodeOf([&] { ReadDatasetFile(path, f); }), ErrorCode::kFileError);
}

}  // namespace
}  // namespace privcomp
