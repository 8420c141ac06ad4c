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
#ifndef PRIVCOMP_MODEL_H_
#define PRIVCOMP_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privcomp/gf.h"

namespace privcomp {

// The M x K coefficient matrix whose rows define the retrievable functions.
//
// The caller supplies rows in "user" order. Internally the rows are reordered
// so that the first K are linearly independent, and the normalized matrix
// (reordered rows times the inverse of that top block) has the identity as
// its top K rows. Message indices used by the planner, the wire format and
// the servers are internal indices; user_index()/internal_index() translate.
class CombinationMatrix {
 public:
  // Throws kShapeMismatch for ragged input, kInvalidArgument if M < K or
  // K == 0, and kRankDeficient if rank(raw) < K.
  CombinationMatrix(const PrimeField& field, FieldMatrix raw);

  std::size_t messages() const { return raw_.rows(); }
  std::size_t datasets() const { return raw_.cols(); }

  // Rows as supplied by the caller.
  const FieldMatrix& raw() const { return raw_; }
  // Raw rows permuted into internal order; servers evaluate with these.
  const FieldMatrix& evaluation() const { return evaluation_; }
  // evaluation() * basis_change()^{-1}; top K rows are the identity.
  const FieldMatrix& normalized() const { return normalized_; }
  // The K x K block formed by the first K internal rows.
  const FieldMatrix& basis_change() const { return basis_change_; }

  // 1-based translations between caller order and internal order.
  std::size_t user_index(std::size_t internal) const;
  std::size_t internal_index(std::size_t user) const;
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  FieldMatrix raw_;
  FieldMatrix evaluation_;
  FieldMatrix normalized_;
  FieldMatrix basis_change_;
  std::vector<std::size_t> order_;    // order_[internal-1] = user index
  std::vector<std::size_t> inverse_;  // inverse_[user-1] = internal index
};

// Random M x K matrix of full rank. With identity_top the first K rows are
// the identity and only the remaining rows are random.
FieldMatrix RandomCombinationMatrix(const PrimeField& field, std::uint64_t seed,
                                    std::size_t messages, std::size_t datasets,
                                    bool identity_top);

// K replicated datasets of equal length L.
class DatasetStore {
 public:
  DatasetStore() = default;
  // Throws kInvalidArgument for K == 0 or unequal lengths.
  explicit DatasetStore(std::vector<std::vector<Element>> datasets);

  std::size_t datasets() const { return data_.size(); }
  std::size_t length() const { return data_.empty() ? 0 : data_.front().size(); }
  // 1-based dataset and position.
  Element at(std::size_t dataset, std::size_t position) const {
    return data_[dataset - 1][position - 1];
  }
  const std::vector<Element>& dataset(std::size_t k) const { return data_[k - 1]; }

 private:
  std::vector<std::vector<Element>> data_;
};

// Uniform symbols from a seeded mt19937_64. Throws kInvalidArgument when
// K == 0 or L == 0.
DatasetStore GenerateDatasets(const PrimeField& field, std::uint64_t seed,
                              std::size_t datasets, std::size_t length);

// Evaluates W_m(l) for internal message index m.
class MessageView {
 public:
  MessageView(const PrimeField& field, const DatasetStore& store,
              const CombinationMatrix& matrix);

  // Throws kIndexOutOfRange.
  Element Symbol(std::size_t message, std::size_t position) const;
  std::vector<Element> Message(std::size_t message) const;

 private:
  const PrimeField& field_;
  const DatasetStore& store_;
  const CombinationMatrix& matrix_;
};

// Text formats. Dataset file: "K L p" on the first line, then K lines of L
// decimal symbols. Matrix file: M lines of K decimals. Readers throw
// kFileError on I/O or syntax problems.
void WriteDatasetFile(const std::string& path, const DatasetStore& store,
                      std::uint64_t modulus);
DatasetStore ReadDatasetFile(const std::string& path, const PrimeField& field);
void WriteMatrixFile(const std::string& path, const FieldMatrix& matrix);
FieldMatrix ReadMatrixFile(const std::string& path, const PrimeField& field);

}  // namespace privcomp

#endif  // PRIVCOMP_MODEL_H_
