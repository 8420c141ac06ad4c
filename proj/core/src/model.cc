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

#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include "privcomp/error.h"

namespace privcomp {

CombinationMatrix::CombinationMatrix(const PrimeField& field, FieldMatrix raw)
    : raw_(std::move(raw)) {
  const std::size_t m = raw_.rows();
  const std::size_t k = raw_.cols();
  if (k == 0 || m < k) {
    throw Error(ErrorCode::kInvalidArgument,
                "combination matrix needs M >= K >= 1, got M=" +
                    std::to_string(m) + " K=" + std::to_string(k));
  }
  for (Element e : raw_.entries()) {
    if (e >= field.modulus()) {
      throw Error(ErrorCode::kInvalidArgument, "matrix entry not reduced mod p");
    }
  }

  // Greedily promote the first K rows that extend the span.
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(m, false);
  for (std::size_t r = 0; r < m && chosen.size() < k; ++r) {
    std::vector<std::size_t> trial = chosen;
    trial.push_back(r);
    if (Rank(field, raw_.SelectRows(trial)) == trial.size()) {
      chosen = std::move(trial);
      taken[r] = true;
    }
  }
  if (chosen.size() < k) {
    throw Error(ErrorCode::kRankDeficient,
                "combination matrix has rank " + std::to_string(chosen.size()) +
                    " < K=" + std::to_string(k));
  }
  std::vector<std::size_t> rows = chosen;
  for (std::size_t r = 0; r < m; ++r) {
    if (!taken[r]) rows.push_back(r);
  }
  order_.resize(m);
  inverse_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    order_[i] = rows[i] + 1;
    inverse_[rows[i]] = i + 1;
  }
  evaluation_ = raw_.SelectRows(rows);
  basis_change_ = raw_.SelectRows(chosen);
  normalized_ = Multiply(field, evaluation_, Inverse(field, basis_change_));
}

std::size_t CombinationMatrix::user_index(std::size_t internal) const {
  if (internal == 0 || internal > order_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "message index out of range");
  }
  return order_[internal - 1];
}

std::size_t CombinationMatrix::internal_index(std::size_t user) const {
  if (user == 0 || user > inverse_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "message index out of range");
  }
  return inverse_[user - 1];
}

FieldMatrix RandomCombinationMatrix(const PrimeField& field, std::uint64_t seed,
                                    std::size_t messages, std::size_t datasets,
                                    bool identity_top) {
  if (datasets == 0 || messages < datasets) {
    throw Error(ErrorCode::kInvalidArgument, "need M >= K >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Element> dist(0, field.modulus() - 1);
  for (;;) {
    FieldMatrix v(messages, datasets);
    for (std::size_t r = 0; r < messages; ++r) {
      for (std::size_t c = 0; c < datasets; ++c) {
        if (identity_top && r < datasets) {
          v(r, c) = r == c ? 1 : 0;
        } else {
          v(r, c) = dist(rng);
        }
      }
    }
    if (Rank(field, v) == datasets) return v;
  }
}

DatasetStore::DatasetStore(std::vector<std::vector<Element>> datasets)
    : data_(std::move(datasets)) {
  if (data_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one dataset required");
  }
  for (const auto& d : data_) {
    if (d.size() != data_.front().size()) {
      throw Error(ErrorCode::kInvalidArgument, "datasets differ in length");
    }
  }
}

DatasetStore GenerateDatasets(const PrimeField& field, std::uint64_t seed,
                              std::size_t datasets, std::size_t length) {
  if (datasets == 0 || length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need K >= 1 and L >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Element> dist(0, field.modulus() - 1);
  std::vector<std::vector<Element>> data(datasets, std::vector<Element>(length));
  for (auto& d : data) {
    for (auto& x : d) x = dist(rng);
  }
  return DatasetStore(std::move(data));
}

MessageView::MessageView(const PrimeField& field, const DatasetStore& store,
                         const CombinationMatrix& matrix)
    : field_(field), store_(store), matrix_(matrix) {
  if (store.datasets() != matrix.datasets()) {
    throw Error(ErrorCode::kShapeMismatch,
                "store holds " + std::to_string(store.datasets()) +
                    " datasets, matrix expects " + std::to_string(matrix.datasets()));
  }
}

Element MessageView::Symbol(std::size_t message, std::size_t position) const {
  if (message == 0 || message > matrix_.messages() || position == 0 ||
      position > store_.length()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "symbol (" + std::to_string(message) + ", " +
                    std::to_string(position) + ") out of range");
  }
  const auto coeffs = matrix_.evaluation().row(message - 1);
  Element acc = 0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    acc = field_.Add(acc, field_.Mul(coeffs[k], store_.at(k + 1, position)));
  }
  return acc;
}

std::vector<Element> MessageView::Message(std::size_t message) const {
  std::vector<Element> out(store_.length());
  for (std::size_t l = 1; l <= out.size(); ++l) out[l - 1] = Symbol(message, l);
  return out;
}

namespace {

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileError, "cannot open " + path);
  return in;
}

Element ParseSymbol(const std::string& token, const PrimeField& field,
                    const std::string& path) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty() || token[0] == '-') {
    throw Error(ErrorCode::kFileError, path + ": bad number '" + token + "'");
  }
  if (value >= field.modulus()) {
    throw Error(ErrorCode::kFileError, path + ": symbol " + token + " not below p");
  }
  return value;
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

void WriteDatasetFile(const std::string& path, const DatasetStore& store,
                      std::uint64_t modulus) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFileError, "cannot write " + path);
  out << store.datasets() << ' ' << store.length() << ' ' << modulus << '\n';
  for (std::size_t k = 1; k <= store.datasets(); ++k) {
    const auto& d = store.dataset(k);
    for (std::size_t l = 0; l < d.size(); ++l) {
      if (l) out << ' ';
      out << d[l];
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kFileError, "write failed for " + path);
}

DatasetStore ReadDatasetFile(const std::string& path, const PrimeField& field) {
  std::ifstream in = OpenForRead(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFileError, path + ": empty");
  const auto header = Tokens(line);
  if (header.size() != 3) {
    throw Error(ErrorCode::kFileError, path + ": header must be 'K L p'");
  }
  std::size_t k = 0, l = 0;
  std::uint64_t p = 0;
  try {
    k = std::stoull(header[0]);
    l = std::stoull(header[1]);
    p = std::stoull(header[2]);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFileError, path + ": malformed header");
  }
  if (p != field.modulus()) {
    throw Error(ErrorCode::kFileError, path + ": file is over p=" + header[2] +
                                           ", expected " +
                                           std::to_string(field.modulus()));
  }
  std::vector<std::vector<Element>> data;
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kFileError, path + ": missing dataset line");
    }
    const auto toks = Tokens(line);
    if (toks.size() != l) {
      throw Error(ErrorCode::kFileError, path + ": dataset line has " +
                                             std::to_string(toks.size()) +
                                             " symbols, expected " + std::to_string(l));
    }
    std::vector<Element> row;
    row.reserve(l);
    for (const auto& t : toks) row.push_back(ParseSymbol(t, field, path));
    data.push_back(std::move(row));
  }
  try {
    return DatasetStore(std::move(data));
  } catch (const Error& e) {
    throw Error(ErrorCode::kFileError, path + ": " + e.what());
  }
}

void WriteMatrixFile(const std::string& path, const FieldMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFileError, "cannot write " + path);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (c) out << ' ';
      out << matrix(r, c);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kFileError, "write failed for " + path);
}

FieldMatrix ReadMatrixFile(const std::string& path, const PrimeField& field) {
  std::ifstream in = OpenForRead(path);
  std::vector<std::vector<Element>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto toks = Tokens(line);
    if (toks.empty()) continue;
    std::vector<Element> row;
    for (const auto& t : toks) row.push_back(ParseSymbol(t, field, path));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kFileError, path + ": ragged matrix rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kFileError, path + ": no rows");
  return FieldMatrix::FromRows(rows);
}

}  // namespace privcomp
