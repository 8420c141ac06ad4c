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

#include <string>
#include <utility>

#include "privcomp/error.h"

namespace privcomp {

bool IsPrime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p < 2 || p > kMaxModulus) {
    throw Error(ErrorCode::kInvalidArgument,
                "field modulus " + std::to_string(p) + " out of range");
  }
  if (!IsPrime(p)) {
    throw Error(ErrorCode::kNotPrime, std::to_string(p) + " is composite");
  }
}

Element PrimeField::FromSigned(std::int64_t x) const {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = x % p;
  if (r < 0) r += p;
  return static_cast<Element>(r);
}

Element PrimeField::Pow(Element base, std::uint64_t exponent) const {
  Element result = 1 % p_;
  base %= p_;
  while (exponent > 0) {
    if (exponent & 1) result = Mul(result, base);
    base = Mul(base, base);
    exponent >>= 1;
  }
  return result;
}

Element PrimeField::Inv(Element a) const {
  a %= p_;
  if (a == 0) throw Error(ErrorCode::kDivisionByZero, "inverse of zero");
  // Extended Euclid on signed 64-bit values; p < 2^31 keeps this exact.
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p_);
  std::int64_t new_r = static_cast<std::int64_t>(a);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  return FromSigned(t);
}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols,
                         std::vector<Element> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(rows_ * cols_) + " entries, got " +
                    std::to_string(entries_.size()));
  }
}

FieldMatrix FieldMatrix::Identity(std::size_t n) {
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

FieldMatrix FieldMatrix::FromRows(const std::vector<std::vector<Element>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  FieldMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorCode::kShapeMismatch, "ragged row list");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

FieldMatrix FieldMatrix::SelectRows(std::span<const std::size_t> indices) const {
  FieldMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) {
      throw Error(ErrorCode::kIndexOutOfRange, "row selection out of range");
    }
    for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(indices[i], c);
  }
  return out;
}

FieldMatrix FieldMatrix::StackBelow(const FieldMatrix& below) const {
  if (empty() && rows_ == 0) return below;
  if (below.rows_ == 0) return *this;
  if (below.cols_ != cols_) {
    throw Error(ErrorCode::kShapeMismatch, "column count differs when stacking");
  }
  std::vector<Element> entries = entries_;
  entries.insert(entries.end(), below.entries_.begin(), below.entries_.end());
  return FieldMatrix(rows_ + below.rows_, cols_, std::move(entries));
}

FieldMatrix FieldMatrix::Transpose() const {
  FieldMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

FieldMatrix Multiply(const PrimeField& field, const FieldMatrix& a,
                     const FieldMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "inner dimensions differ");
  }
  FieldMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Element aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) = field.Add(out(i, j), field.Mul(aik, b(k, j)));
      }
    }
  }
  return out;
}

std::vector<Element> Multiply(const PrimeField& field, const FieldMatrix& a,
                              std::span<const Element> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::kShapeMismatch, "vector length differs from columns");
  }
  std::vector<Element> out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Element acc = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      acc = field.Add(acc, field.Mul(a(i, k), x[k]));
    }
    out[i] = acc;
  }
  return out;
}

std::vector<std::size_t> ReduceRowEchelon(const PrimeField& field,
                                          FieldMatrix& a) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < a.rows() && a(pivot, col) == 0) ++pivot;
    if (pivot == a.rows()) continue;
    if (pivot != row) {
      for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(pivot, c), a(row, c));
    }
    const Element inv = field.Inv(a(row, col));
    for (std::size_t c = col; c < a.cols(); ++c) a(row, c) = field.Mul(a(row, c), inv);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row) continue;
      const Element factor = a(r, col);
      if (factor == 0) continue;
      for (std::size_t c = col; c < a.cols(); ++c) {
        a(r, c) = field.Sub(a(r, c), field.Mul(factor, a(row, c)));
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

Element Determinant(const PrimeField& field, const FieldMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kNotSquare, "determinant of a non-square matrix");
  }
  FieldMatrix m = a;
  const std::size_t n = m.rows();
  Element det = 1 % field.modulus();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m(pivot, col) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(pivot, c), m(col, c));
      det = field.Neg(det);
    }
    det = field.Mul(det, m(col, col));
    const Element inv = field.Inv(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const Element factor = field.Mul(m(r, col), inv);
      if (factor == 0) continue;
      for (std::size_t c = col; c < n; ++c) {
        m(r, c) = field.Sub(m(r, c), field.Mul(factor, m(col, c)));
      }
    }
  }
  return det;
}

namespace {

FieldMatrix Augment(const FieldMatrix& a, std::span<const Element> b) {
  FieldMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug(r, c) = a(r, c);
    aug(r, a.cols()) = b[r];
  }
  return aug;
}

}  // namespace

std::optional<std::vector<Element>> SolveAny(const PrimeField& field,
                                             const FieldMatrix& a,
                                             std::span<const Element> b) {
  if (b.size() != a.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "right-hand side length differs");
  }
  FieldMatrix aug = Augment(a, b);
  const std::vector<std::size_t> pivots = ReduceRowEchelon(field, aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  std::vector<Element> x(a.cols(), 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug(i, a.cols());
  return x;
}

std::vector<Element> Solve(const PrimeField& field, const FieldMatrix& a,
                           std::span<const Element> b) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kNotSquare, "solve requires a square system");
  }
  if (b.size() != a.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "right-hand side length differs");
  }
  FieldMatrix aug = Augment(a, b);
  const std::vector<std::size_t> pivots = ReduceRowEchelon(field, aug);
  if (pivots.size() != a.cols() || (!pivots.empty() && pivots.back() == a.cols())) {
    throw Error(ErrorCode::kSingular, "system matrix is singular");
  }
  std::vector<Element> x(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) x[i] = aug(i, a.cols());
  return x;
}

FieldMatrix Inverse(const PrimeField& field, const FieldMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kNotSquare, "inverse of a non-square matrix");
  }
  const std::size_t n = a.rows();
  FieldMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = a(r, c);
    aug(r, n + r) = 1;
  }
  const std::vector<std::size_t> pivots = ReduceRowEchelon(field, aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) {
    throw Error(ErrorCode::kSingular, "matrix is not invertible");
  }
  FieldMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = aug(r, n + c);
  }
  return inv;
}

std::vector<std::vector<Element>> Nullspace(const PrimeField& field,
                                            const FieldMatrix& a) {
  FieldMatrix m = a;
  const std::vector<std::size_t> pivots = ReduceRowEchelon(field, m);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Element>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Element> v(a.cols(), 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = field.Neg(m(i, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

std::size_t Rank(const PrimeField& field, const FieldMatrix& a) {
  FieldMatrix m = a;
  return ReduceRowEchelon(field, m).size();
}

}  // namespace privcomp
