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
#ifndef PRIVCOMP_GF_H_
#define PRIVCOMP_GF_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace privcomp {

// A symbol of the prime field F_p, always kept in [0, p).
using Element = std::uint64_t;

// Arithmetic context for F_p. Immutable once constructed, so a single
// instance may be shared freely between threads.
class PrimeField {
 public:
  static constexpr std::uint64_t kDefaultModulus = 65537;
  // Products of two reduced elements must fit in 64 bits.
  static constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 31) - 1;

  // Throws kNotPrime for composite p, kInvalidArgument for p < 2 or
  // p > kMaxModulus.
  explicit PrimeField(std::uint64_t p = kDefaultModulus);

  std::uint64_t modulus() const { return p_; }
  // Over F_2 the values +1 and -1 coincide.
  bool is_binary() const { return p_ == 2; }

  Element Reduce(std::uint64_t x) const { return x % p_; }
  Element FromSigned(std::int64_t x) const;
  // Maps a sign in {+1, -1} to the corresponding field element.
  Element FromSign(int sign) const { return sign >= 0 ? 1 : p_ - 1; }

  Element Add(Element a, Element b) const {
    Element s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Element Sub(Element a, Element b) const { return a >= b ? a - b : a + p_ - b; }
  Element Neg(Element a) const { return a == 0 ? 0 : p_ - a; }
  Element Mul(Element a, Element b) const { return (a * b) % p_; }
  // Multiplies by a sign in {+1, -1}.
  Element Signed(int sign, Element a) const { return sign >= 0 ? a : Neg(a); }
  Element Pow(Element base, std::uint64_t exponent) const;
  // Throws kDivisionByZero for a == 0.
  Element Inv(Element a) const;
  Element Div(Element a, Element b) const { return Mul(a, Inv(b)); }

  bool operator==(const PrimeField& other) const { return p_ == other.p_; }

 private:
  std::uint64_t p_;
};

bool IsPrime(std::uint64_t n);

// Dense row-major matrix over F_p. The field is passed to every operation
// rather than stored, which keeps matrices plain values.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols);
  // Throws kShapeMismatch unless entries.size() == rows * cols.
  FieldMatrix(std::size_t rows, std::size_t cols, std::vector<Element> entries);

  static FieldMatrix Identity(std::size_t n);
  static FieldMatrix FromRows(const std::vector<std::vector<Element>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Element& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  Element operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  std::span<Element> row(std::size_t r) {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<const Element> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  const std::vector<Element>& entries() const { return entries_; }

  // Matrix made of the listed rows (in the given order).
  FieldMatrix SelectRows(std::span<const std::size_t> indices) const;
  // Matrix with the rows of `below` appended.
  FieldMatrix StackBelow(const FieldMatrix& below) const;
  FieldMatrix Transpose() const;

  bool operator==(const FieldMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Element> entries_;
};

FieldMatrix Multiply(const PrimeField& field, const FieldMatrix& a,
                     const FieldMatrix& b);
std::vector<Element> Multiply(const PrimeField& field, const FieldMatrix& a,
                              std::span<const Element> x);

// Throws kNotSquare.
Element Determinant(const PrimeField& field, const FieldMatrix& a);

// Unique solution of a x = b. Throws kNotSquare, kSingular or
// kShapeMismatch.
std::vector<Element> Solve(const PrimeField& field, const FieldMatrix& a,
                           std::span<const Element> b);

// Some solution of a x = b for an arbitrary shape (free variables set to
// zero), or nullopt when the system is inconsistent.
std::optional<std::vector<Element>> SolveAny(const PrimeField& field,
                                             const FieldMatrix& a,
                                             std::span<const Element> b);

// Throws kNotSquare or kSingular.
FieldMatrix Inverse(const PrimeField& field, const FieldMatrix& a);

// Basis of {x : a x = 0}; one vector per free column, empty when a has full
// column rank.
std::vector<std::vector<Element>> Nullspace(const PrimeField& field,
                                            const FieldMatrix& a);

std::size_t Rank(const PrimeField& field, const FieldMatrix& a);

// Row-reduces `a` in place to reduced row echelon form and returns the pivot
// column of each nonzero row. Pivots are chosen as the first nonzero entry at
// or below the current row (lowest row index wins).
std::vector<std::size_t> ReduceRowEchelon(const PrimeField& field,
                                          FieldMatrix& a);

}  // namespace privcomp

#endif  // PRIVCOMP_GF_H_
