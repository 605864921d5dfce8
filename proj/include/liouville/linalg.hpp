// Copyright 2026 The Liouville Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Exact linear algebra over Q and Z, plus helpers for vectors whose
// coordinates are ExtendedRational numbers.

#include <optional>
#include <vector>

#include "liouville/exact_numbers.hpp"

namespace liouville {

using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;
using ExactVector = std::vector<ExtendedRational>;

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static RationalMatrix from_columns(const std::vector<RationalVector>& columns, std::size_t rows);
  static RationalMatrix from_rows(const std::vector<RationalVector>& rows, std::size_t cols);
  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalVector column(std::size_t j) const;
  RationalVector row(std::size_t i) const;
  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& other) const;
  RationalVector operator*(const RationalVector& v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct RowEchelon {
  RationalMatrix reduced;
  std::vector<std::size_t> pivot_columns;
};

RowEchelon reduced_row_echelon(RationalMatrix m);
std::size_t rank(const RationalMatrix& m);
// Basis of {x : m x = 0}, one vector per free column, in RREF order.
std::vector<RationalVector> nullspace(const RationalMatrix& m);
// Some solution of m x = b, or nullopt if inconsistent.
std::optional<RationalVector> solve(const RationalMatrix& m, const RationalVector& b);
// Inverse of a square nonsingular matrix. Throws PreconditionError.
RationalMatrix inverse(const RationalMatrix& m);

// Integer matrices are stored as column lists (each column has `rows` entries).
struct HermiteForm {
  std::vector<IntegerVector> basis;      // nonzero HNF columns (lower staircase)
  std::vector<IntegerVector> transform;  // unimodular U as columns, A*U = [basis | 0]
  std::vector<std::size_t> pivot_rows;
};

// Column-style Hermite normal form: positive pivots, entries left of a
// pivot reduced into [0, pivot). Unique for the lattice spanned by the
// input columns.
HermiteForm column_hermite(const std::vector<IntegerVector>& columns, std::size_t rows);
// Basis of {z in Z^n : sum_j z_j columns[j] = 0}.
std::vector<IntegerVector> integer_kernel(const std::vector<IntegerVector>& columns, std::size_t rows);

// Rational vector helpers.
Rational dot(const RationalVector& a, const RationalVector& b);
Integer lcm_of_denominators(const std::vector<RationalVector>& vectors);

// ExactVector helpers. All vectors must share one constant basis.
bool is_rational(const ExactVector& v);
RationalVector rational_part(const ExactVector& v);  // requires is_rational
ExactVector to_exact(const BasisPtr& basis, const RationalVector& v);
ExactVector zero_vector(const BasisPtr& basis, std::size_t d);
std::vector<double> to_doubles(const ExactVector& v);
double norm(const ExactVector& v);
bool is_zero(const ExactVector& v);
ExactVector operator+(const ExactVector& a, const ExactVector& b);
ExactVector operator-(const ExactVector& a, const ExactVector& b);
ExactVector operator-(const ExactVector& a);
ExactVector scale(const ExactVector& v, const Rational& s);
ExactVector apply(const RationalMatrix& m, const ExactVector& v);
// <r, v> for a rational r.
ExtendedRational dot(const RationalVector& r, const ExactVector& v);
// Coordinates of v flattened: entry (i, k) -> i * width + k.
RationalVector flatten(const ExactVector& v);

// Rational coefficients c with sum_i c_i columns[i] = target, unique when
// the columns are linearly independent over Q; nullopt if none exists.
std::optional<RationalVector> solve_rational_combination(const std::vector<ExactVector>& columns,
                                                         const ExactVector& target);
// Rank over Q of the flattened coordinate vectors, i.e. the rank of the
// subgroup they generate as a free abelian group.
std::size_t rational_rank(const std::vector<ExactVector>& columns);
// Rank over R, computed on double approximations with relative tolerance.
std::size_t real_rank_numeric(const std::vector<ExactVector>& columns, double tol = 1e-9);
// If v = s * r for an ExtendedRational scalar s and rational vector r,
// returns the primitive integer direction r (first nonzero entry > 0).
std::optional<RationalVector> rational_direction(const ExactVector& v);

std::string to_string(const ExactVector& v);
std::string to_string(const RationalVector& v);

}  // namespace liouville
