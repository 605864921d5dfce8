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

#include "liouville/linalg.hpp"

#include <cmath>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

RationalMatrix RationalMatrix::from_columns(const std::vector<RationalVector>& columns, std::size_t rows) {
  RationalMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != rows) throw PreconditionError("column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows, std::size_t cols) {
  RationalMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw PreconditionError("row length mismatch");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalVector RationalMatrix::column(std::size_t j) const {
  RationalVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

RationalVector RationalMatrix::row(std::size_t i) const {
  return RationalVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) throw PreconditionError("matrix product shape mismatch");
  RationalMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      if ((*this)(i, k) == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
    }
  return r;
}

RationalVector RationalMatrix::operator*(const RationalVector& v) const {
  if (cols_ != v.size()) throw PreconditionError("matrix-vector shape mismatch");
  RationalVector r(rows_, Rational(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

RowEchelon reduced_row_echelon(RationalMatrix m) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    out.pivot_columns.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const RationalMatrix& m) { return reduced_row_echelon(m).pivot_columns.size(); }

std::vector<RationalVector> nullspace(const RationalMatrix& m) {
  auto e = reduced_row_echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : e.pivot_columns) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    RationalVector v(m.cols(), Rational(0));
    v[f] = 1;
    for (std::size_t r = 0; r < e.pivot_columns.size(); ++r) v[e.pivot_columns[r]] = -e.reduced(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RationalVector> solve(const RationalMatrix& m, const RationalVector& b) {
  if (b.size() != m.rows()) throw PreconditionError("solve: right-hand side length mismatch");
  RationalMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto e = reduced_row_echelon(std::move(aug));
  RationalVector x(m.cols(), Rational(0));
  for (std::size_t r = 0; r < e.pivot_columns.size(); ++r) {
    if (e.pivot_columns[r] == m.cols()) return std::nullopt;
    x[e.pivot_columns[r]] = e.reduced(r, m.cols());
  }
  return x;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw PreconditionError("inverse: matrix is not square");
  const std::size_t n = m.rows();
  RationalMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto e = reduced_row_echelon(std::move(aug));
  if (e.pivot_columns.size() < n || e.pivot_columns[n - 1] != n - 1)
    throw PreconditionError("inverse: matrix is singular");
  RationalMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
  return inv;
}

namespace {

void combine_columns(std::vector<IntegerVector>& cols, std::size_t r, std::size_t j, const Integer& s,
                     const Integer& t, const Integer& u, const Integer& v) {
  // (col_r, col_j) <- (s col_r + t col_j, u col_r + v col_j)
  for (std::size_t i = 0; i < cols[r].size(); ++i) {
    Integer a = cols[r][i], b = cols[j][i];
    cols[r][i] = s * a + t * b;
    cols[j][i] = u * a + v * b;
  }
}

}  // namespace

HermiteForm column_hermite(const std::vector<IntegerVector>& columns, std::size_t rows) {
  const std::size_t n = columns.size();
  std::vector<IntegerVector> h = columns;
  for (auto& c : h)
    if (c.size() != rows) throw PreconditionError("column_hermite: column length mismatch");
  std::vector<IntegerVector> u(n, IntegerVector(n, Integer(0)));
  for (std::size_t j = 0; j < n; ++j) u[j][j] = 1;

  HermiteForm out;
  std::size_t r = 0;
  for (std::size_t i = 0; i < rows && r < n; ++i) {
    for (std::size_t j = r + 1; j < n; ++j) {
      if (h[j][i] == 0) continue;
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h[r][i].get_mpz_t(), h[j][i].get_mpz_t());
      Integer a = h[r][i] / g, b = h[j][i] / g;
      combine_columns(h, r, j, s, t, -b, a);
      combine_columns(u, r, j, s, t, -b, a);
    }
    if (h[r][i] == 0) continue;
    if (h[r][i] < 0) {
      for (auto& x : h[r]) x = -x;
      for (auto& x : u[r]) x = -x;
    }
    for (std::size_t k = 0; k < r; ++k) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), h[k][i].get_mpz_t(), h[r][i].get_mpz_t());
      if (q == 0) continue;
      for (std::size_t row = 0; row < rows; ++row) h[k][row] -= q * h[r][row];
      for (std::size_t row = 0; row < n; ++row) u[k][row] -= q * u[r][row];
    }
    out.pivot_rows.push_back(i);
    ++r;
  }
  out.basis.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(r));
  out.transform = std::move(u);
  return out;
}

std::vector<IntegerVector> integer_kernel(const std::vector<IntegerVector>& columns, std::size_t rows) {
  auto hf = column_hermite(columns, rows);
  return {hf.transform.begin() + static_cast<std::ptrdiff_t>(hf.basis.size()), hf.transform.end()};
}

Rational dot(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw PreconditionError("dot: length mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Integer lcm_of_denominators(const std::vector<RationalVector>& vectors) {
  Integer l = 1;
  for (const auto& v : vectors)
    for (const auto& q : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  return l;
}

bool is_rational(const ExactVector& v) {
  for (const auto& x : v)
    if (!x.is_rational()) return false;
  return true;
}

RationalVector rational_part(const ExactVector& v) {
  RationalVector r;
  r.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_rational()) throw PreconditionError("vector has irrational coordinates");
    r.push_back(x.rational_part());
  }
  return r;
}

ExactVector to_exact(const BasisPtr& basis, const RationalVector& v) {
  ExactVector out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(ExtendedRational::rational(basis, q));
  return out;
}

ExactVector zero_vector(const BasisPtr& basis, std::size_t d) {
  return ExactVector(d, ExtendedRational(basis));
}

std::vector<double> to_doubles(const ExactVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.to_double());
  return out;
}

double norm(const ExactVector& v) {
  double s = 0;
  for (const auto& x : v) {
    double t = x.to_double();
    s += t * t;
  }
  return std::sqrt(s);
}

bool is_zero(const ExactVector& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

ExactVector operator+(const ExactVector& a, const ExactVector& b) {
  if (a.size() != b.size()) throw PreconditionError("vector dimension mismatch");
  ExactVector r = a;
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += b[i];
  return r;
}

ExactVector operator-(const ExactVector& a, const ExactVector& b) {
  if (a.size() != b.size()) throw PreconditionError("vector dimension mismatch");
  ExactVector r = a;
  for (std::size_t i = 0; i < a.size(); ++i) r[i] -= b[i];
  return r;
}

ExactVector operator-(const ExactVector& a) {
  ExactVector r = a;
  for (auto& x : r) x = -x;
  return r;
}

ExactVector scale(const ExactVector& v, const Rational& s) {
  ExactVector r = v;
  for (auto& x : r) x *= s;
  return r;
}

ExactVector apply(const RationalMatrix& m, const ExactVector& v) {
  if (m.cols() != v.size() || v.empty()) throw PreconditionError("apply: shape mismatch");
  ExactVector out = zero_vector(v.front().basis(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) out[i] += v[j] * m(i, j);
  return out;
}

ExtendedRational dot(const RationalVector& r, const ExactVector& v) {
  if (r.size() != v.size() || v.empty()) throw PreconditionError("dot: length mismatch");
  ExtendedRational s(v.front().basis());
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] != 0) s += v[i] * r[i];
  return s;
}

RationalVector flatten(const ExactVector& v) {
  RationalVector out;
  for (const auto& x : v)
    for (const auto& q : x.coords()) out.push_back(q);
  return out;
}

std::optional<RationalVector> solve_rational_combination(const std::vector<ExactVector>& columns,
                                                         const ExactVector& target) {
  std::vector<RationalVector> flat;
  flat.reserve(columns.size());
  for (const auto& c : columns) flat.push_back(flatten(c));
  RationalVector b = flatten(target);
  if (columns.empty()) {
    for (const auto& q : b)
      if (q != 0) return std::nullopt;
    return RationalVector{};
  }
  return solve(RationalMatrix::from_columns(flat, b.size()), b);
}

std::size_t rational_rank(const std::vector<ExactVector>& columns) {
  if (columns.empty()) return 0;
  std::vector<RationalVector> flat;
  for (const auto& c : columns) flat.push_back(flatten(c));
  return rank(RationalMatrix::from_columns(flat, flat.front().size()));
}

std::size_t real_rank_numeric(const std::vector<ExactVector>& columns, double tol) {
  if (columns.empty()) return 0;
  const std::size_t d = columns.front().size();
  std::vector<std::vector<double>> a;
  double scale_max = 0;
  for (const auto& c : columns) {
    a.push_back(to_doubles(c));
    for (double x : a.back()) scale_max = std::max(scale_max, std::abs(x));
  }
  std::size_t r = 0;
  for (std::size_t i = 0; i < d && r < a.size(); ++i) {
    std::size_t best = r;
    for (std::size_t j = r; j < a.size(); ++j)
      if (std::abs(a[j][i]) > std::abs(a[best][i])) best = j;
    if (std::abs(a[best][i]) <= tol * std::max(1.0, scale_max)) continue;
    std::swap(a[r], a[best]);
    for (std::size_t j = r + 1; j < a.size(); ++j) {
      double f = a[j][i] / a[r][i];
      for (std::size_t k = i; k < d; ++k) a[j][k] -= f * a[r][k];
    }
    ++r;
  }
  return r;
}

std::optional<RationalVector> rational_direction(const ExactVector& v) {
  if (v.empty() || is_zero(v)) return std::nullopt;
  const std::size_t width = v.front().basis()->width();
  // v = sum_k e_k r_k with rational vectors r_k; all nonzero r_k must be
  // parallel.
  std::optional<RationalVector> dir;
  for (std::size_t k = 0; k < width; ++k) {
    RationalVector r;
    bool nonzero = false;
    for (const auto& x : v) {
      r.push_back(x.coord(k));
      nonzero = nonzero || x.coord(k) != 0;
    }
    if (!nonzero) continue;
    if (!dir) {
      dir = r;
      continue;
    }
    std::size_t p = 0;
    while ((*dir)[p] == 0) ++p;
    Rational f = r[p] / (*dir)[p];
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] != f * (*dir)[i]) return std::nullopt;
  }
  // Normalize to a primitive integer vector with positive leading entry.
  Integer l = lcm_of_denominators({*dir});
  IntegerVector iv;
  Integer g = 0;
  for (const auto& q : *dir) {
    Integer z = q.get_num() * (l / q.get_den());
    iv.push_back(z);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
  }
  std::size_t p = 0;
  while (iv[p] == 0) ++p;
  if (iv[p] < 0) g = -g;
  RationalVector out;
  for (const auto& z : iv) out.push_back(Rational(z / g));
  return out;
}

std::string to_string(const ExactVector& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i].to_string();
  out << ")";
  return out.str();
}

std::string to_string(const RationalVector& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i].get_str();
  out << ")";
  return out.str();
}

}  // namespace liouville
