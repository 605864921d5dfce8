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

// Exact arithmetic over a declared basis {1, c_1, ..., c_m} of real
// constants that the user asserts to be linearly independent over Q.
// Every real number handled by the decision procedures is a rational
// combination of these constants, so rationality of a ratio becomes a
// question about proportionality of coordinate vectors.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liouville {

using Integer = mpz_class;
using Rational = mpq_class;

// Minimum number of significant decimal digits required for every
// declared constant approximation.
inline constexpr int kMinConstantDigits = 50;

class ConstantBasis {
 public:
  struct Constant {
    std::string name;
    std::string decimal;  // high-precision decimal approximation
  };

  // Validates names (identifiers, unique) and approximations (finite,
  // nonzero, pairwise distinct, at least kMinConstantDigits significant
  // digits). Throws InputError.
  static std::shared_ptr<const ConstantBasis> make(std::vector<Constant> constants,
                                                   bool independence_asserted = true);
  // The basis {1}: pure rational arithmetic.
  static std::shared_ptr<const ConstantBasis> rational_only();

  // Number of declared constants, excluding the implicit 1.
  std::size_t size() const noexcept { return constants_.size(); }
  // Length of a coordinate vector (1 + size()).
  std::size_t width() const noexcept { return constants_.size() + 1; }

  const Constant& constant(std::size_t i) const { return constants_.at(i); }
  const std::vector<Constant>& constants() const noexcept { return constants_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Approximation of basis element k (k = 0 is the constant 1).
  const mpf_class& element(std::size_t k) const { return values_.at(k); }

  bool independence_asserted() const noexcept { return independence_asserted_; }
  int significant_digits() const noexcept { return digits_; }
  mp_bitcnt_t precision_bits() const noexcept { return bits_; }
  // Relative accuracy of the declared approximations, 10^-(digits-2).
  double resolution() const noexcept;

  bool operator==(const ConstantBasis& other) const;

 private:
  ConstantBasis() = default;
  std::vector<Constant> constants_;
  std::vector<mpf_class> values_;
  bool independence_asserted_ = true;
  int digits_ = 1000;
  mp_bitcnt_t bits_ = 256;
};

using BasisPtr = std::shared_ptr<const ConstantBasis>;

bool same_basis(const BasisPtr& a, const BasisPtr& b);

// q_0 * 1 + q_1 * c_1 + ... + q_m * c_m
class ExtendedRational {
 public:
  explicit ExtendedRational(BasisPtr basis);
  ExtendedRational(BasisPtr basis, std::vector<Rational> coords);

  static ExtendedRational rational(BasisPtr basis, const Rational& value);
  static ExtendedRational constant(BasisPtr basis, std::size_t index,
                                   const Rational& coefficient = 1);
  // Parses a linear expression such as "3/2 + 1*pi", "2*pi/3" or
  // "(1 + sqrt2)/2". Floating literals and products of two constants are
  // rejected with InputError.
  static ExtendedRational parse(BasisPtr basis, std::string_view text);

  const BasisPtr& basis() const noexcept { return basis_; }
  std::span<const Rational> coords() const noexcept { return coords_; }
  const Rational& coord(std::size_t k) const { return coords_.at(k); }

  bool is_zero() const;
  bool is_rational() const;
  const Rational& rational_part() const { return coords_[0]; }

  mpf_class approximate() const;
  double to_double() const;
  // Canonical text form, e.g. "3/2 + 2*pi", "-pi/3", "0".
  std::string to_string() const;

  ExtendedRational operator-() const;
  ExtendedRational& operator+=(const ExtendedRational& other);
  ExtendedRational& operator-=(const ExtendedRational& other);
  ExtendedRational& operator*=(const Rational& factor);

  friend ExtendedRational operator+(ExtendedRational a, const ExtendedRational& b) {
    return a += b;
  }
  friend ExtendedRational operator-(ExtendedRational a, const ExtendedRational& b) {
    return a -= b;
  }
  friend ExtendedRational operator*(ExtendedRational a, const Rational& s) { return a *= s; }
  friend ExtendedRational operator*(const Rational& s, ExtendedRational a) { return a *= s; }
  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b);

 private:
  void require_same_basis(const ExtendedRational& other) const;

  BasisPtr basis_;
  std::vector<Rational> coords_;
};

ExtendedRational add(const ExtendedRational& x, const ExtendedRational& y);
ExtendedRational sub(const ExtendedRational& x, const ExtendedRational& y);
ExtendedRational negate(const ExtendedRational& x);
ExtendedRational scale_by_rational(const ExtendedRational& x, const Rational& factor);

// Numeric three-way comparison. Exact when the values are equal; otherwise
// decided on the high-precision approximation. Throws NumericalError when
// the difference is below the basis resolution.
int compare(const ExtendedRational& a, const ExtendedRational& b);
int sign(const ExtendedRational& x);

// b / a when it is rational, std::nullopt when it is irrational.
// Throws PreconditionError when a == 0.
std::optional<Rational> rational_ratio(const ExtendedRational& a, const ExtendedRational& b);

// Q(a, b): denominator of the reduced ratio b / a, or infinite.
struct QValue {
  bool finite = false;
  Integer p;  // nonzero, coprime with q
  Integer q;  // >= 1

  static QValue infinite() { return {}; }
  bool operator==(const QValue&) const = default;
  std::string to_string() const;
};

// Throws PreconditionError when a or b is zero.
QValue q_of(const ExtendedRational& a, const ExtendedRational& b);

// Largest g > 0 with x, y in gZ. gcd(x, 0) = x. Throws PreconditionError on
// negative input or when both are zero.
Rational rational_gcd(const Rational& x, const Rational& y);

struct DensityWitness {
  std::uint64_t n = 0;
  double value = 0.0;  // n*b - floor(n*b/a)*a, in (0, eps)
};

inline constexpr std::uint64_t kDefaultWitnessCap = 1'000'000;

// Smallest n >= 1 with 0 < n*b - floor(n*b/a)*a < eps. Requires a, b > 0
// with b/a irrational. Located through the continued-fraction convergents
// of b/a, then confirmed by a linear scan. Throws PreconditionError for a
// rational ratio, NumericalError when eps is below the resolution of the
// declared constants and CapReachedError when no witness exists up to cap.
DensityWitness density_witness(const ExtendedRational& a, const ExtendedRational& b,
                               double eps, std::uint64_t cap = kDefaultWitnessCap);

// Positive monomial c * prod_i c_i^{k_i} over the declared constants. Used
// for weights such as 1/(2*pi^2), which are not linear in the constants.
class Monomial {
 public:
  Monomial() = default;
  Monomial(BasisPtr basis, Rational coefficient, std::vector<int> powers = {});

  // Grammar: factor (('*' | '/') factor)*, factor = integer | name['^' int]
  // | '(' product ')'. Throws InputError.
  static Monomial parse(BasisPtr basis, std::string_view text);

  const Rational& coefficient() const noexcept { return coefficient_; }
  const std::vector<int>& powers() const noexcept { return powers_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  bool is_rational() const;
  double to_double() const;
  std::string to_string() const;
  // Sum of two monomials with identical powers. Throws PreconditionError
  // otherwise.
  Monomial plus(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b);

 private:
  BasisPtr basis_;
  Rational coefficient_ = 0;
  std::vector<int> powers_;
};

// Canonical string for a rational: "3/2", "-4", "0".
std::string to_string(const Rational& q);
// Parses an exact rational literal "p" or "p/q". Throws InputError.
Rational parse_rational(std::string_view text);

}  // namespace liouville
