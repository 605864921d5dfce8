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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "liouville/errors.hpp"
#include "liouville/exact_numbers.hpp"
#include "test_support.hpp"

using namespace liouville;
using namespace liouville::testing;

namespace {

BasisPtr pi_basis() { return ConstantBasis::make({{"pi", kPi}}); }
BasisPtr root_basis() { return ConstantBasis::make({{"sqrt2", kSqrt2}, {"sqrt3", kSqrt3}}); }

ExtendedRational X(const BasisPtr& b, const char* s) { return ExtendedRational::parse(b, s); }

// Brute force: largest g = 1/L * k dividing both, L = lcm of denominators.
Rational brute_gcd(const Rational& x, const Rational& y) {
  long L = std::lcm(x.get_den().get_si(), y.get_den().get_si());
  long a = Rational(x * L).get_num().get_si(), b = Rational(y * L).get_num().get_si();
  long best = 1;
  for (long k = 1; k <= std::max(a, b); ++k)
    if (a % k == 0 && b % k == 0) best = k;
  return Rational(best, L);
}

}  // namespace

TEST_CASE("arithmetic examples") {
  auto b = pi_basis();
  CHECK((X(b, "1") + X(b, "2*pi")).to_string() == "1 + 2*pi");
  CHECK(add(X(b, "1"), X(b, "2*pi")) == X(b, "1 + 2*pi"));
  CHECK(negate(X(b, "3/2")).to_string() == "-3/2");
  CHECK(scale_by_rational(X(b, "pi"), Rational(1, 3)) == X(b, "pi/3"));
  CHECK(sub(X(b, "pi"), X(b, "pi")).is_zero());
  CHECK_THROWS_AS(add(X(b, "1"), X(root_basis(), "1")), PreconditionError);
}

TEST_CASE("rational ratio examples") {
  auto b = pi_basis();
  CHECK(*rational_ratio(X(b, "2"), X(b, "3")) == Rational(3, 2));
  CHECK_FALSE(rational_ratio(X(b, "1"), X(b, "pi")));
  CHECK(*rational_ratio(X(b, "pi"), X(b, "2*pi/3")) == Rational(2, 3));
  CHECK_FALSE(rational_ratio(X(b, "1 + pi"), X(b, "1 + 2*pi")));
  CHECK(*rational_ratio(X(b, "1 + pi"), X(b, "-2 - 2*pi")) == Rational(-2));
  CHECK_THROWS_AS(rational_ratio(X(b, "0"), X(b, "1")), PreconditionError);
}

TEST_CASE("q_of examples") {
  auto b = pi_basis();
  auto q = q_of(X(b, "1"), X(b, "3/2"));
  CHECK(q.finite);
  CHECK(q.p == 3);
  CHECK(q.q == 2);
  auto q5 = q_of(X(b, "2"), X(b, "26/5"));
  CHECK(q5.p == 13);
  CHECK(q5.q == 5);
  CHECK(q5.q >= 5);
  CHECK_FALSE(q_of(X(b, "1"), X(b, "pi")).finite);
  CHECK_THROWS_AS(q_of(X(b, "0"), X(b, "1")), PreconditionError);
}

TEST_CASE("q_of properties") {
  auto b = pi_basis();
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> n(-30, 30), d(1, 30), coin(0, 1);
  for (int t = 0; t < 400; ++t) {
    Rational r1(n(rng), d(rng)), r2(n(rng), d(rng));
    r1.canonicalize();
    r2.canonicalize();
    if (r1 == 0 || r2 == 0) continue;
    auto a = coin(rng) ? ExtendedRational::rational(b, r1) : ExtendedRational::constant(b, 1, r1);
    auto c = coin(rng) ? ExtendedRational::rational(b, r2) : ExtendedRational::constant(b, 1, r2);
    auto q = q_of(a, c);
    auto ratio = rational_ratio(a, c);
    REQUIRE(q.finite == ratio.has_value());
    if (q.finite) {
      CHECK(gcd(abs(q.p), q.q) == 1);
      CHECK(q.q >= 1);
      CHECK(c * Rational(q.q) == a * Rational(q.p));
    }
    CHECK(q_of(a, a) == QValue{true, 1, 1});
    CHECK(q_of(a, -a) == QValue{true, -1, 1});
  }
}

TEST_CASE("one base point suffices for the sup of Q over a finite support") {
  auto b = pi_basis();
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> n(1, 12), count(2, 5), coin(0, 3);
  for (int t = 0; t < 300; ++t) {
    std::vector<ExtendedRational> s;
    int k = count(rng);
    for (int i = 0; i < k; ++i) {
      Rational r(n(rng), n(rng));
      r.canonicalize();
      s.push_back(coin(rng) == 0 ? ExtendedRational::constant(b, 1, r) : ExtendedRational::rational(b, r));
    }
    std::vector<bool> unbounded;
    for (const auto& a : s) {
      bool u = false;
      for (const auto& c : s) u = u || !q_of(a, c).finite;
      unbounded.push_back(u);
    }
    bool any = std::find(unbounded.begin(), unbounded.end(), true) != unbounded.end();
    bool all = std::find(unbounded.begin(), unbounded.end(), false) == unbounded.end();
    CHECK(any == all);
  }
}

TEST_CASE("rational gcd examples and properties") {
  CHECK(rational_gcd(Rational(3, 2), Rational(5, 4)) == Rational(1, 4));
  CHECK(rational_gcd(6, 4) == 2);
  CHECK(rational_gcd(Rational(7, 3), 0) == Rational(7, 3));
  CHECK_THROWS_AS(rational_gcd(0, 0), PreconditionError);

  std::mt19937 rng(9);
  std::uniform_int_distribution<int> n(1, 40), d(1, 24);
  for (int t = 0; t < 300; ++t) {
    Rational x(n(rng), d(rng)), y(n(rng), d(rng));
    x.canonicalize();
    y.canonicalize();
    Rational g = rational_gcd(x, y);
    CHECK(g == brute_gcd(x, y));
    Rational qx = x / g, qy = y / g;
    CHECK(qx.get_den() == 1);
    CHECK(qy.get_den() == 1);
    // No k*g with k >= 2 divides both: the quotients are coprime.
    CHECK(gcd(qx.get_num(), qy.get_num()) == 1);
  }
}

TEST_CASE("density witness examples") {
  auto b = root_basis();
  auto w = density_witness(X(b, "1"), X(b, "sqrt2"), 0.1);
  CHECK(w.n == 5);
  CHECK(w.value == doctest::Approx(5 * std::sqrt(2.0) - 7).epsilon(1e-12));

  auto p = pi_basis();
  auto wp = density_witness(X(p, "1"), X(p, "pi"), 0.2);
  CHECK(wp.n == 1);
  CHECK(wp.value == doctest::Approx(M_PI - 3).epsilon(1e-12));

  auto w2 = density_witness(X(b, "2"), X(b, "2*sqrt2"), 0.2);
  CHECK(w2.n == 5);
  CHECK(w2.value == doctest::Approx(0.14213562373095).epsilon(1e-10));

  CHECK_THROWS_AS(density_witness(X(b, "1"), X(b, "3/2"), 0.1), PreconditionError);
  CHECK_THROWS_AS(density_witness(X(b, "1"), X(b, "sqrt2"), 1e-60), NumericalError);
}

TEST_CASE("density witness property") {
  auto b = root_basis();
  for (const char* s : {"sqrt2", "sqrt3", "3*sqrt2/7", "1 + sqrt3", "sqrt2 + sqrt3"})
    for (double eps : {0.3, 0.05, 1e-3, 1e-5}) {
      CAPTURE(s);
      CAPTURE(eps);
      auto a = X(b, "1"), c = X(b, s);
      auto w = density_witness(a, c, eps);
      // Independent check in long double.
      long double v = w.n * c.to_double();
      v -= std::floor(v);
      CHECK(w.value > 0);
      CHECK(w.value < eps);
      CHECK(std::abs(static_cast<double>(v) - w.value) < 1e-6);
    }
}

TEST_CASE("basis validation") {
  CHECK_THROWS_AS(ConstantBasis::make({{"pi", kPi}, {"tau", kPi}}), InputError);
  CHECK_THROWS_AS(ConstantBasis::make({{"z", "0"}}), InputError);
  CHECK_THROWS_AS(ConstantBasis::make({{"short", "3.14"}}), InputError);
  auto b = pi_basis();
  CHECK(b->width() == 2);
  CHECK(b->index_of("pi") == 1u);
  CHECK_THROWS_AS(X(b, "e"), InputError);
  CHECK_THROWS_AS(X(b, "pi*pi"), InputError);
}
