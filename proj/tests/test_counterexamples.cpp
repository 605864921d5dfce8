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
#include <random>

#include "liouville/counterexamples.hpp"
#include "liouville/errors.hpp"
#include "liouville/liouville_decider.hpp"
#include "test_support.hpp"

using namespace liouville;
using namespace liouville::testing;

namespace {

Counterexample counterexample_for(const LevyMeasure& mu) { return build_counterexample(closure_multid(support_of(mu))); }

std::vector<Point> random_points(std::size_t d, int count, unsigned seed, double spread = 10) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    Point p(d);
    for (auto& v : p) v = u(rng);
    out.push_back(p);
  }
  return out;
}

class BumpedCosine : public Function {
 public:
  std::size_t dimension() const override { return 1; }
  double value(const Point& x) const override {
    return std::cos(2 * M_PI * x[0]) + 0.1 * std::exp(-x[0] * x[0]);
  }
  double sup_norm() const override { return 1.1; }
  double hessian_bound() const override { return 4 * M_PI * M_PI + 0.2; }
  double frequency() const override { return 2 * M_PI; }
  std::string describe() const override { return "cos(2*pi*x) + exp(-x^2)/10"; }
};

}  // namespace

TEST_CASE("counterexample closed forms") {
  auto half = counterexample_for(atomic_measure(1, {{"1"}, {"3/2"}}));
  CHECK(half.kind == CounterexampleKind::kCosine1d);
  CHECK(half.closed_form == "cos(4*pi*x)");
  CHECK(half({0.25}) == doctest::Approx(-1.0));

  auto unit = counterexample_for(atomic_measure(1, {{"1"}}));
  CHECK(unit.closed_form == "cos(2*pi*x)");

  auto diff = counterexample_for(parse_measure(R"({"dimension": 3, "continuous": [{"kind": "affine_supported",
      "basis": [["1", "0", "0"], ["0", "1", "0"]], "profile": {"kind": "fractional", "alpha": "1"}}]})"));
  CHECK(diff.kind == CounterexampleKind::kCosineCoset);
  CHECK(diff.closed_form == "cos(2*pi*x3)");

  auto zero = counterexample_for(parse_measure(R"({"dimension": 2})"));
  CHECK(zero.closed_form == "cos(2*pi*x1)");

  auto pi = counterexample_for(atomic_measure(1, {{"pi"}}, pi_constants()));
  CHECK(pi.closed_form == "cos(2*pi*(x)/(pi))");
  CHECK(pi({M_PI / 2}) == doctest::Approx(-1.0));

  auto shear = counterexample_for(atomic_measure(2, {{"1", "0"}, {"1/2", "1"}}));
  // Both candidate normals are valid; the shorter c = (1/2, 0) wins.
  CHECK(shear.closed_form == "cos(4*pi*x1)");
}

TEST_CASE("check_periodicity examples") {
  auto b = ConstantBasis::rational_only();
  CosineWave u({2 * M_PI});
  auto one = check_periodicity(u, {vec(b, {"1"})}, random_points(1, 50, 1), 1e-9);
  CHECK(one.periodic);
  CHECK(one.max_deviation < 1e-12);
  auto half = check_periodicity(u, {vec(b, {"1/2"})}, {{0.0}}, 1e-9);
  CHECK_FALSE(half.periodic);
  CHECK(half.max_deviation == doctest::Approx(2.0));
}

TEST_CASE("coset cosine is periodic along H and c") {
  auto mu = atomic_measure(3, {{"1", "0", "0"}, {"0", "1", "1/3"}, {"0", "0", "2"}});
  auto c = closure_multid(support_of(mu));
  auto cx = build_counterexample(c);
  const auto& cert = cx.certificate;
  auto b = ConstantBasis::rational_only();
  std::vector<ExactVector> gens = {cert.c};
  for (const auto& h : cert.H_basis) gens.push_back(to_exact(b, h));
  auto r = check_periodicity(*cx.function, gens, random_points(3, 1000, 5), 1e-12);
  CHECK(r.periodic);
  CHECK(r.max_deviation < 1e-12);
  // lambda is exact and integral on support points.
  for (const auto& p : support_of(mu).finite_points) {
    auto l = cx.function->exact_lambda(p);
    REQUIRE(l);
    CHECK(l->get_den() == 1);
  }
}

TEST_CASE("counterexamples solve the equation exactly for finite atomic measures") {
  std::vector<LevyMeasure> cases = {
      atomic_measure(1, {{"1"}}),
      atomic_measure(1, {{"1"}, {"3/2"}, {"7/4"}}),
      atomic_measure(1, {{"pi"}, {"2*pi/3"}}, pi_constants()),
      atomic_measure(2, {{"1", "0"}, {"1", "1"}}),
      atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"sqrt2", "sqrt2"}}, root_constants()),
      atomic_measure(2, {{"1", "0"}, {"1/2", "1"}}),
      atomic_measure(3, {{"1", "0", "0"}, {"0", "1", "1/3"}}),
  };
  for (const auto& mu : cases) {
    auto v = decide(mu);
    REQUIRE(v.status == VerdictStatus::kFails);
    REQUIRE(v.counterexample);
    for (const auto& x : random_points(mu.dimension, 100, 17)) {
      auto r = eval_operator(mu, *v.counterexample->function, x);
      CHECK(r.value == 0.0);
      CHECK(r.bound == 0.0);
    }
  }
}

TEST_CASE("counterexample for the affine-supported example is annihilated under quadrature") {
  auto mu = parse_measure(R"({"dimension": 3, "continuous": [{"kind": "affine_supported",
      "basis": [["1", "0", "0"], ["0", "1", "0"]], "profile": {"kind": "fractional", "alpha": "1"}}]})");
  auto v = decide(mu);
  REQUIRE(v.status == VerdictStatus::kFails);
  for (const auto& x : random_points(3, 3, 4, 2)) CHECK(std::abs(eval_operator(mu, *v.counterexample->function, x).value) < 1e-8);
}

TEST_CASE("periodicity and annihilation agree on the cosine family and fail on a control") {
  auto mu = atomic_measure(1, {{"1"}, {"2"}});
  auto b = ConstantBasis::rational_only();
  std::vector<ExactVector> gens = {vec(b, {"1"}), vec(b, {"2"})};
  auto samples = random_points(1, 100, 11, 3);
  for (int k : {1, 2, 3}) {
    CosineWave u({2 * M_PI * k});
    auto per = check_periodicity(u, gens, samples, 1e-9);
    double worst = 0;
    for (const auto& x : samples) worst = std::max(worst, std::abs(eval_operator(mu, u, x).value));
    CHECK(per.periodic);
    CHECK(worst < 1e-9);
  }
  // cos(pi x) is 2-periodic but not 1-periodic.
  CosineWave half({M_PI});
  CHECK_FALSE(check_periodicity(half, gens, samples, 1e-9).periodic);
  double hworst = 0;
  for (const auto& x : samples) hworst = std::max(hworst, std::abs(eval_operator(mu, half, x).value));
  CHECK(hworst > 1e-3);

  BumpedCosine control;
  CHECK_FALSE(check_periodicity(control, gens, samples, 1e-9).periodic);
  double cworst = 0;
  for (const auto& x : samples) cworst = std::max(cworst, std::abs(eval_operator(mu, control, x).value));
  CHECK(cworst > 1e-3);
}

TEST_CASE("invalid certificates are rejected") {
  HyperplaneCertificate bad;
  bad.normal = {Rational(1), Rational(0)};
  auto b = ConstantBasis::rational_only();
  bad.c = vec(b, {"0", "1"});
  bad.period = dot(bad.normal, bad.c);
  CHECK_THROWS_AS(build_counterexample(bad), PreconditionError);
}
