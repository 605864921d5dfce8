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

#include <algorithm>
#include <random>
#include <set>

#include "liouville/errors.hpp"
#include "liouville/group_closure.hpp"
#include "test_support.hpp"

using namespace liouville;
using namespace liouville::testing;

namespace {

ClosedSubgroup closure_of(const LevyMeasure& mu) { return closure_multid(support_of(mu)); }

std::vector<std::string> strings(const std::vector<ExactVector>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(to_string(v));
  return out;
}

// Integer points reachable from 0 by +-generators inside the box [-B, B]^d.
std::set<std::vector<long>> bfs_span(const std::vector<std::vector<long>>& gens, std::size_t d, long B) {
  std::set<std::vector<long>> seen = {std::vector<long>(d, 0)};
  std::vector<std::vector<long>> frontier = {std::vector<long>(d, 0)};
  while (!frontier.empty()) {
    std::vector<std::vector<long>> next;
    for (const auto& p : frontier)
      for (const auto& g : gens)
        for (int s : {1, -1}) {
          std::vector<long> q = p;
          bool inside = true;
          for (std::size_t i = 0; i < d; ++i) {
            q[i] += s * g[i];
            inside = inside && std::abs(q[i]) <= B;
          }
          if (inside && seen.insert(q).second) next.push_back(q);
        }
    frontier = std::move(next);
  }
  return seen;
}

bool in_lattice(const std::vector<RationalVector>& basis, const std::vector<long>& x) {
  std::vector<ExactVector> cols;
  auto b = ConstantBasis::rational_only();
  for (const auto& v : basis) cols.push_back(to_exact(b, v));
  RationalVector xr;
  for (long v : x) xr.emplace_back(v);
  if (cols.empty()) return std::all_of(x.begin(), x.end(), [](long v) { return v == 0; });
  auto c = solve_rational_combination(cols, to_exact(b, xr));
  if (!c) return false;
  return std::all_of(c->begin(), c->end(), [](const Rational& q) { return q.get_den() == 1; });
}

}  // namespace

TEST_CASE("closure_1d examples") {
  auto c1 = closure_1d(support_of(atomic_measure(1, {{"1"}, {"3/2"}})));
  CHECK(c1.route == "lattice");
  REQUIRE(c1.Lambda_basis.size() == 1);
  CHECK(c1.Lambda_basis[0][0].to_string() == "1/2");

  auto c2 = closure_1d(support_of(atomic_measure(1, {{"1"}, {"pi"}}, pi_constants())));
  CHECK(c2.dense());
  CHECK(c2.route == "irrational_pair");
  REQUIRE(c2.irrational_pair);
  CHECK(c2.irrational_pair->first.to_string() == "1");
  CHECK(c2.irrational_pair->second.to_string() == "pi");

  auto mu3 = parse_measure(R"({"dimension": 1, "sequences": [{"template": "harmonic", "c": "1", "k": 1,
      "weight": {"rule": "constant", "w": "1"}, "N": 100, "accumulation": true, "accumulation_point": ["0"]}]})");
  auto c3 = closure_1d(support_of(mu3));
  CHECK(c3.dense());
  CHECK(c3.route == "accumulation");

  auto c4 = closure_1d(support_of(parse_measure(R"({"dimension": 1})")));
  CHECK(c4.route == "trivial");
  CHECK(c4.V_basis.empty());
  CHECK(c4.Lambda_basis.empty());

  auto c5 = closure_1d(support_of(atomic_measure(1, {{"pi"}, {"3*pi/2"}}, pi_constants())));
  REQUIRE(c5.Lambda_basis.size() == 1);
  CHECK(c5.Lambda_basis[0][0].to_string() == "1/2*pi");
}

TEST_CASE("lattice_hnf examples") {
  auto b = ConstantBasis::rational_only();
  auto l = lattice_hnf({vec(b, {"2", "0"}), vec(b, {"0", "2"}), vec(b, {"1", "1"})});
  CHECK(strings(l) == std::vector<std::string>{"(1, 1)", "(0, 2)"});
  auto e = lattice_hnf({vec(b, {"1", "0", "0"}), vec(b, {"0", "1", "0"}), vec(b, {"0", "0", "1"})});
  CHECK(strings(e) == std::vector<std::string>{"(1, 0, 0)", "(0, 1, 0)", "(0, 0, 1)"});
  auto h = lattice_hnf({vec(b, {"1/2", "0"}), vec(b, {"0", "1/3"})});
  CHECK(strings(h) == std::vector<std::string>{"(1/2, 0)", "(0, 1/3)"});
  auto pb = ConstantBasis::make({{"pi", kPi}});
  CHECK_THROWS_AS(lattice_hnf({vec(pb, {"pi", "0"})}), PreconditionError);
}

TEST_CASE("lattice_hnf spans exactly the generated group") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<long> entry(-5, 5);
  for (int trial = 0; trial < 24; ++trial) {
    std::size_t d = trial % 2 ? 3 : 2;
    std::size_t count = 1 + trial % 4;
    std::vector<std::vector<long>> gens;
    std::vector<RationalVector> rg;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<long> g(d);
      RationalVector q;
      for (auto& v : g) v = entry(rng), q.emplace_back(v);
      gens.push_back(g);
      rg.push_back(q);
    }
    auto basis = lattice_hnf(rg, d);
    long B = d == 2 ? 12 : 6;
    auto span = bfs_span(gens, d, 4 * B);
    std::vector<long> x(d, -B);
    while (true) {
      bool member = in_lattice(basis, x);
      CHECK(member == (span.count(x) > 0));
      std::size_t i = 0;
      while (i < d && x[i] == B) x[i++] = -B;
      if (i == d) break;
      ++x[i];
    }
  }
}

TEST_CASE("kronecker_check examples") {
  auto b = ConstantBasis::make({{"sqrt2", kSqrt2}, {"sqrt3", kSqrt3}});
  auto k1 = kronecker_check(vec(b, {"sqrt2", "sqrt3"}));
  CHECK(k1.dense);
  CHECK(k1.rank == 3);
  auto k2 = kronecker_check(vec(b, {"1/2", "1/3"}));
  CHECK_FALSE(k2.dense);
  CHECK(k2.rank == 1);
  // r_0 + r_1/2 + r_2/3 = 0
  Rational s = Rational(k2.dependency[0]) + Rational(k2.dependency[1]) / 2 + Rational(k2.dependency[2]) / 3;
  CHECK(s == 0);
  auto k3 = kronecker_check(vec(b, {"sqrt2", "sqrt2"}));
  CHECK_FALSE(k3.dense);
  CHECK(k3.dependency == IntegerVector{0, 1, -1});
}

TEST_CASE("multi-d closure examples") {
  // Nonstandard discretization on both axes with rho = pi.
  auto dense = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"pi", "0"}, {"0", "pi"}}, pi_constants()));
  CHECK(dense.dense());
  CHECK(dense.route == "kronecker");

  auto lat = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"3/2", "0"}, {"0", "3/2"}}));
  CHECK_FALSE(lat.dense());
  CHECK(lat.route == "lattice");
  CHECK(strings(lat.Lambda_basis) == std::vector<std::string>{"(1/2, 0)", "(0, 1/2)"});

  auto diff = closure_of(parse_measure(R"({"dimension": 3, "continuous": [{"kind": "affine_supported",
      "basis": [["1", "0", "0"], ["0", "1", "0"]], "profile": {"kind": "fractional", "alpha": "1"}}]})"));
  CHECK_FALSE(diff.dense());
  CHECK(diff.route == "affine");
  CHECK(strings(diff.V_basis) == std::vector<std::string>{"(1, 0, 0)", "(0, 1, 0)"});
  CHECK(diff.Lambda_basis.empty());

  auto kron = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"sqrt2", "sqrt3"}}, root_constants()));
  CHECK(kron.dense());
  CHECK(kron.route == "kronecker");

  auto torus = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"sqrt2", "sqrt2"}}, root_constants()));
  CHECK(torus.certified());
  CHECK_FALSE(torus.dense());
  CHECK(torus.route == "torus");
  CHECK(strings(torus.V_basis) == std::vector<std::string>{"(1, 1)"});
  CHECK(strings(torus.Lambda_basis) == std::vector<std::string>{"(1/2, -1/2)"});

  auto ball = closure_of(parse_measure(R"({"dimension": 2, "continuous": [{"kind": "fractional", "alpha": "1"}]})"));
  CHECK(ball.dense());
  CHECK(ball.route == "interval_or_ball");

  auto sphere = closure_of(parse_measure(R"({"dimension": 3, "continuous": [{"kind": "surface_sphere", "radius": "1", "mass": "1"}]})"));
  CHECK(sphere.dense());

  auto empty = closure_of(parse_measure(R"({"dimension": 2})"));
  CHECK(empty.route == "trivial");
  CHECK_FALSE(empty.dense());
}

TEST_CASE("torus route agrees with an independent description") {
  // Generators e1, e2, (sqrt2, 1/2 + sqrt2): closure {x : x1 - x2 in (1/2)Z}?
  // y = (sqrt2, 1/2 + sqrt2): k = (1, -1) kills sqrt2 and leaves -1/2, so
  // 2k is the annihilator and the closure is {x : 2(x1 - x2) in Z}.
  auto c = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"sqrt2", "1/2 + sqrt2"}}, root_constants()));
  CHECK(c.route == "torus");
  CHECK(strings(c.V_basis) == std::vector<std::string>{"(1, 1)"});
  CHECK(strings(c.Lambda_basis) == std::vector<std::string>{"(1/4, -1/4)"});
}

TEST_CASE("mixed irrational supports fall back to the probe") {
  auto c = closure_of(atomic_measure(2, {{"1", "pi"}, {"pi", "1"}}, pi_constants()));
  CHECK_FALSE(c.certified());
  CHECK(c.route == "probe");
  REQUIRE(c.probe);
  CHECK(c.V_basis.empty());
  CHECK(c.Lambda_basis.empty());
}

TEST_CASE("orthogonalize examples") {
  auto b = ConstantBasis::rational_only();
  ClosedSubgroup c;
  c.dimension = 2;
  c.basis = b;
  c.V_basis = {vec(b, {"1", "0"})};
  c.Lambda_basis = {vec(b, {"1", "1"})};
  auto o = orthogonalize(c);
  CHECK(o.orthogonal);
  CHECK(strings(o.Lambda_basis) == std::vector<std::string>{"(0, 1)"});

  ClosedSubgroup id;
  id.dimension = 2;
  id.basis = b;
  id.Lambda_basis = {vec(b, {"1", "0"}), vec(b, {"0", "2"})};
  CHECK(strings(orthogonalize(id).Lambda_basis) == strings(id.Lambda_basis));
}

TEST_CASE("orthogonalize preserves membership") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> entry(-4, 4);
  auto b = ConstantBasis::rational_only();
  for (int trial = 0; trial < 40; ++trial) {
    ClosedSubgroup c;
    c.dimension = 3;
    c.basis = b;
    RationalVector v = {Rational(entry(rng)), Rational(entry(rng)), Rational(1)};
    c.V_basis = {to_exact(b, v)};
    std::vector<ExactVector> gens;
    for (int i = 0; i < 2; ++i) gens.push_back(to_exact(b, {Rational(entry(rng)), Rational(entry(rng)), Rational(0)}));
    if (rational_rank({gens[0], gens[1], c.V_basis[0]}) < 3) continue;
    c.Lambda_basis = gens;
    auto o = orthogonalize(c);
    for (const auto& l : o.Lambda_basis) CHECK(dot(rational_part(o.V_basis[0]), l).is_zero());
    // Every original generator is v + lattice combination.
    for (const auto& g : gens) {
      std::vector<ExactVector> cols = o.Lambda_basis;
      cols.push_back(o.V_basis[0]);
      auto z = solve_rational_combination(cols, g);
      REQUIRE(z);
      for (std::size_t i = 0; i + 1 < z->size(); ++i) CHECK((*z)[i].get_den() == 1);
    }
    // And every new basis vector is in the original group.
    for (const auto& l : o.Lambda_basis) {
      std::vector<ExactVector> cols = gens;
      cols.push_back(c.V_basis[0]);
      auto z = solve_rational_combination(cols, l);
      REQUIRE(z);
      for (std::size_t i = 0; i + 1 < z->size(); ++i) CHECK((*z)[i].get_den() == 1);
    }
  }
}

TEST_CASE("hyperplane certificates") {
  auto lat = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"3/2", "0"}, {"0", "3/2"}}));
  auto cert = build_certificate(lat);
  CHECK(to_string(cert.normal) == "(1, 0)");
  CHECK(to_string(cert.c) == "(1/2, 0)");
  CHECK(cert.period.to_string() == "1/2");
  auto mu = atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"3/2", "0"}, {"0", "3/2"}});
  CHECK(verify_certificate(cert, support_of(mu)).ok);

  // Sheared lattice with basis (1, 0), (1/2, 1): the shortest lattice vector
  // (1, 0) is not perpendicular to any valid H; c must be parallel to n.
  auto shear = atomic_measure(2, {{"1", "0"}, {"1/2", "1"}});
  auto sc = closure_of(shear);
  auto scert = build_certificate(sc);
  CHECK(verify_certificate(scert, support_of(shear)).ok);
  CHECK_FALSE(scert.period.is_zero());

  auto diffmu = parse_measure(R"({"dimension": 3, "continuous": [{"kind": "affine_supported",
      "basis": [["1", "0", "0"], ["0", "1", "0"]], "profile": {"kind": "fractional", "alpha": "1"}}]})");
  auto dcert = build_certificate(closure_of(diffmu));
  CHECK(to_string(dcert.normal) == "(0, 0, 1)");
  CHECK(to_string(dcert.c) == "(0, 0, 1)");
  CHECK(verify_certificate(dcert, support_of(diffmu)).ok);

  auto empty = parse_measure(R"({"dimension": 2})");
  auto ecert = build_certificate(closure_of(empty));
  CHECK(to_string(ecert.normal) == "(1, 0)");

  // A certificate for one support fails on a denser support.
  auto denser = atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"1/3", "0"}});
  CHECK_FALSE(verify_certificate(cert, support_of(denser)).ok);
  auto dense = closure_of(atomic_measure(2, {{"1", "0"}, {"0", "1"}, {"sqrt2", "sqrt3"}}, root_constants()));
  CHECK_THROWS_AS(build_certificate(dense), PreconditionError);
}

TEST_CASE("certificate exists exactly when the closure is not dense") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> pick(0, 5), num(-6, 6), den(1, 4);
  const char* irr[] = {"sqrt2", "sqrt3", "1 + sqrt2", "sqrt2 + sqrt3", "2*sqrt3", "0"};
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::vector<std::string>> pts;
    int count = 1 + trial % 3;
    for (int i = 0; i < count; ++i) {
      std::vector<std::string> p;
      for (int j = 0; j < 2; ++j) {
        int n = num(rng);
        std::string r = std::to_string(n == 0 ? 1 : n) + "/" + std::to_string(den(rng));
        p.push_back(pick(rng) < 4 ? r : std::string(irr[pick(rng)]));
      }
      if (p[0] == "0" && p[1] == "0") p[0] = "1";
      pts.push_back(p);
    }
    pts.push_back({"1", "0"});
    pts.push_back({"0", "1"});
    auto mu = atomic_measure(2, pts, root_constants());
    auto c = closure_of(mu);
    if (!c.certified()) continue;
    if (c.dense()) {
      CHECK_THROWS(build_certificate(c));
    } else {
      CAPTURE(c.route);
      auto cert = build_certificate(c);
      CHECK(verify_certificate(cert, support_of(mu)).ok);
    }
  }
}

TEST_CASE("decomposition examples") {
  auto one = parse_measure(R"({"dimension": 1, "atoms": [{"point": ["1/2"], "weight": "3"}, {"point": ["3/2"], "weight": "1/5"}]})");
  auto d1 = decompose_measure(one, closure_of(one));
  REQUIRE(d1.parts.size() == 4);
  CHECK(d1.parts[0].coset == IntegerVector{-3});
  CHECK(d1.parts[1].coset == IntegerVector{-1});
  CHECK(d1.parts[2].coset == IntegerVector{1});
  CHECK(d1.parts[3].coset == IntegerVector{3});
  CHECK(d1.parts[2].atoms.at(0).weight.to_string() == "3");
  CHECK(d1.epsilon_star == doctest::Approx(0.5));
  CHECK(d1.levy_symmetric);
  CHECK(d1.off_zero_mass == doctest::Approx(2 * (3 + 0.2)));

  auto four = atomic_measure(2, {{"1", "0"}, {"1", "1"}});
  auto c4 = closure_of(four);
  CHECK(strings(c4.Lambda_basis) == std::vector<std::string>{"(1, 0)", "(0, 1)"});
  auto d4 = decompose_measure(four, c4);
  CHECK(d4.parts.size() == 4);
  for (const auto& p : d4.parts) CHECK(p.atoms.size() == 1);
  CHECK(d4.levy_symmetric);

  // Hyperplane V = x-axis with a fractional piece and two shifted Gaussian pieces.
  auto fig = parse_measure(R"({"dimension": 2, "continuous": [
      {"kind": "affine_supported", "basis": [["1", "0"]], "profile": {"kind": "fractional", "alpha": "1"}},
      {"kind": "affine_supported", "basis": [["1", "0"]], "offset": ["0", "1"],
       "profile": {"kind": "gaussian", "sigma": "1", "mass": "2"}}]})");
  auto cf = closure_of(fig);
  CHECK(strings(cf.V_basis) == std::vector<std::string>{"(1, 0)"});
  CHECK(strings(cf.Lambda_basis) == std::vector<std::string>{"(0, 1)"});
  auto df = decompose_measure(fig, cf);
  REQUIRE(df.parts.size() == 3);
  CHECK(df.parts[0].coset == IntegerVector{-1});
  CHECK(df.parts[1].coset == IntegerVector{0});
  CHECK(df.parts[2].coset == IntegerVector{1});
  CHECK(df.off_zero_mass == doctest::Approx(4.0));
  CHECK(df.epsilon_star == doctest::Approx(1.0));
}

TEST_CASE("decomposition reconstitutes the measure and is unique") {
  auto a = atomic_measure(2, {{"1", "0"}, {"0", "2"}, {"1", "2"}, {"3", "-2"}});
  auto b = atomic_measure(2, {{"-3", "2"}, {"1", "2"}, {"0", "-2"}, {"-1", "0"}});
  auto da = decompose_measure(a, closure_of(a));
  auto db = decompose_measure(b, closure_of(b));
  REQUIRE(da.parts.size() == db.parts.size());
  for (std::size_t i = 0; i < da.parts.size(); ++i) {
    CHECK(da.parts[i].coset == db.parts[i].coset);
    REQUIRE(da.parts[i].atoms.size() == db.parts[i].atoms.size());
    for (std::size_t j = 0; j < da.parts[i].atoms.size(); ++j) CHECK(da.parts[i].atoms[j].point == db.parts[i].atoms[j].point);
  }
  std::size_t total = 0;
  for (const auto& p : da.parts) total += p.atoms.size();
  CHECK(total == a.atoms.size());
  for (const auto& atom : a.atoms) {
    bool found = false;
    for (const auto& p : da.parts)
      for (const auto& x : p.atoms) found = found || (x.point == atom.point && x.weight == atom.weight);
    CHECK(found);
  }
}

TEST_CASE("decomposition rejects dense or inconsistent closures") {
  auto mu = atomic_measure(1, {{"1"}, {"pi"}}, pi_constants());
  CHECK_THROWS_AS(decompose_measure(mu, closure_of(mu)), PreconditionError);
  auto lat = atomic_measure(1, {{"1"}});
  auto other = atomic_measure(1, {{"1"}, {"1/2"}});
  CHECK_THROWS_AS(decompose_measure(other, closure_of(lat)), PreconditionError);
}

TEST_CASE("sequence decomposition carries a tail bound") {
  auto mu = parse_measure(R"({"dimension": 1, "sequences": [{"template": "multiples", "c": "1/2",
      "weight": {"rule": "geometric", "w": "1", "rho": "1/2"}, "N": 20, "accumulation": false}]})");
  auto c = closure_of(mu);
  REQUIRE(c.Lambda_basis.size() == 1);
  CHECK(c.Lambda_basis[0][0].to_string() == "1/2");
  auto d = decompose_measure(mu, c);
  CHECK(d.parts.size() == 40);
  CHECK(d.off_zero_tail > 0);
  CHECK(d.off_zero_tail < 1e-4);
  CHECK(d.levy_symmetric);
}

TEST_CASE("1-d closure agrees with the sup of Q over pairs") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> num(1, 30), den(1, 12), kind(0, 3), count(2, 5);
  auto basis = ConstantBasis::make({{"pi", kPi}});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<std::string>> pts;
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      std::string q = std::to_string(num(rng)) + "/" + std::to_string(den(rng));
      pts.push_back({kind(rng) == 0 ? q + "*pi" : q});
    }
    auto mu = atomic_measure(1, pts, pi_constants());
    auto sup = support_of(mu);
    bool infinite = false;
    for (const auto& a : sup.finite_points)
      for (const auto& b : sup.finite_points) infinite = infinite || !q_of(a[0], b[0]).finite;
    CHECK(closure_1d(sup).dense() == infinite);
  }
}
