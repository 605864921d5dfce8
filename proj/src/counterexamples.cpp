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

#include "liouville/counterexamples.hpp"

#include <cmath>
#include <numbers>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::string linear_form(const RationalVector& n) {
  std::string s;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == 0) continue;
    std::string var = n.size() == 1 ? "x" : "x" + std::to_string(i + 1);
    Rational a = abs(n[i]);
    std::string term = a == 1 ? var : to_string(a) + "*" + var;
    if (s.empty())
      s = (n[i] < 0 ? "-" : "") + term;
    else
      s += (n[i] < 0 ? " - " : " + ") + term;
  }
  return s;
}

}  // namespace

CosetCosine::CosetCosine(HyperplaneCertificate cert) : cert_(std::move(cert)) {
  if (cert_.period.is_zero()) throw PreconditionError("counterexample: c lies in H");
  for (const auto& q : cert_.normal) normal_.push_back(q.get_d());
  period_ = cert_.period.to_double();
}

double CosetCosine::lambda(const Point& x) const {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += normal_[i] * x[i];
  return s / period_;
}

double CosetCosine::value(const Point& x) const { return std::cos(kTwoPi * lambda(x)); }

Point CosetCosine::gradient(const Point& x) const {
  double s = -std::sin(kTwoPi * lambda(x)) * kTwoPi / period_;
  Point g = normal_;
  for (auto& v : g) v *= s;
  return g;
}

double CosetCosine::shifted_value(const Point& x, const ExactVector& a) const {
  auto r = rational_ratio(cert_.period, dot(cert_.normal, a));
  if (!r) return value(add_points(x, to_doubles(a)));
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), r->get_num_mpz_t(), r->get_den_mpz_t());
  Rational frac = *r - fl;
  if (frac == 0) return value(x);
  return std::cos(kTwoPi * (lambda(x) + frac.get_d()));
}

double CosetCosine::frequency() const {
  double n2 = 0;
  for (double v : normal_) n2 += v * v;
  return kTwoPi * std::sqrt(n2) / std::abs(period_);
}

std::string CosetCosine::describe() const {
  std::string form = linear_form(cert_.normal);
  if (cert_.period.is_rational()) {
    Rational k = 2 / cert_.period.rational_part();
    std::string coef = k == 1 ? "" : to_string(k) + "*";
    if (k.get_den() != 1) coef = "(" + to_string(k) + ")*";
    bool single = form.find(' ') == std::string::npos;
    return "cos(" + coef + "pi*" + (single ? form : "(" + form + ")") + ")";
  }
  return "cos(2*pi*(" + form + ")/(" + cert_.period.to_string() + "))";
}

std::optional<Rational> CosetCosine::exact_lambda(const ExactVector& x) const {
  return rational_ratio(cert_.period, dot(cert_.normal, x));
}

std::string counterexample_kind_name(CounterexampleKind k) {
  return k == CounterexampleKind::kCosine1d ? "cosine_1d" : "cosine_coset";
}

Counterexample build_counterexample(const HyperplaneCertificate& cert) {
  Counterexample cx;
  cx.kind = cert.normal.size() == 1 ? CounterexampleKind::kCosine1d : CounterexampleKind::kCosineCoset;
  cx.certificate = cert;
  cx.function = std::make_shared<const CosetCosine>(cert);
  cx.closed_form = cx.function->describe();
  return cx;
}

Counterexample build_counterexample(const ClosedSubgroup& closure) {
  return build_counterexample(build_certificate(closure.orthogonal ? closure : orthogonalize(closure)));
}

PeriodicityResult check_periodicity(const Function& u, const std::vector<ExactVector>& generators,
                                    const std::vector<Point>& samples, double tol) {
  PeriodicityResult out;
  for (const auto& x : samples) {
    double ux = u.value(x);
    for (std::size_t j = 0; j < generators.size(); ++j) {
      double dev = std::abs(u.shifted_value(x, generators[j]) - ux);
      if (dev > out.max_deviation || out.worst_point.empty()) {
        if (dev > out.max_deviation) out.max_deviation = dev;
        if (out.worst_point.empty() || dev >= out.max_deviation) {
          out.worst_point = x;
          out.worst_generator = j;
        }
      }
    }
  }
  out.periodic = out.max_deviation <= tol;
  return out;
}

}  // namespace liouville
