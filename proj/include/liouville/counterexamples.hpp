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

// Explicit nonconstant bounded solutions when the Liouville property fails,
// and a periodicity checker for candidate functions.

#include <optional>
#include <string>
#include <vector>

#include "liouville/group_closure.hpp"
#include "liouville/numerics.hpp"

namespace liouville {

// U(x) = cos(2 pi lambda_x), lambda_x = <n, x> / <n, c>: constant on H and
// 1-periodic along c.
class CosetCosine : public Function {
 public:
  explicit CosetCosine(HyperplaneCertificate cert);
  std::size_t dimension() const override { return normal_.size(); }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  // Exact when <n, a> / <n, c> is rational; value(x) bit-for-bit on periods.
  double shifted_value(const Point& x, const ExactVector& a) const override;
  double sup_norm() const override { return 1.0; }
  double hessian_bound() const override { return frequency() * frequency(); }
  double frequency() const override;
  std::string describe() const override;

  // lambda_x for exact x when it is rational.
  std::optional<Rational> exact_lambda(const ExactVector& x) const;
  double lambda(const Point& x) const;
  const HyperplaneCertificate& certificate() const { return cert_; }

 private:
  HyperplaneCertificate cert_;
  Point normal_;
  double period_;
};

enum class CounterexampleKind { kCosine1d, kCosineCoset };
std::string counterexample_kind_name(CounterexampleKind k);

struct Counterexample {
  CounterexampleKind kind = CounterexampleKind::kCosine1d;
  HyperplaneCertificate certificate;
  std::shared_ptr<const CosetCosine> function;
  std::string closed_form;

  double operator()(const Point& x) const { return function->value(x); }
};

Counterexample build_counterexample(const HyperplaneCertificate& cert);
Counterexample build_counterexample(const ClosedSubgroup& closure);

struct PeriodicityResult {
  bool periodic = true;
  double max_deviation = 0.0;
  Point worst_point;
  std::size_t worst_generator = 0;
};

// max over samples x and generators s of |u(x + s) - u(x)|.
PeriodicityResult check_periodicity(const Function& u, const std::vector<ExactVector>& generators,
                                    const std::vector<Point>& samples, double tol);

}  // namespace liouville
