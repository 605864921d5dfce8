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

// Numerical evaluation of L^mu[u] and the propagation-of-maximum set
// iteration A_{n+1} = A_n + supp(mu) with covering-radius diagnostics.

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "liouville/linalg.hpp"
#include "liouville/measures.hpp"

namespace liouville {

using Point = std::vector<double>;

Point add_points(Point a, const Point& b);

// A bounded C^2 test function. Implementations must be pure and reentrant.
class Function {
 public:
  virtual ~Function() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(const Point& x) const = 0;
  // Central differences with step 1e-6 unless overridden.
  virtual Point gradient(const Point& x) const;
  // u(x + a) for an exact shift a. Periodic functions override this to
  // return value(x) bit-for-bit when a is an exact period.
  virtual double shifted_value(const Point& x, const ExactVector& a) const;
  // sup |u|; infinity for unbounded functions.
  virtual double sup_norm() const = 0;
  // Bound on the operator norm of the Hessian.
  virtual double hessian_bound() const = 0;
  // Spatial frequency scale, used to size angular quadrature rules.
  virtual double frequency() const { return 1.0; }
  virtual std::string describe() const = 0;
};

using FunctionPtr = std::shared_ptr<const Function>;

// cos(<k, x> + phase)
class CosineWave : public Function {
 public:
  CosineWave(Point k, double phase = 0.0) : k_(std::move(k)), phase_(phase) {}
  std::size_t dimension() const override { return k_.size(); }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double sup_norm() const override { return 1.0; }
  double hessian_bound() const override;
  double frequency() const override;
  std::string describe() const override;

 private:
  Point k_;
  double phase_;
};

// x_1^2 - x_2^2 (harmonic, unbounded).
class HarmonicQuadratic : public Function {
 public:
  explicit HarmonicQuadratic(std::size_t d) : d_(d) {}
  std::size_t dimension() const override { return d_; }
  double value(const Point& x) const override { return x[0] * x[0] - x[1] * x[1]; }
  Point gradient(const Point& x) const override;
  double sup_norm() const override;
  double hessian_bound() const override { return 2.0; }
  double frequency() const override { return 0.0; }
  std::string describe() const override { return "x1^2 - x2^2"; }

 private:
  std::size_t d_;
};

// amplitude * exp(-|x - center|^2 / (2 width^2))
class GaussianBump : public Function {
 public:
  GaussianBump(Point center, double width, double amplitude)
      : center_(std::move(center)), width_(width), amplitude_(amplitude) {}
  std::size_t dimension() const override { return center_.size(); }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double sup_norm() const override { return std::abs(amplitude_); }
  double hessian_bound() const override;
  double frequency() const override { return 1.0 / width_; }
  std::string describe() const override;

 private:
  Point center_;
  double width_;
  double amplitude_;
};

class SumFunction : public Function {
 public:
  SumFunction(FunctionPtr f, FunctionPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  std::size_t dimension() const override { return f_->dimension(); }
  double value(const Point& x) const override { return f_->value(x) + g_->value(x); }
  Point gradient(const Point& x) const override;
  double shifted_value(const Point& x, const ExactVector& a) const override {
    return f_->shifted_value(x, a) + g_->shifted_value(x, a);
  }
  double sup_norm() const override { return f_->sup_norm() + g_->sup_norm(); }
  double hessian_bound() const override { return f_->hessian_bound() + g_->hessian_bound(); }
  double frequency() const override { return std::max(f_->frequency(), g_->frequency()); }
  std::string describe() const override { return f_->describe() + " + " + g_->describe(); }

 private:
  FunctionPtr f_, g_;
};

struct QuadratureConfig {
  double r0 = 1.0;               // compensation radius
  int nodes_per_decade = 64;     // log-spaced radial panels below r0
  double r_max = 0.0;            // 0 selects 1e5, 1e3, 1e2 for d = 1, 2, 3
  double panel_width = 0.5;      // uniform panels beyond r0
  double inner_radius = 1e-3;    // second-order model below this radius
  int angular_nodes = 32;        // minimum angular rule size
  std::uint64_t truncation = 0;  // 0 uses each sequence's own N
  double tolerance = 0.0;        // 0 disables the bound check
};

struct OperatorValue {
  double value = 0.0;
  double bound = 0.0;  // total error bound
  double atomic = 0.0;
  double continuous = 0.0;
  double quadrature_error = 0.0;
  double inner_error = 0.0;
  double outer_tail = 0.0;
  double series_tail = 0.0;
};

// Fractional Laplacian constant c_{d,alpha}.
double fractional_constant(std::size_t d, double alpha);
// Fourier multiplier m(xi) with L^mu[cos(<xi, .>)] = m(xi) cos(<xi, .>),
// for measures without sequences or affine pieces. Used as an oracle.
double fourier_symbol(const LevyMeasure& mu, const Point& xi);

// Throws PreconditionError for cantor parts or d > 3 with continuous parts,
// NumericalError when u is unbounded on an unbounded support or the bound
// exceeds cfg.tolerance.
OperatorValue eval_operator(const LevyMeasure& mu, const Function& u, const Point& x,
                            const QuadratureConfig& cfg = {});

struct PropagationConfig {
  double R = 5.0;
  std::uint64_t n_max = 40;
  double target_delta = 0.0;   // 0 disables early stop
  double spacing = 0.0;        // probe grid spacing; 0 selects R / 200 (R / 40 in d = 3)
  std::size_t point_cap = 5'000'000;
};

struct PropagationState {
  std::uint64_t n = 0;
  std::size_t dimension = 1;
  double R = 0.0;
  double margin = 0.0;
  std::vector<ExactVector> points;  // A_n inside B_{R + margin}
  std::vector<double> covering_radius_history;
  std::vector<std::size_t> size_history;
  bool truncated = false;  // point cap reached; partial result
};

// Grid spacing h actually used; covering radii are exact up to h sqrt(d) / 2.
double probe_spacing(std::size_t d, const PropagationConfig& cfg);

// Requires a nonempty support and R > 0.
PropagationState propagate(const std::vector<ExactVector>& support, std::size_t d, const PropagationConfig& cfg);

enum class ProbeKind { kLatticeDetected, kDenseLikely, kInconclusive };
std::string probe_kind_name(ProbeKind kind);

struct ProbeVerdict {
  ProbeKind kind = ProbeKind::kInconclusive;
  std::vector<Point> lattice_basis;  // fitted basis when a lattice is detected
  std::vector<double> history;
  double reduction = 0.0;            // delta_0 / delta_n
  std::string detail;
};

// Thresholds: lattice when delta is constant (relative 1e-12) over the
// last 5 iterations and all points snap to a fitted lattice within 1e-9;
// dense-likely when delta fell by 10x and below R / 50.
ProbeVerdict density_probe(const std::vector<ExactVector>& support, std::size_t d, const PropagationConfig& cfg);

}  // namespace liouville
