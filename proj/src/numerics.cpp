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

#include "liouville/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point add(Point a, const Point& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt(p[i]);
  return s + ")";
}

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Antipodally symmetric rule on the unit sphere of R^k; weights sum to 1.
struct SphereRule {
  std::vector<Point> dirs;
  std::vector<double> weights;
};

SphereRule sphere_rule(int k, int size) {
  SphereRule s;
  if (k == 1) {
    s.dirs = {{1.0}, {-1.0}};
    s.weights = {0.5, 0.5};
  } else if (k == 2) {
    int M = std::max(4, size + (size % 2));
    for (int j = 0; j < M; ++j) {
      double phi = 2 * kPi * j / M;
      s.dirs.push_back({std::cos(phi), std::sin(phi)});
      s.weights.push_back(1.0 / M);
    }
  } else if (k == 3) {
    int P = std::max(2, size);
    const auto& g = gauss_legendre(P);
    int M = 2 * P;
    for (int i = 0; i < P; ++i) {
      double t = g.nodes[i], st = std::sqrt(std::max(0.0, 1 - t * t));
      for (int j = 0; j < M; ++j) {
        double phi = 2 * kPi * j / M;
        s.dirs.push_back({st * std::cos(phi), st * std::sin(phi), t});
        s.weights.push_back(g.weights[i] / 2 / M);
      }
    }
  } else {
    throw PreconditionError("angular quadrature supports intrinsic dimension <= 3");
  }
  return s;
}

const SphereRule& cached_sphere_rule(int k, int size) {
  thread_local std::map<std::pair<int, int>, SphereRule> cache;
  auto key = std::make_pair(k, size);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, sphere_rule(k, size)).first->second;
}

double sphere_area(int k) {
  switch (k) {
    case 1: return 2.0;
    case 2: return 2 * kPi;
    case 3: return 4 * kPi;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double ball_volume(int k) {
  switch (k) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4 * kPi / 3;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Angular rule size needed to resolve u on a sphere of radius r.
int angular_size(int k, double r, double freq, int minimum) {
  double band = freq * r;
  if (k == 2) return std::max(minimum, 2 * static_cast<int>(std::ceil(band / 2 + 8)) + 2 * static_cast<int>(std::ceil(std::cbrt(band))));
  if (k == 3) return std::max(minimum / 2, static_cast<int>(std::ceil(band / 2 + 10)));
  return 2;
}

// One radial part of the measure: density J(|s|) on offset + frame * R^k.
struct RadialPart {
  std::string name;
  int k = 1;
  std::vector<Point> frame;  // k orthonormal vectors of R^d
  Point offset;
  bool centered = true;      // support reaches the origin; compensation applies
  bool singular = false;     // J ~ c r^{-k-alpha} at 0
  double alpha = 0;
  std::function<double(double)> J;
  double r_max = 0;
  double scale = 1;          // natural length scale for panel widths
  double tail_mass = 0;      // mu(|s| > r_max)
  bool power_tail = false;   // J = c r^{-k-alpha} beyond r_max
  std::vector<double> breaks;
};

double default_r_max(std::size_t d) {
  switch (d) {
    case 1: return 1e5;
    case 2: return 1e3;
    default: return 1e2;
  }
}

std::vector<Point> orthonormal_frame(const std::vector<ExactVector>& basis) {
  std::vector<Point> q;
  for (const auto& b : basis) {
    Point v = to_doubles(b);
    for (const auto& e : q) {
      double c = dot(v, e);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
    }
    double n = norm(v);
    for (auto& x : v) x /= n;
    q.push_back(v);
  }
  return q;
}

std::vector<Point> identity_frame(std::size_t d) {
  std::vector<Point> q(d, Point(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) q[i][i] = 1;
  return q;
}

double relativistic_density(std::size_t d, double alpha, double m, double r) {
  double nu = (d + alpha) / 2;
  double c = fractional_constant(d, alpha) * std::pow(2.0, 1 - nu) / std::tgamma(nu) * std::pow(m, nu);
  double z = m * r;
  if (z > 700) return 0.0;
  return c * std::cyl_bessel_k(nu, z) / std::pow(r, nu);
}

// Integral of J over |s| in [a, b] in k dimensions.
double radial_mass(const RadialPart& p, double a, double b) {
  const auto& g = gauss_legendre(32);
  double s = 0;
  int panels = 64;
  for (int i = 0; i < panels; ++i) {
    double lo = a + (b - a) * i / panels, hi = a + (b - a) * (i + 1) / panels;
    double c = (lo + hi) / 2, h = (hi - lo) / 2;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      double r = c + h * g.nodes[j];
      s += h * g.weights[j] * sphere_area(p.k) * std::pow(r, p.k - 1) * p.J(r);
    }
  }
  return s;
}

std::vector<RadialPart> radial_parts(const LevyMeasure& mu) {
  using K = ContinuousPart::Kind;
  const std::size_t d = mu.dimension;
  std::vector<RadialPart> parts;
  for (const auto& c : mu.continuous) {
    RadialPart p;
    p.name = kind_name(c.kind);
    switch (c.kind) {
      case K::kFractional: {
        double a = c.alpha.get_d(), cst = fractional_constant(d, a);
        p.k = static_cast<int>(d);
        p.frame = identity_frame(d);
        p.singular = true;
        p.alpha = a;
        p.J = [cst, d, a](double r) { return cst * std::pow(r, -static_cast<double>(d) - a); };
        p.r_max = default_r_max(d);
        p.tail_mass = cst * sphere_area(p.k) * std::pow(p.r_max, -a) / a;
        p.power_tail = true;
        break;
      }
      case K::kRelativistic: {
        double a = c.alpha.get_d(), m = c.m.get_d();
        p.k = static_cast<int>(d);
        p.frame = identity_frame(d);
        p.singular = true;
        p.alpha = a;
        p.J = [d, a, m](double r) { return relativistic_density(d, a, m, r); };
        p.r_max = std::min(default_r_max(d), 40 / m + 10);
        p.scale = std::min(1.0, 1 / m);
        p.tail_mass = radial_mass(p, p.r_max, p.r_max + 60 / m);
        break;
      }
      case K::kConvolution: {
        p.k = static_cast<int>(d);
        p.frame = identity_frame(d);
        double mass = c.mass.get_d();
        if (c.kernel == KernelKind::kGaussian) {
          double s = c.sigma.get_d();
          double norm_c = mass * std::pow(2 * kPi * s * s, -static_cast<double>(d) / 2);
          p.J = [norm_c, s](double r) { return norm_c * std::exp(-r * r / (2 * s * s)); };
          p.r_max = 40 * s;
          p.scale = s;
        } else {
          double rad = c.radius.get_d();
          double h = mass / (ball_volume(p.k) * std::pow(rad, p.k));
          p.J = [h, rad](double r) { return r <= rad ? h : 0.0; };
          p.r_max = rad;
          p.scale = rad;
        }
        break;
      }
      case K::kAffine: {
        p.k = static_cast<int>(c.affine_basis.size());
        p.frame = orthonormal_frame(c.affine_basis);
        p.offset = to_doubles(c.offset);
        p.centered = is_zero(c.offset);
        if (c.profile == ProfileKind::kFractional) {
          double a = c.alpha.get_d(), cst = fractional_constant(p.k, a);
          int k = p.k;
          p.singular = true;
          p.alpha = a;
          p.J = [cst, k, a](double r) { return cst * std::pow(r, -static_cast<double>(k) - a); };
          p.r_max = default_r_max(static_cast<std::size_t>(p.k));
          if (d == 3 && p.k == 2) p.r_max = 1e2;
          p.tail_mass = cst * sphere_area(p.k) * std::pow(p.r_max, -a) / a;
          p.power_tail = true;
        } else {
          double s = c.sigma.get_d(), mass = c.mass.get_d();
          double norm_c = mass * std::pow(2 * kPi * s * s, -static_cast<double>(p.k) / 2);
          p.J = [norm_c, s](double r) { return norm_c * std::exp(-r * r / (2 * s * s)); };
          p.r_max = 40 * s;
          p.scale = s;
        }
        break;
      }
      case K::kSurfaceSphere:
        continue;
      case K::kCantor:
        throw PreconditionError("cantor parts are support descriptors only and are never integrated");
    }
    if (p.k > 3) throw PreconditionError("continuous parts are integrated in dimension <= 3 only");
    parts.push_back(std::move(p));
  }
  return parts;
}

struct Accum {
  double value = 0;
  double error = 0;
};

class RadialIntegrator {
 public:
  RadialIntegrator(const RadialPart& p, const Function& u, const Point& x, double ux, const Point& grad,
                   const QuadratureConfig& cfg)
      : p_(p), u_(u), x_(x), ux_(ux), grad_(grad), cfg_(cfg) {}

  // Mean over the unit sphere of u(x + offset + r Q theta) - u(x), minus
  // the compensation term when it applies.
  double angular_mean(double r, int size) const {
    const SphereRule& rule = cached_sphere_rule(p_.k, size);
    bool compensate = p_.centered && r < cfg_.r0;
    double s = 0;
    thread_local Point y, z;
    y.resize(x_.size());
    z.resize(x_.size());
    for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
      if (p_.offset.empty()) std::fill(z.begin(), z.end(), 0.0);
      else std::copy(p_.offset.begin(), p_.offset.end(), z.begin());
      for (int j = 0; j < p_.k; ++j)
        for (std::size_t t = 0; t < z.size(); ++t) z[t] += r * rule.dirs[i][j] * p_.frame[j][t];
      for (std::size_t t = 0; t < y.size(); ++t) y[t] = x_[t] + z[t];
      double term = u_.value(y) - ux_;
      if (compensate) term -= dot(z, grad_);
      s += rule.weights[i] * term;
    }
    return s;
  }

  double rho(double r) const { return sphere_area(p_.k) * std::pow(r, p_.k - 1) * p_.J(r); }

  void panel(double a, double b, Accum& acc) const {
    static const auto& g8 = gauss_legendre(8);
    static const auto& g4 = gauss_legendre(4);
    double c = (a + b) / 2, h = (b - a) / 2;
    int size = angular_size(p_.k, b + norm_or_zero(p_.offset), u_.frequency(), cfg_.angular_nodes);
    double s8 = 0, s4 = 0;
    for (std::size_t j = 0; j < g8.nodes.size(); ++j) {
      double r = c + h * g8.nodes[j];
      s8 += g8.weights[j] * rho(r) * angular_mean(r, size);
    }
    for (std::size_t j = 0; j < g4.nodes.size(); ++j) {
      double r = c + h * g4.nodes[j];
      s4 += g4.weights[j] * rho(r) * angular_mean(r, size);
    }
    acc.value += h * s8;
    acc.error += std::abs(h * (s8 - s4));
  }

  static double norm_or_zero(const Point& p) { return p.empty() ? 0.0 : norm(p); }

  // Contribution of |s| < h through the second-order model
  // mean[u(x + s) - u(x)] ~ |s|^2 Delta u / (2k).
  Accum inner(double h) const {
    double m2 = second_moment(h);
    int size = angular_size(p_.k, h, u_.frequency(), cfg_.angular_nodes);
    double a1 = angular_mean(h, size) / (h * h);
    double a2 = angular_mean(h / 2, size) / (h * h / 4);
    return {a1 * m2, std::abs(a1 - a2) * m2};
  }

  // Integral of r^2 rho(r) over (0, h) for singular kernels, through the
  // substitution s = r^(2 - alpha).
  double second_moment(double h) const {
    double e = 2 - p_.alpha;
    const auto& g = gauss_legendre(16);
    double smax = std::pow(h, e), sum = 0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      double s = smax * (g.nodes[j] + 1) / 2;
      double r = std::pow(s, 1 / e);
      double smooth = std::pow(r, 1 + p_.alpha) * rho(r);
      sum += g.weights[j] * smax / 2 * smooth / e;
    }
    return sum;
  }

 private:
  const RadialPart& p_;
  const Function& u_;
  const Point& x_;
  double ux_;
  const Point& grad_;
  const QuadratureConfig& cfg_;
};

struct ContinuousResult {
  double value = 0;
  double quadrature_error = 0;
  double inner_error = 0;
  double outer_tail = 0;
};

ContinuousResult integrate_radial(const RadialPart& p, const Function& u, const Point& x, double ux,
                                  const Point& grad, const QuadratureConfig& cfg) {
  RadialIntegrator in(p, u, x, ux, grad, cfg);
  ContinuousResult res;
  Accum acc;
  std::vector<double> cuts;
  double start = 0;
  if (p.singular) {
    Accum inner = in.inner(cfg.inner_radius);
    res.value += inner.value;
    res.inner_error += inner.error;
    start = cfg.inner_radius;
    // Log-spaced panels up to r_switch.
    double r_switch = std::min(p.r_max, std::max(cfg.r0, 2.0));
    double decades = std::log10(r_switch / start);
    int n = std::max(1, static_cast<int>(std::ceil(decades * cfg.nodes_per_decade / 8.0)));
    for (int i = 0; i <= n; ++i) cuts.push_back(start * std::pow(r_switch / start, static_cast<double>(i) / n));
    if (cfg.r0 > start && cfg.r0 < r_switch) cuts.push_back(cfg.r0);
    start = r_switch;
  } else {
    cuts.push_back(0.0);
    if (cfg.r0 < p.r_max && p.centered) cuts.push_back(cfg.r0);
  }
  double width = std::min(cfg.panel_width, p.scale / 4);
  int n = static_cast<int>(std::ceil((p.r_max - start) / width));
  for (int i = 1; i <= n; ++i) cuts.push_back(start + (p.r_max - start) * i / n);
  for (double b : p.breaks) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14 * std::max(1.0, std::abs(b)); }),
             cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) in.panel(cuts[i], cuts[i + 1], acc);
  res.value += acc.value;
  res.quadrature_error += acc.error;
  if (p.tail_mass > 0 && p.power_tail) {
    // Tail = mu(|s| > r_max) times the far-field mean of the angular
    // increment, estimated by a resolved average over a window beyond r_max.
    // Exact for u constant along the support; the bound covers any bounded u.
    const auto& g = gauss_legendre(8);
    const double freq = std::max(u.frequency(), 1e-3);
    const double W = std::min(p.r_max, std::max(200.0, 400 / freq));
    const int panels = static_cast<int>(std::ceil(W / std::min(cfg.panel_width, 1.0 / freq)));
    double sum = 0;
    for (int i = 0; i < panels; ++i) {
      double a = p.r_max + W * i / panels, h = W / panels / 2;
      int size = std::min(4096, angular_size(p.k, a + 2 * h, u.frequency(), cfg.angular_nodes));
      for (std::size_t j = 0; j < g.nodes.size(); ++j) sum += h * g.weights[j] * in.angular_mean(a + h * (g.nodes[j] + 1), size);
    }
    res.value += p.tail_mass * sum / W;
    res.outer_tail += 2 * u.sup_norm() * p.tail_mass;
  } else if (p.tail_mass > 0) {
    res.value -= ux * p.tail_mass;
    res.outer_tail += u.sup_norm() * p.tail_mass;
  }
  return res;
}

ContinuousResult integrate_sphere(const ContinuousPart& c, std::size_t d, const Function& u, const Point& x,
                                  double ux, const QuadratureConfig& cfg) {
  int k = static_cast<int>(d);
  double radius = c.radius.get_d(), mass = c.mass.get_d();
  int size = angular_size(k, radius, u.frequency(), std::max(cfg.angular_nodes, 64));
  auto mean = [&](int sz) {
    const SphereRule& rule = cached_sphere_rule(k, sz);
    double s = 0;
    Point y(d);
    for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
      for (std::size_t t = 0; t < d; ++t) y[t] = x[t] + radius * rule.dirs[i][t];
      s += rule.weights[i] * (u.value(y) - ux);
    }
    return s;
  };
  double full = mean(size), half = mean(std::max(k == 2 ? 4 : 2, size / 2));
  ContinuousResult r;
  r.value = mass * full;
  r.quadrature_error = mass * std::abs(full - half);
  return r;
}

bool unbounded_support(const LevyMeasure& mu) {
  using K = ContinuousPart::Kind;
  for (const auto& c : mu.continuous)
    if (c.kind == K::kFractional || c.kind == K::kRelativistic ||
        (c.kind == K::kConvolution && c.kernel == KernelKind::kGaussian) || c.kind == K::kAffine)
      return true;
  for (const auto& s : mu.sequences)
    if (!s.derived_accumulation()) return true;
  return false;
}

void sampling_guard(const LevyMeasure& mu, const Function& u, const Point& x) {
  if (!unbounded_support(mu)) return;
  double bound = u.sup_norm();
  if (!std::isfinite(bound)) throw NumericalError("u is unbounded while the support of mu is unbounded");
  for (std::size_t i = 0; i < x.size(); ++i)
    for (double r = 1; r <= 1e6; r *= 10)
      for (double sg : {1.0, -1.0}) {
        Point y = x;
        y[i] += sg * r;
        if (std::abs(u.value(y)) > bound * (1 + 1e-9) + 1e-12)
          throw NumericalError("sampling guard: |u| exceeds its declared bound at " + fmt_point(y));
      }
}

}  // namespace

// ---------------------------------------------------------------------------
// Functions

Point add_points(Point a, const Point& b) { return add(std::move(a), b); }

Point Function::gradient(const Point& x) const {
  constexpr double h = 1e-6;
  Point g(x.size());
  Point y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    double up = value(y);
    y[i] = x[i] - h;
    double down = value(y);
    y[i] = x[i];
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

double Function::shifted_value(const Point& x, const ExactVector& a) const { return value(add(x, to_doubles(a))); }

double CosineWave::value(const Point& x) const { return std::cos(dot(k_, x) + phase_); }

Point CosineWave::gradient(const Point& x) const {
  double s = -std::sin(dot(k_, x) + phase_);
  Point g = k_;
  for (auto& v : g) v *= s;
  return g;
}

double CosineWave::hessian_bound() const { return dot(k_, k_); }
double CosineWave::frequency() const { return norm(k_); }
std::string CosineWave::describe() const { return "cos(<" + fmt_point(k_) + ", x> + " + fmt(phase_) + ")"; }

Point HarmonicQuadratic::gradient(const Point& x) const {
  Point g(d_, 0.0);
  g[0] = 2 * x[0];
  g[1] = -2 * x[1];
  return g;
}

double HarmonicQuadratic::sup_norm() const { return kInf; }

double GaussianBump::value(const Point& x) const {
  double r2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - center_[i]) * (x[i] - center_[i]);
  return amplitude_ * std::exp(-r2 / (2 * width_ * width_));
}

Point GaussianBump::gradient(const Point& x) const {
  double v = value(x);
  Point g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = -v * (x[i] - center_[i]) / (width_ * width_);
  return g;
}

double GaussianBump::hessian_bound() const { return 3 * std::abs(amplitude_) / (width_ * width_); }

std::string GaussianBump::describe() const {
  return fmt(amplitude_) + "*exp(-|x - " + fmt_point(center_) + "|^2 / (2*" + fmt(width_) + "^2))";
}

Point SumFunction::gradient(const Point& x) const { return add(f_->gradient(x), g_->gradient(x)); }

// ---------------------------------------------------------------------------
// Operator evaluation

double fractional_constant(std::size_t d, double alpha) {
  return alpha * std::pow(2.0, alpha - 1) * std::tgamma((d + alpha) / 2) /
         (std::pow(kPi, d / 2.0) * std::tgamma(1 - alpha / 2));
}

double fourier_symbol(const LevyMeasure& mu, const Point& xi) {
  using K = ContinuousPart::Kind;
  const std::size_t d = mu.dimension;
  double xn = norm(xi);
  double m = 0;
  for (const auto& a : mu.atoms) m += a.weight.to_double() * (std::cos(dot(xi, to_doubles(a.point))) - 1);
  for (const auto& s : mu.sequences)
    for (std::uint64_t n = 1; n <= s.truncation; ++n)
      m += 2 * s.weight(n).get_d() * (std::cos(dot(xi, to_doubles(s.point(n)))) - 1);
  for (const auto& c : mu.continuous) {
    switch (c.kind) {
      case K::kFractional:
        m -= std::pow(xn, c.alpha.get_d());
        break;
      case K::kRelativistic: {
        double a = c.alpha.get_d(), mm = c.m.get_d();
        m += std::pow(mm, a) - std::pow(mm * mm + xn * xn, a / 2);
        break;
      }
      case K::kConvolution: {
        double mass = c.mass.get_d();
        if (c.kernel == KernelKind::kGaussian) {
          double s = c.sigma.get_d();
          m += mass * (std::exp(-s * s * xn * xn / 2) - 1);
        } else {
          double t = c.radius.get_d() * xn, f = 1;
          if (t > 0) {
            if (d == 1) f = std::sin(t) / t;
            if (d == 2) f = 2 * std::cyl_bessel_j(1.0, t) / t;
            if (d == 3) f = 3 * (std::sin(t) - t * std::cos(t)) / (t * t * t);
          }
          m += mass * (f - 1);
        }
        break;
      }
      case K::kSurfaceSphere: {
        double t = c.radius.get_d() * xn, f = 1;
        if (t > 0) f = d == 2 ? std::cyl_bessel_j(0.0, t) : std::sin(t) / t;
        m += c.mass.get_d() * (f - 1);
        break;
      }
      case K::kAffine: {
        auto frame = orthonormal_frame(c.affine_basis);
        double p2 = 0;
        for (const auto& e : frame) p2 += dot(xi, e) * dot(xi, e);
        if (c.profile == ProfileKind::kFractional) {
          m -= std::pow(std::sqrt(p2), c.alpha.get_d());
        } else {
          double s = c.sigma.get_d();
          m += c.mass.get_d() * (std::cos(dot(xi, to_doubles(c.offset))) * std::exp(-s * s * p2 / 2) - 1);
        }
        break;
      }
      case K::kCantor:
        throw PreconditionError("fourier_symbol: cantor parts have no closed-form symbol");
    }
  }
  return m;
}

OperatorValue eval_operator(const LevyMeasure& mu, const Function& u, const Point& x, const QuadratureConfig& cfg) {
  const std::size_t d = mu.dimension;
  if (x.size() != d || u.dimension() != d) throw PreconditionError("eval_operator: dimension mismatch");
  if (!(cfg.r0 > 0)) throw PreconditionError("eval_operator: r0 must be positive");
  sampling_guard(mu, u, x);
  OperatorValue out;
  const double ux = u.value(x);
  const Point grad = u.gradient(x);

  // Atoms, summed in mirror pairs so exact periodicity gives an exact 0.
  std::map<RationalVector, std::size_t> index;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) index[flatten(mu.atoms[i].point)] = i;
  std::vector<bool> done(mu.atoms.size(), false);
  auto atom_term = [&](const ExactVector& a, double w) {
    Point ad = to_doubles(a);
    double t = u.shifted_value(x, a) - ux;
    if (norm(ad) < cfg.r0) t -= dot(ad, grad);
    return w * t;
  };
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    if (done[i]) continue;
    done[i] = true;
    double w = mu.atoms[i].weight.to_double();
    double pair = atom_term(mu.atoms[i].point, w);
    auto it = index.find(flatten(-mu.atoms[i].point));
    if (it != index.end() && !done[it->second]) {
      done[it->second] = true;
      pair += atom_term(mu.atoms[it->second].point, mu.atoms[it->second].weight.to_double());
    }
    out.atomic += pair;
  }
  const double c_tail = std::max(2 * u.sup_norm(), u.hessian_bound() / 2);
  for (const auto& s : mu.sequences) {
    std::uint64_t N = cfg.truncation ? cfg.truncation : s.truncation;
    for (std::uint64_t n = 1; n <= N; ++n) {
      ExactVector a = s.point(n);
      double w = s.weight(n).get_d();
      out.atomic += atom_term(a, w) + atom_term(-a, w);
    }
    auto env = envelope_of(s);
    double tail = 0;
    std::uint64_t M = std::max<std::uint64_t>(N, env.n1);
    for (std::uint64_t n = N + 1; n <= M; ++n) tail += levy_term(s, n);
    tail += env.tail(M);
    out.series_tail += 2 * c_tail * tail;
  }

  for (const auto& p : radial_parts(mu)) {
    if (p.k > 3 || d > 3) throw PreconditionError("continuous parts are integrated in dimension <= 3 only");
    QuadratureConfig local = cfg;
    if (cfg.r_max > 0 && p.singular && p.tail_mass > 0) {
      RadialPart q = p;
      q.r_max = cfg.r_max;
      q.tail_mass = p.tail_mass * std::pow(p.r_max / cfg.r_max, p.alpha);
      auto r = integrate_radial(q, u, x, ux, grad, local);
      out.continuous += r.value;
      out.quadrature_error += r.quadrature_error;
      out.inner_error += r.inner_error;
      out.outer_tail += r.outer_tail;
      continue;
    }
    auto r = integrate_radial(p, u, x, ux, grad, local);
    out.continuous += r.value;
    out.quadrature_error += r.quadrature_error;
    out.inner_error += r.inner_error;
    out.outer_tail += r.outer_tail;
  }
  for (const auto& c : mu.continuous) {
    if (c.kind != ContinuousPart::Kind::kSurfaceSphere) continue;
    if (d > 3) throw PreconditionError("continuous parts are integrated in dimension <= 3 only");
    auto r = integrate_sphere(c, d, u, x, ux, cfg);
    out.continuous += r.value;
    out.quadrature_error += r.quadrature_error;
  }

  out.value = out.atomic + out.continuous;
  out.bound = out.quadrature_error + out.inner_error + out.outer_tail + out.series_tail;
  if (cfg.tolerance > 0 && out.bound > cfg.tolerance)
    throw NumericalError("eval_operator: error bound " + fmt(out.bound) + " exceeds tolerance " + fmt(cfg.tolerance));
  return out;
}

// ---------------------------------------------------------------------------
// Propagation

namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

// Nearest-neighbour distances through a uniform cell grid.
class CellIndex {
 public:
  CellIndex(const std::vector<Point>& pts, std::size_t d, double extent, int cells)
      : pts_(pts), d_(d), lo_(-extent), cell_(2 * extent / cells), n_(cells) {
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[cell_of(pts[i])].push_back(i);
  }

  double nearest(const Point& q) const {
    if (pts_.empty()) return kInf;
    std::vector<long> c = cell_of(q);
    double best = kInf;
    for (long ring = 0; ring <= 2 * n_ + 2; ++ring) {
      visit_ring(c, ring, q, best);
      if (best <= ring * cell_) break;
    }
    return best;
  }

 private:
  std::vector<long> cell_of(const Point& p) const {
    std::vector<long> c(d_);
    for (std::size_t i = 0; i < d_; ++i) c[i] = static_cast<long>(std::floor((p[i] - lo_) / cell_));
    return c;
  }

  void visit_ring(const std::vector<long>& c, long ring, const Point& q, double& best) const {
    std::vector<long> off(d_, -ring);
    while (true) {
      long m = 0;
      for (auto o : off) m = std::max(m, std::abs(o));
      if (m == ring) {
        std::vector<long> cell(d_);
        for (std::size_t i = 0; i < d_; ++i) cell[i] = c[i] + off[i];
        auto it = buckets_.find(cell);
        if (it != buckets_.end())
          for (auto idx : it->second) {
            double s = 0;
            for (std::size_t i = 0; i < d_; ++i) s += (pts_[idx][i] - q[i]) * (pts_[idx][i] - q[i]);
            best = std::min(best, std::sqrt(s));
          }
      }
      std::size_t i = 0;
      while (i < d_ && off[i] == ring) off[i++] = -ring;
      if (i == d_) break;
      ++off[i];
    }
  }

  const std::vector<Point>& pts_;
  std::size_t d_;
  double lo_, cell_;
  long n_;
  std::map<std::vector<long>, std::vector<std::size_t>> buckets_;
};

std::vector<Point> probe_grid(std::size_t d, double R, double h) {
  long n = std::lround(2 * R / h);
  std::vector<Point> grid;
  std::vector<long> idx(d, 0);
  while (true) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = -R + idx[i] * h;
    if (norm(p) <= R + 1e-12) grid.push_back(p);
    std::size_t i = 0;
    while (i < d && idx[i] == n) idx[i++] = 0;
    if (i == d) break;
    ++idx[i];
  }
  return grid;
}

double covering_radius(const std::vector<Point>& pts, const std::vector<Point>& grid, std::size_t d, double extent) {
  double m = 0;
  if (d == 1) {
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    for (const auto& g : grid) {
      auto it = std::lower_bound(xs.begin(), xs.end(), g[0]);
      double best = kInf;
      if (it != xs.end()) best = std::min(best, std::abs(*it - g[0]));
      if (it != xs.begin()) best = std::min(best, std::abs(*(it - 1) - g[0]));
      m = std::max(m, best);
    }
    return m;
  }
  // About one point per cell keeps the ring search short for sparse sets.
  double per_axis = std::pow(static_cast<double>(pts.size()), 1.0 / d);
  int cells = std::clamp(static_cast<int>(std::ceil(per_axis)), 1, d == 2 ? 96 : 32);
  CellIndex index(pts, d, extent, cells);
  for (const auto& g : grid) m = std::max(m, index.nearest(g));
  return m;
}

}  // namespace

double probe_spacing(std::size_t d, const PropagationConfig& cfg) {
  return cfg.spacing > 0 ? cfg.spacing : (d <= 2 ? cfg.R / 200 : cfg.R / 40);
}

PropagationState propagate(const std::vector<ExactVector>& support, std::size_t d, const PropagationConfig& cfg) {
  if (support.empty()) throw PreconditionError("propagate: empty support");
  if (!(cfg.R > 0)) throw PreconditionError("propagate: R must be positive");
  const BasisPtr& basis = support.front().front().basis();
  const std::size_t width = basis->width();
  for (const auto& s : support)
    if (s.size() != d) throw PreconditionError("propagate: dimension mismatch");

  // Integer keys: coordinates scaled by the common denominator L. Keys are
  // additive, so Minkowski sums are computed exactly on keys.
  std::vector<RationalVector> flat;
  for (const auto& s : support) flat.push_back(flatten(s));
  const Integer L = lcm_of_denominators(flat);
  std::vector<Key> skeys;
  for (const auto& f : flat) {
    Key k;
    for (const auto& q : f) {
      Integer z = q.get_num() * (L / q.get_den());
      if (!z.fits_slong_p()) throw NumericalError("propagate: coordinates too large for exact keys");
      k.push_back(z.get_si());
    }
    skeys.push_back(std::move(k));
  }
  std::vector<double> elements(width);
  for (std::size_t t = 0; t < width; ++t) elements[t] = basis->element(t).get_d();
  const double Ld = L.get_d();
  auto to_point = [&](const Key& k) {
    Point p(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t t = 0; t < width; ++t)
        if (k[i * width + t] != 0) p[i] += static_cast<double>(k[i * width + t]) / Ld * elements[t];
    return p;
  };

  PropagationState st;
  st.dimension = d;
  st.R = cfg.R;
  double smax = 0;
  for (const auto& s : support) smax = std::max(smax, norm(to_doubles(s)));
  st.margin = static_cast<double>(d) * smax;
  const double window = cfg.R + st.margin;
  const double h = probe_spacing(d, cfg);
  const auto grid = probe_grid(d, cfg.R, h);

  std::unordered_set<Key, KeyHash> seen;
  std::vector<Key> keys;
  std::vector<Point> pts;
  Key zero(d * width, 0);
  seen.insert(zero);
  keys.push_back(zero);
  pts.push_back(Point(d, 0.0));
  std::vector<std::size_t> frontier = {0};
  st.covering_radius_history.push_back(covering_radius(pts, grid, d, window));
  st.size_history.push_back(pts.size());

  for (std::uint64_t n = 1; n <= cfg.n_max; ++n) {
    if (cfg.target_delta > 0 && st.covering_radius_history.back() <= cfg.target_delta) break;
    std::vector<std::size_t> next;
    for (std::size_t f : frontier) {
      for (const auto& sk : skeys) {
        Key k = keys[f];
        for (std::size_t i = 0; i < k.size(); ++i) k[i] += sk[i];
        if (seen.count(k)) continue;
        Point p = to_point(k);
        if (norm(p) > window) continue;
        seen.insert(k);
        keys.push_back(std::move(k));
        pts.push_back(std::move(p));
        next.push_back(keys.size() - 1);
      }
    }
    st.n = n;
    if (pts.size() > cfg.point_cap) {
      st.truncated = true;
      st.covering_radius_history.push_back(covering_radius(pts, grid, d, window));
      st.size_history.push_back(pts.size());
      break;
    }
    double delta = next.empty() ? st.covering_radius_history.back() : covering_radius(pts, grid, d, window);
    // Sets only grow, so delta cannot increase; guard against rounding.
    delta = std::min(delta, st.covering_radius_history.back());
    st.covering_radius_history.push_back(delta);
    st.size_history.push_back(pts.size());
    frontier = std::move(next);
  }

  st.points.reserve(keys.size());
  for (const auto& k : keys) {
    ExactVector v;
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<Rational> coords(width);
      for (std::size_t t = 0; t < width; ++t) {
        coords[t] = Rational(Integer(static_cast<long>(k[i * width + t])), L);
        coords[t].canonicalize();
      }
      v.emplace_back(basis, std::move(coords));
    }
    st.points.push_back(std::move(v));
  }
  return st;
}

std::string probe_kind_name(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::kLatticeDetected: return "lattice-detected";
    case ProbeKind::kDenseLikely: return "dense-likely";
    case ProbeKind::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Greedy basis of shortest independent points; then every point must lie
// within tol of the integer lattice it spans.
bool snap_to_lattice(const std::vector<Point>& pts, std::size_t d, double tol, std::vector<Point>& basis) {
  basis.clear();
  if (d == 1) {
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    double g = kInf;
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (xs[i] - xs[i - 1] > 1e-12) g = std::min(g, xs[i] - xs[i - 1]);
    if (!std::isfinite(g)) return false;
    for (double x : xs)
      if (std::abs(x - g * std::round(x / g)) > tol) return false;
    basis.push_back({g});
    return true;
  }
  std::vector<const Point*> order;
  for (const auto& p : pts)
    if (norm(p) > 1e-12) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const Point* a, const Point* b) {
    double na = norm(*a), nb = norm(*b);
    if (na != nb) return na < nb;
    return *a < *b;
  });
  // Gram-Schmidt residual test for independence.
  std::vector<Point> ortho;
  for (const Point* p : order) {
    if (basis.size() == d) break;
    Point v = *p;
    for (const auto& e : ortho) {
      double c = dot(v, e);
      for (std::size_t i = 0; i < d; ++i) v[i] -= c * e[i];
    }
    double n = norm(v);
    if (n <= 1e-6 * norm(*p)) continue;
    for (auto& x : v) x /= n;
    ortho.push_back(v);
    basis.push_back(*p);
  }
  if (basis.empty()) return false;
  const std::size_t r = basis.size();
  // Normal equations G c = B^T x.
  std::vector<std::vector<double>> G(r, std::vector<double>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) G[i][j] = dot(basis[i], basis[j]);
  auto solve = [&](std::vector<double> b) {
    auto A = G;
    for (std::size_t i = 0; i < r; ++i) {
      std::size_t piv = i;
      for (std::size_t j = i + 1; j < r; ++j)
        if (std::abs(A[j][i]) > std::abs(A[piv][i])) piv = j;
      std::swap(A[i], A[piv]);
      std::swap(b[i], b[piv]);
      for (std::size_t j = i + 1; j < r; ++j) {
        double f = A[j][i] / A[i][i];
        for (std::size_t k = i; k < r; ++k) A[j][k] -= f * A[i][k];
        b[j] -= f * b[i];
      }
    }
    std::vector<double> c(r);
    for (std::size_t i = r; i-- > 0;) {
      double s = b[i];
      for (std::size_t k = i + 1; k < r; ++k) s -= A[i][k] * c[k];
      c[i] = s / A[i][i];
    }
    return c;
  };
  for (const auto& p : pts) {
    std::vector<double> b(r);
    for (std::size_t i = 0; i < r; ++i) b[i] = dot(basis[i], p);
    auto c = solve(b);
    Point q(d, 0.0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t t = 0; t < d; ++t) q[t] += std::round(c[i]) * basis[i][t];
    double dev = 0;
    for (std::size_t t = 0; t < d; ++t) dev = std::max(dev, std::abs(q[t] - p[t]));
    if (dev > tol) return false;
  }
  return true;
}

}  // namespace

ProbeVerdict density_probe(const std::vector<ExactVector>& support, std::size_t d, const PropagationConfig& cfg) {
  ProbeVerdict v;
  if (support.empty()) {
    v.detail = "empty support";
    return v;
  }
  PropagationConfig local = cfg;
  local.target_delta = 0;
  auto st = propagate(support, d, local);
  v.history = st.covering_radius_history;
  const auto& h = v.history;
  double first = h.front(), last = h.back();
  v.reduction = last > 0 ? first / last : kInf;

  bool constant = h.size() >= 6;
  for (std::size_t i = h.size() >= 5 ? h.size() - 5 : 0; constant && i + 1 < h.size(); ++i)
    constant = std::abs(h[i + 1] - h[i]) <= 1e-12 * std::max(h[i], 1e-300);
  std::vector<Point> pts;
  for (const auto& p : st.points) pts.push_back(to_doubles(p));
  std::vector<Point> basis;
  bool snaps = constant && snap_to_lattice(pts, d, 1e-9, basis);
  if (snaps) {
    v.kind = ProbeKind::kLatticeDetected;
    v.lattice_basis = basis;
    v.detail = "delta constant over the last 5 iterations at " + fmt(last) + "; points snap to a fitted lattice";
    return v;
  }
  if (v.reduction >= 10 && last < cfg.R / 50) {
    v.kind = ProbeKind::kDenseLikely;
    v.detail = "delta fell from " + fmt(first) + " to " + fmt(last) + " (below R/50 = " + fmt(cfg.R / 50) + ")";
    return v;
  }
  v.kind = ProbeKind::kInconclusive;
  v.detail = "delta fell from " + fmt(first) + " to " + fmt(last) + "; no lattice fit";
  return v;
}

}  // namespace liouville
