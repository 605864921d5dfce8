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

#include "liouville/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "liouville/errors.hpp"

namespace liouville {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxDimension = 16;

// ---------------------------------------------------------------------------
// Rational polynomial helpers

using RationalPoly = std::vector<Rational>;  // ascending degree

void trim(RationalPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RationalPoly to_rational(const Polynomial& p) {
  RationalPoly out(p.coefficients.begin(), p.coefficients.end());
  trim(out);
  return out;
}

RationalPoly poly_mod(RationalPoly a, const RationalPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return a;
}

RationalPoly poly_div(RationalPoly a, const RationalPoly& b) {
  trim(a);
  if (a.size() < b.size()) return {};
  RationalPoly q(a.size() - b.size() + 1, Rational(0));
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return q;
}

RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RationalPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Rational eval(const RationalPoly& p, const Rational& x) {
  Rational v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

Rational rational_pow(const Rational& base, std::uint64_t n) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), n);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

double abs_d(const Rational& q) { return std::abs(q.get_d()); }

// Smallest n1 >= 1 with |R(n)| >= |r_lead| n^D / 2 for every n >= n1.
std::uint64_t dominance_start(const Polynomial& r) {
  int D = r.degree();
  if (D <= 0) return 1;
  Rational lower = 0;
  for (int i = 0; i < D; ++i) lower += abs(Rational(r.coefficients[i]));
  Rational bound = 2 * lower / abs(Rational(r.coefficients[D]));
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), bound.get_num_mpz_t(), bound.get_den_mpz_t());
  return std::max<std::uint64_t>(1, c.get_ui());
}

// Largest positive integer root candidate of an integer polynomial.
std::uint64_t root_bound(const Polynomial& p) {
  int D = p.degree();
  if (D <= 0) return 0;
  Rational m = 0;
  for (int i = 0; i < D; ++i) m = std::max(m, Rational(abs(Rational(p.coefficients[i]) / p.coefficients[D])));
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), m.get_num_mpz_t(), m.get_den_mpz_t());
  return c.get_ui() + 1;
}

// ---------------------------------------------------------------------------
// JSON helpers

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(path, std::string("missing field '") + key + "'");
  return *it;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) throw InputError(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InputError(path, "unknown field '" + it.key() + "'");
  }
}

Rational rational_field(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()));
  if (!v.is_string()) throw InputError(path, "expected an exact rational string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const InputError& e) {
    throw InputError(path, e.what());
  }
}

Rational rational_or(const json& obj, const char* key, const Rational& fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : rational_field(*it, path + "." + key);
}

long long integer_field(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) {
    Rational q = rational_field(v, path);
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
  }
  throw InputError(path, "expected an integer");
}

ExtendedRational exact_field(const BasisPtr& basis, const json& v, const std::string& path) {
  if (v.is_number_integer()) return ExtendedRational::rational(basis, Rational(std::to_string(v.get<long long>())));
  if (!v.is_string()) throw InputError(path, "expected an exact coordinate string");
  try {
    return ExtendedRational::parse(basis, v.get<std::string>());
  } catch (const InputError& e) {
    throw InputError(path, e.what());
  }
}

ExactVector vector_field(const BasisPtr& basis, const json& v, std::size_t d, const std::string& path) {
  if (!v.is_array()) throw InputError(path, "expected an array of " + std::to_string(d) + " coordinates");
  if (v.size() != d)
    throw InputError(path, "expected " + std::to_string(d) + " coordinates, got " + std::to_string(v.size()));
  ExactVector out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(exact_field(basis, v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json vector_json(const ExactVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}

Polynomial polynomial_field(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw InputError(path, "expected a nonempty coefficient array");
  Polynomial p;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational q = rational_field(v[i], path + "[" + std::to_string(i) + "]");
    if (q.get_den() != 1) throw InputError(path + "[" + std::to_string(i) + "]", "coefficients must be integers");
    p.coefficients.push_back(q.get_num());
  }
  if (p.degree() < 0) throw InputError(path, "zero polynomial");
  return p;
}

json polynomial_json(const Polynomial& p) {
  json a = json::array();
  for (const auto& c : p.coefficients) a.push_back(c.get_str());
  return a;
}

ContinuousPart::Kind kind_from(const std::string& s, const std::string& path) {
  using K = ContinuousPart::Kind;
  if (s == "fractional") return K::kFractional;
  if (s == "relativistic") return K::kRelativistic;
  if (s == "convolution") return K::kConvolution;
  if (s == "surface_sphere") return K::kSurfaceSphere;
  if (s == "affine_supported") return K::kAffine;
  if (s == "cantor") return K::kCantor;
  throw InputError(path, "unknown continuous kind '" + s + "'");
}

SequenceTemplate template_from(const std::string& s, const std::string& path) {
  if (s == "harmonic") return SequenceTemplate::kHarmonic;
  if (s == "geometric") return SequenceTemplate::kGeometric;
  if (s == "polynomial_ratio") return SequenceTemplate::kPolynomialRatio;
  if (s == "multiples") return SequenceTemplate::kMultiples;
  throw InputError(path, "unknown sequence template '" + s + "'");
}

void require_alpha(const Rational& alpha, const std::string& path) {
  if (alpha <= 0 || alpha >= 2) throw InputError(path, "alpha must lie in (0, 2)");
}

void require_positive(const Rational& x, const std::string& path, const char* what) {
  if (x <= 0) throw InputError(path, std::string(what) + " must be positive");
}

// ---------------------------------------------------------------------------
// Parsing of the individual sections

Atom parse_atom(const BasisPtr& basis, const json& j, std::size_t d, const std::string& path) {
  reject_unknown(j, {"point", "weight"}, path);
  Atom a;
  a.point = vector_field(basis, require(j, "point", path), d, path + ".point");
  if (is_zero(a.point)) throw InputError(path + ".point", "zero atom: the support excludes the origin");
  const json& w = require(j, "weight", path);
  if (w.is_number_integer()) {
    a.weight = Monomial(basis, Rational(std::to_string(w.get<long long>())));
  } else if (w.is_string()) {
    try {
      a.weight = Monomial::parse(basis, w.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(path + ".weight", e.what());
    }
  } else {
    throw InputError(path + ".weight", "expected an exact weight string");
  }
  if (a.weight.coefficient() <= 0 || !(a.weight.to_double() > 0))
    throw InputError(path + ".weight", "weight must be positive");
  return a;
}

void validate_sequence(const AtomSequence& s, const std::string& path) {
  if (is_zero(s.direction)) throw InputError(path + ".direction", "direction must be nonzero");
  switch (s.kind) {
    case SequenceTemplate::kHarmonic:
      if (s.c == 0) throw InputError(path + ".c", "c must be nonzero");
      if (s.k < 1) throw InputError(path + ".k", "k must be at least 1");
      break;
    case SequenceTemplate::kGeometric:
      if (s.c == 0) throw InputError(path + ".c", "c must be nonzero");
      if (s.r == 0 || abs(s.r) == 1) throw InputError(path + ".r", "r must be nonzero with |r| != 1");
      break;
    case SequenceTemplate::kMultiples:
      if (s.c == 0) throw InputError(path + ".c", "c must be nonzero");
      break;
    case SequenceTemplate::kPolynomialRatio: {
      for (std::uint64_t n = 1; n <= root_bound(s.denominator); ++n)
        if (s.denominator.at(Rational(n)) == 0)
          throw InputError(path + ".denominator", "R(n) vanishes at n = " + std::to_string(n));
      for (std::uint64_t n = 1; n <= root_bound(s.numerator); ++n)
        if (s.numerator.at(Rational(n)) == 0)
          throw InputError(path + ".numerator", "zero atom: P(n) vanishes at n = " + std::to_string(n));
      break;
    }
  }
  if (s.w <= 0) throw InputError(path + ".weight.w", "weight must be positive");
  if (s.weight_rule == WeightRule::kPower && s.s < 0) throw InputError(path + ".weight.s", "s must be >= 0");
  if (s.weight_rule == WeightRule::kGeometric && s.rho <= 0)
    throw InputError(path + ".weight.rho", "rho must be positive");
  if (s.truncation < 1) throw InputError(path + ".N", "N must be at least 1");
  if (!envelope_of(s).summable())
    throw InputError(path, "divergent Levy integral: sum (|a_n|^2 ^ 1) w_n is not summable for this template");

  auto derived = s.derived_accumulation();
  if (s.accumulation_declared != derived.has_value())
    throw InputError(path + ".accumulation", std::string("declared ") +
                                                 (s.accumulation_declared ? "true" : "false") +
                                                 " but the template " + (derived ? "accumulates" : "does not accumulate"));
  if (derived && s.accumulation_point && !(*s.accumulation_point == *derived))
    throw InputError(path + ".accumulation_point", "declared point differs from the template limit " + to_string(*derived));
}

AtomSequence parse_sequence(const BasisPtr& basis, const json& j, std::size_t d, const std::string& path) {
  reject_unknown(j, {"template", "c", "k", "r", "numerator", "denominator", "direction", "weight", "N",
                     "accumulation", "accumulation_point"},
                 path);
  AtomSequence s;
  const json& t = require(j, "template", path);
  if (!t.is_string()) throw InputError(path + ".template", "expected a string");
  s.kind = template_from(t.get<std::string>(), path + ".template");
  if (j.contains("direction")) {
    s.direction = vector_field(basis, j["direction"], d, path + ".direction");
  } else if (d == 1) {
    s.direction = to_exact(basis, {Rational(1)});
  } else {
    throw InputError(path, "missing field 'direction'");
  }
  s.c = rational_or(j, "c", Rational(1), path);
  if (j.contains("k")) s.k = static_cast<int>(integer_field(j["k"], path + ".k"));
  if (s.kind == SequenceTemplate::kGeometric) s.r = rational_field(require(j, "r", path), path + ".r");
  if (s.kind == SequenceTemplate::kPolynomialRatio) {
    s.numerator = polynomial_field(require(j, "numerator", path), path + ".numerator");
    s.denominator = polynomial_field(require(j, "denominator", path), path + ".denominator");
  }
  const json& w = require(j, "weight", path);
  std::string wp = path + ".weight";
  reject_unknown(w, {"rule", "w", "s", "rho"}, wp);
  const json& rule = require(w, "rule", wp);
  std::string r = rule.is_string() ? rule.get<std::string>() : "";
  if (r == "constant") {
    s.weight_rule = WeightRule::kConstant;
  } else if (r == "power") {
    s.weight_rule = WeightRule::kPower;
    s.s = static_cast<int>(integer_field(require(w, "s", wp), wp + ".s"));
  } else if (r == "geometric") {
    s.weight_rule = WeightRule::kGeometric;
    s.rho = rational_field(require(w, "rho", wp), wp + ".rho");
  } else {
    throw InputError(wp + ".rule", "expected constant, power or geometric");
  }
  s.w = rational_or(w, "w", Rational(1), wp);
  long long n = integer_field(require(j, "N", path), path + ".N");
  if (n < 1) throw InputError(path + ".N", "N must be at least 1");
  s.truncation = static_cast<std::uint64_t>(n);
  const json& acc = require(j, "accumulation", path);
  if (!acc.is_boolean()) throw InputError(path + ".accumulation", "expected true or false");
  s.accumulation_declared = acc.get<bool>();
  if (j.contains("accumulation_point"))
    s.accumulation_point = vector_field(basis, j["accumulation_point"], d, path + ".accumulation_point");
  validate_sequence(s, path);
  return s;
}

ContinuousPart parse_continuous(const BasisPtr& basis, const json& j, std::size_t d, const std::string& path) {
  using K = ContinuousPart::Kind;
  const json& kind = require(j, "kind", path);
  if (!kind.is_string()) throw InputError(path + ".kind", "expected a string");
  ContinuousPart c;
  c.kind = kind_from(kind.get<std::string>(), path + ".kind");
  switch (c.kind) {
    case K::kFractional:
      reject_unknown(j, {"kind", "alpha"}, path);
      c.alpha = rational_field(require(j, "alpha", path), path + ".alpha");
      require_alpha(c.alpha, path + ".alpha");
      break;
    case K::kRelativistic:
      reject_unknown(j, {"kind", "alpha", "m"}, path);
      c.alpha = rational_field(require(j, "alpha", path), path + ".alpha");
      require_alpha(c.alpha, path + ".alpha");
      c.m = rational_field(require(j, "m", path), path + ".m");
      require_positive(c.m, path + ".m", "m");
      break;
    case K::kConvolution: {
      reject_unknown(j, {"kind", "kernel", "sigma", "radius", "mass"}, path);
      const json& k = require(j, "kernel", path);
      std::string ks = k.is_string() ? k.get<std::string>() : "";
      if (ks == "gaussian") {
        c.kernel = KernelKind::kGaussian;
        c.sigma = rational_field(require(j, "sigma", path), path + ".sigma");
        require_positive(c.sigma, path + ".sigma", "sigma");
      } else if (ks == "uniform_ball") {
        c.kernel = KernelKind::kUniformBall;
        c.radius = rational_field(require(j, "radius", path), path + ".radius");
        require_positive(c.radius, path + ".radius", "radius");
      } else {
        throw InputError(path + ".kernel", "expected gaussian or uniform_ball");
      }
      c.mass = rational_or(j, "mass", Rational(1), path);
      require_positive(c.mass, path + ".mass", "mass");
      break;
    }
    case K::kSurfaceSphere:
      reject_unknown(j, {"kind", "radius", "mass"}, path);
      if (d < 2) throw InputError(path, "surface_sphere needs dimension >= 2; use atoms in 1-d");
      c.radius = rational_field(require(j, "radius", path), path + ".radius");
      require_positive(c.radius, path + ".radius", "radius");
      c.mass = rational_or(j, "mass", Rational(1), path);
      require_positive(c.mass, path + ".mass", "mass");
      break;
    case K::kAffine: {
      reject_unknown(j, {"kind", "basis", "offset", "profile"}, path);
      const json& b = require(j, "basis", path);
      if (!b.is_array() || b.empty() || b.size() > d)
        throw InputError(path + ".basis", "expected between 1 and " + std::to_string(d) + " vectors");
      for (std::size_t i = 0; i < b.size(); ++i)
        c.affine_basis.push_back(vector_field(basis, b[i], d, path + ".basis[" + std::to_string(i) + "]"));
      if (real_rank_numeric(c.affine_basis) != c.affine_basis.size())
        throw InputError(path + ".basis", "basis vectors are linearly dependent");
      c.offset = j.contains("offset") ? vector_field(basis, j["offset"], d, path + ".offset") : zero_vector(basis, d);
      if (!is_zero(c.offset)) {
        auto with_offset = c.affine_basis;
        with_offset.push_back(c.offset);
        if (real_rank_numeric(with_offset) == c.affine_basis.size())
          throw InputError(path + ".offset", "a nonzero offset must not lie in the span of the basis");
      }
      const json& p = require(j, "profile", path);
      std::string pp = path + ".profile";
      const json& pk = require(p, "kind", pp);
      std::string pks = pk.is_string() ? pk.get<std::string>() : "";
      if (pks == "fractional") {
        reject_unknown(p, {"kind", "alpha"}, pp);
        c.profile = ProfileKind::kFractional;
        c.alpha = rational_field(require(p, "alpha", pp), pp + ".alpha");
        require_alpha(c.alpha, pp + ".alpha");
        if (!is_zero(c.offset)) throw InputError(pp, "a fractional profile requires offset 0");
      } else if (pks == "gaussian") {
        reject_unknown(p, {"kind", "sigma", "mass"}, pp);
        c.profile = ProfileKind::kGaussian;
        c.sigma = rational_field(require(p, "sigma", pp), pp + ".sigma");
        require_positive(c.sigma, pp + ".sigma", "sigma");
        c.mass = rational_or(p, "mass", Rational(1), pp);
        require_positive(c.mass, pp + ".mass", "mass");
      } else {
        throw InputError(pp + ".kind", "expected fractional or gaussian");
      }
      break;
    }
    case K::kCantor:
      reject_unknown(j, {"kind"}, path);
      if (d != 1) throw InputError(path, "cantor descriptors are supported in dimension 1 only");
      break;
  }
  return c;
}

json continuous_json(const ContinuousPart& c) {
  using K = ContinuousPart::Kind;
  json j;
  j["kind"] = kind_name(c.kind);
  switch (c.kind) {
    case K::kFractional:
      j["alpha"] = to_string(c.alpha);
      break;
    case K::kRelativistic:
      j["alpha"] = to_string(c.alpha);
      j["m"] = to_string(c.m);
      break;
    case K::kConvolution:
      if (c.kernel == KernelKind::kGaussian) {
        j["kernel"] = "gaussian";
        j["sigma"] = to_string(c.sigma);
      } else {
        j["kernel"] = "uniform_ball";
        j["radius"] = to_string(c.radius);
      }
      j["mass"] = to_string(c.mass);
      break;
    case K::kSurfaceSphere:
      j["radius"] = to_string(c.radius);
      j["mass"] = to_string(c.mass);
      break;
    case K::kAffine: {
      json b = json::array();
      for (const auto& v : c.affine_basis) b.push_back(vector_json(v));
      j["basis"] = b;
      j["offset"] = vector_json(c.offset);
      json p;
      if (c.profile == ProfileKind::kFractional) {
        p["kind"] = "fractional";
        p["alpha"] = to_string(c.alpha);
      } else {
        p["kind"] = "gaussian";
        p["sigma"] = to_string(c.sigma);
        p["mass"] = to_string(c.mass);
      }
      j["profile"] = p;
      break;
    }
    case K::kCantor:
      break;
  }
  return j;
}

bool same_piece(const ContinuousPart& a, const ContinuousPart& b) {
  return a.kind == b.kind && a.profile == b.profile && a.sigma == b.sigma && a.mass == b.mass &&
         a.alpha == b.alpha && a.affine_basis == b.affine_basis && a.offset == b.offset;
}

}  // namespace

// ---------------------------------------------------------------------------

int Polynomial::degree() const {
  for (std::size_t i = coefficients.size(); i-- > 0;)
    if (coefficients[i] != 0) return static_cast<int>(i);
  return -1;
}

Rational Polynomial::at(const Rational& x) const { return eval(to_rational(*this), x); }

Rational AtomSequence::scalar(std::uint64_t n) const {
  switch (kind) {
    case SequenceTemplate::kHarmonic:
      return c / rational_pow(Rational(n), static_cast<std::uint64_t>(k));
    case SequenceTemplate::kGeometric:
      return c * rational_pow(r, n);
    case SequenceTemplate::kPolynomialRatio: {
      Rational q = numerator.at(Rational(n)) / denominator.at(Rational(n));
      return q;
    }
    case SequenceTemplate::kMultiples:
      return c * Rational(n);
  }
  return 0;
}

ExactVector AtomSequence::point(std::uint64_t n) const { return scale(direction, scalar(n)); }

Rational AtomSequence::weight(std::uint64_t n) const {
  switch (weight_rule) {
    case WeightRule::kConstant:
      return w;
    case WeightRule::kPower:
      return w / rational_pow(Rational(n), static_cast<std::uint64_t>(s));
    case WeightRule::kGeometric:
      return w * rational_pow(rho, n);
  }
  return w;
}

std::optional<ExactVector> AtomSequence::derived_accumulation() const {
  const BasisPtr& b = direction.front().basis();
  switch (kind) {
    case SequenceTemplate::kHarmonic:
      return zero_vector(b, direction.size());
    case SequenceTemplate::kGeometric:
      if (abs(r) < 1) return zero_vector(b, direction.size());
      return std::nullopt;
    case SequenceTemplate::kPolynomialRatio: {
      int dp = numerator.degree(), dr = denominator.degree();
      if (dp < dr) return zero_vector(b, direction.size());
      if (dp == dr) return scale(direction, Rational(numerator.coefficients[dp]) / denominator.coefficients[dr]);
      return std::nullopt;
    }
    case SequenceTemplate::kMultiples:
      return std::nullopt;
  }
  return std::nullopt;
}

double SequenceEnvelope::tail(std::uint64_t M) const {
  if (K == 0) return 0;
  if (rho < 1) {
    double m1 = static_cast<double>(M + 1);
    return K * std::pow(m1, -e) * std::pow(rho, m1) / (1 - rho);
  }
  if (e > 1) return K * std::pow(static_cast<double>(std::max<std::uint64_t>(M, 1)), 1 - e) / (e - 1);
  return std::numeric_limits<double>::infinity();
}

SequenceEnvelope envelope_of(const AtomSequence& seq) {
  // Round constants up slightly so the bound survives double rounding.
  constexpr double kUp = 1 + 1e-12;
  SequenceEnvelope env;
  double dir2 = 0;
  for (const auto& x : seq.direction) dir2 += x.to_double() * x.to_double();
  double Kp = 1;
  int ep = 0;
  double rhop = 1;
  switch (seq.kind) {
    case SequenceTemplate::kHarmonic:
      Kp = abs_d(seq.c) * abs_d(seq.c) * dir2;
      ep = 2 * seq.k;
      break;
    case SequenceTemplate::kGeometric:
      if (abs(seq.r) < 1) {
        Kp = abs_d(seq.c) * abs_d(seq.c) * dir2;
        rhop = abs_d(seq.r) * abs_d(seq.r);
      }
      break;
    case SequenceTemplate::kPolynomialRatio: {
      int delta = seq.numerator.degree() - seq.denominator.degree();
      if (delta < 0) {
        double sp = 0;
        for (const auto& p : seq.numerator.coefficients) sp += std::abs(p.get_d());
        double a = 2 * sp / std::abs(seq.denominator.coefficients[seq.denominator.degree()].get_d());
        Kp = a * a * dir2;
        ep = -2 * delta;
        env.n1 = dominance_start(seq.denominator);
      }
      break;
    }
    case SequenceTemplate::kMultiples:
      break;
  }
  env.K = Kp * abs_d(seq.w) * kUp;
  env.e = ep;
  env.rho = rhop;
  if (seq.weight_rule == WeightRule::kPower) env.e += seq.s;
  if (seq.weight_rule == WeightRule::kGeometric) env.rho *= abs_d(seq.rho);
  if (env.rho < 1) env.rho = std::min(1.0, env.rho * kUp);
  return env;
}

double levy_term(const AtomSequence& seq, std::uint64_t n) {
  Rational f = seq.scalar(n);
  double norm2 = 0;
  for (const auto& x : seq.direction) {
    double v = x.to_double() * f.get_d();
    norm2 += v * v;
  }
  return std::min(norm2, 1.0) * seq.weight(n).get_d();
}

double levy_integral_bound(const AtomSequence& seq) {
  auto env = envelope_of(seq);
  std::uint64_t M = std::max<std::uint64_t>(env.n1, 64);
  double sum = 0;
  for (std::uint64_t n = 1; n <= M; ++n) sum += levy_term(seq, n);
  return sum * (1 + 1e-12) + env.tail(M);
}

std::string kind_name(ContinuousPart::Kind kind) {
  using K = ContinuousPart::Kind;
  switch (kind) {
    case K::kFractional: return "fractional";
    case K::kRelativistic: return "relativistic";
    case K::kConvolution: return "convolution";
    case K::kSurfaceSphere: return "surface_sphere";
    case K::kAffine: return "affine_supported";
    case K::kCantor: return "cantor";
  }
  return "unknown";
}

std::string template_name(SequenceTemplate kind) {
  switch (kind) {
    case SequenceTemplate::kHarmonic: return "harmonic";
    case SequenceTemplate::kGeometric: return "geometric";
    case SequenceTemplate::kPolynomialRatio: return "polynomial_ratio";
    case SequenceTemplate::kMultiples: return "multiples";
  }
  return "unknown";
}

bool exact_less(const ExactVector& a, const ExactVector& b) { return flatten(a) < flatten(b); }

LevyMeasure parse_measure(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    auto pos = msg.find("at line");
    throw InputError(pos == std::string::npos ? "document" : msg.substr(pos + 3, msg.find(':', pos) - pos - 3),
                     "malformed document: " + msg);
  }
  return parse_measure_json(doc);
}

LevyMeasure parse_measure_json(const json& doc) {
  reject_unknown(doc, {"dimension", "constants", "independence_asserted", "symmetry_mode", "atoms", "sequences",
                       "continuous"},
                 "document");
  LevyMeasure mu;
  long long d = integer_field(require(doc, "dimension", "document"), "dimension");
  if (d < 1 || d > static_cast<long long>(kMaxDimension))
    throw InputError("dimension", "must lie in [1, " + std::to_string(kMaxDimension) + "]");
  mu.dimension = static_cast<std::size_t>(d);

  bool asserted = true;
  if (doc.contains("independence_asserted")) {
    if (!doc["independence_asserted"].is_boolean()) throw InputError("independence_asserted", "expected a boolean");
    asserted = doc["independence_asserted"].get<bool>();
  }
  std::vector<ConstantBasis::Constant> constants;
  if (doc.contains("constants")) {
    const json& cs = doc["constants"];
    if (!cs.is_array()) throw InputError("constants", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string p = "constants[" + std::to_string(i) + "]";
      reject_unknown(cs[i], {"name", "value"}, p);
      const json& n = require(cs[i], "name", p);
      const json& v = require(cs[i], "value", p);
      if (!n.is_string()) throw InputError(p + ".name", "expected a string");
      if (!v.is_string()) throw InputError(p + ".value", "expected a decimal string");
      constants.push_back({n.get<std::string>(), v.get<std::string>()});
    }
  }
  mu.basis = ConstantBasis::make(std::move(constants), asserted);

  if (doc.contains("symmetry_mode")) {
    const json& m = doc["symmetry_mode"];
    std::string s = m.is_string() ? m.get<std::string>() : "";
    if (s == "complete") {
      mu.symmetry_mode = SymmetryMode::kComplete;
    } else if (s == "strict") {
      mu.symmetry_mode = SymmetryMode::kStrict;
    } else {
      throw InputError("symmetry_mode", "expected complete or strict");
    }
  }

  // Atoms: merge duplicates, then check or complete the mirror images.
  std::map<RationalVector, Atom> merged;
  std::vector<RationalVector> order;
  if (doc.contains("atoms")) {
    const json& as = doc["atoms"];
    if (!as.is_array()) throw InputError("atoms", "expected an array");
    for (std::size_t i = 0; i < as.size(); ++i) {
      std::string p = "atoms[" + std::to_string(i) + "]";
      Atom a = parse_atom(mu.basis, as[i], mu.dimension, p);
      RationalVector key = flatten(a.point);
      auto it = merged.find(key);
      if (it == merged.end()) {
        merged.emplace(key, a);
        order.push_back(key);
      } else {
        try {
          it->second.weight = it->second.weight.plus(a.weight);
        } catch (const PreconditionError&) {
          throw InputError(p + ".weight", "duplicate atom with a weight of a different monomial shape");
        }
      }
    }
  }
  for (const auto& key : order) {
    const Atom& a = merged.at(key);
    ExactVector m = -a.point;
    auto it = merged.find(flatten(m));
    if (it == merged.end()) {
      if (mu.symmetry_mode == SymmetryMode::kStrict)
        throw InputError("atoms", "asymmetric measure: no mirror for atom " + to_string(a.point));
      mu.atoms.push_back(a);
      mu.atoms.push_back({m, a.weight});
      continue;
    }
    if (!(it->second.weight == a.weight))
      throw InputError("atoms", "asymmetric measure: atoms " + to_string(a.point) + " and " + to_string(m) +
                                    " carry different weights");
    mu.atoms.push_back(a);
  }
  std::sort(mu.atoms.begin(), mu.atoms.end(),
            [](const Atom& x, const Atom& y) { return exact_less(x.point, y.point); });

  if (doc.contains("sequences")) {
    const json& ss = doc["sequences"];
    if (!ss.is_array()) throw InputError("sequences", "expected an array");
    for (std::size_t i = 0; i < ss.size(); ++i)
      mu.sequences.push_back(parse_sequence(mu.basis, ss[i], mu.dimension, "sequences[" + std::to_string(i) + "]"));
  }

  if (doc.contains("continuous")) {
    const json& cs = doc["continuous"];
    if (!cs.is_array()) throw InputError("continuous", "expected an array");
    std::vector<ContinuousPart> parts;
    for (std::size_t i = 0; i < cs.size(); ++i)
      parts.push_back(parse_continuous(mu.basis, cs[i], mu.dimension, "continuous[" + std::to_string(i) + "]"));
    // Affine pieces away from the origin need their mirror piece.
    std::vector<ContinuousPart> completed = parts;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& c = parts[i];
      if (c.kind != ContinuousPart::Kind::kAffine || is_zero(c.offset)) continue;
      ContinuousPart mirror = c;
      mirror.offset = -c.offset;
      bool found = false;
      for (const auto& o : completed) found = found || same_piece(o, mirror);
      if (found) continue;
      if (mu.symmetry_mode == SymmetryMode::kStrict)
        throw InputError("continuous[" + std::to_string(i) + "]", "asymmetric measure: affine piece has no mirror");
      completed.push_back(mirror);
    }
    mu.continuous = std::move(completed);
  }
  return mu;
}

json serialize_measure(const LevyMeasure& mu) {
  json doc;
  doc["dimension"] = mu.dimension;
  json cs = json::array();
  for (const auto& c : mu.basis->constants()) cs.push_back({{"name", c.name}, {"value", c.decimal}});
  doc["constants"] = cs;
  doc["independence_asserted"] = mu.basis->independence_asserted();
  doc["symmetry_mode"] = mu.symmetry_mode == SymmetryMode::kStrict ? "strict" : "complete";
  json as = json::array();
  for (const auto& a : mu.atoms) as.push_back({{"point", vector_json(a.point)}, {"weight", a.weight.to_string()}});
  doc["atoms"] = as;
  json ss = json::array();
  for (const auto& s : mu.sequences) {
    json j;
    j["template"] = template_name(s.kind);
    j["direction"] = vector_json(s.direction);
    switch (s.kind) {
      case SequenceTemplate::kHarmonic:
        j["c"] = to_string(s.c);
        j["k"] = s.k;
        break;
      case SequenceTemplate::kGeometric:
        j["c"] = to_string(s.c);
        j["r"] = to_string(s.r);
        break;
      case SequenceTemplate::kPolynomialRatio:
        j["numerator"] = polynomial_json(s.numerator);
        j["denominator"] = polynomial_json(s.denominator);
        break;
      case SequenceTemplate::kMultiples:
        j["c"] = to_string(s.c);
        break;
    }
    json w;
    w["w"] = to_string(s.w);
    switch (s.weight_rule) {
      case WeightRule::kConstant:
        w["rule"] = "constant";
        break;
      case WeightRule::kPower:
        w["rule"] = "power";
        w["s"] = s.s;
        break;
      case WeightRule::kGeometric:
        w["rule"] = "geometric";
        w["rho"] = to_string(s.rho);
        break;
    }
    j["weight"] = w;
    j["N"] = s.truncation;
    j["accumulation"] = s.accumulation_declared;
    if (s.accumulation_point) j["accumulation_point"] = vector_json(*s.accumulation_point);
    ss.push_back(j);
  }
  doc["sequences"] = ss;
  json cont = json::array();
  for (const auto& c : mu.continuous) cont.push_back(continuous_json(c));
  doc["continuous"] = cont;
  return doc;
}

bool SupportDescriptor::empty() const {
  return finite_points.empty() && sequence_points.empty() && !has_accumulation_point && !contains_interval_or_ball &&
         !sphere_radius && affine_pieces.empty() && sequence_groups.empty();
}

std::vector<ExactVector> SupportDescriptor::all_points() const {
  std::vector<ExactVector> out = finite_points;
  out.insert(out.end(), sequence_points.begin(), sequence_points.end());
  return out;
}

namespace {

SequenceGroup group_of(const AtomSequence& s, std::size_t index) {
  SequenceGroup g;
  g.sequence = index;
  g.direction = s.direction;
  if (s.derived_accumulation()) {
    g.dense = true;
    g.reason = "accumulation";
    return g;
  }
  switch (s.kind) {
    case SequenceTemplate::kGeometric:
      if (s.r.get_den() > 1) {
        g.dense = true;
        g.reason = "q_unbounded: a_n/a_1 = r^(n-1) has denominator " + s.r.get_den().get_str() + "^(n-1)";
      } else {
        g.generator = scale(s.direction, s.c * s.r);
      }
      return g;
    case SequenceTemplate::kMultiples:
      g.generator = scale(s.direction, s.c);
      return g;
    case SequenceTemplate::kPolynomialRatio: {
      RationalPoly p = to_rational(s.numerator), r = to_rational(s.denominator);
      RationalPoly common = poly_gcd(p, r);
      RationalPoly pr = poly_div(p, common), rr = poly_div(r, common);
      if (rr.size() >= 2) {
        g.dense = true;
        g.reason = "q_unbounded: P/R is reduced with deg R = " + std::to_string(rr.size() - 1) +
                   ", so gcd(P(n), R(n)) divides the resultant while |R(n)| grows";
        return g;
      }
      // f = P/R is a polynomial of degree D; the values f(1..D+1) generate
      // the same group as all values f(n), n >= 1.
      Rational gen = 0;
      for (std::size_t n = 1; n <= pr.size(); ++n) gen = rational_gcd(gen, abs(s.scalar(n)));
      g.generator = scale(s.direction, gen);
      return g;
    }
    case SequenceTemplate::kHarmonic:
      break;
  }
  return g;
}

}  // namespace

SupportDescriptor support_of(const LevyMeasure& mu) {
  using K = ContinuousPart::Kind;
  SupportDescriptor s;
  s.dimension = mu.dimension;
  s.basis = mu.basis;
  std::set<RationalVector> seen;
  for (const auto& a : mu.atoms)
    if (seen.insert(flatten(a.point)).second) s.finite_points.push_back(a.point);
  std::sort(s.finite_points.begin(), s.finite_points.end(), exact_less);

  for (std::size_t i = 0; i < mu.sequences.size(); ++i) {
    const auto& q = mu.sequences[i];
    std::set<RationalVector> seq_seen;
    for (std::uint64_t n = 1; n <= q.truncation; ++n) {
      ExactVector p = q.point(n);
      for (const ExactVector& v : {p, ExactVector(-p)})
        if (seq_seen.insert(flatten(v)).second) s.sequence_points.push_back(v);
    }
    if (auto acc = q.derived_accumulation()) {
      s.has_accumulation_point = true;
      s.accumulation_points.push_back(*acc);
      s.accumulation_points.push_back(-*acc);
    }
    s.sequence_groups.push_back(group_of(q, i));
  }
  // Keep accumulation points unique.
  std::sort(s.accumulation_points.begin(), s.accumulation_points.end(), exact_less);
  s.accumulation_points.erase(std::unique(s.accumulation_points.begin(), s.accumulation_points.end()),
                              s.accumulation_points.end());

  for (const auto& c : mu.continuous) {
    switch (c.kind) {
      case K::kFractional:
      case K::kRelativistic:
      case K::kConvolution:
        s.contains_interval_or_ball = true;
        break;
      case K::kSurfaceSphere:
        s.sphere_radius = c.radius;
        break;
      case K::kAffine:
        if (c.affine_basis.size() == mu.dimension) {
          s.contains_interval_or_ball = true;
        } else {
          s.affine_pieces.push_back({c.affine_basis, c.offset});
        }
        break;
      case K::kCantor:
        s.has_accumulation_point = true;
        break;
    }
  }
  return s;
}

LebesgueSplit lebesgue_split(const LevyMeasure& mu) {
  using K = ContinuousPart::Kind;
  LebesgueSplit out;
  if (!mu.atoms.empty()) out.atomic_parts.push_back("atoms");
  for (const auto& s : mu.sequences) out.atomic_parts.push_back("sequence:" + template_name(s.kind));
  for (const auto& c : mu.continuous) {
    bool ac = c.kind == K::kFractional || c.kind == K::kRelativistic || c.kind == K::kConvolution ||
              (c.kind == K::kAffine && c.affine_basis.size() == mu.dimension);
    (ac ? out.absolutely_continuous_parts : out.singular_diffuse_parts).push_back(kind_name(c.kind));
  }
  out.absolutely_continuous = !out.absolutely_continuous_parts.empty();
  out.singular_diffuse = !out.singular_diffuse_parts.empty();
  out.atomic = !out.atomic_parts.empty();
  return out;
}

}  // namespace liouville
