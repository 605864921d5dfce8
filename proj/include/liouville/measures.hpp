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

// Symmetric Levy measures: finite atoms, catalogue sequences of atoms,
// tagged continuous parts, and the support descriptor derived from them.

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liouville/exact_numbers.hpp"
#include "liouville/linalg.hpp"

namespace liouville {

enum class SymmetryMode { kComplete, kStrict };

struct Atom {
  ExactVector point;
  Monomial weight;
};

enum class SequenceTemplate {
  kHarmonic,         // c * n^-k * direction, k >= 1
  kGeometric,        // c * r^n * direction, r != 0, |r| != 1
  kPolynomialRatio,  // P(n) / R(n) * direction, integer coefficients
  kMultiples,        // n * c * direction
};

enum class WeightRule {
  kConstant,   // w
  kPower,      // w * n^-s
  kGeometric,  // w * rho^n
};

// Integer polynomial, coefficients in ascending order of degree.
struct Polynomial {
  std::vector<Integer> coefficients;

  int degree() const;  // -1 for the zero polynomial
  Rational at(const Rational& x) const;
};

struct AtomSequence {
  SequenceTemplate kind = SequenceTemplate::kHarmonic;
  ExactVector direction;
  Rational c = 1;
  int k = 1;
  Rational r = 0;
  Polynomial numerator;
  Polynomial denominator;

  WeightRule weight_rule = WeightRule::kConstant;
  Rational w = 1;
  int s = 0;
  Rational rho = 1;

  std::uint64_t truncation = 1;
  bool accumulation_declared = false;
  std::optional<ExactVector> accumulation_point;

  // Scalar f(n) with point_n = f(n) * direction.
  Rational scalar(std::uint64_t n) const;
  ExactVector point(std::uint64_t n) const;
  Rational weight(std::uint64_t n) const;
  // Accumulation point of the point sequence, derived from the template.
  std::optional<ExactVector> derived_accumulation() const;
};

// Envelope (|a_n|^2 ^ 1) * w_n <= K * n^-e * rho^n for n >= n1, used to
// certify the Levy integrability of a sequence template.
struct SequenceEnvelope {
  double K = 0;
  int e = 0;
  double rho = 1;
  std::uint64_t n1 = 1;

  bool summable() const { return rho < 1 || (rho == 1 && e > 1); }
  // Upper bound for sum_{n > M} K n^-e rho^n, M >= n1 - 1.
  double tail(std::uint64_t M) const;
};

SequenceEnvelope envelope_of(const AtomSequence& seq);
// (|a_n|^2 ^ 1) * w_n evaluated in double precision.
double levy_term(const AtomSequence& seq, std::uint64_t n);
// Closed-form bound for sum_n (|a_n|^2 ^ 1) * w_n over all n >= 1.
double levy_integral_bound(const AtomSequence& seq);

enum class KernelKind { kGaussian, kUniformBall };
enum class ProfileKind { kFractional, kGaussian };

struct ContinuousPart {
  enum class Kind { kFractional, kRelativistic, kConvolution, kSurfaceSphere, kAffine, kCantor };
  Kind kind = Kind::kFractional;
  Rational alpha = 1;
  Rational m = 1;
  KernelKind kernel = KernelKind::kGaussian;
  Rational sigma = 1;
  Rational radius = 1;
  Rational mass = 1;  // total mass for convolution kernels, sphere and gaussian profiles
  // Affine pieces: offset + span(basis), with a radial profile in the
  // intrinsic coordinates of the piece.
  std::vector<ExactVector> affine_basis;
  ExactVector offset;
  ProfileKind profile = ProfileKind::kFractional;
};

std::string kind_name(ContinuousPart::Kind kind);
std::string template_name(SequenceTemplate kind);

struct LevyMeasure {
  std::size_t dimension = 1;
  BasisPtr basis;
  SymmetryMode symmetry_mode = SymmetryMode::kComplete;
  std::vector<Atom> atoms;
  std::vector<AtomSequence> sequences;
  std::vector<ContinuousPart> continuous;
};

// Parses and validates a measure-spec document (JSON). Throws InputError
// with a field path or a line/column position.
LevyMeasure parse_measure(std::string_view text);
LevyMeasure parse_measure_json(const nlohmann::json& doc);
nlohmann::json serialize_measure(const LevyMeasure& mu);

struct AffinePiece {
  std::vector<ExactVector> basis;
  ExactVector offset;
};

// Group generated by one template sequence. Dense groups fill the line
// R * direction; discrete ones equal Z * generator.
struct SequenceGroup {
  std::size_t sequence = 0;
  ExactVector direction;
  bool dense = false;
  std::string reason;
  std::optional<ExactVector> generator;
};

struct SupportDescriptor {
  std::size_t dimension = 1;
  BasisPtr basis;
  std::vector<ExactVector> finite_points;    // atoms, both signs, canonical order
  std::vector<ExactVector> sequence_points;  // template points up to truncation
  bool has_accumulation_point = false;
  std::vector<ExactVector> accumulation_points;
  bool contains_interval_or_ball = false;
  std::optional<Rational> sphere_radius;
  std::vector<AffinePiece> affine_pieces;
  std::vector<SequenceGroup> sequence_groups;

  bool empty() const;
  // Atoms and truncated sequence points together.
  std::vector<ExactVector> all_points() const;
};

SupportDescriptor support_of(const LevyMeasure& mu);

struct LebesgueSplit {
  bool absolutely_continuous = false;
  bool singular_diffuse = false;
  bool atomic = false;
  std::vector<std::string> absolutely_continuous_parts;
  std::vector<std::string> singular_diffuse_parts;
  std::vector<std::string> atomic_parts;
};

LebesgueSplit lebesgue_split(const LevyMeasure& mu);

// Strict lexicographic order on exact coordinates; used for canonical
// ordering of support points.
bool exact_less(const ExactVector& a, const ExactVector& b);

}  // namespace liouville
