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

// Closure of the subgroup generated by supp(mu) as V (+) Lambda, hyperplane
// certificates, and the coset decomposition of mu.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liouville/linalg.hpp"
#include "liouville/measures.hpp"
#include "liouville/numerics.hpp"

namespace liouville {

enum class Provenance { kExact, kNumericalProbe };
std::string provenance_name(Provenance p);

struct ClosedSubgroup {
  std::size_t dimension = 1;
  BasisPtr basis;
  std::vector<ExactVector> V_basis;
  std::vector<ExactVector> Lambda_basis;
  bool orthogonal = false;
  Provenance provenance = Provenance::kExact;
  // interval_or_ball | accumulation | unbounded_q_sequence | irrational_pair
  // | kronecker | torus | lattice | product | affine | trivial | probe
  std::string route;
  std::string detail;
  std::vector<std::string> witnesses;
  std::optional<std::pair<ExtendedRational, ExtendedRational>> irrational_pair;
  std::optional<ProbeVerdict> probe;

  bool certified() const { return provenance == Provenance::kExact; }
  bool dense() const { return certified() && V_basis.size() == dimension; }
};

struct ClosureConfig {
  PropagationConfig probe;
};

ClosedSubgroup closure_1d(const SupportDescriptor& support);
ClosedSubgroup closure_multid(const SupportDescriptor& support, const ClosureConfig& cfg = {});

// Basis of the lattice generated by rational vectors (column HNF, lower
// staircase with positive pivots). Throws PreconditionError on irrational
// coordinates.
std::vector<RationalVector> lattice_hnf(const std::vector<RationalVector>& generators, std::size_t d);
std::vector<ExactVector> lattice_hnf(const std::vector<ExactVector>& generators);

// Canonical basis of the group Z-spanned by independent exact vectors: HNF
// of the flattened coordinates.
std::vector<ExactVector> canonical_lattice(const std::vector<ExactVector>& lattice, std::size_t d);

struct KroneckerResult {
  bool dense = false;
  std::size_t rank = 0;
  // Nonzero primitive integer r with r_0 + sum_i r_i c_i = 0 when not dense.
  IntegerVector dependency;
};

KroneckerResult kronecker_check(const ExactVector& c);

// V (+) Lambda -> V (+)perp Lambda~ with Lambda~ = Lambda - proj_V Lambda,
// V in reduced echelon form and Lambda~ canonical. Requires rational V.
ClosedSubgroup orthogonalize(const ClosedSubgroup& closure);

// supp(mu) subset H + cZ with H = normal^perp.
struct HyperplaneCertificate {
  RationalVector normal;          // primitive integer, positive leading entry
  ExactVector c;                  // parallel to normal
  ExtendedRational period = ExtendedRational(ConstantBasis::rational_only());  // <normal, c>
  std::vector<RationalVector> H_basis;
};

struct CertificateCheck {
  bool ok = true;
  std::string failure;
  std::size_t points_checked = 0;
};

// Requires a certified, non-dense, orthogonal closure.
HyperplaneCertificate build_certificate(const ClosedSubgroup& closure);
CertificateCheck verify_certificate(const HyperplaneCertificate& cert, const SupportDescriptor& support);

struct DecompositionPart {
  IntegerVector coset;  // coordinates of a in the Lambda basis
  ExactVector a;
  std::vector<Atom> atoms;                // atoms and truncated sequence terms in V + a
  std::vector<std::size_t> continuous;    // indices into mu.continuous
  double mass = 0.0;                      // mu_a(R^d); infinite for singular pieces
};

struct Decomposition {
  std::vector<ExactVector> V_basis;
  std::vector<ExactVector> Lambda_basis;
  std::vector<DecompositionPart> parts;   // sorted by coset
  double epsilon_star = 0.0;              // min |a| over occupied a != 0
  bool levy_symmetric = true;             // mu_a(.) = mu_{-a}(-.) on atoms
  double off_zero_mass = 0.0;             // listed mass of parts a != 0
  double off_zero_tail = 0.0;             // bound for sequence terms beyond N
  double off_zero_bound() const { return off_zero_mass + off_zero_tail; }
  const DecompositionPart* part(const IntegerVector& coset) const;
};

Decomposition decompose_measure(const LevyMeasure& mu, const ClosedSubgroup& closure);

// Coordinates z with x - proj_V x = sum z_i Lambda_i, or nullopt when x is
// outside V (+) Lambda.
std::optional<IntegerVector> coset_of(const ClosedSubgroup& closure, const ExactVector& x);

}  // namespace liouville
