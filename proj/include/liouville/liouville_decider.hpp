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

// Liouville decision with certificates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liouville/counterexamples.hpp"
#include "liouville/group_closure.hpp"
#include "liouville/measures.hpp"

namespace liouville {

enum class VerdictStatus { kHolds, kFails, kUncertified };
std::string status_name(VerdictStatus s);

// Q(a_1, a_n) record values along a sequence whose q-values are unbounded.
struct QWitness {
  std::size_t sequence = 0;
  std::uint64_t n = 0;
  Integer q;
};

struct LiouvilleVerdict {
  VerdictStatus status = VerdictStatus::kUncertified;
  // accumulation | interval_or_ball | irrational_pair | unbounded_q_sequence
  // | kronecker | lattice | hyperplane | probe
  std::string route;
  std::string detail;
  ClosedSubgroup closure;
  std::optional<HyperplaneCertificate> hyperplane;
  std::optional<CertificateCheck> certificate_check;
  std::optional<Counterexample> counterexample;
  std::vector<QWitness> q_witnesses;
  std::vector<std::string> assumptions;

  bool holds() const { return status == VerdictStatus::kHolds; }
};

struct DecideConfig {
  ClosureConfig closure;
  std::uint64_t q_witness_limit = 1000;  // indices scanned for q records
};

LiouvilleVerdict decide_1d(const LevyMeasure& mu, const DecideConfig& cfg = {});
LiouvilleVerdict decide(const LevyMeasure& mu, const DecideConfig& cfg = {});

// Record-breaking Q(a_1, a_n) for n <= limit along one template sequence.
std::vector<QWitness> q_records(const AtomSequence& seq, std::size_t index, std::uint64_t limit);

}  // namespace liouville
