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

#include "liouville/liouville_decider.hpp"

#include "liouville/errors.hpp"

namespace liouville {

namespace {

std::vector<std::string> assumption_echo(const LevyMeasure& mu) {
  std::vector<std::string> out;
  const auto& b = *mu.basis;
  if (b.size() == 0) {
    out.push_back("all coordinates rational; no independence assumption used");
    return out;
  }
  std::string names = "1";
  for (const auto& c : b.constants()) names += ", " + c.name;
  out.push_back(std::string(b.independence_asserted() ? "asserted" : "NOT asserted") + ": {" + names +
                "} linearly independent over Q");
  for (const auto& c : b.constants())
    out.push_back(c.name + " ~ " + c.decimal.substr(0, 24) + "... (" + std::to_string(b.significant_digits()) +
                  " significant digits)");
  return out;
}

LiouvilleVerdict from_closure(const LevyMeasure& mu, ClosedSubgroup closure, const DecideConfig& cfg) {
  LiouvilleVerdict v;
  v.assumptions = assumption_echo(mu);
  v.detail = closure.detail;
  if (!closure.certified()) {
    v.status = VerdictStatus::kUncertified;
    v.route = "probe";
    v.closure = std::move(closure);
    return v;
  }
  if (closure.dense()) {
    v.status = VerdictStatus::kHolds;
    v.route = closure.route;
    if (v.route == "unbounded_q_sequence")
      for (std::size_t i = 0; i < mu.sequences.size(); ++i) {
        auto rec = q_records(mu.sequences[i], i, cfg.q_witness_limit);
        v.q_witnesses.insert(v.q_witnesses.end(), rec.begin(), rec.end());
      }
  } else {
    v.status = VerdictStatus::kFails;
    v.route = closure.V_basis.empty() ? "lattice" : "hyperplane";
    v.hyperplane = build_certificate(closure);
    v.certificate_check = verify_certificate(*v.hyperplane, support_of(mu));
    v.counterexample = build_counterexample(*v.hyperplane);
    if (!v.certificate_check->ok) {
      v.status = VerdictStatus::kUncertified;
      v.detail += "; certificate check failed: " + v.certificate_check->failure;
    }
  }
  if (mu.basis->size() > 0 && !mu.basis->independence_asserted()) {
    v.status = VerdictStatus::kUncertified;
    v.detail += "; constants are not asserted independent, so the exact route is conditional";
  }
  v.closure = std::move(closure);
  return v;
}

}  // namespace

std::string status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kHolds: return "holds";
    case VerdictStatus::kFails: return "fails";
    case VerdictStatus::kUncertified: return "uncertified";
  }
  return "uncertified";
}

std::vector<QWitness> q_records(const AtomSequence& seq, std::size_t index, std::uint64_t limit) {
  std::vector<QWitness> out;
  const Rational a1 = seq.scalar(1);
  Integer best = 0;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    Rational r = seq.scalar(n) / a1;
    if (r == 0) continue;
    Integer q = r.get_den();
    if (q > best) {
      best = q;
      out.push_back({index, n, q});
    }
  }
  return out;
}

LiouvilleVerdict decide_1d(const LevyMeasure& mu, const DecideConfig& cfg) {
  if (mu.dimension != 1) throw PreconditionError("decide_1d: dimension must be 1");
  return from_closure(mu, closure_1d(support_of(mu)), cfg);
}

LiouvilleVerdict decide(const LevyMeasure& mu, const DecideConfig& cfg) {
  if (mu.dimension == 1) return decide_1d(mu, cfg);
  return from_closure(mu, closure_multid(support_of(mu), cfg.closure), cfg);
}

}  // namespace liouville
