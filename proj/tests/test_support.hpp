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

#include <string>
#include <vector>

#include "liouville/exact_numbers.hpp"
#include "liouville/linalg.hpp"
#include "liouville/measures.hpp"

namespace liouville::testing {

inline const char* kPi = "3.14159265358979323846264338327950288419716939937510";
inline const char* kSqrt2 = "1.41421356237309504880168872420969807856967187537694";
inline const char* kSqrt3 = "1.73205080756887729352744634443004491168374008309570";

inline std::string constant_json(const std::string& name, const char* value) {
  return "{\"name\": \"" + name + "\", \"value\": \"" + value + "\"}";
}

inline std::string pi_constants() { return "[" + constant_json("pi", kPi) + "]"; }
inline std::string root_constants() {
  return "[" + constant_json("sqrt2", kSqrt2) + ", " + constant_json("sqrt3", kSqrt3) + "]";
}

// Atom list over unit weights: each entry is a coordinate list.
inline std::string atoms_json(const std::vector<std::vector<std::string>>& points, const std::string& weight = "1") {
  std::string s = "[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += i ? ", " : "";
    s += "{\"point\": [";
    for (std::size_t j = 0; j < points[i].size(); ++j) s += (j ? ", \"" : "\"") + points[i][j] + "\"";
    s += "], \"weight\": \"" + weight + "\"}";
  }
  return s + "]";
}

inline LevyMeasure atomic_measure(std::size_t d, const std::vector<std::vector<std::string>>& points,
                                  const std::string& constants = "[]") {
  return parse_measure("{\"dimension\": " + std::to_string(d) + ", \"constants\": " + constants +
                       ", \"atoms\": " + atoms_json(points) + "}");
}

inline ExactVector vec(const BasisPtr& b, const std::vector<std::string>& xs) {
  ExactVector v;
  for (const auto& x : xs) v.push_back(ExtendedRational::parse(b, x));
  return v;
}

}  // namespace liouville::testing
