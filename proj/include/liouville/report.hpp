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

// Verdict reports: ordered key/value records with per-field tolerances.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "liouville/liouville_decider.hpp"

namespace liouville {

inline constexpr const char* kToolVersion = "0.3.0";

enum class ReportFormat { kReport, kJson };
ReportFormat parse_report_format(std::string_view name);

struct ReportField {
  std::string key;
  std::string value;
  // "exact" for exact quantities, a decimal bound for floating ones, empty
  // for text.
  std::string tolerance;

  bool operator==(const ReportField&) const = default;
};

struct VerdictReport {
  std::vector<ReportField> fields;

  void add(std::string key, std::string value, std::string tolerance = "");
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view prefix) const;

  bool operator==(const VerdictReport&) const = default;
};

// Settings that influence results; echoed in the report and hashed.
using Settings = std::vector<std::pair<std::string, std::string>>;

// Fixed 17-significant-digit rendering.
std::string format_double(double v);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Digest of the canonical measure document and the settings.
std::string input_digest(const LevyMeasure& mu, const Settings& settings);

// Builds the report; `timestamp` is stored but never hashed.
VerdictReport make_report(const LevyMeasure& mu, const LiouvilleVerdict& v, const DecideConfig& cfg,
                          const Settings& settings, const std::string& timestamp);

std::string serialize_report(const VerdictReport& r, ReportFormat format);
// Accepts either format. Throws InputError on malformed text.
VerdictReport parse_report(std::string_view text);

// Report text with the timestamp line removed, for determinism checks.
std::string strip_timestamp(std::string_view text);

}  // namespace liouville
