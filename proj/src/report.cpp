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

#include "liouville/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kHeader = "# liouville verdict report";
constexpr std::string_view kTimestampKey = "generated";

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      out += s[i] == 'n' ? '\n' : s[i];
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string indexed(std::string_view key, std::size_t i) { return std::string(key) + "[" + std::to_string(i) + "]"; }

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? std::string(sep) : "") + xs[i];
  return s;
}

std::string point_string(const Point& p) {
  std::vector<std::string> xs;
  for (double v : p) xs.push_back(format_double(v));
  return "(" + join(xs, ", ") + ")";
}

void add_closure(VerdictReport& r, const ClosedSubgroup& c, const DecideConfig& cfg) {
  r.add("closure.provenance", provenance_name(c.provenance));
  r.add("closure.route", c.route);
  r.add("closure.detail", c.detail);
  r.add("closure.dim_V", std::to_string(c.V_basis.size()), "exact");
  for (std::size_t i = 0; i < c.V_basis.size(); ++i) r.add(indexed("closure.V", i), to_string(c.V_basis[i]), "exact");
  r.add("closure.rank_Lambda", std::to_string(c.Lambda_basis.size()), "exact");
  for (std::size_t i = 0; i < c.Lambda_basis.size(); ++i)
    r.add(indexed("closure.Lambda", i), to_string(c.Lambda_basis[i]), "exact");
  r.add("closure.orthogonal", c.orthogonal ? "true" : "false");
  if (c.irrational_pair)
    r.add("closure.irrational_pair", c.irrational_pair->first.to_string() + ", " + c.irrational_pair->second.to_string(),
          "exact");
  for (std::size_t i = 0; i < c.witnesses.size(); ++i) r.add(indexed("closure.witness", i), c.witnesses[i]);
  if (c.probe) {
    const auto& p = *c.probe;
    // Covering radii are grid maxima: exact up to half a grid diagonal.
    double h = probe_spacing(c.dimension, cfg.closure.probe);
    std::string tol = format_double(h * std::sqrt(static_cast<double>(c.dimension)) / 2);
    r.add("probe.kind", probe_kind_name(p.kind));
    r.add("probe.detail", p.detail);
    r.add("probe.R", format_double(cfg.closure.probe.R), "exact");
    r.add("probe.n_max", std::to_string(cfg.closure.probe.n_max), "exact");
    r.add("probe.reduction", format_double(p.reduction), tol);
    for (std::size_t i = 0; i < p.history.size(); ++i) r.add(indexed("probe.delta", i), format_double(p.history[i]), tol);
    for (std::size_t i = 0; i < p.lattice_basis.size(); ++i)
      r.add(indexed("probe.lattice", i), point_string(p.lattice_basis[i]), "1e-09");
  }
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "report") return ReportFormat::kReport;
  if (name == "json" || name == "json-like") return ReportFormat::kJson;
  throw InputError("--format", "expected report or json");
}

void VerdictReport::add(std::string key, std::string value, std::string tolerance) {
  fields.push_back({std::move(key), std::move(value), std::move(tolerance)});
}

std::optional<std::string> VerdictReport::get(std::string_view key) const {
  for (const auto& f : fields)
    if (f.key == key) return f.value;
  return std::nullopt;
}

std::vector<std::string> VerdictReport::get_all(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& f : fields)
    if (f.key.rfind(prefix, 0) == 0) out.push_back(f.value);
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string input_digest(const LevyMeasure& mu, const Settings& settings) {
  std::string canon = serialize_measure(mu).dump();
  for (const auto& [k, v] : settings) canon += "\n" + k + "=" + v;
  return "sha256:" + sha256_hex(canon);
}

VerdictReport make_report(const LevyMeasure& mu, const LiouvilleVerdict& v, const DecideConfig& cfg,
                          const Settings& settings, const std::string& timestamp) {
  VerdictReport r;
  r.add("tool.version", kToolVersion);
  r.add("input.digest", input_digest(mu, settings));
  r.add(std::string(kTimestampKey), timestamp);
  for (const auto& [k, val] : settings) r.add("setting." + k, val);
  r.add("input.dimension", std::to_string(mu.dimension), "exact");
  r.add("verdict.status", status_name(v.status));
  r.add("verdict.holds", v.holds() ? "true" : "false");
  r.add("verdict.certified", v.status == VerdictStatus::kUncertified ? "false" : "true");
  r.add("verdict.route", v.route);
  r.add("verdict.detail", v.detail);
  for (std::size_t i = 0; i < v.assumptions.size(); ++i) r.add(indexed("assumption", i), v.assumptions[i]);
  add_closure(r, v.closure, cfg);
  if (v.hyperplane) {
    const auto& h = *v.hyperplane;
    r.add("hyperplane.normal", to_string(h.normal), "exact");
    r.add("hyperplane.c", to_string(h.c), "exact");
    r.add("hyperplane.period", h.period.to_string(), "exact");
    for (std::size_t i = 0; i < h.H_basis.size(); ++i) r.add(indexed("hyperplane.H", i), to_string(h.H_basis[i]), "exact");
  }
  if (v.certificate_check) {
    r.add("certificate.ok", v.certificate_check->ok ? "true" : "false");
    r.add("certificate.points_checked", std::to_string(v.certificate_check->points_checked), "exact");
    if (!v.certificate_check->ok) r.add("certificate.failure", v.certificate_check->failure);
  }
  if (v.counterexample) {
    r.add("counterexample.kind", counterexample_kind_name(v.counterexample->kind));
    r.add("counterexample.closed_form", v.counterexample->closed_form);
  }
  for (std::size_t i = 0; i < v.q_witnesses.size(); ++i) {
    const auto& q = v.q_witnesses[i];
    r.add(indexed("q_witness", i),
          "sequence " + std::to_string(q.sequence) + ", n = " + std::to_string(q.n) + ", q = " + q.q.get_str(), "exact");
  }
  return r;
}

std::string serialize_report(const VerdictReport& r, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ojson doc = ojson::object();
    for (const auto& f : r.fields) {
      if (f.tolerance.empty()) doc[f.key] = f.value;
      else doc[f.key] = ojson{{"value", f.value}, {"tolerance", f.tolerance}};
    }
    return doc.dump(2) + "\n";
  }
  std::string out(kHeader);
  out += "\n";
  for (const auto& f : r.fields) {
    out += f.key + " = " + escape(f.value);
    if (!f.tolerance.empty()) out += "  [tol " + f.tolerance + "]";
    out += "\n";
  }
  return out;
}

VerdictReport parse_report(std::string_view text) {
  VerdictReport r;
  std::size_t start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && text[start] == '{') {
    ojson doc;
    try {
      doc = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("report", e.what());
    }
    if (!doc.is_object()) throw InputError("report", "expected an object");
    for (const auto& [k, v] : doc.items()) {
      if (v.is_string()) {
        r.add(k, v.get<std::string>());
      } else if (v.is_object() && v.contains("value") && v.contains("tolerance") && v.size() == 2 &&
                 v["value"].is_string() && v["tolerance"].is_string()) {
        r.add(k, v["value"].get<std::string>(), v["tolerance"].get<std::string>());
      } else {
        throw InputError(k, "expected a string or {value, tolerance}");
      }
    }
    return r;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find(" = ");
    if (eq == std::string::npos) throw InputError("line " + std::to_string(lineno), "expected 'key = value'");
    std::string key = line.substr(0, eq), rest = line.substr(eq + 3), tol;
    auto t = rest.rfind("  [tol ");
    if (t != std::string::npos && !rest.empty() && rest.back() == ']') {
      tol = rest.substr(t + 7, rest.size() - t - 8);
      rest.resize(t);
    }
    r.add(key, unescape(rest), tol);
  }
  return r;
}

std::string strip_timestamp(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, out;
  const std::string report_prefix = std::string(kTimestampKey) + " = ";
  const std::string json_prefix = "  \"" + std::string(kTimestampKey) + "\":";
  while (std::getline(in, line)) {
    if (line.rfind(report_prefix, 0) == 0 || line.rfind(json_prefix, 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

}  // namespace liouville
