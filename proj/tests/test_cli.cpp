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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "liouville/errors.hpp"
#include "liouville/report.hpp"
#include "test_support.hpp"

using namespace liouville;

namespace {

std::string spec(const std::string& name) { return std::string(LIOUVILLE_DATA_DIR) + "/specs/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::string comment_value(const std::string& text, const std::string& key) {
  auto pos = text.find("# " + key + " = ");
  if (pos == std::string::npos) return "";
  pos += key.size() + 5;
  return text.substr(pos, text.find('\n', pos) - pos);
}

}  // namespace

TEST_CASE("sha256 and number formatting") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1.0 / 3) == "0.33333333333333331");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    double x = std::ldexp(static_cast<double>(rng() >> 11), static_cast<int>(rng() % 200) - 150);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("reports round trip in both formats") {
  for (const char* name : {"discrete_laplacian.json", "nonstandard_pi.json", "polynomial_ratio.json",
                           "kronecker_sqrt2_sqrt2.json", "probe_pair_2d.json", "affine_plane_3d.json"}) {
    CAPTURE(name);
    std::ifstream in(spec(name));
    std::stringstream buf;
    buf << in.rdbuf();
    auto mu = parse_measure(buf.str());
    DecideConfig cfg;
    auto v = decide(mu, cfg);
    auto r = make_report(mu, v, cfg, {{"R", "5"}}, "2026-01-01T00:00:00Z");
    for (auto fmt : {ReportFormat::kReport, ReportFormat::kJson}) {
      auto text = serialize_report(r, fmt);
      auto back = parse_report(text);
      CHECK(back == r);
      CHECK(serialize_report(back, fmt) == text);
    }
    CHECK(r.get("verdict.status") == status_name(v.status));
    CHECK(r.get("tool.version") == "0.3.0");
  }
}

TEST_CASE("report parsing keeps escapes and tolerances") {
  VerdictReport r;
  r.add("a", "line one\nline two \\ backslash");
  r.add("b", "x = y  [not a tolerance", "");
  r.add("c", "0.5", "1e-09");
  auto back = parse_report(serialize_report(r, ReportFormat::kReport));
  CHECK(back == r);
  CHECK_THROWS_AS(parse_report("# header\nno separator here\n"), InputError);
  CHECK_THROWS_AS(parse_report("{\"a\": 3}"), InputError);
}

TEST_CASE("digest ignores the timestamp and tracks the input") {
  auto mu = testing::atomic_measure(1, {{"1"}});
  auto other = testing::atomic_measure(1, {{"2"}});
  DecideConfig cfg;
  auto a = make_report(mu, decide(mu), cfg, {}, "2026-01-01T00:00:00Z");
  auto b = make_report(mu, decide(mu), cfg, {}, "2027-06-30T12:00:00Z");
  CHECK(a.get("input.digest") == b.get("input.digest"));
  CHECK(a.get("generated") != b.get("generated"));
  CHECK(strip_timestamp(serialize_report(a, ReportFormat::kReport)) ==
        strip_timestamp(serialize_report(b, ReportFormat::kReport)));
  CHECK(strip_timestamp(serialize_report(a, ReportFormat::kJson)) ==
        strip_timestamp(serialize_report(b, ReportFormat::kJson)));
  CHECK(input_digest(mu, {}) != input_digest(other, {}));
  CHECK(input_digest(mu, {{"R", "5"}}) != input_digest(mu, {{"R", "6"}}));
}

TEST_CASE("decide exit codes") {
  auto fails = run({"decide", spec("discrete_laplacian.json")});
  CHECK(fails.code == cli::kExitFails);
  auto r = parse_report(fails.out);
  CHECK(r.get("verdict.route") == "lattice");
  CHECK(r.get("closure.Lambda[0]") == "(1)");
  CHECK(r.get("counterexample.closed_form") == "cos(2*pi*x)");

  auto holds = run({"decide", spec("nonstandard_pi.json")});
  CHECK(holds.code == cli::kExitHolds);
  CHECK(parse_report(holds.out).get("verdict.route") == "irrational_pair");

  auto unc = run({"decide", spec("probe_pair_2d.json"), "--n-max", "8"});
  CHECK(unc.code == cli::kExitUncertified);
  CHECK(parse_report(unc.out).get("closure.provenance") == "numerical-probe");

  auto bad = run({"decide", spec("malformed.json")});
  CHECK(bad.code == cli::kExitInputError);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(run({"decide", spec("zero_atom.json")}).code == cli::kExitInputError);
  CHECK(run({"decide", spec("does_not_exist.json")}).code == cli::kExitInputError);
  CHECK(run({"decide"}).code == cli::kExitInputError);
  CHECK(run({"decide", spec("discrete_laplacian.json"), "--format", "xml"}).code == cli::kExitInputError);
  CHECK(run({"frobnicate"}).code == cli::kExitInputError);
}

TEST_CASE("strict symmetry flag rejects one-sided atoms") {
  CHECK(run({"decide", spec("nonstandard_pi.json"), "--strict-symmetry"}).code == cli::kExitHolds);
  CHECK(run({"decide", spec("sqrt2_1d.json"), "--strict-symmetry"}).code == cli::kExitInputError);
  CHECK(run({"decide", spec("sqrt2_1d.json")}).code == cli::kExitHolds);
}

TEST_CASE("decide output is deterministic") {
  for (const char* name : {"discrete_laplacian.json", "kronecker_sqrt2_sqrt3.json", "probe_pair_2d.json"}) {
    for (const char* fmt : {"report", "json"}) {
      CAPTURE(name);
      auto a = run({"decide", spec(name), "--format", fmt, "--n-max", "8"});
      auto b = run({"decide", spec(name), "--format", fmt, "--n-max", "8"});
      CHECK(strip_timestamp(a.out) == strip_timestamp(b.out));
      CHECK(a.code == b.code);
    }
  }
}

TEST_CASE("out flag writes the report to a file") {
  auto path = std::filesystem::temp_directory_path() / "liouville_cli_test_report.txt";
  auto r = run({"decide", spec("discrete_laplacian.json"), "--out", path.string()});
  CHECK(r.code == cli::kExitFails);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(parse_report(buf.str()).get("verdict.status") == "fails");
  std::filesystem::remove(path);
}

TEST_CASE("closure and decompose commands") {
  auto c = run({"closure", spec("multid_discrete_three_halves.json")});
  CHECK(c.code == 0);
  auto r = parse_report(c.out);
  CHECK(r.get_all("closure.Lambda[") == std::vector<std::string>{"(1/2, 0)", "(0, 1/2)"});
  CHECK_FALSE(r.get("verdict.status"));

  auto d = run({"decompose", spec("decomposition_1d.json")});
  CHECK(d.code == 0);
  CHECK(comment_value(d.out, "epsilon_star") == "0.5");
  CHECK(comment_value(d.out, "levy_symmetric") == "true");
  auto rows = csv_rows(d.out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"coset", "a", "mass", "atoms", "continuous"});
  // Cosets -10..10 without 0.
  CHECK(rows.size() == 21);
}

TEST_CASE("counterexample command") {
  auto r = run({"counterexample", spec("kronecker_sqrt2_sqrt2.json"), "--points", "5", "--seed", "3"});
  CHECK(r.code == 0);
  CHECK(comment_value(r.out, "closed_form") == "cos(2*pi*(x1 - x2))");
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "U"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double x1 = std::stod(rows[i][0]), x2 = std::stod(rows[i][1]), u = std::stod(rows[i][2]);
    CHECK(u == doctest::Approx(std::cos(2 * M_PI * (x1 - x2))).epsilon(1e-12));
  }
  auto again = run({"counterexample", spec("kronecker_sqrt2_sqrt2.json"), "--points", "5", "--seed", "3"});
  CHECK(again.out == r.out);
  auto other = run({"counterexample", spec("kronecker_sqrt2_sqrt2.json"), "--points", "5", "--seed", "4"});
  CHECK(other.out != r.out);

  auto none = run({"counterexample", spec("nonstandard_pi.json")});
  CHECK(none.code == 0);
  CHECK(none.out.find("# none") == 0);
}

TEST_CASE("propagate command emits nonincreasing covering radii") {
  auto r = run({"propagate", spec("sqrt2_1d.json"), "--R", "5", "--n-max", "40", "--target-delta", "0.05"});
  CHECK(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"n", "size", "delta"});
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double delta = std::stod(rows[i][2]);
    CHECK(delta <= prev);
    prev = delta;
  }
  CHECK(prev < 0.05);
  CHECK(std::stoi(rows.back()[0]) <= 40);

  CHECK(run({"propagate", spec("fractional_1d.json")}).code == cli::kExitInputError);
}

TEST_CASE("verify command") {
  auto r = run({"verify", spec("fractional_1d.json"), "--function", "cos", "--points", "3", "--seed", "2"});
  CHECK(r.code == 0);
  CHECK(std::stod(comment_value(r.out, "fourier_symbol")) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::stod(comment_value(r.out, "max_abs_symbol_residual")) < 1e-4);

  auto lap = run({"verify", spec("discrete_laplacian.json"), "--function", "cos:6.283185307179586", "--points", "20"});
  CHECK(std::stod(comment_value(lap.out, "max_abs_value")) < 1e-12);

  auto mv = run({"verify", spec("mean_value_2d.json"), "--function", "harmonic", "--points", "5"});
  CHECK(std::stod(comment_value(mv.out, "max_abs_value")) < 1e-10);

  CHECK(run({"verify", spec("fractional_1d.json"), "--function", "sin"}).code == cli::kExitInputError);
  CHECK(run({"verify", spec("fractional_1d.json"), "--function", "cos:1,2"}).code == cli::kExitInputError);
}
