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

#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "liouville/counterexamples.hpp"
#include "liouville/errors.hpp"
#include "liouville/liouville_decider.hpp"
#include "liouville/numerics.hpp"
#include "liouville/report.hpp"

namespace liouville::cli {

namespace {

struct Options {
  std::string spec;
  std::string out;
  std::string format = "report";
  std::uint64_t seed = 1;
  double r0 = 1.0;
  int quad_nodes = 64;
  std::uint64_t n_max = 40;
  double R = 5.0;
  double target_delta = 0.0;
  std::uint64_t truncation = 0;
  bool strict_symmetry = false;
  std::string function = "cos";
  int points = 10;
};

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("liouville");
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("LIOUVILLE_LOG");
    l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return l;
  }();
  return log;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot read spec file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

LevyMeasure load(const Options& o) {
  std::string text = read_file(o.spec);
  if (!o.strict_symmetry) return parse_measure(text);
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return parse_measure(text);  // throws with context
  doc["symmetry_mode"] = "strict";
  return parse_measure_json(doc);
}

std::string timestamp() {
  std::time_t t;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  else t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

DecideConfig decide_config(const Options& o) {
  DecideConfig cfg;
  cfg.closure.probe.R = o.R;
  cfg.closure.probe.n_max = o.n_max;
  cfg.closure.probe.target_delta = o.target_delta;
  return cfg;
}

QuadratureConfig quad_config(const Options& o) {
  QuadratureConfig q;
  q.r0 = o.r0;
  q.nodes_per_decade = o.quad_nodes;
  q.truncation = o.truncation;
  return q;
}

Settings probe_settings(const Options& o) {
  return {{"R", format_double(o.R)},
          {"n_max", std::to_string(o.n_max)},
          {"target_delta", format_double(o.target_delta)},
          {"strict_symmetry", o.strict_symmetry ? "true" : "false"}};
}

// Writes to --out when given, else to `out`.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError(o.out, "cannot write output file");
  f << text;
}

int exit_code(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kHolds: return kExitHolds;
    case VerdictStatus::kFails: return kExitFails;
    case VerdictStatus::kUncertified: return kExitUncertified;
  }
  return kExitUncertified;
}

std::vector<Point> sample_points(std::size_t d, int count, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) {
    Point p(d);
    // Uniform in [-spread, spread] from raw 53-bit draws, independent of the
    // standard library's distribution implementation.
    for (auto& v : p) v = spread * (2.0 * static_cast<double>(rng() >> 11) / 9007199254740992.0 - 1.0);
    pts.push_back(p);
  }
  if (d == 1) std::sort(pts.begin(), pts.end());
  return pts;
}

std::string csv_point(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + format_double(p[i]);
  return s;
}

std::string csv_header(std::size_t d) {
  std::string s;
  for (std::size_t i = 0; i < d; ++i) s += (i ? ",x" : "x") + std::to_string(i + 1);
  return s;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(field, "expected a comma separated list of numbers, got '" + s + "'");
    }
  }
  return out;
}

struct NamedFunction {
  FunctionPtr f;
  std::optional<Point> wave;  // set for cosine waves
};

// cos | cos:k1,..,kd[:phase] | harmonic | gauss[:width]
NamedFunction named_function(const std::string& spec, std::size_t d) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon), args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "cos") {
    Point k(d, 0.0);
    k[0] = 1.0;
    double phase = 0.0;
    if (!args.empty()) {
      auto c2 = args.find(':');
      k = parse_doubles(args.substr(0, c2), "--function");
      if (c2 != std::string::npos) phase = parse_doubles(args.substr(c2 + 1), "--function").at(0);
      if (k.size() != d) throw InputError("--function", "wave vector has " + std::to_string(k.size()) +
                                                            " entries, the measure has dimension " + std::to_string(d));
    }
    return {std::make_shared<CosineWave>(k, phase), k};
  }
  if (name == "harmonic") {
    if (d < 2) throw InputError("--function", "harmonic needs dimension >= 2");
    return {std::make_shared<HarmonicQuadratic>(d), std::nullopt};
  }
  if (name == "gauss") {
    double w = args.empty() ? 1.0 : parse_doubles(args, "--function").at(0);
    return {std::make_shared<GaussianBump>(Point(d, 0.0), w, 1.0), std::nullopt};
  }
  throw InputError("--function", "unknown function '" + spec + "' (cos, cos:k[:phase], harmonic, gauss[:width])");
}

int cmd_decide(const Options& o, std::ostream& out) {
  auto mu = load(o);
  auto cfg = decide_config(o);
  auto v = decide(mu, cfg);
  logger()->info("decide: status {} via {}", status_name(v.status), v.route);
  auto report = make_report(mu, v, cfg, probe_settings(o), timestamp());
  emit(o, out, serialize_report(report, parse_report_format(o.format)));
  return exit_code(v.status);
}

int cmd_closure(const Options& o, std::ostream& out) {
  auto mu = load(o);
  auto cfg = decide_config(o);
  auto v = decide(mu, cfg);
  auto full = make_report(mu, v, cfg, probe_settings(o), timestamp());
  VerdictReport r;
  for (const auto& f : full.fields)
    if (f.key == "tool.version" || f.key == "input.digest" || f.key == "generated" || f.key.rfind("closure.", 0) == 0 ||
        f.key.rfind("probe.", 0) == 0 || f.key.rfind("assumption", 0) == 0)
      r.fields.push_back(f);
  emit(o, out, serialize_report(r, parse_report_format(o.format)));
  return 0;
}

int cmd_decompose(const Options& o, std::ostream& out) {
  auto mu = load(o);
  auto closure = closure_multid(support_of(mu), decide_config(o).closure);
  auto dec = decompose_measure(mu, closure);
  std::ostringstream s;
  for (const auto& b : dec.V_basis) s << "# V " << to_string(b) << "\n";
  for (const auto& b : dec.Lambda_basis) s << "# Lambda " << to_string(b) << "\n";
  s << "# epsilon_star = " << format_double(dec.epsilon_star) << "\n";
  s << "# off_zero_mass = " << format_double(dec.off_zero_mass) << "\n";
  s << "# off_zero_tail = " << format_double(dec.off_zero_tail) << "\n";
  s << "# levy_symmetric = " << (dec.levy_symmetric ? "true" : "false") << "\n";
  s << "coset,a,mass,atoms,continuous\n";
  for (const auto& p : dec.parts) {
    std::string coset;
    for (std::size_t i = 0; i < p.coset.size(); ++i) coset += (i ? " " : "") + p.coset[i].get_str();
    s << "\"" << coset << "\",\"" << to_string(p.a) << "\"," << format_double(p.mass) << "," << p.atoms.size() << ","
      << p.continuous.size() << "\n";
  }
  emit(o, out, s.str());
  return 0;
}

int cmd_counterexample(const Options& o, std::ostream& out) {
  auto mu = load(o);
  auto v = decide(mu, decide_config(o));
  std::ostringstream s;
  if (!v.counterexample) {
    s << "# none: verdict " << status_name(v.status) << " via " << v.route << "\n";
    emit(o, out, s.str());
    return 0;
  }
  const auto& ce = *v.counterexample;
  s << "# closed_form = " << ce.closed_form << "\n";
  s << "# kind = " << counterexample_kind_name(ce.kind) << "\n";
  s << csv_header(mu.dimension) << ",U\n";
  for (const auto& p : sample_points(mu.dimension, o.points, o.seed, 2.0)) s << csv_point(p) << "," << format_double(ce(p)) << "\n";
  emit(o, out, s.str());
  return 0;
}

int cmd_propagate(const Options& o, std::ostream& out) {
  auto mu = load(o);
  auto support = support_of(mu).all_points();
  if (support.empty()) throw InputError(o.spec, "the measure has no finite support part to propagate");
  PropagationConfig cfg;
  cfg.R = o.R;
  cfg.n_max = o.n_max;
  cfg.target_delta = o.target_delta;
  auto st = propagate(support, mu.dimension, cfg);
  std::ostringstream s;
  s << "# grid_spacing = " << format_double(probe_spacing(mu.dimension, cfg)) << "\n";
  if (st.truncated) s << "# truncated = true (point cap reached)\n";
  s << "n,size,delta\n";
  for (std::size_t i = 0; i < st.covering_radius_history.size(); ++i)
    s << i << "," << st.size_history[i] << "," << format_double(st.covering_radius_history[i]) << "\n";
  emit(o, out, s.str());
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  auto mu = load(o);
  auto [u, wave] = named_function(o.function, mu.dimension);
  auto q = quad_config(o);
  std::optional<double> symbol;
  if (wave) {
    try {
      symbol = fourier_symbol(mu, *wave);
    } catch (const PreconditionError&) {
      // No closed-form symbol for sequences or affine pieces.
    }
  }
  std::ostringstream s;
  s << "# function = " << u->describe() << "\n";
  s << csv_header(mu.dimension) << ",value,bound" << (symbol ? ",symbol_residual" : "") << "\n";
  double max_value = 0, max_bound = 0, max_residual = 0;
  for (const auto& p : sample_points(mu.dimension, o.points, o.seed, 5.0)) {
    auto r = eval_operator(mu, *u, p, q);
    s << csv_point(p) << "," << format_double(r.value) << "," << format_double(r.bound);
    max_value = std::max(max_value, std::abs(r.value));
    max_bound = std::max(max_bound, r.bound);
    if (symbol) {
      double res = std::abs(r.value - *symbol * u->value(p));
      max_residual = std::max(max_residual, res);
      s << "," << format_double(res);
    }
    s << "\n";
  }
  s << "# max_abs_value = " << format_double(max_value) << "\n";
  s << "# max_bound = " << format_double(max_bound) << "\n";
  if (symbol) {
    s << "# fourier_symbol = " << format_double(*symbol) << "\n";
    s << "# max_abs_symbol_residual = " << format_double(max_residual) << "\n";
  }
  emit(o, out, s.str());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Liouville property decisions for symmetric Levy operators", "liouville"};
  app.set_version_flag("--version", std::string("liouville ") + kToolVersion);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool probe, bool quad) {
    sub->add_option("spec", o.spec, "measure spec (JSON), '-' for stdin")->required();
    sub->add_option("--out", o.out, "write output to this file");
    sub->add_flag("--strict-symmetry", o.strict_symmetry, "reject specs with missing mirror atoms");
    if (probe) {
      sub->add_option("--n-max", o.n_max, "propagation iterations")->check(CLI::PositiveNumber);
      sub->add_option("--R", o.R, "propagation window radius")->check(CLI::PositiveNumber);
      sub->add_option("--target-delta", o.target_delta, "stop once the covering radius is below this")
          ->check(CLI::NonNegativeNumber);
    }
    if (quad) {
      sub->add_option("--r0", o.r0, "compensation split radius")->check(CLI::PositiveNumber);
      sub->add_option("--quad-nodes", o.quad_nodes, "radial nodes per decade")->check(CLI::PositiveNumber);
      sub->add_option("--truncation-N", o.truncation, "series truncation for sequences (0 = spec N)");
    }
  };
  auto* decide_cmd = app.add_subcommand("decide", "decide the Liouville property and emit a report");
  common(decide_cmd, true, false);
  decide_cmd->add_option("--format", o.format, "report | json")->check(CLI::IsMember({"report", "json", "json-like"}));
  decide_cmd->add_option("--seed", o.seed, "seed for sampled checks");

  auto* closure_cmd = app.add_subcommand("closure", "closed subgroup generated by the support");
  common(closure_cmd, true, false);
  closure_cmd->add_option("--format", o.format, "report | json")->check(CLI::IsMember({"report", "json", "json-like"}));

  auto* decompose_cmd = app.add_subcommand("decompose", "coset decomposition of the measure (CSV)");
  common(decompose_cmd, true, false);

  auto* ce_cmd = app.add_subcommand("counterexample", "closed form and sampled table of the counterexample");
  common(ce_cmd, true, false);
  ce_cmd->add_option("--seed", o.seed, "seed for sample points");
  ce_cmd->add_option("--points", o.points, "number of sample points")->check(CLI::PositiveNumber);

  auto* prop_cmd = app.add_subcommand("propagate", "propagation sets and covering radii (CSV)");
  common(prop_cmd, true, false);

  auto* verify_cmd = app.add_subcommand("verify", "evaluate the operator on a built-in function");
  common(verify_cmd, false, true);
  verify_cmd->add_option("--function", o.function, "cos | cos:k1,..,kd[:phase] | harmonic | gauss[:width]");
  verify_cmd->add_option("--points", o.points, "number of sample points")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", o.seed, "seed for sample points");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "liouville " << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'liouville --help' for usage\n";
    return kExitInputError;
  }

  try {
    auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    if (*decide_cmd) code = cmd_decide(o, out);
    else if (*closure_cmd) code = cmd_closure(o, out);
    else if (*decompose_cmd) code = cmd_decompose(o, out);
    else if (*ce_cmd) code = cmd_counterexample(o, out);
    else if (*prop_cmd) code = cmd_propagate(o, out);
    else if (*verify_cmd) code = cmd_verify(o, out);
    logger()->debug("finished in {:.3f} s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return code;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const PreconditionError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace liouville::cli
