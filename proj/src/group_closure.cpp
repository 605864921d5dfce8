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

#include "liouville/group_closure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RationalVector component(const ExactVector& x, std::size_t t) {
  RationalVector r;
  r.reserve(x.size());
  for (const auto& c : x) r.push_back(c.coord(t));
  return r;
}

bool all_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

ExactVector unflatten(const BasisPtr& basis, const RationalVector& flat, std::size_t d) {
  const std::size_t w = basis->width();
  ExactVector out;
  for (std::size_t i = 0; i < d; ++i)
    out.emplace_back(basis, std::vector<Rational>(flat.begin() + i * w, flat.begin() + (i + 1) * w));
  return out;
}

ExactVector unit(const BasisPtr& basis, std::size_t d, std::size_t i) {
  RationalVector v(d, Rational(0));
  v[i] = 1;
  return to_exact(basis, v);
}

std::vector<ExactVector> identity_basis(const BasisPtr& basis, std::size_t d) {
  std::vector<ExactVector> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(unit(basis, d, i));
  return out;
}

// Primitive integer vector, first nonzero entry positive.
RationalVector primitive(RationalVector v) {
  Integer l = lcm_of_denominators({v});
  Integer g = 0;
  for (auto& q : v) {
    q *= l;
    q.canonicalize();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), q.get_num_mpz_t());
  }
  if (g == 0) return v;
  int s = 0;
  for (const auto& q : v)
    if (q != 0) {
      s = sgn(q);
      break;
    }
  for (auto& q : v) {
    q /= g;
    if (s < 0) q = -q;
  }
  return v;
}

IntegerVector to_integers(const RationalVector& v) {
  IntegerVector out;
  for (const auto& q : v) {
    if (q.get_den() != 1) throw PreconditionError("expected an integer vector");
    out.push_back(q.get_num());
  }
  return out;
}

RationalVector to_rationals(const IntegerVector& v) {
  RationalVector out;
  for (const auto& z : v) out.emplace_back(z);
  return out;
}

ExtendedRational abs_value(const ExtendedRational& x) { return sign(x) < 0 ? -x : x; }

// ---------------------------------------------------------------------------
// Closure of a finite list of scalars.

struct ScalarClosure {
  bool empty = true;
  bool dense = false;
  std::optional<ExtendedRational> g;
  std::optional<std::pair<ExtendedRational, ExtendedRational>> pair;
};

ScalarClosure scalar_closure(const std::vector<ExtendedRational>& values) {
  std::vector<ExtendedRational> pos;
  for (const auto& v : values)
    if (!v.is_zero()) pos.push_back(abs_value(v));
  ScalarClosure out;
  if (pos.empty()) return out;
  out.empty = false;
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return compare(a, b) < 0; });
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  const ExtendedRational& a = pos.front();
  Rational ratio = 1;
  for (std::size_t i = 1; i < pos.size(); ++i) {
    auto r = rational_ratio(a, pos[i]);
    if (!r) {
      out.dense = true;
      out.pair = std::make_pair(a, pos[i]);
      return out;
    }
    ratio = rational_gcd(ratio, *r);
  }
  out.g = a * ratio;
  return out;
}

// ---------------------------------------------------------------------------
// Exact engine for groups generated by finitely many vectors and lines.

struct Engine {
  std::vector<ExactVector> V;
  std::vector<ExactVector> L;
  std::string route;
  std::string detail;
  std::vector<std::string> witnesses;
};

RationalMatrix projection_coordinates(const RationalMatrix& cols) {
  // (B^T B)^{-1} B^T for a full-column-rank B.
  RationalMatrix bt = cols.transpose();
  return inverse(bt * cols) * bt;
}

std::optional<Engine> engine(const BasisPtr& basis, std::vector<ExactVector> lines, std::vector<ExactVector> gens,
                             std::size_t d, std::string& why) {
  Engine out;
  std::erase_if(gens, [](const ExactVector& v) { return is_zero(v); });
  std::erase_if(lines, [](const ExactVector& v) { return is_zero(v); });
  if (d == 0 || (gens.empty() && lines.empty())) {
    out.route = "trivial";
    return out;
  }

  if (!lines.empty()) {
    std::vector<RationalVector> dirs;
    for (const auto& l : lines) {
      auto r = rational_direction(l);
      if (!r) {
        why = "line direction " + to_string(l) + " is not a rational direction";
        return std::nullopt;
      }
      dirs.push_back(*r);
    }
    RationalMatrix m = RationalMatrix::from_rows(dirs, d);
    auto ech = reduced_row_echelon(m);
    const std::size_t k = ech.pivot_columns.size();
    for (std::size_t i = 0; i < k; ++i) out.V.push_back(to_exact(basis, ech.reduced.row(i)));
    if (k == d) {
      out.route = "lines";
      return out;
    }
    RationalMatrix p = RationalMatrix::from_rows(nullspace(m), d);
    std::vector<ExactVector> projected;
    for (const auto& g : gens) projected.push_back(liouville::apply(p, g));
    auto sub = engine(basis, {}, projected, d - k, why);
    if (!sub) return std::nullopt;
    RationalMatrix lift = p.transpose() * inverse(p * p.transpose());
    for (const auto& v : sub->V) out.V.push_back(liouville::apply(lift, v));
    for (const auto& l : sub->L) out.L.push_back(liouville::apply(lift, l));
    out.route = sub->route == "trivial" ? "lines" : sub->route;
    out.detail = "quotient by a rational subspace of dimension " + std::to_string(k);
    if (!sub->detail.empty()) out.detail += "; " + sub->detail;
    out.witnesses = sub->witnesses;
    return out;
  }

  if (d == 1) {
    std::vector<ExtendedRational> values;
    for (const auto& g : gens) values.push_back(g[0]);
    auto sc = scalar_closure(values);
    if (sc.dense) {
      out.V.push_back(unit(basis, 1, 0));
      out.route = "irrational_pair";
      out.witnesses.push_back("Q(" + sc.pair->first.to_string() + ", " + sc.pair->second.to_string() + ") = inf");
    } else {
      out.L.push_back({*sc.g});
      out.route = "lattice";
    }
    return out;
  }

  // Rational hull of the generators.
  const std::size_t w = basis->width();
  std::vector<RationalVector> comps;
  for (const auto& g : gens)
    for (std::size_t t = 0; t < w; ++t) {
      auto c = component(g, t);
      if (!all_zero(c)) comps.push_back(std::move(c));
    }
  auto hull = reduced_row_echelon(RationalMatrix::from_rows(comps, d));
  const std::size_t s = hull.pivot_columns.size();
  if (s < d) {
    std::vector<RationalVector> hcols;
    for (std::size_t i = 0; i < s; ++i) hcols.push_back(hull.reduced.row(i));
    RationalMatrix bh = RationalMatrix::from_columns(hcols, d);
    RationalMatrix coords = projection_coordinates(bh);
    std::vector<ExactVector> ys;
    for (const auto& g : gens) ys.push_back(liouville::apply(coords, g));
    auto sub = engine(basis, {}, ys, s, why);
    if (!sub) return std::nullopt;
    for (const auto& v : sub->V) out.V.push_back(liouville::apply(bh, v));
    for (const auto& l : sub->L) out.L.push_back(liouville::apply(bh, l));
    out.route = sub->route;
    out.detail = "generators span a rational subspace of dimension " + std::to_string(s);
    if (!sub->detail.empty()) out.detail += "; " + sub->detail;
    out.witnesses = sub->witnesses;
    return out;
  }

  // All coordinates rational multiples of one number theta.
  {
    std::optional<ExtendedRational> theta;
    for (const auto& x : gens[0])
      if (!x.is_zero()) {
        theta = x;
        break;
      }
    std::vector<RationalVector> qs;
    bool common = true;
    for (const auto& g : gens) {
      RationalVector q;
      for (const auto& x : g) {
        auto r = rational_ratio(*theta, x);
        if (!r) {
          common = false;
          break;
        }
        q.push_back(*r);
      }
      if (!common) break;
      qs.push_back(std::move(q));
    }
    if (common) {
      for (const auto& b : lattice_hnf(qs, d)) {
        ExactVector v;
        for (const auto& q : b) v.push_back(*theta * q);
        out.L.push_back(std::move(v));
      }
      out.route = "lattice";
      if (!theta->is_rational()) out.detail = "all coordinates are rational multiples of " + theta->to_string();
      return out;
    }
  }

  // Torus route: rational generators span a full lattice B Z^d.
  std::vector<RationalVector> rational_gens;
  std::vector<ExactVector> irrational;
  for (const auto& g : gens) {
    if (is_rational(g))
      rational_gens.push_back(rational_part(g));
    else
      irrational.push_back(g);
  }
  if (rational_gens.empty() || rank(RationalMatrix::from_rows(rational_gens, d)) < d) {
    why = "rational generators do not span R^" + std::to_string(d) + " and coordinates mix several constants";
    return std::nullopt;
  }
  auto bcols = lattice_hnf(rational_gens, d);
  RationalMatrix bm = RationalMatrix::from_columns(bcols, d);
  RationalMatrix binv = inverse(bm);
  std::vector<ExactVector> ys;
  for (const auto& g : irrational) ys.push_back(liouville::apply(binv, g));

  // K1 = {k in Z^d : <k, y^(t)> = 0 for every constant t >= 1}.
  std::vector<IntegerVector> rows;
  for (const auto& y : ys)
    for (std::size_t t = 1; t < w; ++t) {
      auto c = component(y, t);
      if (all_zero(c)) continue;
      Integer l = lcm_of_denominators({c});
      IntegerVector row;
      for (const auto& q : c) row.push_back(Integer(q * l));
      rows.push_back(std::move(row));
    }
  std::vector<IntegerVector> kcols(d, IntegerVector(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t i = 0; i < d; ++i) kcols[i][r] = rows[r][i];
  std::vector<IntegerVector> W = integer_kernel(kcols, rows.size());
  if (W.empty()) {
    out.V = identity_basis(basis, d);
    out.route = "kronecker";
    out.witnesses.push_back("integer annihilator of the generators is {0}");
    return out;
  }
  // Within K1, <k, y^(0)> must be an integer: k = W m with <m, c_j> in Z.
  const std::size_t r1 = W.size(), J = ys.size();
  std::vector<RationalVector> cs(J, RationalVector(r1));
  for (std::size_t j = 0; j < J; ++j) {
    auto y0 = component(ys[j], 0);
    for (std::size_t i = 0; i < r1; ++i) cs[j][i] = dot(to_rationals(W[i]), y0);
  }
  Integer D = lcm_of_denominators(cs);
  std::vector<IntegerVector> cong;
  for (std::size_t i = 0; i < r1; ++i) {
    IntegerVector col(J);
    for (std::size_t j = 0; j < J; ++j) col[j] = Integer(cs[j][i] * D);
    cong.push_back(std::move(col));
  }
  for (std::size_t j = 0; j < J; ++j) {
    IntegerVector col(J, Integer(0));
    col[j] = -D;
    cong.push_back(std::move(col));
  }
  std::vector<RationalVector> mparts;
  for (const auto& v : integer_kernel(cong, J)) mparts.push_back(to_rationals(IntegerVector(v.begin(), v.begin() + r1)));
  auto mbasis = lattice_hnf(mparts, r1);
  std::vector<RationalVector> K;
  for (const auto& m : mbasis) {
    RationalVector k(d, Rational(0));
    for (std::size_t i = 0; i < r1; ++i)
      for (std::size_t t = 0; t < d; ++t) k[t] += m[i] * W[i][t];
    K.push_back(std::move(k));
  }
  RationalMatrix kmat = RationalMatrix::from_rows(K, d);
  RationalMatrix dual = kmat.transpose() * inverse(kmat * kmat.transpose());
  for (const auto& v : nullspace(kmat)) out.V.push_back(to_exact(basis, bm * v));
  for (std::size_t l = 0; l < K.size(); ++l) out.L.push_back(to_exact(basis, bm * dual.column(l)));
  out.route = "torus";
  out.witnesses.push_back("integer annihilator has rank " + std::to_string(K.size()));
  for (const auto& k : K) out.witnesses.push_back("annihilator row " + to_string(k));
  return out;
}

std::vector<RationalVector> rational_basis(const std::vector<ExactVector>& V) {
  std::vector<RationalVector> out;
  for (const auto& v : V) {
    if (!is_rational(v)) throw PreconditionError("orthogonalize: V must have rational coordinates");
    out.push_back(rational_part(v));
  }
  return out;
}

// Orthogonal projection onto span(V) for rational V.
struct Projector {
  std::size_t d = 0;
  bool empty = true;
  RationalMatrix vm, coords;

  Projector(const std::vector<ExactVector>& V, std::size_t dim) : d(dim) {
    if (V.empty()) return;
    empty = false;
    vm = RationalMatrix::from_columns(rational_basis(V), d);
    coords = projection_coordinates(vm);
  }

  ExactVector project(const ExactVector& x) const { return liouville::apply(vm, liouville::apply(coords, x)); }
  ExactVector residual(const ExactVector& x) const { return empty ? x : x - project(x); }
};

void sort_witnesses_unique(std::vector<std::string>& w) {
  std::vector<std::string> out;
  for (auto& s : w)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  w = std::move(out);
}

}  // namespace

std::string provenance_name(Provenance p) { return p == Provenance::kExact ? "exact" : "numerical-probe"; }

// ---------------------------------------------------------------------------
// Lattices

std::vector<RationalVector> lattice_hnf(const std::vector<RationalVector>& generators, std::size_t d) {
  if (generators.empty()) return {};
  Integer l = lcm_of_denominators(generators);
  std::vector<IntegerVector> cols;
  for (const auto& g : generators) {
    if (g.size() != d) throw PreconditionError("lattice_hnf: dimension mismatch");
    IntegerVector c;
    for (const auto& q : g) c.push_back(Integer(q * l));
    cols.push_back(std::move(c));
  }
  auto h = column_hermite(cols, d);
  std::vector<RationalVector> out;
  for (const auto& b : h.basis) {
    RationalVector v;
    for (const auto& z : b) {
      Rational q(z, l);
      q.canonicalize();
      v.push_back(q);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ExactVector> lattice_hnf(const std::vector<ExactVector>& generators) {
  if (generators.empty()) return {};
  std::vector<RationalVector> qs;
  for (const auto& g : generators) {
    if (!is_rational(g)) throw PreconditionError("lattice_hnf: non-rational coordinate in " + to_string(g));
    qs.push_back(rational_part(g));
  }
  const BasisPtr& b = generators.front().front().basis();
  std::vector<ExactVector> out;
  for (const auto& v : lattice_hnf(qs, generators.front().size())) out.push_back(to_exact(b, v));
  return out;
}

std::vector<ExactVector> canonical_lattice(const std::vector<ExactVector>& lattice, std::size_t d) {
  if (lattice.empty()) return {};
  const BasisPtr& b = lattice.front().front().basis();
  std::vector<RationalVector> flat;
  for (const auto& v : lattice) flat.push_back(flatten(v));
  std::vector<ExactVector> out;
  for (const auto& v : lattice_hnf(flat, d * b->width())) out.push_back(unflatten(b, v, d));
  return out;
}

KroneckerResult kronecker_check(const ExactVector& c) {
  KroneckerResult out;
  if (c.empty()) throw PreconditionError("kronecker_check: empty vector");
  const BasisPtr& b = c.front().basis();
  const std::size_t w = b->width(), d = c.size();
  std::vector<RationalVector> rows;
  RationalVector one(w, Rational(0));
  one[0] = 1;
  rows.push_back(one);
  for (const auto& x : c) rows.emplace_back(x.coords().begin(), x.coords().end());
  RationalMatrix m = RationalMatrix::from_rows(rows, w);
  out.rank = rank(m);
  out.dense = out.rank == d + 1;
  if (!out.dense) {
    auto ns = nullspace(m.transpose());
    out.dependency = to_integers(primitive(ns.front()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closures

ClosedSubgroup closure_1d(const SupportDescriptor& support) {
  if (support.dimension != 1) throw PreconditionError("closure_1d: dimension must be 1");
  ClosedSubgroup out;
  out.dimension = 1;
  out.basis = support.basis;
  out.orthogonal = true;
  auto dense = [&](std::string route, std::string detail) {
    out.V_basis = {unit(support.basis, 1, 0)};
    out.route = std::move(route);
    out.detail = std::move(detail);
    return out;
  };
  if (support.contains_interval_or_ball) return dense("interval_or_ball", "support contains an interval");
  if (support.has_accumulation_point) {
    std::string where = support.accumulation_points.empty()
                            ? std::string("a Cantor-type part")
                            : "accumulation point " + to_string(support.accumulation_points.back());
    return dense("accumulation", "support has " + where);
  }
  for (const auto& g : support.sequence_groups)
    if (g.dense) {
      out.witnesses.push_back("sequence " + std::to_string(g.sequence) + ": " + g.reason);
      return dense("unbounded_q_sequence", g.reason);
    }
  std::vector<ExtendedRational> values;
  for (const auto& p : support.finite_points) values.push_back(p[0]);
  for (const auto& g : support.sequence_groups)
    if (g.generator) values.push_back((*g.generator)[0]);
  for (const auto& a : support.affine_pieces) values.push_back(a.offset[0]);
  auto sc = scalar_closure(values);
  if (sc.empty) {
    out.route = "trivial";
    out.detail = "empty support generates {0}";
    return out;
  }
  if (sc.dense) {
    out.irrational_pair = sc.pair;
    out.witnesses.push_back("Q(" + sc.pair->first.to_string() + ", " + sc.pair->second.to_string() + ") = inf");
    return dense("irrational_pair", sc.pair->second.to_string() + " / " + sc.pair->first.to_string() + " is irrational");
  }
  out.Lambda_basis = {{*sc.g}};
  out.route = "lattice";
  out.detail = "support lies in g Z with g = " + sc.g->to_string();
  return out;
}

ClosedSubgroup closure_multid(const SupportDescriptor& support, const ClosureConfig& cfg) {
  const std::size_t d = support.dimension;
  if (d == 1) return closure_1d(support);
  ClosedSubgroup out;
  out.dimension = d;
  out.basis = support.basis;
  if (support.contains_interval_or_ball || support.sphere_radius) {
    out.V_basis = identity_basis(support.basis, d);
    out.orthogonal = true;
    out.route = "interval_or_ball";
    out.detail = support.contains_interval_or_ball ? "support contains a ball"
                                                   : "support contains a sphere, whose difference set contains a ball";
    return out;
  }

  std::vector<ExactVector> lines, gens;
  bool accumulating = false, q_unbounded = false;
  for (const auto& g : support.sequence_groups) {
    if (g.dense) {
      lines.push_back(g.direction);
      (g.reason == "accumulation" ? accumulating : q_unbounded) = true;
      out.witnesses.push_back("sequence " + std::to_string(g.sequence) + " fills the line R*" + to_string(g.direction) +
                              ": " + g.reason);
    } else if (g.generator) {
      gens.push_back(*g.generator);
    }
  }
  for (const auto& a : support.affine_pieces) {
    for (const auto& b : a.basis) lines.push_back(b);
    if (!is_zero(a.offset)) gens.push_back(a.offset);
  }
  for (const auto& p : support.finite_points) gens.push_back(p);

  auto finish = [&](std::vector<ExactVector> V, std::vector<ExactVector> L) {
    out.V_basis = std::move(V);
    out.Lambda_basis = std::move(L);
    out = orthogonalize(out);
    sort_witnesses_unique(out.witnesses);
    return out;
  };

  if (lines.empty() && gens.empty()) {
    out.route = "trivial";
    out.detail = "empty support generates {0}";
    out.orthogonal = true;
    return out;
  }
  if (lines.empty() && std::all_of(gens.begin(), gens.end(), [](const auto& g) { return is_rational(g); })) {
    out.route = "lattice";
    out.detail = "all support points are rational; Hermite normal form basis";
    return finish({}, lattice_hnf(gens));
  }

  // Product structure: every generator and line on a coordinate axis.
  auto axis_of = [&](const ExactVector& v) -> std::optional<std::size_t> {
    std::optional<std::size_t> axis;
    for (std::size_t i = 0; i < d; ++i)
      if (!v[i].is_zero()) {
        if (axis) return std::nullopt;
        axis = i;
      }
    return axis;
  };
  bool product = true;
  for (const auto& v : lines) product = product && axis_of(v).has_value();
  for (const auto& v : gens) product = product && axis_of(v).has_value();
  if (product) {
    std::vector<std::vector<ExtendedRational>> scalars(d);
    std::vector<bool> line_axis(d, false);
    for (const auto& v : lines) line_axis[*axis_of(v)] = true;
    for (const auto& v : gens) {
      auto i = *axis_of(v);
      scalars[i].push_back(v[i]);
    }
    std::vector<ExactVector> V, L;
    for (std::size_t i = 0; i < d; ++i) {
      std::string axis = "axis " + std::to_string(i + 1) + ": ";
      if (line_axis[i]) {
        V.push_back(unit(support.basis, d, i));
        out.witnesses.push_back(axis + "contains a line");
        continue;
      }
      auto sc = scalar_closure(scalars[i]);
      if (sc.empty) {
        out.witnesses.push_back(axis + "empty");
      } else if (sc.dense) {
        V.push_back(unit(support.basis, d, i));
        out.witnesses.push_back(axis + "Q(" + sc.pair->first.to_string() + ", " + sc.pair->second.to_string() +
                                ") = inf");
      } else {
        ExactVector l = zero_vector(support.basis, d);
        l[i] = *sc.g;
        L.push_back(std::move(l));
        out.witnesses.push_back(axis + "g = " + sc.g->to_string());
      }
    }
    out.route = support.affine_pieces.empty() ? "product" : "affine";
    out.detail = "support is a union of coordinate-axis sets; per-axis closures";
    if (V.size() == d) out.route = accumulating ? "accumulation" : q_unbounded ? "unbounded_q_sequence" : "kronecker";
    return finish(std::move(V), std::move(L));
  }

  std::string why;
  auto e = engine(support.basis, lines, gens, d, why);
  if (e) {
    out.detail = e->detail;
    out.witnesses.insert(out.witnesses.end(), e->witnesses.begin(), e->witnesses.end());
    if (e->V.size() == d) {
      out.route = accumulating ? "accumulation"
                  : q_unbounded ? "unbounded_q_sequence"
                  : e->route == "lines" ? "interval_or_ball"
                                        : "kronecker";
      if (e->route == "lines" && !support.affine_pieces.empty() && !accumulating && !q_unbounded)
        out.detail = "affine pieces span R^" + std::to_string(d);
    } else {
      out.route = !support.affine_pieces.empty() ? "affine" : e->route == "lines" ? "torus" : e->route;
    }
    return finish(std::move(e->V), std::move(e->L));
  }

  out.provenance = Provenance::kNumericalProbe;
  out.route = "probe";
  out.detail = why;
  std::vector<ExactVector> pts = support.all_points();
  for (const auto& g : gens) pts.push_back(g), pts.push_back(-g);
  for (const auto& l : lines) pts.push_back(l), pts.push_back(-l);
  std::sort(pts.begin(), pts.end(), exact_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  out.probe = density_probe(pts, d, cfg.probe);
  out.detail += "; probe: " + probe_kind_name(out.probe->kind);
  return out;
}

ClosedSubgroup orthogonalize(const ClosedSubgroup& closure) {
  ClosedSubgroup out = closure;
  const std::size_t d = closure.dimension;
  if (!closure.V_basis.empty()) {
    auto ech = reduced_row_echelon(RationalMatrix::from_rows(rational_basis(closure.V_basis), d));
    out.V_basis.clear();
    for (std::size_t i = 0; i < ech.pivot_columns.size(); ++i) out.V_basis.push_back(to_exact(closure.basis, ech.reduced.row(i)));
  }
  Projector proj(out.V_basis, d);
  std::vector<ExactVector> lt;
  for (const auto& l : closure.Lambda_basis) lt.push_back(proj.residual(l));
  std::erase_if(lt, [](const ExactVector& v) { return is_zero(v); });
  out.Lambda_basis = canonical_lattice(lt, d);
  out.orthogonal = true;
  return out;
}

// ---------------------------------------------------------------------------
// Certificates

HyperplaneCertificate build_certificate(const ClosedSubgroup& closure) {
  if (!closure.certified()) throw PreconditionError("build_certificate: closure is not certified");
  if (closure.dense()) throw PreconditionError("build_certificate: closure is dense; no hyperplane exists");
  if (!closure.orthogonal) throw PreconditionError("build_certificate: closure must be orthogonalized");
  const std::size_t d = closure.dimension;
  const BasisPtr& b = closure.basis;
  std::vector<RationalVector> vrows = rational_basis(closure.V_basis);
  std::vector<RationalVector> ldirs;
  for (const auto& l : closure.Lambda_basis) {
    auto r = rational_direction(l);
    if (!r) throw PreconditionError("build_certificate: lattice vector " + to_string(l) + " has no rational direction");
    ldirs.push_back(*r);
  }
  HyperplaneCertificate cert;
  auto finish = [&](RationalVector n, ExactVector c) {
    cert.normal = std::move(n);
    cert.c = std::move(c);
    cert.period = dot(cert.normal, cert.c);
    cert.H_basis = nullspace(RationalMatrix::from_rows({cert.normal}, d));
    return cert;
  };
  auto normal_of = [&](const std::vector<RationalVector>& rows) {
    if (rows.empty()) {
      RationalVector e(d, Rational(0));
      e[0] = 1;
      return e;
    }
    return primitive(nullspace(RationalMatrix::from_rows(rows, d)).front());
  };

  if (vrows.size() + ldirs.size() < d) {
    std::vector<RationalVector> rows = vrows;
    rows.insert(rows.end(), ldirs.begin(), ldirs.end());
    RationalVector n = normal_of(rows);
    Rational n2 = dot(n, n);
    RationalVector c = n;
    for (auto& q : c) q /= n2;
    return finish(n, to_exact(b, c));
  }
  std::optional<std::size_t> best;
  double best_len = kInf;
  std::vector<RationalVector> normals;
  for (std::size_t i = 0; i < ldirs.size(); ++i) {
    std::vector<RationalVector> rows = vrows;
    for (std::size_t j = 0; j < ldirs.size(); ++j)
      if (j != i) rows.push_back(ldirs[j]);
    normals.push_back(normal_of(rows));
    const auto& n = normals.back();
    ExtendedRational p = dot(n, closure.Lambda_basis[i]);
    double len = std::abs(p.to_double()) / std::sqrt(dot(n, n).get_d());
    if (len < best_len * (1 - 1e-12)) {
      best_len = len;
      best = i;
    }
  }
  const auto& n = normals[*best];
  ExtendedRational p = dot(n, closure.Lambda_basis[*best]);
  Rational n2 = dot(n, n);
  ExactVector c;
  for (const auto& q : n) c.push_back(p * (q / n2));
  return finish(n, c);
}

CertificateCheck verify_certificate(const HyperplaneCertificate& cert, const SupportDescriptor& support) {
  CertificateCheck out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.failure = std::move(msg);
    return out;
  };
  if (cert.period.is_zero()) return fail("c lies in H");
  if (support.contains_interval_or_ball) return fail("support contains an interval or ball");
  if (support.sphere_radius) return fail("support contains a sphere");
  if (support.dimension == 1 && support.has_accumulation_point) return fail("support has an accumulation point");
  auto in_coset = [&](const ExactVector& x) {
    auto r = rational_ratio(cert.period, dot(cert.normal, x));
    return r && r->get_den() == 1;
  };
  for (const auto& x : support.all_points()) {
    ++out.points_checked;
    if (!in_coset(x)) return fail("point " + to_string(x) + " is not in H + cZ");
  }
  for (const auto& g : support.sequence_groups) {
    if (g.dense) {
      if (!dot(cert.normal, g.direction).is_zero())
        return fail("sequence " + std::to_string(g.sequence) + " fills a line transverse to H");
    } else if (g.generator && !in_coset(*g.generator)) {
      return fail("sequence " + std::to_string(g.sequence) + " generator is not in H + cZ");
    }
  }
  for (const auto& a : support.affine_pieces) {
    for (const auto& b : a.basis)
      if (!dot(cert.normal, b).is_zero()) return fail("affine piece direction " + to_string(b) + " leaves H");
    if (!in_coset(a.offset)) return fail("affine piece offset " + to_string(a.offset) + " is not in H + cZ");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition

std::optional<IntegerVector> coset_of(const ClosedSubgroup& closure, const ExactVector& x) {
  if (!closure.orthogonal) throw PreconditionError("coset_of: closure must be orthogonalized");
  Projector proj(closure.V_basis, closure.dimension);
  ExactVector y = proj.residual(x);
  if (closure.Lambda_basis.empty()) {
    if (!is_zero(y)) return std::nullopt;
    return IntegerVector{};
  }
  auto c = solve_rational_combination(closure.Lambda_basis, y);
  if (!c) return std::nullopt;
  IntegerVector z;
  for (const auto& q : *c) {
    if (q.get_den() != 1) return std::nullopt;
    z.push_back(q.get_num());
  }
  return z;
}

const DecompositionPart* Decomposition::part(const IntegerVector& coset) const {
  for (const auto& p : parts)
    if (p.coset == coset) return &p;
  return nullptr;
}

Decomposition decompose_measure(const LevyMeasure& mu, const ClosedSubgroup& input) {
  using K = ContinuousPart::Kind;
  if (!input.certified()) throw PreconditionError("decompose_measure: closure is not certified");
  if (input.dense()) throw PreconditionError("decompose_measure: closure is dense; Liouville holds");
  ClosedSubgroup closure = input.orthogonal ? input : orthogonalize(input);
  const std::size_t d = mu.dimension;
  const BasisPtr& basis = mu.basis;
  Projector proj(closure.V_basis, d);

  std::map<IntegerVector, DecompositionPart> parts;
  auto part_for = [&](const ExactVector& x, const std::string& what) -> DecompositionPart& {
    auto z = coset_of(closure, x);
    if (!z) throw PreconditionError("decompose_measure: " + what + " " + to_string(x) + " is not in any coset V + a");
    auto it = parts.find(*z);
    if (it == parts.end()) {
      DecompositionPart p;
      p.coset = *z;
      p.a = zero_vector(basis, d);
      for (std::size_t i = 0; i < z->size(); ++i) p.a = p.a + scale(closure.Lambda_basis[i], Rational((*z)[i]));
      it = parts.emplace(*z, std::move(p)).first;
    }
    return it->second;
  };

  for (const auto& a : mu.atoms) {
    auto& p = part_for(a.point, "atom");
    p.atoms.push_back(a);
    p.mass += a.weight.to_double();
  }
  for (const auto& s : mu.sequences)
    for (std::uint64_t n = 1; n <= s.truncation; ++n) {
      ExactVector x = s.point(n);
      Monomial w(basis, s.weight(n));
      for (const ExactVector& y : {x, ExactVector(-x)}) {
        auto& p = part_for(y, "sequence point");
        p.atoms.push_back({y, w});
        p.mass += w.to_double();
      }
    }
  for (std::size_t i = 0; i < mu.continuous.size(); ++i) {
    const auto& c = mu.continuous[i];
    if (c.kind != K::kAffine || c.affine_basis.size() == d)
      throw PreconditionError("decompose_measure: continuous part '" + kind_name(c.kind) +
                              "' does not lie in a coset of a proper subgroup");
    for (const auto& b : c.affine_basis)
      if (!is_zero(proj.residual(b)))
        throw PreconditionError("decompose_measure: affine piece direction " + to_string(b) + " is not in V");
    auto& p = part_for(c.offset, "affine piece offset");
    p.continuous.push_back(i);
    p.mass += c.profile == ProfileKind::kFractional ? kInf : c.mass.get_d();
  }

  Decomposition out;
  out.V_basis = closure.V_basis;
  out.Lambda_basis = closure.Lambda_basis;
  out.epsilon_star = kInf;
  for (auto& [z, p] : parts) {
    std::sort(p.atoms.begin(), p.atoms.end(), [](const Atom& a, const Atom& b) { return exact_less(a.point, b.point); });
    bool zero = std::all_of(z.begin(), z.end(), [](const Integer& v) { return v == 0; });
    if (!zero) {
      out.epsilon_star = std::min(out.epsilon_star, norm(p.a));
      out.off_zero_mass += p.mass;
    }
    out.parts.push_back(p);
  }
  if (out.epsilon_star == 0) throw PreconditionError("decompose_measure: epsilon_* = 0");

  // mu_a(.) = mu_{-a}(-.) on atoms.
  for (const auto& p : out.parts) {
    IntegerVector neg;
    for (const auto& v : p.coset) neg.push_back(-v);
    const DecompositionPart* q = out.part(neg);
    if (!q || q->atoms.size() != p.atoms.size()) {
      out.levy_symmetric = false;
      continue;
    }
    for (const auto& a : p.atoms) {
      ExactVector m = -a.point;
      bool found = std::any_of(q->atoms.begin(), q->atoms.end(),
                               [&](const Atom& b) { return b.point == m && b.weight == a.weight; });
      if (!found) out.levy_symmetric = false;
    }
  }

  // Sequence terms beyond N: each lies at distance >= eps from V unless it
  // is in V; (|a|^2 ^ 1) w >= min(1, eps^2) w bounds their mass.
  if (!mu.sequences.empty() && !closure.Lambda_basis.empty()) {
    // Shortest nonzero vector of the lattice is at least 1/sqrt(tr G^-1).
    const std::size_t r = closure.Lambda_basis.size();
    std::vector<std::vector<double>> g(r, std::vector<double>(r));
    std::vector<std::vector<double>> lv;
    for (const auto& l : closure.Lambda_basis) lv.push_back(to_doubles(l));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        double s = 0;
        for (std::size_t t = 0; t < d; ++t) s += lv[i][t] * lv[j][t];
        g[i][j] = s;
      }
    // Invert by Gauss-Jordan to get the trace of G^-1.
    std::vector<std::vector<double>> inv(r, std::vector<double>(r, 0.0));
    for (std::size_t i = 0; i < r; ++i) inv[i][i] = 1;
    for (std::size_t i = 0; i < r; ++i) {
      std::size_t piv = i;
      for (std::size_t j = i + 1; j < r; ++j)
        if (std::abs(g[j][i]) > std::abs(g[piv][i])) piv = j;
      std::swap(g[i], g[piv]);
      std::swap(inv[i], inv[piv]);
      double f = g[i][i];
      for (std::size_t k = 0; k < r; ++k) g[i][k] /= f, inv[i][k] /= f;
      for (std::size_t j = 0; j < r; ++j) {
        if (j == i) continue;
        double m = g[j][i];
        for (std::size_t k = 0; k < r; ++k) g[j][k] -= m * g[i][k], inv[j][k] -= m * inv[i][k];
      }
    }
    double tr = 0;
    for (std::size_t i = 0; i < r; ++i) tr += inv[i][i];
    double eps = 1 / std::sqrt(tr);
    double floor = std::min(1.0, eps * eps);
    for (const auto& s : mu.sequences) {
      auto env = envelope_of(s);
      std::uint64_t M = std::max<std::uint64_t>(s.truncation, env.n1);
      double tail = 0;
      for (std::uint64_t n = s.truncation + 1; n <= M; ++n) tail += levy_term(s, n);
      tail += env.tail(M);
      out.off_zero_tail += 2 * tail / floor;
    }
  }
  return out;
}

}  // namespace liouville
