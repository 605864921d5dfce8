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

#include "liouville/exact_numbers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {
namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// Counts significant digits of a decimal literal and validates its shape:
// [+-]digits[.digits][(e|E)[+-]digits]
int count_significant_digits(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::string mantissa;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa.push_back(c);
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (mantissa.empty()) return -1;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return -1;
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i >= s.size()) return -1;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
  }
  auto first = mantissa.find_first_not_of('0');
  if (first == std::string::npos) return 0;
  return static_cast<int>(mantissa.size() - first);
}

// Tokenizer shared by the linear-expression and monomial grammars.
struct Token {
  enum Kind { kNumber, kName, kOp, kEnd } kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == '.' || s[j] == 'e' || s[j] == 'E'))
        throw InputError("", "floating literal in exact expression '" + std::string(s) +
                                 "'; use p/q rationals");
      out.push_back({Token::kNumber, std::string(s.substr(i, j - i)), i});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::kName, std::string(s.substr(i, j - i)), i});
      i = j;
    } else if (std::string_view("+-*/()^").find(c) != std::string_view::npos) {
      out.push_back({Token::kOp, std::string(1, c), i});
      ++i;
    } else if (c == '.') {
      throw InputError("", "floating literal in exact expression '" + std::string(s) +
                               "'; use p/q rationals");
    } else {
      throw InputError("", std::string("unexpected character '") + c + "' in '" +
                               std::string(s) + "'");
    }
  }
  out.push_back({Token::kEnd, "", s.size()});
  return out;
}

class Cursor {
 public:
  Cursor(std::string_view source, std::vector<Token> tokens)
      : source_(source), tokens_(std::move(tokens)) {}
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }
  bool accept(const char* op) {
    if (peek().kind == Token::kOp && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* op) {
    if (!accept(op)) fail(std::string("expected '") + op + "'");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("", what + " at offset " + std::to_string(peek().pos) + " in '" +
                             std::string(source_) + "'");
  }

 private:
  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

class LinearParser {
 public:
  LinearParser(BasisPtr basis, std::string_view text)
      : basis_(std::move(basis)), cur_(text, tokenize(text)) {}

  ExtendedRational run() {
    auto v = expr();
    if (cur_.peek().kind != Token::kEnd) cur_.fail("unexpected token '" + cur_.peek().text + "'");
    return v;
  }

 private:
  ExtendedRational expr() {
    bool negative = false;
    if (cur_.accept("-")) negative = true;
    else cur_.accept("+");
    auto acc = term();
    if (negative) acc = -acc;
    for (;;) {
      if (cur_.accept("+")) acc += term();
      else if (cur_.accept("-")) acc -= term();
      else return acc;
    }
  }

  ExtendedRational term() {
    auto acc = factor();
    for (;;) {
      if (cur_.accept("*")) {
        auto rhs = factor();
        if (acc.is_rational()) {
          rhs *= acc.rational_part();
          acc = rhs;
        } else if (rhs.is_rational()) {
          acc *= rhs.rational_part();
        } else {
          cur_.fail("product of two irrational constants is not representable");
        }
      } else if (cur_.accept("/")) {
        auto rhs = factor();
        if (!rhs.is_rational()) cur_.fail("division by an irrational constant is not representable");
        if (rhs.rational_part() == 0) cur_.fail("division by zero");
        Rational inv = 1 / rhs.rational_part();
        acc *= inv;
      } else {
        return acc;
      }
    }
  }

  ExtendedRational factor() {
    Token t = cur_.next();
    if (t.kind == Token::kNumber) return ExtendedRational::rational(basis_, Rational(Integer(t.text)));
    if (t.kind == Token::kName) {
      auto idx = basis_->index_of(t.text);
      if (!idx) throw InputError("", "unknown constant '" + t.text + "'");
      return ExtendedRational::constant(basis_, *idx);
    }
    if (t.kind == Token::kOp && t.text == "(") {
      auto v = expr();
      cur_.expect(")");
      return v;
    }
    if (t.kind == Token::kOp && t.text == "-") return -factor();
    cur_.fail("expected a number, a constant or '('");
  }

  BasisPtr basis_;
  Cursor cur_;
};

class MonomialParser {
 public:
  MonomialParser(BasisPtr basis, std::string_view text)
      : basis_(std::move(basis)), cur_(text, tokenize(text)) {}

  Monomial run() {
    auto [c, p] = product();
    if (cur_.peek().kind != Token::kEnd) cur_.fail("unexpected token '" + cur_.peek().text + "'");
    return Monomial(basis_, c, p);
  }

 private:
  using Value = std::pair<Rational, std::vector<int>>;

  Value product() {
    Value acc = factor();
    for (;;) {
      if (cur_.accept("*")) {
        auto rhs = factor();
        acc.first *= rhs.first;
        for (std::size_t i = 0; i < acc.second.size(); ++i) acc.second[i] += rhs.second[i];
      } else if (cur_.accept("/")) {
        auto rhs = factor();
        if (rhs.first == 0) cur_.fail("division by zero");
        acc.first /= rhs.first;
        for (std::size_t i = 0; i < acc.second.size(); ++i) acc.second[i] -= rhs.second[i];
      } else {
        return acc;
      }
    }
  }

  Value factor() {
    Token t = cur_.next();
    Value v{Rational(1), std::vector<int>(basis_->size(), 0)};
    if (t.kind == Token::kNumber) {
      v.first = Rational(Integer(t.text));
    } else if (t.kind == Token::kName) {
      auto idx = basis_->index_of(t.text);
      if (!idx) throw InputError("", "unknown constant '" + t.text + "'");
      int power = 1;
      if (cur_.accept("^")) {
        bool neg = cur_.accept("-");
        Token e = cur_.next();
        if (e.kind != Token::kNumber || e.text.size() > 4) cur_.fail("expected a small integer exponent");
        power = std::stoi(e.text) * (neg ? -1 : 1);
      }
      v.second[*idx - 1] = power;
    } else if (t.kind == Token::kOp && t.text == "(") {
      v = product();
      cur_.expect(")");
    } else {
      cur_.fail("expected a number, a constant or '('");
    }
    return v;
  }

  BasisPtr basis_;
  Cursor cur_;
};

mpf_class mpf_zero(mp_bitcnt_t bits) { return mpf_class(0, bits); }

}  // namespace

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
  auto v = ExtendedRational::parse(ConstantBasis::rational_only(), text);
  return v.rational_part();
}

// ---------------------------------------------------------------------------
// ConstantBasis

std::shared_ptr<const ConstantBasis> ConstantBasis::make(std::vector<Constant> constants,
                                                         bool independence_asserted) {
  std::shared_ptr<ConstantBasis> basis(new ConstantBasis());
  basis->independence_asserted_ = independence_asserted;
  int min_digits = 1000;
  int max_digits = 0;
  for (std::size_t i = 0; i < constants.size(); ++i) {
    const auto& c = constants[i];
    std::string field = "constants[" + std::to_string(i) + "]";
    if (!is_identifier(c.name)) throw InputError(field + ".name", "'" + c.name + "' is not an identifier");
    for (std::size_t j = 0; j < i; ++j)
      if (constants[j].name == c.name) throw InputError(field + ".name", "duplicate constant '" + c.name + "'");
    int digits = count_significant_digits(c.decimal);
    if (digits < 0) throw InputError(field + ".value", "'" + c.decimal + "' is not a decimal literal");
    if (digits < kMinConstantDigits)
      throw InputError(field + ".value", "approximation of '" + c.name + "' has " + std::to_string(digits) +
                                             " significant digits; at least " +
                                             std::to_string(kMinConstantDigits) + " are required");
    min_digits = std::min(min_digits, digits);
    max_digits = std::max(max_digits, digits);
  }
  basis->digits_ = constants.empty() ? 1000 : min_digits;
  basis->bits_ = std::max<mp_bitcnt_t>(256, static_cast<mp_bitcnt_t>(max_digits * 3.33) + 64);
  basis->values_.push_back(mpf_class(1, basis->bits_));
  for (std::size_t i = 0; i < constants.size(); ++i) {
    mpf_class v(0, basis->bits_);
    std::string lit = constants[i].decimal;
    if (!lit.empty() && lit[0] == '+') lit.erase(0, 1);
    if (v.set_str(lit, 10) != 0)
      throw InputError("constants[" + std::to_string(i) + "].value", "cannot parse '" + lit + "'");
    if (v == 0) throw InputError("constants[" + std::to_string(i) + "].value", "constant must be nonzero");
    for (std::size_t j = 0; j < basis->values_.size(); ++j) {
      if (j > 0 && basis->values_[j] == v)
        throw InputError("constants[" + std::to_string(i) + "].value",
                         "approximation coincides with constant '" + constants[j - 1].name + "'");
    }
    basis->values_.push_back(v);
  }
  basis->constants_ = std::move(constants);
  return basis;
}

std::shared_ptr<const ConstantBasis> ConstantBasis::rational_only() {
  static const auto kBasis = make({}, true);
  return kBasis;
}

std::optional<std::size_t> ConstantBasis::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < constants_.size(); ++i)
    if (constants_[i].name == name) return i + 1;
  return std::nullopt;
}

double ConstantBasis::resolution() const noexcept { return std::pow(10.0, -(digits_ - 2)); }

bool ConstantBasis::operator==(const ConstantBasis& other) const {
  if (constants_.size() != other.constants_.size()) return false;
  for (std::size_t i = 0; i < constants_.size(); ++i) {
    if (constants_[i].name != other.constants_[i].name) return false;
    if (values_[i + 1] != other.values_[i + 1]) return false;
  }
  return true;
}

bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  return a == b || (a && b && *a == *b);
}

// ---------------------------------------------------------------------------
// ExtendedRational

ExtendedRational::ExtendedRational(BasisPtr basis)
    : basis_(std::move(basis)), coords_(basis_->width(), Rational(0)) {}

ExtendedRational::ExtendedRational(BasisPtr basis, std::vector<Rational> coords)
    : basis_(std::move(basis)), coords_(std::move(coords)) {
  if (coords_.size() != basis_->width())
    throw PreconditionError("coordinate vector length does not match the constant basis");
  for (auto& c : coords_) c.canonicalize();
}

ExtendedRational ExtendedRational::rational(BasisPtr basis, const Rational& value) {
  ExtendedRational x(std::move(basis));
  x.coords_[0] = value;
  return x;
}

ExtendedRational ExtendedRational::constant(BasisPtr basis, std::size_t index,
                                            const Rational& coefficient) {
  ExtendedRational x(std::move(basis));
  x.coords_.at(index) = coefficient;
  return x;
}

ExtendedRational ExtendedRational::parse(BasisPtr basis, std::string_view text) {
  return LinearParser(std::move(basis), text).run();
}

bool ExtendedRational::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rational& q) { return q == 0; });
}

bool ExtendedRational::is_rational() const {
  return std::all_of(coords_.begin() + 1, coords_.end(), [](const Rational& q) { return q == 0; });
}

mpf_class ExtendedRational::approximate() const {
  mpf_class sum = mpf_zero(basis_->precision_bits());
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (coords_[k] == 0) continue;
    mpf_class q(coords_[k], basis_->precision_bits());
    sum += q * basis_->element(k);
  }
  return sum;
}

double ExtendedRational::to_double() const {
  if (is_rational()) return coords_[0].get_d();
  return approximate().get_d();
}

std::string ExtendedRational::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    Rational c = coords_[k];
    if (c == 0) continue;
    bool negative = c < 0;
    if (negative) c = -c;
    if (first) out << (negative ? "-" : "");
    else out << (negative ? " - " : " + ");
    first = false;
    if (k == 0) {
      out << c.get_str();
    } else {
      const auto& name = basis_->constant(k - 1).name;
      if (c == 1) out << name;
      else out << c.get_str() << "*" << name;
    }
  }
  return first ? "0" : out.str();
}

void ExtendedRational::require_same_basis(const ExtendedRational& other) const {
  if (!same_basis(basis_, other.basis_))
    throw PreconditionError("operands are expressed over different constant bases");
}

ExtendedRational ExtendedRational::operator-() const {
  ExtendedRational r = *this;
  for (auto& c : r.coords_) c = -c;
  return r;
}

ExtendedRational& ExtendedRational::operator+=(const ExtendedRational& other) {
  require_same_basis(other);
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] += other.coords_[k];
  return *this;
}

ExtendedRational& ExtendedRational::operator-=(const ExtendedRational& other) {
  require_same_basis(other);
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] -= other.coords_[k];
  return *this;
}

ExtendedRational& ExtendedRational::operator*=(const Rational& factor) {
  for (auto& c : coords_) c *= factor;
  return *this;
}

bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
  a.require_same_basis(b);
  return a.coords_ == b.coords_;
}

ExtendedRational add(const ExtendedRational& x, const ExtendedRational& y) { return x + y; }
ExtendedRational sub(const ExtendedRational& x, const ExtendedRational& y) { return x - y; }
ExtendedRational negate(const ExtendedRational& x) { return -x; }
ExtendedRational scale_by_rational(const ExtendedRational& x, const Rational& factor) {
  return x * factor;
}

int sign(const ExtendedRational& x) {
  if (x.is_zero()) return 0;
  if (x.is_rational()) return sgn(x.rational_part());
  mpf_class v = x.approximate();
  // Magnitude of the terms bounds the cancellation error.
  mpf_class scale = mpf_zero(x.basis()->precision_bits());
  for (std::size_t k = 0; k < x.coords().size(); ++k) {
    mpf_class q(abs(x.coord(k)), x.basis()->precision_bits());
    scale += q * abs(x.basis()->element(k));
  }
  if (abs(v) <= scale * x.basis()->resolution())
    throw NumericalError("sign of " + x.to_string() +
                         " cannot be resolved at the declared precision of the constants");
  return sgn(v);
}

int compare(const ExtendedRational& a, const ExtendedRational& b) { return sign(a - b); }

std::optional<Rational> rational_ratio(const ExtendedRational& a, const ExtendedRational& b) {
  if (!same_basis(a.basis(), b.basis()))
    throw PreconditionError("operands are expressed over different constant bases");
  if (a.is_zero()) throw PreconditionError("rational_ratio: a must be nonzero");
  std::size_t k = 0;
  while (a.coord(k) == 0) ++k;
  Rational r = b.coord(k) / a.coord(k);
  for (std::size_t j = 0; j < a.coords().size(); ++j)
    if (b.coord(j) != r * a.coord(j)) return std::nullopt;
  return r;
}

std::string QValue::to_string() const {
  if (!finite) return "inf";
  return "p=" + p.get_str() + ",q=" + q.get_str();
}

QValue q_of(const ExtendedRational& a, const ExtendedRational& b) {
  if (a.is_zero() || b.is_zero()) throw PreconditionError("q_of: arguments must be nonzero");
  auto r = rational_ratio(a, b);
  if (!r) return QValue::infinite();
  return QValue{true, r->get_num(), r->get_den()};
}

Rational rational_gcd(const Rational& x, const Rational& y) {
  if (x < 0 || y < 0) throw PreconditionError("rational_gcd: arguments must be nonnegative");
  if (x == 0 && y == 0) throw PreconditionError("rational_gcd: arguments must not both be zero");
  if (y == 0) return x;
  if (x == 0) return y;
  Integer num;
  Integer a = x.get_num() * y.get_den();
  Integer b = y.get_num() * x.get_den();
  mpz_gcd(num.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Rational g(num, x.get_den() * y.get_den());
  g.canonicalize();
  return g;
}

DensityWitness density_witness(const ExtendedRational& a, const ExtendedRational& b, double eps,
                               std::uint64_t cap) {
  if (!(eps > 0)) throw PreconditionError("density_witness: eps must be positive");
  if (sign(a) <= 0 || sign(b) <= 0) throw PreconditionError("density_witness: a and b must be positive");
  if (rational_ratio(a, b))
    throw PreconditionError("density_witness: b/a is rational, no arbitrarily small witness exists");

  const mp_bitcnt_t bits = a.basis()->precision_bits();
  const mpf_class av = a.approximate();
  const mpf_class bv = b.approximate();
  const double res = a.basis()->resolution();
  const double a_d = av.get_d();
  if (eps <= 16 * res * std::max(a_d, bv.get_d()))
    throw NumericalError("density_witness: eps is below the resolution of the declared constants");

  const mpf_class theta = bv / av;
  auto frac = [&](const mpf_class& x) {
    mpf_class f(0, bits);
    mpf_floor(f.get_mpf_t(), x.get_mpf_t());
    return mpf_class(x - f, bits);
  };

  // Walk convergent denominators until one yields a value below eps; the
  // smallest witness is then at most that denominator.
  Integer q_prev = 0, q_cur = 1;
  mpf_class x = theta;
  std::uint64_t bound = 0;
  for (int iter = 0; iter < 200; ++iter) {
    mpf_class fl(0, bits);
    mpf_floor(fl.get_mpf_t(), x.get_mpf_t());
    if (iter > 0) {
      Integer term{mpz_class(fl)};
      Integer q_next = term * q_cur + q_prev;
      q_prev = q_cur;
      q_cur = q_next;
    }
    if (q_cur > Integer(static_cast<unsigned long>(cap))) break;
    mpf_class t = frac(mpf_class(theta * mpf_class(q_cur, bits), bits));
    double value = mpf_class(t * av).get_d();
    if (value > 0 && value < eps) {
      bound = q_cur.get_ui();
      break;
    }
    mpf_class rem = x - fl;
    if (rem == 0) break;
    x = 1 / rem;
  }
  if (bound == 0) bound = cap;

  const mpf_class step = frac(theta);
  mpf_class t(0, bits);
  for (std::uint64_t n = 1; n <= bound; ++n) {
    t += step;
    if (t >= 1) t -= 1;
    double value = mpf_class(t * av).get_d();
    if (value > 0 && value < eps) {
      double error = static_cast<double>(n) * res * std::max(a_d, bv.get_d()) * 4;
      if (value <= error || eps - value <= error)
        throw NumericalError("density_witness: witness value not resolved at the declared precision");
      return {n, value};
    }
  }
  throw CapReachedError("density_witness: no witness below eps for n <= " + std::to_string(cap));
}

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(BasisPtr basis, Rational coefficient, std::vector<int> powers)
    : basis_(std::move(basis)), coefficient_(std::move(coefficient)), powers_(std::move(powers)) {
  if (powers_.empty()) powers_.assign(basis_->size(), 0);
  if (powers_.size() != basis_->size())
    throw PreconditionError("monomial exponent vector does not match the constant basis");
  coefficient_.canonicalize();
}

Monomial Monomial::parse(BasisPtr basis, std::string_view text) {
  return MonomialParser(std::move(basis), text).run();
}

bool Monomial::is_rational() const {
  return std::all_of(powers_.begin(), powers_.end(), [](int p) { return p == 0; });
}

double Monomial::to_double() const {
  if (is_rational()) return coefficient_.get_d();
  const mp_bitcnt_t bits = basis_->precision_bits();
  mpf_class v(coefficient_, bits);
  for (std::size_t i = 0; i < powers_.size(); ++i) {
    const mpf_class& c = basis_->element(i + 1);
    for (int k = 0; k < std::abs(powers_[i]); ++k) {
      if (powers_[i] > 0) v *= c;
      else v /= c;
    }
  }
  return v.get_d();
}

std::string Monomial::to_string() const {
  std::string s = coefficient_.get_str();
  for (std::size_t i = 0; i < powers_.size(); ++i) {
    if (powers_[i] == 0) continue;
    s += "*" + basis_->constant(i).name;
    if (powers_[i] != 1) s += "^" + std::to_string(powers_[i]);
  }
  return s;
}

Monomial Monomial::plus(const Monomial& other) const {
  if (!same_basis(basis_, other.basis_) || powers_ != other.powers_)
    throw PreconditionError("cannot add weights " + to_string() + " and " + other.to_string() +
                            ": different constant powers");
  return Monomial(basis_, coefficient_ + other.coefficient_, powers_);
}

bool operator==(const Monomial& a, const Monomial& b) {
  return a.coefficient_ == b.coefficient_ && a.powers_ == b.powers_;
}

}  // namespace liouville
