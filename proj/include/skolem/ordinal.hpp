#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skolem/errors.hpp"

// Exact arithmetic on ordinals below epsilon_0 in Cantor normal form:
// a value is a finite sum  w^(e_0)*c_0 + ... + w^(e_k)*c_k  with strictly
// decreasing ordinal exponents and positive integer coefficients. The
// hereditary representation is finite, so everything here terminates.

namespace skolem::ord {

enum class Cmp { Less, Equal, Greater };

class Ordinal {
 public:
  struct Term;

  Ordinal() = default;  // zero
  explicit Ordinal(const mpz_class& n);
  explicit Ordinal(long n) : Ordinal(mpz_class(n)) {}
  explicit Ordinal(std::vector<Term> terms);

  static Ordinal omega();
  static Ordinal omega_pow(Ordinal e, mpz_class c = 1);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  mpz_class finite_value() const;
  const Ordinal& leading_exponent() const;

  static Cmp cmp(const Ordinal& a, const Ordinal& b);

  // b = lambda + k with lambda limit-or-zero and k finite.
  std::pair<Ordinal, mpz_class> split_limit_finite() const;

  friend bool operator==(const Ordinal& a, const Ordinal& b) { return cmp(a, b) == Cmp::Equal; }
  friend bool operator!=(const Ordinal& a, const Ordinal& b) { return cmp(a, b) != Cmp::Equal; }
  friend bool operator<(const Ordinal& a, const Ordinal& b) { return cmp(a, b) == Cmp::Less; }
  friend bool operator<=(const Ordinal& a, const Ordinal& b) { return cmp(a, b) != Cmp::Greater; }
  friend bool operator>(const Ordinal& a, const Ordinal& b) { return cmp(a, b) == Cmp::Greater; }
  friend bool operator>=(const Ordinal& a, const Ordinal& b) { return cmp(a, b) != Cmp::Less; }

 private:
  std::vector<Term> terms_;
};

struct Ordinal::Term {
  Ordinal exponent;
  mpz_class coeff;  // >= 1
};

inline Ordinal::Ordinal(const mpz_class& n) {
  if (n < 0) throw precondition_error("ordinal literals must be non-negative");
  if (n > 0) terms_.push_back({Ordinal(), n});
}

inline Ordinal::Ordinal(std::vector<Term> terms) : terms_(std::move(terms)) {}

inline Ordinal Ordinal::omega() { return Ordinal({{Ordinal(1L), 1}}); }

inline Ordinal Ordinal::omega_pow(Ordinal e, mpz_class c) {
  if (c <= 0) throw precondition_error("coefficient must be positive");
  return Ordinal({{std::move(e), std::move(c)}});
}

inline bool Ordinal::is_finite() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline mpz_class Ordinal::finite_value() const {
  if (!is_finite()) throw precondition_error("ordinal is infinite");
  return terms_.empty() ? mpz_class(0) : terms_[0].coeff;
}

inline const Ordinal& Ordinal::leading_exponent() const {
  if (is_zero()) throw precondition_error("zero ordinal has no leading exponent");
  return terms_[0].exponent;
}

inline Cmp Ordinal::cmp(const Ordinal& a, const Ordinal& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    Cmp e = cmp(a.terms_[i].exponent, b.terms_[i].exponent);
    if (e != Cmp::Equal) return e;
    int c = ::cmp(a.terms_[i].coeff, b.terms_[i].coeff);
    if (c != 0) return c < 0 ? Cmp::Less : Cmp::Greater;
  }
  if (a.terms_.size() == b.terms_.size()) return Cmp::Equal;
  return a.terms_.size() < b.terms_.size() ? Cmp::Less : Cmp::Greater;
}

inline std::pair<Ordinal, mpz_class> Ordinal::split_limit_finite() const {
  if (!terms_.empty() && terms_.back().exponent.is_zero()) {
    std::vector<Term> rest(terms_.begin(), terms_.end() - 1);
    return {Ordinal(std::move(rest)), terms_.back().coeff};
  }
  return {*this, mpz_class(0)};
}

inline Ordinal add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  const Ordinal& e = b.terms()[0].exponent;
  std::vector<Ordinal::Term> out;
  std::size_t i = 0;
  while (i < a.terms().size() && a.terms()[i].exponent > e) out.push_back(a.terms()[i++]);
  if (i < a.terms().size() && a.terms()[i].exponent == e) {
    out.push_back({e, a.terms()[i].coeff + b.terms()[0].coeff});
  } else {
    out.push_back(b.terms()[0]);
  }
  out.insert(out.end(), b.terms().begin() + 1, b.terms().end());
  return Ordinal(std::move(out));
}

inline Ordinal mul(const Ordinal& a, const Ordinal& b) {
  if (a.is_zero() || b.is_zero()) return Ordinal();
  Ordinal result;
  for (const auto& t : b.terms()) {
    Ordinal piece;
    if (t.exponent.is_zero()) {
      // a * n: scale the head coefficient, keep the tail.
      std::vector<Ordinal::Term> ts = a.terms();
      ts[0].coeff *= t.coeff;
      piece = Ordinal(std::move(ts));
    } else {
      piece = Ordinal::omega_pow(add(a.leading_exponent(), t.exponent), t.coeff);
    }
    result = add(result, piece);
  }
  return result;
}

namespace detail {

// beta such that omega*beta = lambda, for lambda a limit ordinal:
// each exponent gamma >= 1 maps to the delta with 1 + delta = gamma.
inline Ordinal shift_down_limit(const Ordinal& lambda) {
  std::vector<Ordinal::Term> out;
  for (const auto& t : lambda.terms()) {
    const Ordinal& g = t.exponent;
    if (g.is_zero()) throw engine_fault("shift_down_limit on non-limit ordinal");
    if (g.is_finite())
      out.push_back({Ordinal(g.finite_value() - 1), t.coeff});
    else
      out.push_back({g, t.coeff});  // 1 + gamma = gamma for infinite gamma
  }
  return Ordinal(std::move(out));
}

inline mpz_class checked_pow_nat(const mpz_class& n, const mpz_class& k) {
  if (!k.fits_ulong_p() || k.get_ui() > (1u << 20))
    throw resource_error("finite exponent too large for ordinal power");
  if (mpz_sizeinbase(n.get_mpz_t(), 2) * k.get_ui() > (1u << 24))
    throw resource_error("finite power exceeds the resource bound");
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), n.get_mpz_t(), k.get_ui());
  return r;
}

}  // namespace detail

inline Ordinal pow(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return Ordinal(1);
  if (a.is_zero()) return Ordinal();
  if (a == Ordinal(1)) return Ordinal(1);
  if (a.is_finite()) {
    // n^(omega*beta + k) = omega^beta * n^k
    auto [lambda, k] = b.split_limit_finite();
    mpz_class nk = detail::checked_pow_nat(a.finite_value(), k);
    if (lambda.is_zero()) return Ordinal(nk);
    return Ordinal::omega_pow(detail::shift_down_limit(lambda), nk);
  }
  // infinite base: a^(w^g * c) = w^(lead(a) * w^g * c) for g > 0
  Ordinal result(1);
  for (const auto& t : b.terms()) {
    Ordinal factor;
    if (t.exponent.is_zero()) {
      if (!t.coeff.fits_ulong_p() || t.coeff.get_ui() > 4096)
        throw resource_error("finite exponent too large for infinite base");
      factor = Ordinal(1);
      Ordinal sq = a;
      unsigned long k = t.coeff.get_ui();
      while (k > 0) {
        if (k & 1) factor = mul(factor, sq);
        k >>= 1;
        if (k) sq = mul(sq, sq);
      }
    } else {
      factor =
          Ordinal::omega_pow(mul(a.leading_exponent(), Ordinal::omega_pow(t.exponent, t.coeff)));
    }
    result = mul(result, factor);
  }
  return result;
}

// Hessenberg (natural) sum: coefficient-wise merge of aligned normal forms.
inline Ordinal hsum(const Ordinal& a, const Ordinal& b) {
  std::vector<Ordinal::Term> out;
  std::size_t i = 0, j = 0;
  while (i < a.terms().size() || j < b.terms().size()) {
    if (i == a.terms().size()) { out.push_back(b.terms()[j++]); continue; }
    if (j == b.terms().size()) { out.push_back(a.terms()[i++]); continue; }
    Cmp c = Ordinal::cmp(a.terms()[i].exponent, b.terms()[j].exponent);
    if (c == Cmp::Greater) out.push_back(a.terms()[i++]);
    else if (c == Cmp::Less) out.push_back(b.terms()[j++]);
    else {
      out.push_back({a.terms()[i].exponent, a.terms()[i].coeff + b.terms()[j].coeff});
      ++i; ++j;
    }
  }
  return Ordinal(std::move(out));
}

// Hessenberg product: convolution with hsum on exponents.
inline Ordinal hprod(const Ordinal& a, const Ordinal& b) {
  if (a.is_zero() || b.is_zero()) return Ordinal();
  std::vector<Ordinal::Term> raw;
  raw.reserve(a.terms().size() * b.terms().size());
  for (const auto& s : a.terms())
    for (const auto& t : b.terms()) raw.push_back({hsum(s.exponent, t.exponent), s.coeff * t.coeff});
  std::sort(raw.begin(), raw.end(), [](const Ordinal::Term& x, const Ordinal::Term& y) {
    return Ordinal::cmp(x.exponent, y.exponent) == Cmp::Greater;
  });
  std::vector<Ordinal::Term> out;
  for (auto& t : raw) {
    if (!out.empty() && out.back().exponent == t.exponent) out.back().coeff += t.coeff;
    else out.push_back(std::move(t));
  }
  return Ordinal(std::move(out));
}

namespace detail {

inline Ordinal hpow(const Ordinal& a, const mpz_class& k) {
  if (!k.fits_ulong_p() || k.get_ui() > 4096)
    throw resource_error("finite iteration count too large");
  Ordinal result(1), sq = a;
  unsigned long n = k.get_ui();
  while (n > 0) {
    if (n & 1) result = hprod(result, sq);
    n >>= 1;
    if (n) sq = hprod(sq, sq);
  }
  return result;
}

}  // namespace detail

// Natural sum of a, iterated b times. Closed form: for b = lambda + k the
// value is a*lambda (+) a(.)k; the transfinite recursion is exercised only
// by the test oracle.
inline Ordinal hsum_iter(const Ordinal& a, const Ordinal& b) {
  auto [lambda, k] = b.split_limit_finite();
  return hsum(mul(a, lambda), hprod(a, Ordinal(k)));
}

// a^(x)b: natural product of a, iterated b times.
// Closed form: a^lambda (.) a^(.)k for b = lambda + k.
inline Ordinal cexp(const Ordinal& a, const Ordinal& b) {
  auto [lambda, k] = b.split_limit_finite();
  Ordinal head = lambda.is_zero() ? Ordinal(1) : pow(a, lambda);
  return hprod(head, detail::hpow(a, k));
}

// w_0 = 1, w_{n+1} = w^(w_n).
inline Ordinal omega_tower(unsigned n) {
  if (n > 4096) throw resource_error("omega tower too tall");
  Ordinal r(1);
  for (unsigned i = 0; i < n; ++i) r = Ordinal::omega_pow(r);
  return r;
}

// Bound on |sum A| for A of order type alpha with beta archimedean classes:
// (alpha^w)^(x)beta.
inline Ordinal finite_sums_bound(const Ordinal& alpha, const Ordinal& beta) {
  if (alpha < Ordinal(2)) throw precondition_error("finite_sums_bound requires alpha >= 2");
  if (beta < Ordinal(1)) throw precondition_error("finite_sums_bound requires beta >= 1");
  return cexp(pow(alpha, Ordinal::omega()), beta);
}

// The w^(w*alpha) bound on |sum A| that only uses |A| <= alpha.
inline Ordinal dries_bound(const Ordinal& alpha) {
  return pow(Ordinal::omega(), mul(Ordinal::omega(), alpha));
}

inline bool is_additively_closed(const Ordinal& a) {
  if (a.is_zero()) return true;  // vacuously
  return a.terms().size() == 1 && a.terms()[0].coeff == 1;
}

inline bool is_multiplicatively_closed(const Ordinal& a) {
  if (a <= Ordinal(2)) return true;  // 0, 1, 2 by direct check
  return a.terms().size() == 1 && a.terms()[0].coeff == 1 &&
         is_additively_closed(a.terms()[0].exponent) && !a.terms()[0].exponent.is_zero();
}

// ---- text form ----------------------------------------------------------
//
// Canonical rendering, e.g. "w^(w)*2 + w*3 + 5". The parser accepts
//   expr := sum ; sum := prod ('+' prod)* ; prod := atom ('*' atom)*
//   atom := 'w' ['^' atom] | nat | '(' expr ')' | func
//   func := name '(' expr ',' expr ')' | 'omega' '(' nat ')'
// with name in {hsum, hprod, cexp, pow, sumbound, driesbound}.

inline std::string to_string(const Ordinal& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : a.terms()) {
    if (!first) out += " + ";
    first = false;
    if (t.exponent.is_zero()) {
      out += t.coeff.get_str();
      continue;
    }
    if (t.exponent == Ordinal(1L)) out += "w";
    else out += "w^(" + to_string(t.exponent) + ")";
    if (t.coeff != 1) out += "*" + t.coeff.get_str();
  }
  return out;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Ordinal parse() {
    Ordinal r = sum();
    skip_ws();
    if (pos_ != s_.size()) throw parse_error("unexpected trailing input", pos_);
    return r;
  }

 private:
  Ordinal sum() {
    Ordinal r = prod();
    while (peek() == '+') { ++pos_; r = add(r, prod()); }
    return r;
  }
  Ordinal prod() {
    Ordinal r = atom();
    while (peek() == '*') { ++pos_; r = mul(r, atom()); }
    return r;
  }
  Ordinal atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Ordinal r = sum();
      expect(')');
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Ordinal(nat());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name = ident();
      if (name == "w") {
        if (peek() == '^') { ++pos_; return Ordinal::omega_pow(atom()); }
        return Ordinal::omega();
      }
      if (name == "omega") {
        expect('(');
        mpz_class n = nat();
        expect(')');
        if (!n.fits_ulong_p()) throw parse_error("omega index too large", pos_);
        return omega_tower(static_cast<unsigned>(n.get_ui()));
      }
      expect('(');
      Ordinal a = sum();
      expect(',');
      Ordinal b = sum();
      expect(')');
      if (name == "hsum") return hsum(a, b);
      if (name == "hprod") return hprod(a, b);
      if (name == "cexp") return cexp(a, b);
      if (name == "pow") return pow(a, b);
      if (name == "sumbound") return finite_sums_bound(a, b);
      if (name == "driesbound") return dries_bound(a);
      throw parse_error("unknown function '" + name + "'", pos_);
    }
    throw parse_error(std::string("unexpected character '") + c + "'", pos_);
  }
  mpz_class nat() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw parse_error("expected a number", pos_);
    return mpz_class(std::string(s_.substr(start, pos_ - start)));
  }
  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c)
      throw parse_error(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Ordinal parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace skolem::ord
