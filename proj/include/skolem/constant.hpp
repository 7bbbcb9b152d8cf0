#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "skolem/errors.hpp"
#include "skolem/mp.hpp"

// Closed-form real constants: expression trees over the rationals under
// {+, -, *, /, exp, log}, evaluated by adaptive-precision interval
// arithmetic. Equality of such constants is not assumed decidable;
// comparisons are semi-decisions with an explicit Unknown outcome.
//
// Every constant carries a membership flag for the exponential constants:
// E+ is the smallest subset of R^{>0} containing 1 and closed under
// +, *, ^{-1} and exp; E = E+ - E+ is a subring of R with exp(E) <= E+.

namespace skolem::cnst {

enum class EFlag { InEPlus, InE, Outside, Unknown };

inline bool in_E(EFlag f) { return f == EFlag::InEPlus || f == EFlag::InE; }

enum class Sign { Negative, Zero, Positive, Unknown };
enum class Order { Less, Greater, EqualExact, Unknown };

// Rational-endpoint enclosure; always contains the true value.
struct Interval {
  mpq_class lo, hi;
  mpq_class width() const { return hi - lo; }
  bool contains(const mpq_class& q) const { return lo <= q && q <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

class Constant {
 public:
  enum class Kind { Rat, Add, Sub, Mul, Div, Exp, Log };

  Constant() : Constant(rational(0)) {}

  static Constant rational(mpq_class q) {
    q.canonicalize();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Rat;
    n->rat = q;
    n->exact = q;
    n->flag = q > 0 ? EFlag::InEPlus : EFlag::InE;
    return Constant(std::move(n));
  }
  static Constant rational(long num, long den = 1) { return rational(mpq_class(num, den)); }
  static Constant integer(const mpz_class& z) { return rational(mpq_class(z)); }

  Kind kind() const { return node_->kind; }
  const Constant& child_a() const { return *node_->a; }
  const Constant& child_b() const { return *node_->b; }
  const mpq_class& rat() const { return node_->rat; }
  EFlag flag() const { return node_->flag; }
  const std::optional<mpq_class>& exact() const { return node_->exact; }
  bool is_rational_leaf() const { return node_->kind == Kind::Rat; }

  friend Constant cadd(const Constant& a, const Constant& b);
  friend Constant csub(const Constant& a, const Constant& b);
  friend Constant cmul(const Constant& a, const Constant& b);
  friend Constant cdiv(const Constant& a, const Constant& b);
  friend Constant cexp(const Constant& a);
  friend Constant clog(const Constant& a);
  friend Constant normalize(const Constant& c);
  friend mp::RealInterval eval_raw(const Constant& c, mpfr_prec_t prec);

  // Canonical digest of the normalized tree; equal keys mean syntactically
  // identical constants (after normalization).
  const std::string& key() const;

 private:
  struct Node {
    Kind kind = Kind::Rat;
    mpq_class rat;
    std::shared_ptr<const Constant> a, b;
    EFlag flag = EFlag::Unknown;
    std::optional<mpq_class> exact;
    // idempotently filled caches
    mutable std::shared_ptr<const Constant> norm;
    mutable std::string key;
  };

  explicit Constant(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  static Constant make(Kind k, const Constant& a, const Constant& b, EFlag flag,
                       std::optional<mpq_class> exact) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::make_shared<Constant>(a);
    if (k != Kind::Exp && k != Kind::Log) n->b = std::make_shared<Constant>(b);
    n->flag = flag;
    n->exact = std::move(exact);
    return Constant(std::move(n));
  }

  std::shared_ptr<const Node> node_;

  friend struct ConstantOps;
};

// ---- construction with membership propagation ----------------------------

inline Constant cadd(const Constant& a, const Constant& b) {
  EFlag f = EFlag::Unknown;
  if (a.flag() == EFlag::InEPlus && b.flag() == EFlag::InEPlus) f = EFlag::InEPlus;
  else if (in_E(a.flag()) && in_E(b.flag())) f = EFlag::InE;
  std::optional<mpq_class> e;
  if (a.exact() && b.exact()) e = *a.exact() + *b.exact();
  return Constant::make(Constant::Kind::Add, a, b, f, std::move(e));
}

inline Constant csub(const Constant& a, const Constant& b) {
  EFlag f = in_E(a.flag()) && in_E(b.flag()) ? EFlag::InE : EFlag::Unknown;
  std::optional<mpq_class> e;
  if (a.exact() && b.exact()) e = *a.exact() - *b.exact();
  return Constant::make(Constant::Kind::Sub, a, b, f, std::move(e));
}

inline Constant cmul(const Constant& a, const Constant& b) {
  EFlag f = EFlag::Unknown;
  if (a.flag() == EFlag::InEPlus && b.flag() == EFlag::InEPlus) f = EFlag::InEPlus;
  else if (in_E(a.flag()) && in_E(b.flag())) f = EFlag::InE;
  std::optional<mpq_class> e;
  if (a.exact() && b.exact()) e = *a.exact() * *b.exact();
  return Constant::make(Constant::Kind::Mul, a, b, f, std::move(e));
}

mp::RealInterval eval_raw(const Constant& c, mpfr_prec_t prec);

namespace detail {
// Denominator / log-argument domain check: exact when possible, otherwise
// interval separation at a fixed construction precision.
inline bool provably_nonzero(const Constant& c) {
  if (c.exact()) return *c.exact() != 0;
  for (mpfr_prec_t p : {64, 256}) {
    try {
      mp::RealInterval iv = eval_raw(c, p);
      if (!iv.contains_zero()) return true;
    } catch (const undetermined_error&) {
    }
  }
  return false;
}
inline bool provably_positive(const Constant& c) {
  if (c.exact()) return *c.exact() > 0;
  for (mpfr_prec_t p : {64, 256}) {
    try {
      mp::RealInterval iv = eval_raw(c, p);
      if (iv.strictly_positive()) return true;
      if (!iv.contains_zero() && iv.strictly_negative()) return false;
    } catch (const undetermined_error&) {
    }
  }
  return false;
}
}  // namespace detail

inline Constant cdiv(const Constant& a, const Constant& b) {
  if (!detail::provably_nonzero(b))
    throw precondition_error("division by a possibly-zero constant");
  EFlag f = EFlag::Unknown;
  if (a.flag() == EFlag::InEPlus && b.flag() == EFlag::InEPlus) f = EFlag::InEPlus;
  else if (in_E(a.flag()) && b.flag() == EFlag::InEPlus) f = EFlag::InE;  // E * (E+)^-1 <= E
  std::optional<mpq_class> e;
  if (a.exact() && b.exact()) e = *a.exact() / *b.exact();
  return Constant::make(Constant::Kind::Div, a, b, f, std::move(e));
}

inline Constant cexp(const Constant& a) {
  EFlag f = in_E(a.flag()) ? EFlag::InEPlus : EFlag::Unknown;
  return Constant::make(Constant::Kind::Exp, a, a, f, std::nullopt);
}

inline Constant clog(const Constant& a) {
  if (!detail::provably_positive(a))
    throw precondition_error("log of a possibly-nonpositive constant");
  return Constant::make(Constant::Kind::Log, a, a, EFlag::Unknown, std::nullopt);
}

inline Constant cneg(const Constant& a) { return csub(Constant::rational(0), a); }

inline Constant cpow_int(const Constant& a, long k) {
  if (k < 0) return cdiv(Constant::rational(1), cpow_int(a, -k));
  Constant r = Constant::rational(1);
  for (long i = 0; i < k; ++i) r = cmul(r, a);
  return r;
}

// Multiply by an exact rational, keeping the canonical (rational * core)
// shape so that series coefficients stay tidy.
inline Constant scale(const Constant& c, const mpq_class& q) {
  if (q == 0) return Constant::rational(0);
  if (c.kind() == Constant::Kind::Rat) return Constant::rational(c.rat() * q);
  if (c.kind() == Constant::Kind::Mul && c.child_a().is_rational_leaf()) {
    mpq_class p = c.child_a().rat() * q;
    if (p == 1) return c.child_b();
    return cmul(Constant::rational(p), c.child_b());
  }
  if (q == 1) return c;
  return cmul(Constant::rational(q), c);
}

// ---- normalization --------------------------------------------------------
//
// Lightweight rewriting before comparison: fold exact rationals, cancel
// exp/log round trips, and keep rational scale factors in front. This is a
// heuristic to catch easy syntactic equalities, not a decision procedure.

inline Constant normalize(const Constant& c) {
  if (c.node_->norm) return *c.node_->norm;
  Constant result = c;
  switch (c.kind()) {
    case Constant::Kind::Rat:
      break;
    case Constant::Kind::Exp: {
      Constant a = normalize(c.child_a());
      if (a.exact() && *a.exact() == 0) result = Constant::rational(1);
      else if (a.kind() == Constant::Kind::Log) result = a.child_a();
      else result = cexp(a);
      break;
    }
    case Constant::Kind::Log: {
      Constant a = normalize(c.child_a());
      if (a.exact() && *a.exact() == 1) result = Constant::rational(0);
      else if (a.kind() == Constant::Kind::Exp) result = a.child_a();
      else result = clog(a);
      break;
    }
    default: {
      Constant a = normalize(c.child_a());
      Constant b = normalize(c.child_b());
      if (a.exact() && b.exact() && c.exact()) {
        result = Constant::rational(*c.exact());
        break;
      }
      switch (c.kind()) {
        case Constant::Kind::Add:
          if (a.exact() && *a.exact() == 0) result = b;
          else if (b.exact() && *b.exact() == 0) result = a;
          // structural cancellation: u + (-1)*u = 0
          else if (a.key() == scale(b, -1).key()) result = Constant::rational(0);
          else result = cadd(a, b);
          break;
        case Constant::Kind::Sub:
          if (b.exact() && *b.exact() == 0) result = a;
          else if (a.exact() && *a.exact() == 0 && b.is_rational_leaf())
            result = Constant::rational(-b.rat());
          else if (a.key() == b.key()) result = Constant::rational(0);
          else result = csub(a, b);
          break;
        case Constant::Kind::Mul:
          if (a.is_rational_leaf()) result = scale(b, a.rat());
          else if (b.is_rational_leaf()) result = scale(a, b.rat());
          else result = cmul(a, b);
          break;
        case Constant::Kind::Div:
          if (b.is_rational_leaf()) result = scale(a, 1 / b.rat());
          else result = cdiv(a, b);
          break;
        default:
          break;
      }
    }
  }
  c.node_->norm = std::make_shared<const Constant>(result);
  return result;
}

namespace detail {
inline void serialize(const Constant& c, std::string& out) {
  switch (c.kind()) {
    case Constant::Kind::Rat: out += "R" + c.rat().get_str(); return;
    case Constant::Kind::Add: out += "+(";
      serialize(c.child_a(), out); out += ","; serialize(c.child_b(), out); out += ")"; return;
    case Constant::Kind::Sub: out += "-(";
      serialize(c.child_a(), out); out += ","; serialize(c.child_b(), out); out += ")"; return;
    case Constant::Kind::Mul: out += "*(";
      serialize(c.child_a(), out); out += ","; serialize(c.child_b(), out); out += ")"; return;
    case Constant::Kind::Div: out += "/(";
      serialize(c.child_a(), out); out += ","; serialize(c.child_b(), out); out += ")"; return;
    case Constant::Kind::Exp: out += "exp("; serialize(c.child_a(), out); out += ")"; return;
    case Constant::Kind::Log: out += "log("; serialize(c.child_a(), out); out += ")"; return;
  }
}
}  // namespace detail

inline const std::string& Constant::key() const {
  if (node_->key.empty()) {
    std::string s;
    detail::serialize(normalize(*this), s);
    node_->key = std::move(s);
  }
  return node_->key;
}

// ---- interval evaluation ---------------------------------------------------

// One evaluation pass at fixed working precision. Throws undetermined_error
// on a division/log domain obstruction at this precision.
inline mp::RealInterval eval_raw(const Constant& c, mpfr_prec_t prec) {
  using mp::RealInterval;
  if (c.exact()) return RealInterval::from_rational(*c.exact(), prec);
  switch (c.kind()) {
    case Constant::Kind::Rat:
      return RealInterval::from_rational(c.rat(), prec);
    case Constant::Kind::Add:
      return eval_raw(c.child_a(), prec) + eval_raw(c.child_b(), prec);
    case Constant::Kind::Sub:
      return eval_raw(c.child_a(), prec) - eval_raw(c.child_b(), prec);
    case Constant::Kind::Mul:
      return eval_raw(c.child_a(), prec) * eval_raw(c.child_b(), prec);
    case Constant::Kind::Div: {
      RealInterval den = eval_raw(c.child_b(), prec);
      if (den.contains_zero())
        throw undetermined_error("division by an interval containing zero");
      return eval_raw(c.child_a(), prec) * den.inv();
    }
    case Constant::Kind::Exp: {
      RealInterval r = eval_raw(c.child_a(), prec).exp();
      if (!r.finite()) throw resource_error("exp overflow in constant evaluation");
      return r;
    }
    case Constant::Kind::Log: {
      RealInterval a = eval_raw(c.child_a(), prec);
      if (!a.strictly_positive())
        throw undetermined_error("log of an interval touching zero");
      return a.log();
    }
  }
  throw engine_fault("unreachable constant kind");
}

// Enclosure of width <= 2^-precision (unless a domain obstruction survives
// every retry, which surfaces as undetermined_error).
inline Interval eval_interval(const Constant& c, unsigned precision) {
  if (precision == 0) throw precondition_error("precision must be positive");
  if (c.exact()) return {*c.exact(), *c.exact()};
  mpq_class target(1);
  target /= mpz_class(1) << precision;  // 2^-precision
  std::string last_obstruction;
  for (int attempt = 0; attempt < 5; ++attempt) {
    mpfr_prec_t wp = static_cast<mpfr_prec_t>((precision + 64) << attempt);
    try {
      mp::RealInterval iv = eval_raw(c, wp);
      if (mpq_class(iv.hi_rational() - iv.lo_rational()) <= target)
        return {iv.lo_rational(), iv.hi_rational()};
    } catch (const undetermined_error& e) {
      last_obstruction = e.what();
    }
  }
  if (!last_obstruction.empty()) throw undetermined_error(last_obstruction);
  throw resource_error("interval evaluation did not reach the requested width");
}

// ---- comparison ------------------------------------------------------------

inline Sign sign(const Constant& c, unsigned precision_cap) {
  Constant n = normalize(c);
  if (n.exact()) {
    int s = sgn(*n.exact());
    return s < 0 ? Sign::Negative : s > 0 ? Sign::Positive : Sign::Zero;
  }
  for (mpfr_prec_t p = 64; ; p *= 2) {
    if (p > static_cast<mpfr_prec_t>(precision_cap)) p = precision_cap;
    try {
      mp::RealInterval iv = eval_raw(n, p);
      if (iv.strictly_positive()) return Sign::Positive;
      if (iv.strictly_negative()) return Sign::Negative;
    } catch (const undetermined_error&) {
    }
    if (p == static_cast<mpfr_prec_t>(precision_cap)) break;
  }
  return Sign::Unknown;
}

// Less/Greater only when enclosures separate at some precision <= cap;
// EqualExact only via the exact rational path or syntactic identity after
// normalization; Unknown otherwise. Equal transcendental values therefore
// stay Unknown forever, by design.
inline Order cmp_const(const Constant& a, const Constant& b, unsigned precision_cap) {
  Constant na = normalize(a), nb = normalize(b);
  if (na.exact() && nb.exact()) {
    int c = ::cmp(*na.exact(), *nb.exact());
    return c < 0 ? Order::Less : c > 0 ? Order::Greater : Order::EqualExact;
  }
  if (na.key() == nb.key()) return Order::EqualExact;
  switch (sign(csub(na, nb), precision_cap)) {
    case Sign::Negative: return Order::Less;
    case Sign::Positive: return Order::Greater;
    case Sign::Zero: return Order::EqualExact;
    case Sign::Unknown: return Order::Unknown;
  }
  return Order::Unknown;
}

inline std::optional<mpq_class> exact_rational(const Constant& c) {
  if (c.exact()) return c.exact();
  Constant n = normalize(c);
  return n.exact() ? n.exact() : std::nullopt;
}

inline bool is_exact_one(const Constant& c) {
  auto e = exact_rational(c);
  return e && *e == 1;
}

// ---- rendering -------------------------------------------------------------
//
// Exact expression strings: "e", "e/2", "log(3)", "1/2", "e^2", ...

namespace detail {

enum Prec { PSum = 0, PProd = 1, PAtom = 2 };

inline std::string render(const Constant& c, int ctx);

inline std::string wrap(const std::string& s, bool need) { return need ? "(" + s + ")" : s; }

inline std::string render(const Constant& c, int ctx) {
  switch (c.kind()) {
    case Constant::Kind::Rat: {
      const mpq_class& q = c.rat();
      std::string s = q.get_str();
      bool atom = q >= 0 && q.get_den() == 1;
      return wrap(s, !atom && ctx > PSum);
    }
    case Constant::Kind::Add:
      return wrap(render(c.child_a(), PSum) + " + " + render(c.child_b(), PProd), ctx > PSum);
    case Constant::Kind::Sub:
      return wrap(render(c.child_a(), PSum) + " - " + render(c.child_b(), PProd), ctx > PSum);
    case Constant::Kind::Mul: {
      // canonical (rational * core) scale factors render as e/2, 3*e/4, -e/2
      if (c.child_a().is_rational_leaf()) {
        const mpq_class& q = c.child_a().rat();
        mpq_class aq = abs(q);
        std::string core = render(c.child_b(), PProd);
        std::string body;
        if (aq.get_num() == 1 && aq.get_den() != 1) body = core + "/" + aq.get_den().get_str();
        else if (aq.get_den() == 1) body = aq.get_num().get_str() + "*" + core;
        else body = aq.get_num().get_str() + "*" + core + "/" + aq.get_den().get_str();
        if (q < 0) return wrap("-" + body, ctx > PSum);
        return wrap(body, ctx > PProd && aq != 1 && aq.get_num() != 1);
      }
      return wrap(render(c.child_a(), PProd) + "*" + render(c.child_b(), PProd), ctx > PProd);
    }
    case Constant::Kind::Div:
      return wrap(render(c.child_a(), PProd) + "/" + render(c.child_b(), PAtom), ctx > PProd);
    case Constant::Kind::Exp: {
      auto e = c.child_a().exact();
      if (e && *e == 1) return "e";
      if (e && e->get_den() == 1 && *e != 0)
        return ::cmp(*e, 0) > 0 ? "e^" + e->get_num().get_str()
                                : "e^(" + e->get_str() + ")";
      return "exp(" + render(c.child_a(), PSum) + ")";
    }
    case Constant::Kind::Log:
      return "log(" + render(c.child_a(), PSum) + ")";
  }
  return "?";
}

}  // namespace detail

inline std::string to_string(const Constant& c) { return detail::render(normalize(c), detail::PSum); }

// Decimal enclosure strings for reports/JSON, outward rounded.
inline std::pair<std::string, std::string> decimal_enclosure(const Constant& c, unsigned precision,
                                                            int digits = 20) {
  Interval iv = eval_interval(c, precision);
  mp::RealInterval r = mp::RealInterval::from_endpoints(iv.lo, iv.hi, precision + 64);
  return {mp::decimal_string(r.lo(), digits, MPFR_RNDD), mp::decimal_string(r.hi(), digits, MPFR_RNDU)};
}

}  // namespace skolem::cnst
