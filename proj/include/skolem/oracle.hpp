#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "skolem/errors.hpp"
#include "skolem/mp.hpp"
#include "skolem/term.hpp"

// High-precision numeric evaluation of Skolem terms at large arguments,
// entirely in logarithmic space: ln(f+g) via max + log1p(exp(min-max)),
// ln(f*g) by addition, ln(f^g) = g(x) * ln f where g(x) itself is
// exponentiated out of ln space only when it fits. Towers that do not fit
// raise a range error; they are never silently approximated.

namespace skolem::oracle {

struct LnValue {
  mpq_class ln_value;     // midpoint
  mpq_class error_bound;  // radius; true ln f(x) lies within +-error_bound
};

enum class NumCmp { Less, Greater, Mixed, Indistinguishable };

namespace detail {

// ln(e^a + e^b), directed rounding; monotone in both arguments.
inline void lnadd(mpfr_ptr out, mpfr_srcptr a, mpfr_srcptr b, mpfr_rnd_t rnd) {
  mpfr_srcptr mx = mpfr_cmp(a, b) >= 0 ? a : b;
  mpfr_srcptr mn = mx == a ? b : a;
  mpfr_t d;
  mpfr_init2(d, mpfr_get_prec(out));
  mpfr_sub(d, mn, mx, rnd);
  mpfr_exp(d, d, rnd);
  mpfr_log1p(d, d, rnd);
  mpfr_add(out, mx, d, rnd);
  mpfr_clear(d);
}

}  // namespace detail

class Oracle {
 public:
  Oracle() { mp::widen_exponent_range(); }

  // Rigorous enclosure of ln f(x).
  mp::RealInterval ln_interval(const term::TermPtr& t, const mpq_class& x, mpfr_prec_t prec) {
    if (x <= 1) throw precondition_error("oracle evaluation needs x > 1");
    auto key = std::make_tuple(term::key(t), x.get_str(), static_cast<long>(prec));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    mp::RealInterval r = compute(t, x, prec);
    memo_.emplace(std::move(key), r);
    return r;
  }

  LnValue eval_ln(const term::TermPtr& t, const mpq_class& x, unsigned precision_bits) {
    mp::RealInterval iv = ln_interval(t, x, static_cast<mpfr_prec_t>(precision_bits));
    mpq_class lo = iv.lo_rational(), hi = iv.hi_rational();
    return {(lo + hi) / 2, (hi - lo) / 2};
  }

  NumCmp numeric_compare(const term::TermPtr& f, const term::TermPtr& g,
                         const std::vector<mpq_class>& xs, mpfr_prec_t prec = 192) {
    if (xs.empty()) throw precondition_error("numeric_compare needs sample points");
    bool less = false, greater = false, indist = false;
    for (const mpq_class& x : xs) {
      mp::RealInterval a = ln_interval(f, x, prec);
      mp::RealInterval b = ln_interval(g, x, prec);
      if (a.certainly_less(b)) less = true;
      else if (a.certainly_greater(b)) greater = true;
      else indist = true;
    }
    if (less && greater) return NumCmp::Mixed;
    if (indist) return NumCmp::Indistinguishable;
    return less ? NumCmp::Less : NumCmp::Greater;
  }

  // Per-point enclosures of f(x)/g(x).
  std::vector<std::pair<mpq_class, mpq_class>> numeric_limit(const term::TermPtr& f,
                                                             const term::TermPtr& g,
                                                             const std::vector<mpq_class>& xs,
                                                             mpfr_prec_t prec = 192) {
    std::vector<std::pair<mpq_class, mpq_class>> out;
    for (const mpq_class& x : xs) {
      mp::RealInterval d = ln_interval(f, x, prec) - ln_interval(g, x, prec);
      mp::RealInterval r = d.exp();
      if (!r.finite()) throw resource_error("ratio overflow at x = " + x.get_str());
      out.emplace_back(r.lo_rational(), r.hi_rational());
    }
    return out;
  }

 private:
  mp::RealInterval compute(const term::TermPtr& t, const mpq_class& x, mpfr_prec_t prec) {
    using mp::RealInterval;
    switch (t->kind) {
      case term::K::One:
        return RealInterval::from_rational(0, prec);
      case term::K::X:
        return RealInterval::from_rational(x, prec).log();
      case term::K::Add: {
        RealInterval a = ln_interval(t->a, x, prec), b = ln_interval(t->b, x, prec);
        RealInterval r(prec);
        detail::lnadd(r.lo(), a.lo(), b.lo(), MPFR_RNDD);
        detail::lnadd(r.hi(), a.hi(), b.hi(), MPFR_RNDU);
        return r;
      }
      case term::K::Mul:
        return ln_interval(t->a, x, prec) + ln_interval(t->b, x, prec);
      case term::K::Pow: {
        RealInterval lg = ln_interval(t->b, x, prec);
        RealInterval gv = lg.exp();  // g(x) out of ln space
        if (!gv.finite())
          throw resource_error("tower too tall: exponent of " + term::format(t) +
                               " does not fit at x = " + x.get_str());
        RealInterval lf = ln_interval(t->a, x, prec);
        RealInterval r = gv * lf;
        if (!r.finite())
          throw resource_error("tower too tall: " + term::format(t) +
                               " overflows ln space at x = " + x.get_str());
        return r;
      }
    }
    throw engine_fault("unreachable term kind");
  }

  std::map<std::tuple<std::string, std::string, long>, mp::RealInterval> memo_;
};

}  // namespace skolem::oracle
