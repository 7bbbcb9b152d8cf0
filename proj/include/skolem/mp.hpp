#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

#include "skolem/errors.hpp"

// Thin RAII layer over MPFR plus a directed-rounding interval type.
// Everything that needs rigorous enclosures (constant evaluation, the
// numeric oracle) is built on RealInterval.

namespace skolem::mp {

inline void widen_exponent_range() {
  // Tall exponential towers need the full exponent range; the default
  // emax of 2^30-1 overflows already at e^(e^21).
  mpfr_set_emax(MPFR_EMAX_MAX);
  mpfr_set_emin(MPFR_EMIN_MIN);
}

class Real {
 public:
  explicit Real(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  mpfr_t v_;
};

// Exact conversion of a finite mpfr value to a rational.
inline mpq_class to_rational(mpfr_srcptr x) {
  if (!mpfr_number_p(x)) throw resource_error("non-finite value cannot become a rational");
  if (mpfr_zero_p(x)) return mpq_class(0);
  mpz_class mant;
  mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), x);
  mpq_class q(mant);
  if (e >= 0) {
    mpz_class shift;
    mpz_ui_pow_ui(shift.get_mpz_t(), 2, static_cast<unsigned long>(e));
    q *= shift;
  } else {
    mpz_class shift;
    mpz_ui_pow_ui(shift.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    q /= shift;
  }
  q.canonicalize();
  return q;
}

// Closed interval [lo, hi] with outward rounding at a fixed working
// precision. Invariant: lo <= hi and the true value is always enclosed.
class RealInterval {
 public:
  explicit RealInterval(mpfr_prec_t prec = 64) : lo_(prec), hi_(prec), prec_(prec) {}

  static RealInterval from_rational(const mpq_class& q, mpfr_prec_t prec) {
    RealInterval r(prec);
    mpfr_set_q(r.lo_.raw(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.raw(), q.get_mpq_t(), MPFR_RNDU);
    return r;
  }
  static RealInterval from_endpoints(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t prec) {
    RealInterval r(prec);
    mpfr_set_q(r.lo_.raw(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.raw(), hi.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  mpfr_srcptr lo() const { return lo_.raw(); }
  mpfr_srcptr hi() const { return hi_.raw(); }
  mpfr_ptr lo() { return lo_.raw(); }
  mpfr_ptr hi() { return hi_.raw(); }
  mpfr_prec_t prec() const { return prec_; }

  bool finite() const { return mpfr_number_p(lo_.raw()) && mpfr_number_p(hi_.raw()); }
  bool strictly_positive() const { return mpfr_sgn(lo_.raw()) > 0; }
  bool strictly_negative() const { return mpfr_sgn(hi_.raw()) < 0; }
  bool contains_zero() const { return mpfr_sgn(lo_.raw()) <= 0 && mpfr_sgn(hi_.raw()) >= 0; }

  mpq_class lo_rational() const { return to_rational(lo_.raw()); }
  mpq_class hi_rational() const { return to_rational(hi_.raw()); }

  // hi - lo, rounded up.
  Real width() const {
    Real w(prec_);
    mpfr_sub(w.raw(), hi_.raw(), lo_.raw(), MPFR_RNDU);
    return w;
  }

  friend RealInterval operator+(const RealInterval& a, const RealInterval& b) {
    RealInterval r(a.prec_);
    mpfr_add(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
    mpfr_add(r.hi_.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
    return r;
  }
  friend RealInterval operator-(const RealInterval& a, const RealInterval& b) {
    RealInterval r(a.prec_);
    mpfr_sub(r.lo_.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
    mpfr_sub(r.hi_.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
    return r;
  }
  friend RealInterval operator*(const RealInterval& a, const RealInterval& b) {
    RealInterval r(a.prec_);
    mpfr_t t;
    mpfr_init2(t, a.prec_);
    // lower bound: min of the four products rounded down
    mpfr_mul(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
    mpfr_mul(t, a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
    mpfr_min(r.lo_.raw(), r.lo_.raw(), t, MPFR_RNDD);
    mpfr_mul(t, a.hi_.raw(), b.lo_.raw(), MPFR_RNDD);
    mpfr_min(r.lo_.raw(), r.lo_.raw(), t, MPFR_RNDD);
    mpfr_mul(t, a.hi_.raw(), b.hi_.raw(), MPFR_RNDD);
    mpfr_min(r.lo_.raw(), r.lo_.raw(), t, MPFR_RNDD);
    // upper bound: max of the four products rounded up
    mpfr_mul(r.hi_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDU);
    mpfr_mul(t, a.lo_.raw(), b.hi_.raw(), MPFR_RNDU);
    mpfr_max(r.hi_.raw(), r.hi_.raw(), t, MPFR_RNDU);
    mpfr_mul(t, a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
    mpfr_max(r.hi_.raw(), r.hi_.raw(), t, MPFR_RNDU);
    mpfr_mul(t, a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
    mpfr_max(r.hi_.raw(), r.hi_.raw(), t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
  }

  RealInterval neg() const {
    RealInterval r(prec_);
    mpfr_neg(r.lo_.raw(), hi_.raw(), MPFR_RNDD);
    mpfr_neg(r.hi_.raw(), lo_.raw(), MPFR_RNDU);
    return r;
  }

  // 1/x; caller must ensure the interval excludes zero.
  RealInterval inv() const {
    RealInterval r(prec_);
    mpfr_ui_div(r.lo_.raw(), 1, hi_.raw(), MPFR_RNDD);
    mpfr_ui_div(r.hi_.raw(), 1, lo_.raw(), MPFR_RNDU);
    return r;
  }

  RealInterval exp() const {
    RealInterval r(prec_);
    mpfr_exp(r.lo_.raw(), lo_.raw(), MPFR_RNDD);
    mpfr_exp(r.hi_.raw(), hi_.raw(), MPFR_RNDU);
    return r;
  }

  // ln x; caller must ensure lo > 0.
  RealInterval log() const {
    RealInterval r(prec_);
    mpfr_log(r.lo_.raw(), lo_.raw(), MPFR_RNDD);
    mpfr_log(r.hi_.raw(), hi_.raw(), MPFR_RNDU);
    return r;
  }

  // Truth only when the whole intervals separate.
  bool certainly_less(const RealInterval& o) const { return mpfr_cmp(hi_.raw(), o.lo_.raw()) < 0; }
  bool certainly_greater(const RealInterval& o) const { return mpfr_cmp(lo_.raw(), o.hi_.raw()) > 0; }

 private:
  Real lo_, hi_;
  mpfr_prec_t prec_;
};

// Decimal rendering of an enclosure endpoint, for reports and JSON.
inline std::string decimal_string(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
  if (mpfr_nan_p(x)) return "nan";
  if (mpfr_inf_p(x)) return mpfr_sgn(x) < 0 ? "-inf" : "inf";
  char* s = nullptr;
  int n = mpfr_asprintf(&s, "%.*R*g", digits, rnd, x);
  if (n < 0) throw resource_error("mpfr_asprintf failed");
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

}  // namespace skolem::mp
