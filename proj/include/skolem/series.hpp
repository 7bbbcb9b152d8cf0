#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skolem/constant.hpp"
#include "skolem/errors.hpp"
#include "skolem/mp.hpp"

// Truncated generalized-series engine over the recursive monomial group
// generated from x by  exp(purely infinite series + (series + Z) * log x).
// A monomial is exp(E) * (log x)^k where E is a finite descending list of
// exponent terms c * b * (log x)^f with b a log-free monomial; log x itself
// is admitted for intermediate series only (series_log produces it) and is
// ranked below every exp-generated monomial.
//
// Series are kept to a configured number of terms; everything dropped is
// tracked through an error-order monomial. When an exponent series itself
// had to be truncated (exp of a series with an infinite error order), the
// resulting monomial carries a truncation scale and comparisons against it
// are only decided above that scale.

namespace skolem::ts {

struct Ctx {
  int depth = 8;             // kept terms per series
  unsigned prec_cap = 256;   // bits for coefficient sign decisions
};

struct Monomial;
using MonoPtr = std::shared_ptr<const Monomial>;

// One term of an exponent series: coeff * base * (log x)^log_flag.
// Infinite-term condition: base > 1, or base = 1 and log_flag = 1.
struct ExpTerm {
  MonoPtr base;           // log-free (log_power == 0)
  int log_flag = 0;       // 0 or 1
  cnst::Constant coeff;   // nonzero (or retained with unknown sign)
  bool sign_unknown = false;
};

// Scale marker (base, log_flag) used for exponent truncation bookkeeping.
struct ExpScale {
  MonoPtr base;
  int log_flag = 0;
};

struct Monomial {
  std::vector<ExpTerm> exponent;       // strictly descending scales
  int log_power = 0;                   // intermediates only
  std::optional<ExpScale> trunc;       // exponent unknown below this scale
  std::string digest;                  // structural identity key
};

enum class MonoCmp { Less, Greater, Equal, EqualToTrunc, Undetermined };

inline MonoPtr make_mono(std::vector<ExpTerm> exponent, int log_power,
                         std::optional<ExpScale> trunc) {
  auto m = std::make_shared<Monomial>();
  m->exponent = std::move(exponent);
  m->log_power = log_power;
  m->trunc = std::move(trunc);
  std::string d = "(";
  for (const auto& t : m->exponent) {
    d += t.base->digest;
    if (t.log_flag) d += "L";
    d += ":";
    d += t.coeff.key();
    if (t.sign_unknown) d += "?";
    d += ";";
  }
  d += ")";
  if (m->log_power) d += "l" + std::to_string(m->log_power);
  if (m->trunc) d += "T" + m->trunc->base->digest + std::to_string(m->trunc->log_flag);
  m->digest = std::move(d);
  return m;
}

inline const MonoPtr& mono_unit() {
  static const MonoPtr m = make_mono({}, 0, std::nullopt);
  return m;
}
inline const MonoPtr& mono_x() {
  static const MonoPtr m =
      make_mono({ExpTerm{mono_unit(), 1, cnst::Constant::rational(1), false}}, 0, std::nullopt);
  return m;
}
inline const MonoPtr& mono_logx() {
  static const MonoPtr m = make_mono({}, 1, std::nullopt);
  return m;
}

inline bool same_mono(const MonoPtr& a, const MonoPtr& b) { return a->digest == b->digest; }
inline bool is_unit(const MonoPtr& m) { return m->exponent.empty() && m->log_power == 0; }

MonoCmp mono_cmp(const MonoPtr& a, const MonoPtr& b, const Ctx& ctx);

namespace detail {

// Order on exponent-term scales: larger base wins; at equal base the
// log-flagged term is larger (m log x > m, and distinct monomials differ by
// a factor >= x which beats any log power).
inline MonoCmp scale_cmp(const MonoPtr& ab, int af, const MonoPtr& bb, int bf, const Ctx& ctx) {
  if (!same_mono(ab, bb)) {
    MonoCmp c = mono_cmp(ab, bb, ctx);
    if (c != MonoCmp::Equal) return c;
  }
  if (af != bf) return af < bf ? MonoCmp::Less : MonoCmp::Greater;
  return MonoCmp::Equal;
}

inline std::vector<ExpTerm> es_neg(const std::vector<ExpTerm>& a) {
  std::vector<ExpTerm> out = a;
  for (auto& t : out) t.coeff = cnst::scale(t.coeff, -1);
  return out;
}

// Merge two exponent series; returns terms plus an order-trust flag.
inline std::pair<std::vector<ExpTerm>, bool> es_add(const std::vector<ExpTerm>& a,
                                                    const std::vector<ExpTerm>& b,
                                                    const Ctx& ctx) {
  std::vector<ExpTerm> out;
  bool order_ok = true;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i == a.size()) { out.push_back(b[j++]); continue; }
    if (j == b.size()) { out.push_back(a[i++]); continue; }
    MonoCmp c = scale_cmp(a[i].base, a[i].log_flag, b[j].base, b[j].log_flag, ctx);
    if (c == MonoCmp::Greater) { out.push_back(a[i++]); continue; }
    if (c == MonoCmp::Less) { out.push_back(b[j++]); continue; }
    if (c != MonoCmp::Equal) {
      // unorderable scales: keep deterministic digest order, flag the result
      order_ok = false;
      bool a_first = a[i].base->digest + std::to_string(a[i].log_flag) <
                     b[j].base->digest + std::to_string(b[j].log_flag);
      out.push_back(a_first ? a[i++] : b[j++]);
      continue;
    }
    cnst::Constant sum = cadd(a[i].coeff, b[j].coeff);
    cnst::Sign s = cnst::sign(sum, ctx.prec_cap);
    if (s != cnst::Sign::Zero) {
      ExpTerm t = a[i];
      t.coeff = sum;
      t.sign_unknown = s == cnst::Sign::Unknown;
      out.push_back(std::move(t));
    }
    ++i; ++j;
  }
  return {std::move(out), order_ok};
}

}  // namespace detail

inline MonoPtr mono_mul(const MonoPtr& a, const MonoPtr& b, const Ctx& ctx) {
  if (is_unit(a) && !a->trunc) return b;
  if (is_unit(b) && !b->trunc) return a;
  auto [terms, order_ok] = detail::es_add(a->exponent, b->exponent, ctx);
  if (!order_ok) throw undetermined_error("cannot order exponent scales at the precision cap");
  std::optional<ExpScale> trunc = a->trunc;
  if (b->trunc) {
    if (!trunc) trunc = b->trunc;
    else {
      MonoCmp c = detail::scale_cmp(trunc->base, trunc->log_flag, b->trunc->base,
                                    b->trunc->log_flag, ctx);
      if (c == MonoCmp::Less) trunc = b->trunc;
    }
  }
  return make_mono(std::move(terms), a->log_power + b->log_power, std::move(trunc));
}

inline MonoPtr mono_inv(const MonoPtr& a) {
  return make_mono(detail::es_neg(a->exponent), -a->log_power, a->trunc);
}

// Compare monomials as germs: the difference of the exponent series decides,
// then the residual log power. Terms at or below a truncation scale cannot
// decide; if nothing above the scale separates them the result is
// EqualToTrunc.
inline MonoCmp mono_cmp(const MonoPtr& a, const MonoPtr& b, const Ctx& ctx) {
  if (same_mono(a, b)) return MonoCmp::Equal;
  auto [diff, order_ok] = detail::es_add(a->exponent, detail::es_neg(b->exponent), ctx);
  if (!order_ok) return MonoCmp::Undetermined;
  std::optional<ExpScale> cutoff = a->trunc;
  if (b->trunc) {
    if (!cutoff) cutoff = b->trunc;
    else {
      MonoCmp c = detail::scale_cmp(cutoff->base, cutoff->log_flag, b->trunc->base,
                                    b->trunc->log_flag, ctx);
      if (c == MonoCmp::Less) cutoff = b->trunc;
      else if (c == MonoCmp::Undetermined || c == MonoCmp::EqualToTrunc)
        return MonoCmp::Undetermined;
    }
  }
  for (const auto& t : diff) {
    if (cutoff) {
      MonoCmp c = detail::scale_cmp(t.base, t.log_flag, cutoff->base, cutoff->log_flag, ctx);
      if (c != MonoCmp::Greater) return MonoCmp::EqualToTrunc;
    }
    if (t.sign_unknown) return MonoCmp::Undetermined;
    cnst::Sign s = cnst::sign(t.coeff, ctx.prec_cap);
    if (s == cnst::Sign::Positive) return MonoCmp::Greater;
    if (s == cnst::Sign::Negative) return MonoCmp::Less;
    if (s == cnst::Sign::Unknown) return MonoCmp::Undetermined;
  }
  if (cutoff) return MonoCmp::EqualToTrunc;
  if (a->log_power != b->log_power)
    return a->log_power < b->log_power ? MonoCmp::Less : MonoCmp::Greater;
  return MonoCmp::Equal;
}

// ---- series ----------------------------------------------------------------

struct Term {
  MonoPtr mono;
  cnst::Constant coeff;
  bool sign_unknown = false;
};

struct Series {
  std::vector<Term> terms;        // strictly descending monomials
  MonoPtr error;                  // nullptr: exact (no omitted content)
  bool order_uncertain = false;
};

inline Series series_zero() { return {}; }
inline Series series_const(const cnst::Constant& c, const Ctx& ctx) {
  if (cnst::sign(c, ctx.prec_cap) == cnst::Sign::Zero) return {};
  Series s;
  s.terms.push_back({mono_unit(), c, cnst::sign(c, ctx.prec_cap) == cnst::Sign::Unknown});
  return s;
}
inline Series series_x() {
  Series s;
  s.terms.push_back({mono_x(), cnst::Constant::rational(1), false});
  return s;
}
inline Series series_of_mono(const MonoPtr& m, const cnst::Constant& c) {
  Series s;
  s.terms.push_back({m, c, false});
  return s;
}

namespace detail {

// err := max(err, m) in the monomial order; Undetermined picks the first
// deterministically and taints the ordering flag.
inline void bump_error(MonoPtr& err, const MonoPtr& m, bool& order_ok, const Ctx& ctx) {
  if (!m) return;
  if (!err) { err = m; return; }
  MonoCmp c = mono_cmp(err, m, ctx);
  if (c == MonoCmp::Less) err = m;
  else if (c == MonoCmp::Undetermined) order_ok = false;
}

}  // namespace detail

inline Series series_neg(const Series& f) {
  Series out = f;
  for (auto& t : out.terms) t.coeff = cnst::scale(t.coeff, -1);
  return out;
}

inline Series series_add(const Series& f, const Series& g, const Ctx& ctx) {
  Series out;
  out.order_uncertain = f.order_uncertain || g.order_uncertain;
  bool order_ok = true;
  MonoPtr err;
  detail::bump_error(err, f.error, order_ok, ctx);
  detail::bump_error(err, g.error, order_ok, ctx);
  std::size_t i = 0, j = 0;
  while (i < f.terms.size() || j < g.terms.size()) {
    const Term* take = nullptr;
    if (i == f.terms.size()) take = &g.terms[j++];
    else if (j == g.terms.size()) take = &f.terms[i++];
    else {
      const Term& a = f.terms[i];
      const Term& b = g.terms[j];
      MonoCmp c = same_mono(a.mono, b.mono) ? MonoCmp::Equal : mono_cmp(a.mono, b.mono, ctx);
      if (c == MonoCmp::Greater) take = &f.terms[i++];
      else if (c == MonoCmp::Less) take = &g.terms[j++];
      else if (c == MonoCmp::Equal || (c == MonoCmp::EqualToTrunc && same_mono(a.mono, b.mono))) {
        cnst::Constant sum = cadd(a.coeff, b.coeff);
        cnst::Sign s = cnst::sign(sum, ctx.prec_cap);
        if (s != cnst::Sign::Zero)
          out.terms.push_back({a.mono, sum, s == cnst::Sign::Unknown});
        ++i; ++j;
        continue;
      } else {
        // unorderable (or equal-to-truncation but structurally distinct):
        // deterministic digest order, result flagged
        order_ok = false;
        take = a.mono->digest < b.mono->digest ? &f.terms[i++] : &g.terms[j++];
      }
    }
    out.terms.push_back(*take);
  }
  // enforce the depth budget
  if (static_cast<int>(out.terms.size()) > ctx.depth) {
    for (std::size_t k = ctx.depth; k < out.terms.size(); ++k)
      detail::bump_error(err, out.terms[k].mono, order_ok, ctx);
    out.terms.resize(ctx.depth);
  }
  // an error marker at or above the last kept term invalidates tail terms
  while (err && !out.terms.empty()) {
    MonoCmp c = mono_cmp(out.terms.back().mono, err, ctx);
    if (c == MonoCmp::Greater) break;
    if (c == MonoCmp::Undetermined) { order_ok = false; break; }
    out.terms.pop_back();
  }
  out.error = err;
  out.order_uncertain = out.order_uncertain || !order_ok;
  return out;
}

inline Series series_sub(const Series& f, const Series& g, const Ctx& ctx) {
  return series_add(f, series_neg(g), ctx);
}

// Keep the first n terms; anything dropped folds into the error order.
inline Series truncate_to(const Series& f, int n, const Ctx& ctx) {
  if (static_cast<int>(f.terms.size()) <= n) return f;
  Series out;
  out.order_uncertain = f.order_uncertain;
  out.terms.assign(f.terms.begin(), f.terms.begin() + n);
  out.error = f.terms[n].mono;  // dominates everything below, incl. f.error
  return out;
}

inline Series series_mul(const Series& f, const Series& g, const Ctx& ctx) {
  if (f.terms.empty() && !f.error) return {};
  if (g.terms.empty() && !g.error) return {};
  Series out;
  out.order_uncertain = f.order_uncertain || g.order_uncertain;
  // cross errors: O(ef)*lead(g) and O(eg)*lead(f); ef*eg is dominated
  bool order_ok = true;
  MonoPtr err;
  if (f.error && !g.terms.empty())
    detail::bump_error(err, mono_mul(f.error, g.terms[0].mono, ctx), order_ok, ctx);
  if (g.error && !f.terms.empty())
    detail::bump_error(err, mono_mul(g.error, f.terms[0].mono, ctx), order_ok, ctx);
  if (f.error && g.error)
    detail::bump_error(err, mono_mul(f.error, g.error, ctx), order_ok, ctx);
  for (const auto& a : f.terms) {
    Series piece;
    piece.terms.reserve(g.terms.size());
    for (const auto& b : g.terms) {
      cnst::Constant c = cmul(a.coeff, b.coeff);
      piece.terms.push_back({mono_mul(a.mono, b.mono, ctx), c, a.sign_unknown || b.sign_unknown});
    }
    out = series_add(out, piece, ctx);
  }
  if (err) {
    Series tail;
    tail.error = err;
    out = series_add(out, tail, ctx);
  }
  out.order_uncertain = out.order_uncertain || !order_ok;
  return out;
}

inline Series series_pow_int(const Series& f, unsigned long k, const Ctx& ctx) {
  Series r = series_const(cnst::Constant::rational(1), ctx);
  Series sq = f;
  while (k > 0) {
    if (k & 1) r = series_mul(r, sq, ctx);
    k >>= 1;
    if (k) sq = series_mul(sq, sq, ctx);
  }
  return r;
}

namespace detail {

// f = c0*m0*(1 + eps) with eps infinitesimal relative to the lead;
// returns eps. Leading coefficient must have known sign.
inline Series eps_of(const Series& f, const Ctx& ctx) {
  const Term& lead = f.terms.front();
  MonoPtr inv_m0 = mono_inv(lead.mono);
  Series eps;
  eps.order_uncertain = f.order_uncertain;
  for (std::size_t i = 1; i < f.terms.size(); ++i) {
    const Term& t = f.terms[i];
    eps.terms.push_back({mono_mul(t.mono, inv_m0, ctx), cdiv(t.coeff, lead.coeff),
                         t.sign_unknown});
  }
  if (f.error) eps.error = mono_mul(f.error, inv_m0, ctx);
  return eps;
}

// sum over n of q(n) * eps^n, for infinitesimal eps.
template <typename CoeffFn>
Series power_series_at(const Series& eps, CoeffFn q, const Ctx& ctx) {
  Series acc = series_const(cnst::Constant::rational(q(0)), ctx);
  if (eps.terms.empty() && !eps.error) return acc;
  Series pw = eps;
  for (int n = 1; n <= ctx.depth + 1; ++n) {
    mpq_class c = q(n);
    if (c != 0) acc = series_add(acc, [&] {
      Series scaled = pw;
      for (auto& t : scaled.terms) t.coeff = cnst::scale(t.coeff, c);
      return scaled;
    }(), ctx);
    if (pw.terms.empty()) break;
    if (n <= ctx.depth) pw = series_mul(pw, eps, ctx);
  }
  if (!pw.terms.empty() && !eps.terms.empty()) {
    Series tail;
    bool order_ok = true;
    tail.error = mono_mul(pw.terms[0].mono, eps.terms[0].mono, ctx);
    bump_error(tail.error, acc.error, order_ok, ctx);
    Series fin;
    fin.error = tail.error;
    acc = series_add(acc, fin, ctx);
    acc.order_uncertain = acc.order_uncertain || !order_ok;
  }
  return acc;
}

inline void require_leading(const Series& f, const char* op) {
  if (f.terms.empty())
    throw precondition_error(std::string(op) + " needs a series with a leading term");
  if (f.terms.front().sign_unknown)
    throw undetermined_error(std::string(op) +
                             ": leading coefficient sign unknown at the precision cap");
}

}  // namespace detail

// Geometric-series inversion (Neumann): 1/f = c0^-1 m0^-1 sum (-eps)^n.
inline Series series_inverse(const Series& f, const Ctx& ctx) {
  detail::require_leading(f, "series_inverse");
  const Term& lead = f.terms.front();
  Series eps = detail::eps_of(f, ctx);
  Series geo = detail::power_series_at(
      eps, [](int n) { return (n % 2 == 0) ? mpq_class(1) : mpq_class(-1); }, ctx);
  Series head = series_of_mono(mono_inv(lead.mono), cdiv(cnst::Constant::rational(1), lead.coeff));
  return series_mul(head, geo, ctx);
}

struct SplitParts {
  Series up;            // terms with monomial > 1 (purely infinite part)
  cnst::Constant real;  // coefficient of the unit monomial
  Series down;          // terms with monomial < 1
};

inline SplitParts split(const Series& f, const Ctx& ctx) {
  SplitParts out;
  out.real = cnst::Constant::rational(0);
  out.up.order_uncertain = out.down.order_uncertain = f.order_uncertain;
  for (const auto& t : f.terms) {
    MonoCmp c = is_unit(t.mono) && !t.mono->trunc ? MonoCmp::Equal
                                                  : mono_cmp(t.mono, mono_unit(), ctx);
    if (c == MonoCmp::Greater || c == MonoCmp::EqualToTrunc) out.up.terms.push_back(t);
    else if (c == MonoCmp::Equal) out.real = t.coeff;
    else if (c == MonoCmp::Less) out.down.terms.push_back(t);
    else throw undetermined_error("split: monomial incomparable with 1 at the precision cap");
  }
  if (f.error) {
    MonoCmp c = mono_cmp(f.error, mono_unit(), ctx);
    if (c == MonoCmp::Less) out.down.error = f.error;
    else out.up.error = f.error;  // infinite error order: exp() will record it
  }
  return out;
}

// exp(f): the purely infinite part becomes a fresh monomial, the real part
// a constant factor, the infinitesimal part a Taylor series.
inline Series series_exp(const Series& f, const Ctx& ctx) {
  SplitParts parts = split(f, ctx);
  std::vector<ExpTerm> expo;
  expo.reserve(parts.up.terms.size());
  for (const auto& t : parts.up.terms) {
    const Monomial& m = *t.mono;
    if (m.log_power < 0 || m.log_power > 1)
      throw engine_fault("series_exp: up-part log power outside {0,1}");
    MonoPtr base = m.exponent.empty() && !m.trunc
                       ? mono_unit()
                       : make_mono(m.exponent, 0, m.trunc);
    if (is_unit(base) && m.log_power != 1)
      throw engine_fault("series_exp: up-part term breaks the infinite-term condition");
    expo.push_back(ExpTerm{base, m.log_power, t.coeff, t.sign_unknown});
  }
  std::optional<ExpScale> trunc;
  if (parts.up.error) {
    const Monomial& e = *parts.up.error;
    if (e.log_power < 0 || e.log_power > 1)
      throw engine_fault("series_exp: error-order log power outside {0,1}");
    trunc = ExpScale{e.exponent.empty() && !e.trunc ? mono_unit() : make_mono(e.exponent, 0, e.trunc),
                     e.log_power};
  }
  MonoPtr head = make_mono(std::move(expo), 0, std::move(trunc));
  cnst::Constant factor = cnst::normalize(cexp(parts.real));
  Series head_series = series_of_mono(head, factor);
  head_series.order_uncertain = f.order_uncertain;
  if (parts.down.terms.empty() && !parts.down.error) return head_series;
  Series taylor = detail::power_series_at(
      parts.down,
      [fact = mpz_class(1), n_prev = 0](int n) mutable {
        // 1/n!
        while (n_prev < n) fact *= ++n_prev;
        return mpq_class(1, fact);
      },
      ctx);
  return series_mul(head_series, taylor, ctx);
}

// log(f) = exponent-series-of-lead + log(lead coefficient) + log(1 + eps).
// The first summand may contain log x monomials; that is expected for
// intermediates and checked away at the top level.
inline Series series_log(const Series& f, const Ctx& ctx) {
  detail::require_leading(f, "series_log");
  const Term& lead = f.terms.front();
  if (cnst::sign(lead.coeff, ctx.prec_cap) != cnst::Sign::Positive)
    throw precondition_error("series_log needs a positive leading coefficient");
  if (lead.mono->log_power != 0)
    throw engine_fault("series_log applied to a log-carrying leading monomial");
  Series logm;
  for (const auto& et : lead.mono->exponent) {
    MonoPtr m = make_mono(et.base->exponent, et.log_flag, et.base->trunc);
    logm.terms.push_back({m, et.coeff, et.sign_unknown});
  }
  if (lead.mono->trunc)
    logm.error = make_mono(lead.mono->trunc->base->exponent, lead.mono->trunc->log_flag,
                           lead.mono->trunc->base->trunc);
  cnst::Constant logc = cnst::normalize(clog(lead.coeff));
  Series constant_part = series_const(logc, ctx);
  Series eps = detail::eps_of(f, ctx);
  Series mercator = detail::power_series_at(
      eps,
      [](int n) { return n == 0 ? mpq_class(0) : mpq_class((n % 2 == 1) ? 1 : -1, n); },
      ctx);
  return series_add(series_add(logm, constant_part, ctx), mercator, ctx);
}

// f^g = exp(g log f)
inline Series series_pow(const Series& f, const Series& g, const Ctx& ctx) {
  return series_exp(series_mul(g, series_log(f, ctx), ctx), ctx);
}

// ---- top-level invariants ---------------------------------------------------

struct InvariantReport {
  bool ok = true;
  std::vector<std::string> violations;
  void fail(std::string msg) {
    ok = false;
    violations.push_back(std::move(msg));
  }
};

std::string to_string(const MonoPtr& m);

// Checks for expansions of complete Skolem terms: support monomials are 1 or
// >= x, no log x factor survives, a visible constant term is a natural
// number, and the coefficients live in E (the leading one in E+).
inline InvariantReport check_skolem_invariants(const Series& f, const Ctx& ctx) {
  InvariantReport rep;
  bool first = true;
  for (const auto& t : f.terms) {
    if (t.mono->log_power != 0)
      rep.fail("log x monomial survives at top level: " + to_string(t.mono));
    if (!is_unit(t.mono)) {
      MonoCmp c = mono_cmp(t.mono, mono_x(), ctx);
      if (c == MonoCmp::Less)
        rep.fail("support monomial below x: " + to_string(t.mono));
      else if (c == MonoCmp::Undetermined)
        rep.fail("support monomial incomparable with x: " + to_string(t.mono));
    } else {
      auto q = cnst::exact_rational(t.coeff);
      if (!q || q->get_den() != 1 || *q < 0)
        rep.fail("constant term is not a natural number: " + cnst::to_string(t.coeff));
    }
    if (first) {
      if (t.coeff.flag() != cnst::EFlag::InEPlus)
        rep.fail("leading coefficient not tracked in E+: " + cnst::to_string(t.coeff));
      first = false;
    }
    if (!cnst::in_E(t.coeff.flag()))
      rep.fail("coefficient not tracked in E: " + cnst::to_string(t.coeff));
  }
  return rep;
}

// ---- rendering ---------------------------------------------------------------

namespace detail {

inline bool atomic_factor(const std::string& s) {
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '^' || c == '.')) return false;
  return true;
}

std::string mono_to_string(const Monomial& m);

// Renders the x-power expression sum coeff*base over the flagged terms.
inline std::string xpow_expr(const std::vector<std::pair<cnst::Constant, MonoPtr>>& pieces) {
  std::string out;
  bool first = true;
  for (const auto& [coeff, base] : pieces) {
    cnst::Constant c = cnst::normalize(coeff);
    bool neg = false;
    if (c.is_rational_leaf() && c.rat() < 0) { neg = true; c = cnst::scale(c, -1); }
    else if (c.kind() == cnst::Constant::Kind::Mul && c.child_a().is_rational_leaf() &&
             c.child_a().rat() < 0) { neg = true; c = cnst::scale(c, -1); }
    std::string piece;
    std::string cs = cnst::to_string(c);
    if (is_unit(base)) piece = cs;
    else if (cnst::is_exact_one(c)) piece = mono_to_string(*base);
    else piece = (atomic_factor(cs) ? cs : "(" + cs + ")") + "*" + mono_to_string(*base);
    // compact joins inside exponents: x^(x-1), not x^(x - 1)
    if (first) out = neg ? "-" + piece : piece;
    else out += (neg ? "-" : "+") + piece;
    first = false;
  }
  return out;
}

inline std::string mono_to_string(const Monomial& m) {
  if (m.exponent.empty() && m.log_power == 0) return "1";
  std::vector<std::string> factors;
  std::vector<std::pair<cnst::Constant, MonoPtr>> xpow;
  for (const auto& t : m.exponent) {
    if (t.log_flag == 1) {
      xpow.emplace_back(t.coeff, t.base);
      continue;
    }
    // exp(coeff * base): rendered as n^base when coeff = r*log(n)
    cnst::Constant c = cnst::normalize(t.coeff);
    mpq_class r(1);
    if (c.kind() == cnst::Constant::Kind::Mul && c.child_a().is_rational_leaf()) {
      r = c.child_a().rat();
      c = c.child_b();
    }
    std::string base_str = is_unit(t.base) ? "1" : mono_to_string(*t.base);
    if (c.kind() == cnst::Constant::Kind::Log && c.child_a().exact() &&
        c.child_a().exact()->get_den() == 1 && *c.child_a().exact() > 1) {
      std::string expo = base_str;
      if (r != 1) expo = (r.get_den() == 1 ? r.get_str() : "(" + r.get_str() + ")") + "*" + expo;
      factors.push_back(c.child_a().exact()->get_num().get_str() + "^" +
                        (atomic_factor(expo) && expo.find('^') == std::string::npos
                             ? expo : "(" + expo + ")"));
    } else {
      std::string cs = cnst::to_string(cnst::normalize(t.coeff));
      factors.push_back("exp(" + (is_unit(t.base) ? cs : (atomic_factor(cs) ? cs : "(" + cs + ")") +
                                                            "*" + base_str) + ")");
    }
  }
  if (!xpow.empty()) {
    std::string e = xpow_expr(xpow);
    if (e == "1") factors.push_back("x");
    else if (atomic_factor(e) && e.find('^') == std::string::npos) factors.push_back("x^" + e);
    else factors.push_back("x^(" + e + ")");
  }
  if (m.log_power != 0) {
    std::string l = "log(x)";
    if (m.log_power != 1) l += "^" + std::to_string(m.log_power);
    factors.push_back(l);
  }
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "*";
    out += factors[i];
  }
  return out;
}

}  // namespace detail

inline std::string to_string(const MonoPtr& m) { return detail::mono_to_string(*m); }

inline std::string to_string(const Series& f) {
  if (f.terms.empty() && !f.error) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : f.terms) {
    cnst::Constant c = cnst::normalize(t.coeff);
    bool neg = false;
    if (c.is_rational_leaf() && c.rat() < 0) { neg = true; c = cnst::scale(c, -1); }
    else if (c.kind() == cnst::Constant::Kind::Mul && c.child_a().is_rational_leaf() &&
             c.child_a().rat() < 0) { neg = true; c = cnst::scale(c, -1); }
    std::string cs = cnst::to_string(c);
    std::string ms = to_string(t.mono);
    std::string piece;
    if (ms == "1") piece = detail::atomic_factor(cs) ? cs : "(" + cs + ")";
    else if (cnst::is_exact_one(c)) piece = ms;
    else piece = (detail::atomic_factor(cs) ? cs : "(" + cs + ")") + "*" + ms;
    if (first) out = neg ? "-" + piece : piece;
    else out += (neg ? " - " : " + ") + piece;
    first = false;
  }
  if (f.error) {
    if (!first) out += " + ";
    out += "O(" + to_string(f.error) + ")";
  }
  return out;
}

// ---- numeric evaluation of monomials (ln space) -----------------------------

// ln of the monomial at rational x > 1; recursive over the exponent series.
// A truncated exponent widens the enclosure by the truncation scale.
inline mp::RealInterval mono_ln(const Monomial& m, const mpq_class& x, mpfr_prec_t prec) {
  using mp::RealInterval;
  RealInterval acc(prec);  // zero
  RealInterval lnx = RealInterval::from_rational(x, prec).log();
  RealInterval lnlnx = lnx.log();
  auto scale_value = [&](const MonoPtr& base, int flag) {
    RealInterval v = mono_ln(*base, x, prec).exp();
    if (!v.finite()) throw resource_error("monomial value overflow in ln evaluation");
    if (flag) v = v * lnx;
    return v;
  };
  for (const auto& t : m.exponent) {
    RealInterval c = cnst::eval_raw(t.coeff, prec);
    acc = acc + c * scale_value(t.base, t.log_flag);
  }
  if (m.log_power != 0)
    acc = acc + RealInterval::from_rational(mpq_class(m.log_power), prec) * lnlnx;
  if (m.trunc) {
    // unknown exponent tail of order O(scale): widen by 2*scale
    RealInterval pad = scale_value(m.trunc->base, m.trunc->log_flag);
    RealInterval two = RealInterval::from_rational(2, prec);
    RealInterval w = pad * two;
    RealInterval lo = acc - w, hi = acc + w;
    RealInterval out(prec);
    mpfr_set(out.lo(), lo.lo(), MPFR_RNDD);
    mpfr_set(out.hi(), hi.hi(), MPFR_RNDU);
    return out;
  }
  return acc;
}

}  // namespace skolem::ts
