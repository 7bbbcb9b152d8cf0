#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "skolem/asymptotics.hpp"
#include "skolem/normal_form.hpp"
#include "skolem/ordinal.hpp"
#include "skolem/term.hpp"

// Higher-level Skolem calculus: the case analysis over sums, products and
// powers, Levitz's regular functions below 2^(x^x), stratification of the
// fragments, the published order-type bounds, and the ratio spectrum probe.

namespace skolem::ops {

using term::TermPtr;

// ---- asymptotically sorted normal form --------------------------------

namespace detail {

// Selection sort by a pairwise "comes before" predicate; does not require a
// strict weak order, stays deterministic on ties.
template <typename T, typename Before>
void sort_by(std::vector<T>& v, Before before) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (before(v[j], v[best])) best = j;
    if (best != i) std::swap(v[i], v[best]);
  }
}

inline bool term_desc(asym::Comparator& cmp, const TermPtr& a, const TermPtr& b) {
  asym::CmpResult r = cmp.compare(a, b);
  if (r.v == asym::CmpResult::Greater) return true;
  if (r.v == asym::CmpResult::Less) return false;
  return term::key(a) > term::key(b);
}

}  // namespace detail

// Summands descending by asymptotic size, factors descending within each.
inline nf::NormalForm normalize(const TermPtr& t, asym::Comparator& cmp) {
  nf::NormalForm form = nf::nf_of(t);
  for (auto& s : form.summands)
    detail::sort_by(s.factors, [&](const nf::Factor& a, const nf::Factor& b) {
      return detail::term_desc(cmp, a.base, b.base);
    });
  detail::sort_by(form.summands, [&](const nf::Summand& a, const nf::Summand& b) {
    return detail::term_desc(cmp, nf::to_term(a), nf::to_term(b));
  });
  return form;
}

inline std::string to_string(const nf::NormalForm& n) {
  std::string out;
  bool first = true;
  for (const auto& s : n.summands) {
    if (!first) out += " + ";
    first = false;
    std::string prod;
    for (const auto& f : s.factors) {
      std::string b = term::format(f.base);
      if (b.find_first_of("+* ") != std::string::npos) b = "(" + b + ")";
      if (f.mult <= 4) {
        for (mpz_class i = 0; i < f.mult; ++i) prod += (prod.empty() ? "" : "*") + b;
      } else {
        prod += (prod.empty() ? "" : "*") + b + "^" + f.mult.get_str();
      }
    }
    if (prod.empty()) out += s.coeff.get_str();
    else if (s.coeff == 1) out += prod;
    else out += prod + "*" + s.coeff.get_str();
  }
  return out;
}

// ---- the case analysis --------------------------------------------------

struct Classification {
  enum Case { Case1_Product, Case2_Power, Case3_SumWithComparableComponent, Case4_Atom };
  Case c;
  TermPtr f, g;  // witnesses; null for Case4
  // Case3: whether f is a single component. The literal case analysis has a
  // gap (e.g. x*x + 1 admits no component in the class of the whole), in
  // which case f is the leading summand instead.
  bool component_witness = false;
};

namespace detail {

inline std::size_t argmax_summand(const nf::NormalForm& form, asym::Comparator& cmp) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < form.summands.size(); ++j)
    if (term_desc(cmp, nf::to_term(form.summands[j]), nf::to_term(form.summands[best]))) best = j;
  return best;
}

}  // namespace detail

inline Classification classify(const TermPtr& t, asym::Comparator& cmp) {
  using C = Classification;
  nf::NormalForm form = nf::nf_of(t);
  if (form.summands.size() == 1) {
    const nf::Summand& s = form.summands.front();
    if (s.factors.empty()) {
      if (s.coeff == 1) return {C::Case4_Atom, nullptr, nullptr, false};  // h = 1
      // n = 1 + (n-1)
      return {C::Case3_SumWithComparableComponent, term::one(), term::nat(s.coeff - 1), true};
    }
    mpz_class total_mult = s.coeff == 1 ? mpz_class(0) : mpz_class(2);
    for (const auto& f : s.factors) total_mult += f.mult;
    if (total_mult == 1) {
      const TermPtr& comp = s.factors.front().base;
      if (comp->kind == term::K::X) return {C::Case4_Atom, nullptr, nullptr, false};  // h = x
      if (comp->kind != term::K::Pow) throw engine_fault("component is not 1, x or a power");
      // peel the asymptotically largest component of the exponent
      std::vector<nf::Factor> expo;
      nf::detail::product_factors(comp->b, expo);
      std::size_t best = 0;
      for (std::size_t j = 1; j < expo.size(); ++j)
        if (detail::term_desc(cmp, expo[j].base, expo[best].base)) best = j;
      TermPtr peeled = expo[best].base;
      std::vector<nf::Factor> rest = expo;
      if (rest[best].mult == 1) rest.erase(rest.begin() + best);
      else rest[best].mult -= 1;
      TermPtr base = rest.empty() ? comp->a : term::pw(comp->a, nf::detail::product_term(rest));
      return {C::Case2_Power, base, peeled, false};
    }
    if (s.factors.size() == 1 && s.coeff > 1 && s.factors.front().mult == 1) {
      // c * component: a sum c = 1 + (c-1) with a component in the class
      const TermPtr& comp = s.factors.front().base;
      nf::Summand rest{s.coeff - 1, s.factors};
      return {C::Case3_SumWithComparableComponent, comp, nf::to_term(rest), true};
    }
    // genuine product: split the largest factor off
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.factors.size(); ++j)
      if (detail::term_desc(cmp, s.factors[j].base, s.factors[best].base)) best = j;
    nf::Summand rest = s;
    if (rest.factors[best].mult == 1) rest.factors.erase(rest.factors.begin() + best);
    else rest.factors[best].mult -= 1;
    return {C::Case1_Product, s.factors[best].base, nf::to_term(rest), false};
  }
  // several summands: a common component factor exposes a product
  auto [gcd_coeff, common] = nf::common_part(form);
  if (!common.empty()) {
    nf::Summand cf{mpz_class(1), common};
    nf::NormalForm quotient;
    for (const auto& s : form.summands) {
      nf::Summand q{s.coeff, {}};
      for (const auto& f : s.factors) {
        mpz_class m = f.mult;
        for (const auto& c : common)
          if (term::key(c.base) == term::key(f.base)) m -= c.mult;
        if (m > 0) q.factors.push_back({f.base, m});
      }
      quotient.summands.push_back(std::move(q));
    }
    return {C::Case1_Product, nf::to_term(cf), nf::to_term(quotient), false};
  }
  // otherwise a sum with the leading summand in the class of the whole
  std::size_t lead = detail::argmax_summand(form, cmp);
  const nf::Summand& s1 = form.summands[lead];
  nf::NormalForm rest;
  for (std::size_t j = 0; j < form.summands.size(); ++j)
    if (j != lead) rest.summands.push_back(form.summands[j]);
  if (s1.factors.size() == 1 && s1.factors.front().mult == 1) {
    // f = the component itself; h - f keeps (coeff-1) copies
    const TermPtr& comp = s1.factors.front().base;
    if (s1.coeff > 1) rest.summands.insert(rest.summands.begin(), {s1.coeff - 1, s1.factors});
    return {C::Case3_SumWithComparableComponent, comp, nf::to_term(rest), true};
  }
  return {C::Case3_SumWithComparableComponent, nf::to_term(s1), nf::to_term(rest), false};
}

// ---- Levitz regular functions below 2^(x^x) ------------------------------

namespace detail {

inline TermPtr two_pow_xx() { return term::pw(term::nat(2), term::pw(term::x(), term::x())); }

// exponent factors of the form p^x with p prime; returns the product of
// the p^mult if every factor matches.
inline std::optional<mpz_class> n_pow_x_value(const std::vector<nf::Factor>& expo) {
  mpz_class n = 1;
  for (const auto& f : expo) {
    if (f.base->kind != term::K::Pow || f.base->b->kind != term::K::X) return std::nullopt;
    auto p = term::semantic_nat(f.base->a);
    if (!p || mpz_probab_prime_p(p->get_mpz_t(), 40) == 0) return std::nullopt;
    if (!f.mult.fits_ulong_p() ||
        mpz_sizeinbase(p->get_mpz_t(), 2) * f.mult.get_ui() > 64) return std::nullopt;
    mpz_class pe;
    mpz_pow_ui(pe.get_mpz_t(), p->get_mpz_t(), f.mult.get_ui());
    n *= pe;
  }
  return n;
}

}  // namespace detail

// True exactly on 2, 2^(n^x) for n >= 2, and 2^(x^x) itself; everything
// else below 2^(x^x) has a witness f with f^x >= h.
inline bool is_regular_below_xx(const TermPtr& t, asym::Comparator& cmp) {
  asym::CmpResult range = cmp.compare(t, detail::two_pow_xx());
  if (range.v == asym::CmpResult::Greater)
    throw precondition_error("is_regular_below_xx: term above 2^(x^x)");
  if (range.v == asym::CmpResult::Undetermined) throw undetermined_error(range.reason);
  if (range.v == asym::CmpResult::EqualToDepth) {
    // equality to depth plus numeric confirmation
    auto n = cmp.numeric().numeric_compare(t, detail::two_pow_xx(),
                                           cmp.config().oracle_points);
    if (n == oracle::NumCmp::Indistinguishable) return true;
    throw undetermined_error("is_regular_below_xx: equality with 2^(x^x) unconfirmed");
  }
  if (auto v = term::semantic_nat(t); v && *v == 2) return true;
  nf::NormalForm form = nf::nf_of(t);
  if (form.summands.size() != 1) return false;
  const nf::Summand& s = form.summands.front();
  if (s.coeff != 1 || s.factors.size() != 1 || s.factors.front().mult != 1) return false;
  const TermPtr& comp = s.factors.front().base;
  if (comp->kind != term::K::Pow) return false;
  auto base = term::semantic_nat(comp->a);
  if (!base || *base != 2) return false;
  std::vector<nf::Factor> expo;
  nf::detail::product_factors(comp->b, expo);
  auto n = detail::n_pow_x_value(expo);
  return n && *n >= 2;
}

// Least k with f < 2^(n^x * x^k); defined whenever f < 2^((n+1)^x).
inline unsigned stratify(const TermPtr& f, unsigned n, asym::Comparator& cmp) {
  if (n < 1) throw precondition_error("stratify needs n >= 1");
  TermPtr upper = term::pw(term::nat(2), term::pw(term::nat(n + 1), term::x()));
  asym::CmpResult pre = cmp.compare(f, upper);
  if (pre.v == asym::CmpResult::Undetermined) throw undetermined_error(pre.reason);
  if (pre.v != asym::CmpResult::Less)
    throw precondition_error("stratify: term is not below 2^((n+1)^x)");
  for (unsigned k = 0; k <= 64; ++k) {
    TermPtr expo = term::pw(term::nat(n), term::x());
    if (k == 1) expo = term::mul(expo, term::x());
    else if (k > 1) expo = term::mul(expo, term::pw(term::x(), term::nat(k)));
    asym::CmpResult r = cmp.compare(f, term::pw(term::nat(2), expo));
    if (r.v == asym::CmpResult::Undetermined) throw undetermined_error(r.reason);
    if (r.v == asym::CmpResult::Less) return k;
  }
  throw resource_error("stratify: no k <= 64 found");
}

// Least n >= 1 with f below the n-th fragment bound; defined whenever
// f < 2^(x^x). The n = 1 rung is 2^x (the polynomial fragment), the higher
// rungs are 2^(n^x).
inline unsigned fragment_index(const TermPtr& f, asym::Comparator& cmp) {
  asym::CmpResult pre = cmp.compare(f, detail::two_pow_xx());
  if (pre.v == asym::CmpResult::Undetermined) throw undetermined_error(pre.reason);
  if (pre.v != asym::CmpResult::Less)
    throw precondition_error("fragment_index: term is not below 2^(x^x)");
  for (unsigned n = 1; n <= 256; ++n) {
    TermPtr expo = n == 1 ? term::x() : term::pw(term::nat(n), term::x());
    asym::CmpResult r = cmp.compare(f, term::pw(term::nat(2), expo));
    if (r.v == asym::CmpResult::Undetermined) throw undetermined_error(r.reason);
    if (r.v == asym::CmpResult::Less) return n;
  }
  throw resource_error("fragment_index: no n <= 256 found");
}

// ---- order type bounds ----------------------------------------------------

struct BoundSpec {
  enum Kind { TwoPow2x, TwoPowNx, TwoPowXx } kind;
  unsigned n = 0;  // TwoPowNx: the fragment below 2^(n^x)
};

struct OrderTypeBound {
  bool is_epsilon0 = false;
  ord::Ordinal bound;  // meaningful when !is_epsilon0
};

inline OrderTypeBound order_type_bound(const BoundSpec& spec) {
  switch (spec.kind) {
    case BoundSpec::TwoPow2x: return {false, ord::omega_tower(3)};
    case BoundSpec::TwoPowNx:
      if (spec.n < 1) throw precondition_error("fragment base must be >= 1");
      if (spec.n > 64) throw resource_error("tower too tall");
      return {false, ord::omega_tower(spec.n + 1)};
    case BoundSpec::TwoPowXx: return {true, ord::Ordinal()};
  }
  throw engine_fault("unreachable bound spec");
}

inline std::string to_string(const OrderTypeBound& b) {
  return b.is_epsilon0 ? "eps_0" : ord::to_string(b.bound);
}

// ---- enumeration ------------------------------------------------------------

struct Value {
  TermPtr rep;          // first representative in generation order
  nf::NormalForm form;
  std::string key;      // canonical normal-form key
  std::size_t size;     // leaf count of rep
};

// All distinct term values of leaf size <= max_size, deterministic order.
// Values are merged by canonical normal form during generation; shapes the
// normal form cannot afford (resource caps) are skipped.
inline std::vector<Value> enumerate_values(std::size_t max_size) {
  if (max_size < 1) throw precondition_error("enumerate_values needs size >= 1");
  if (max_size > 12) throw resource_error("enumeration capped at size 12");
  std::vector<std::vector<Value>> by_size(max_size + 1);
  std::unordered_set<std::string> seen;
  auto try_add = [&](std::size_t sz, TermPtr rep, nf::NormalForm form) {
    std::string key = nf::nf_key(form);
    if (!seen.insert(key).second) return;
    by_size[sz].push_back(Value{std::move(rep), std::move(form), std::move(key), sz});
  };
  try_add(1, term::one(), nf::nf_one());
  try_add(1, term::x(), nf::nf_x());
  for (std::size_t n = 2; n <= max_size; ++n) {
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t j = n - i;
      for (const Value& a : by_size[i])
        for (const Value& b : by_size[j]) {
          try {
            try_add(n, term::add(a.rep, b.rep), nf::nf_add(a.form, b.form));
          } catch (const resource_error&) {}
          try {
            try_add(n, term::mul(a.rep, b.rep), nf::nf_mul(a.form, b.form));
          } catch (const resource_error&) {}
          try {
            try_add(n, term::pw(a.rep, b.rep), nf::nf_pow(a.form, b.form));
          } catch (const resource_error&) {}
        }
    }
  }
  std::vector<Value> out;
  for (auto& level : by_size)
    for (auto& v : level) out.push_back(std::move(v));
  return out;
}

inline std::vector<TermPtr> enumerate_terms(std::size_t max_size) {
  std::vector<TermPtr> out;
  for (auto& v : enumerate_values(max_size)) out.push_back(v.rep);
  return out;
}

// ---- ratio spectrum (desk-scale probe of the accumulation-point theorem) ---

struct Spectrum {
  std::vector<cnst::Constant> ratios;     // ascending, pairwise separated
  std::vector<std::string> undetermined;  // reported, never merged
  std::optional<mpq_class> min_gap;       // between consecutive enclosures
};

inline Spectrum ratio_spectrum(const TermPtr& Q, std::size_t size_bound, asym::Comparator& cmp,
                               unsigned sep_bits = 128) {
  if (size_bound < 1) throw precondition_error("ratio_spectrum needs a nonempty corpus");
  Spectrum out;
  for (const Value& v : enumerate_values(size_bound)) {
    asym::DomRelation d{};
    try {
      d = cmp.dom_rel(v.rep, Q);
    } catch (const undetermined_error& e) {
      out.undetermined.push_back(term::format(v.rep) + ": " + e.what());
      continue;
    } catch (const resource_error& e) {
      out.undetermined.push_back(term::format(v.rep) + ": " + e.what());
      continue;
    }
    if (d.rel != asym::Dom::SameArchimedeanClass) continue;
    const cnst::Constant r = *d.ratio;
    bool keep = true;
    for (const auto& have : out.ratios) {
      cnst::Order o = cnst::cmp_const(r, have, cmp.config().precision_cap);
      if (o == cnst::Order::EqualExact) { keep = false; break; }
      if (o == cnst::Order::Unknown) {
        out.undetermined.push_back("ratio " + cnst::to_string(r) + " vs " +
                                   cnst::to_string(have) + ": indistinguishable");
        keep = false;
        break;
      }
    }
    if (keep) out.ratios.push_back(r);
  }
  detail::sort_by(out.ratios, [&](const cnst::Constant& a, const cnst::Constant& b) {
    return cnst::cmp_const(a, b, cmp.config().precision_cap) == cnst::Order::Less;
  });
  for (std::size_t i = 0; i + 1 < out.ratios.size(); ++i) {
    cnst::Interval lo = cnst::eval_interval(out.ratios[i], sep_bits);
    cnst::Interval hi = cnst::eval_interval(out.ratios[i + 1], sep_bits);
    mpq_class gap = hi.lo - lo.hi;
    if (!out.min_gap || gap < *out.min_gap) out.min_gap = gap;
  }
  return out;
}

}  // namespace skolem::ops
