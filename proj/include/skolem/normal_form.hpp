#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "skolem/errors.hpp"
#include "skolem/term.hpp"

// Rewriting Skolem terms to sums of coefficient-weighted products of
// components, using the identities (f1 f2)^g = f1^g f2^g,
// f^(g1+g2) = f^g1 f^g2 and f^(g1 g2) = (f^g1)^g2, plus distributivity and
// prime factorization of numeral bases. Irreducibility is decided on this
// normal form; the criterion is validated against the paper-level
// characterizations by the census tests rather than assumed.
//
// Factors carry multiplicities: x^(3^(3^3)) is one factor with a large
// exponent, not a trillion list entries.

namespace skolem::nf {

struct Factor {
  term::TermPtr base;  // a component (never 1)
  mpz_class mult;      // >= 1
};

// coeff * product of factors; a numeral n is coeff n with no factors.
struct Summand {
  mpz_class coeff;
  std::vector<Factor> factors;  // sorted descending by key(base), keys distinct
};

struct NormalForm {
  std::vector<Summand> summands;  // canonically ordered, coefficient-merged
};

namespace detail {

using FactorSig = std::vector<std::pair<std::string, mpz_class>>;

inline FactorSig factor_sig(const Summand& s) {
  FactorSig ks;
  ks.reserve(s.factors.size());
  for (const auto& f : s.factors) ks.emplace_back(term::key(f.base), f.mult);
  return ks;
}

inline void sort_factors(std::vector<Factor>& fs) {
  std::sort(fs.begin(), fs.end(),
            [](const Factor& a, const Factor& b) { return term::key(a.base) > term::key(b.base); });
}

// merge equal bases, keep descending key order
inline std::vector<Factor> merge_factors(std::vector<Factor> fs) {
  sort_factors(fs);
  std::vector<Factor> out;
  for (auto& f : fs) {
    if (!out.empty() && term::key(out.back().base) == term::key(f.base))
      out.back().mult += f.mult;
    else
      out.push_back(std::move(f));
  }
  return out;
}

inline NormalForm merge(std::vector<Summand> raw) {
  if (raw.size() > 200000) throw resource_error("normal form exceeds the summand budget");
  std::sort(raw.begin(), raw.end(),
            [](const Summand& a, const Summand& b) { return factor_sig(a) > factor_sig(b); });
  NormalForm out;
  for (auto& s : raw) {
    if (!out.summands.empty() && factor_sig(out.summands.back()) == factor_sig(s))
      out.summands.back().coeff += s.coeff;
    else
      out.summands.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

inline NormalForm nf_one() { return {{Summand{mpz_class(1), {}}}}; }
inline NormalForm nf_numeral(const mpz_class& n) { return {{Summand{n, {}}}}; }
inline NormalForm nf_x() { return {{Summand{mpz_class(1), {{term::x(), 1}}}}}; }

inline NormalForm nf_add(const NormalForm& a, const NormalForm& b) {
  std::vector<Summand> raw = a.summands;
  raw.insert(raw.end(), b.summands.begin(), b.summands.end());
  return detail::merge(std::move(raw));
}

inline NormalForm nf_mul(const NormalForm& a, const NormalForm& b) {
  std::vector<Summand> raw;
  raw.reserve(a.summands.size() * b.summands.size());
  for (const auto& s : a.summands)
    for (const auto& t : b.summands) {
      Summand p{s.coeff * t.coeff, s.factors};
      p.factors.insert(p.factors.end(), t.factors.begin(), t.factors.end());
      p.factors = detail::merge_factors(std::move(p.factors));
      raw.push_back(std::move(p));
    }
  return detail::merge(std::move(raw));
}

namespace detail {

// factor as an AST piece; pw(base, numeral) unambiguously encodes
// multiplicity, since genuine components never have numeral exponents.
inline term::TermPtr factor_term(const Factor& f) {
  if (f.mult == 1) return f.base;
  return term::pw(f.base, term::nat(f.mult));
}

}  // namespace detail

inline term::TermPtr to_term(const Summand& s) {
  term::TermPtr prod;
  for (const auto& f : s.factors) {
    term::TermPtr piece = detail::factor_term(f);
    prod = prod ? term::mul(prod, piece) : piece;
  }
  if (!prod) return term::nat(s.coeff);
  if (s.coeff == 1) return prod;
  return term::mul(prod, term::nat(s.coeff));
}

inline term::TermPtr to_term(const NormalForm& n) {
  term::TermPtr sum;
  for (const auto& s : n.summands) sum = sum ? term::add(sum, to_term(s)) : to_term(s);
  if (!sum) throw engine_fault("empty normal form");
  return sum;
}

namespace detail {

inline std::vector<std::pair<mpz_class, unsigned>> factor_numeral(mpz_class n) {
  std::vector<std::pair<mpz_class, unsigned>> out;
  for (mpz_class p = 2; p * p <= n && p < (1 << 20); p == 2 ? p = 3 : p += 2) {
    unsigned e = 0;
    while (n % p == 0) { n /= p; ++e; }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) {
    if (!mpz_probab_prime_p(n.get_mpz_t(), 40))
      throw resource_error("cannot factor numeral base " + n.get_str());
    out.emplace_back(n, 1);
  }
  return out;
}

// Split a canonical exponent product back into (component, multiplicity).
inline void product_factors(const term::TermPtr& t, std::vector<Factor>& out) {
  if (t->kind == term::K::Mul) {
    product_factors(t->a, out);
    product_factors(t->b, out);
    return;
  }
  if (t->kind == term::K::Pow) {
    if (auto m = term::semantic_nat(t->b)) {
      out.push_back({t->a, *m});
      return;
    }
  }
  out.push_back({t, 1});
}

inline term::TermPtr product_term(std::vector<Factor> fs) {
  fs = merge_factors(std::move(fs));
  term::TermPtr t;
  for (const auto& f : fs) {
    term::TermPtr piece = factor_term(f);
    t = t ? term::mul(t, piece) : piece;
  }
  if (!t) throw engine_fault("empty exponent product");
  return t;
}

// component ^ (product of components): rebuilds a single component.
inline term::TermPtr factor_pow(const term::TermPtr& f, const std::vector<Factor>& P) {
  if (f->kind == term::K::Pow && !term::semantic_nat(f->b)) {
    std::vector<Factor> expo;
    product_factors(f->b, expo);
    expo.insert(expo.end(), P.begin(), P.end());
    return term::pw(f->a, product_term(std::move(expo)));
  }
  return term::pw(f, product_term(P));
}

inline NormalForm pow_int(const NormalForm& a, const mpz_class& c) {
  if (c == 0) return nf_one();
  if (c == 1) return a;
  if (a.summands.size() == 1) {
    Summand s = a.summands.front();
    if (s.coeff != 1) {
      if (!c.fits_ulong_p() ||
          mpz_sizeinbase(s.coeff.get_mpz_t(), 2) * c.get_ui() > (1u << 22))
        throw resource_error("numeral power exceeds the resource bound");
      mpz_class r;
      mpz_pow_ui(r.get_mpz_t(), s.coeff.get_mpz_t(), c.get_ui());
      s.coeff = r;
    }
    for (auto& f : s.factors) f.mult *= c;
    return {{std::move(s)}};
  }
  if (!c.fits_ulong_p() || c.get_ui() > 65536)
    throw resource_error("numeral exponent too large to normalize a sum");
  NormalForm r = nf_one();
  NormalForm sq = a;
  unsigned long k = c.get_ui();
  while (k > 0) {
    if (k & 1) r = nf_mul(r, sq);
    k >>= 1;
    if (k) sq = nf_mul(sq, sq);
  }
  return r;
}

// base ^ (single product of components); empty P means exponent 1.
inline NormalForm pow_product(const NormalForm& base, const std::vector<Factor>& P) {
  if (P.empty()) return base;
  if (base.summands.size() > 1) {
    // additively reducible base: the power is a component as written
    return {{Summand{mpz_class(1), {{term::pw(to_term(base), product_term(P)), 1}}}}};
  }
  const Summand& s = base.summands.front();
  NormalForm out = nf_one();
  for (const auto& [p, e] : factor_numeral(s.coeff)) {
    Summand comp{mpz_class(1), {{term::pw(term::nat(p), product_term(P)), mpz_class(e)}}};
    out = nf_mul(out, {{comp}});
  }
  for (const auto& f : s.factors) {
    Summand comp{mpz_class(1), {{factor_pow(f.base, P), f.mult}}};
    out = nf_mul(out, {{comp}});
  }
  return out;
}

}  // namespace detail

inline NormalForm nf_pow(const NormalForm& f, const NormalForm& g) {
  NormalForm out = nf_one();
  for (const auto& s : g.summands) {
    NormalForm block = detail::pow_product(f, s.factors);
    out = nf_mul(out, detail::pow_int(block, s.coeff));
  }
  return out;
}

inline NormalForm nf_of(const term::TermPtr& t) {
  if (auto n = term::semantic_nat(t)) return nf_numeral(*n);
  switch (t->kind) {
    case term::K::One: return nf_one();
    case term::K::X: return nf_x();
    case term::K::Add: return nf_add(nf_of(t->a), nf_of(t->b));
    case term::K::Mul: return nf_mul(nf_of(t->a), nf_of(t->b));
    case term::K::Pow: return nf_pow(nf_of(t->a), nf_of(t->b));
  }
  throw engine_fault("unreachable term kind");
}

// Canonical value key: equal keys mean the same normal form.
inline std::string nf_key(const NormalForm& n) {
  std::string s;
  for (const auto& sm : n.summands) {
    s += sm.coeff.get_str();
    for (const auto& f : sm.factors)
      s += "*" + term::key(f.base) + "^" + f.mult.get_str();
    s += "|";
  }
  return s;
}

// ---- irreducibility ----------------------------------------------------

// Common factor content (coefficient gcd and factor multiset intersection)
// across all summands.
inline std::pair<mpz_class, std::vector<Factor>> common_part(const NormalForm& n) {
  mpz_class g = 0;
  std::map<std::string, Factor> common;
  bool first = true;
  for (const auto& s : n.summands) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), s.coeff.get_mpz_t());
    std::map<std::string, Factor> here;
    for (const auto& f : s.factors) here.emplace(term::key(f.base), f);
    if (first) { common = std::move(here); first = false; continue; }
    for (auto it = common.begin(); it != common.end();) {
      auto h = here.find(it->first);
      if (h == here.end()) { it = common.erase(it); continue; }
      if (h->second.mult < it->second.mult) it->second.mult = h->second.mult;
      ++it;
    }
  }
  std::vector<Factor> fs;
  for (auto& [k, f] : common) fs.push_back(f);
  detail::sort_factors(fs);
  return {g, std::move(fs)};
}

inline bool is_additively_irreducible(const NormalForm& n) {
  return n.summands.size() == 1 && n.summands.front().coeff == 1;
}

inline bool is_multiplicatively_irreducible(const NormalForm& n) {
  if (n.summands.size() == 1) {
    const Summand& s = n.summands.front();
    if (s.factors.empty())
      return s.coeff == 1 || mpz_probab_prime_p(s.coeff.get_mpz_t(), 40) > 0;
    return s.coeff == 1 && s.factors.size() == 1 && s.factors.front().mult == 1;
  }
  auto cp = common_part(n);
  return cp.second.empty();  // a common component factor exposes a product
}

inline bool is_component(const NormalForm& n) {
  return is_additively_irreducible(n) && is_multiplicatively_irreducible(n);
}

inline bool is_additively_irreducible(const term::TermPtr& t) {
  return is_additively_irreducible(nf_of(t));
}
inline bool is_multiplicatively_irreducible(const term::TermPtr& t) {
  return is_multiplicatively_irreducible(nf_of(t));
}
inline bool is_component(const term::TermPtr& t) { return is_component(nf_of(t)); }

}  // namespace skolem::nf
