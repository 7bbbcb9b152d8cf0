#pragma once

// Independent desk-scale oracles for the ordinal module. Everything here
// computes order types from explicit well-order arrangements, not from the
// CNF arithmetic under test.
//
// Ordinals of type <= w*4 are handled as block lists over {unit, omega};
// the natural sum oracle enumerates every merge of two block lists and
// takes the maximal resulting order type. Splitting an omega block into a
// finite prefix plus a tail never beats keeping it whole (the prefix gets
// absorbed by any later omega block), so merges realize the maximum over
// all linear extensions of the disjoint union.
//
// The natural product oracle decomposes A x B into block rectangles,
// enumerates every linear extension of the finite rectangle grid, and sums
// the rectangle contributions in that order. Primitive contributions:
// 1x1 -> 1, 1xw and wx1 -> w, wxw -> w^2 (a column-by-column sweep of the
// w x w grid realizes w^2, and w^2 = o(w x w) is the classical base fact).

#include <gmpxx.h>

#include <algorithm>
#include <vector>

#include "skolem/ordinal.hpp"

namespace ordinal_oracles {

using skolem::ord::Ordinal;

enum class Block { Unit, Omega };

// Ordinal < w^2 as w*p + q.
struct SmallOrd {
  long p = 0, q = 0;
  void append(Block b) {
    if (b == Block::Unit) ++q;
    else { ++p; q = 0; }
  }
  bool operator==(const SmallOrd&) const = default;
};

inline Ordinal to_ordinal(const SmallOrd& s) {
  std::vector<Ordinal::Term> ts;
  if (s.p > 0) ts.push_back({Ordinal(1L), mpz_class(s.p)});
  if (s.q > 0) ts.push_back({Ordinal(), mpz_class(s.q)});
  return Ordinal(std::move(ts));
}

// Block decomposition; requires every CNF exponent to be 0 or 1.
inline std::vector<Block> blocks_of(const Ordinal& a) {
  std::vector<Block> out;
  for (const auto& t : a.terms()) {
    Block b;
    if (t.exponent.is_zero()) b = Block::Unit;
    else if (t.exponent == Ordinal(1L)) b = Block::Omega;
    else throw std::runtime_error("block oracle only handles order types < w^2");
    for (mpz_class i = 0; i < t.coeff; ++i) out.push_back(b);
  }
  return out;
}

namespace detail {

inline void merge_max(const std::vector<Block>& a, std::size_t i, const std::vector<Block>& b,
                      std::size_t j, SmallOrd acc, SmallOrd& best) {
  if (i == a.size() && j == b.size()) {
    if (acc.p > best.p || (acc.p == best.p && acc.q > best.q)) best = acc;
    return;
  }
  if (i < a.size()) {
    SmallOrd next = acc;
    next.append(a[i]);
    merge_max(a, i + 1, b, j, next, best);
  }
  if (j < b.size()) {
    SmallOrd next = acc;
    next.append(b[j]);
    merge_max(a, i, b, j + 1, next, best);
  }
}

}  // namespace detail

// Maximal order type over all merges of the two block sequences.
inline Ordinal oracle_hsum(const Ordinal& a, const Ordinal& b) {
  auto ba = blocks_of(a), bb = blocks_of(b);
  SmallOrd best;
  detail::merge_max(ba, 0, bb, 0, SmallOrd{}, best);
  return to_ordinal(best);
}

// Plain concatenation = ordinal sum, for the add() examples.
inline Ordinal oracle_add(const Ordinal& a, const Ordinal& b) {
  SmallOrd acc;
  for (Block x : blocks_of(a)) acc.append(x);
  for (Block x : blocks_of(b)) acc.append(x);
  return to_ordinal(acc);
}

// a * k for finite k: k copies of a laid end to end.
inline Ordinal oracle_mul_finite(const Ordinal& a, long k) {
  SmallOrd acc;
  auto blocks = blocks_of(a);
  for (long i = 0; i < k; ++i)
    for (Block x : blocks) acc.append(x);
  return to_ordinal(acc);
}

// Ordinal < w^3 as w^2*a + w*b + c.
struct Tri {
  long a = 0, b = 0, c = 0;
  enum class Blk { Unit, Omega, Omega2 };
  void append(Blk x) {
    if (x == Blk::Unit) ++c;
    else if (x == Blk::Omega) { ++b; c = 0; }
    else { ++a; b = 0; c = 0; }
  }
  bool less(const Tri& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
  }
};

inline Ordinal to_ordinal(const Tri& t) {
  std::vector<Ordinal::Term> ts;
  if (t.a > 0) ts.push_back({Ordinal(2L), mpz_class(t.a)});
  if (t.b > 0) ts.push_back({Ordinal(1L), mpz_class(t.b)});
  if (t.c > 0) ts.push_back({Ordinal(), mpz_class(t.c)});
  return Ordinal(std::move(ts));
}

namespace detail {

inline void grid_extensions(const std::vector<Tri::Blk>& contrib, int m, int n,
                            std::vector<bool>& used, int left, Tri acc, Tri& best) {
  if (left == 0) {
    if (best.less(acc)) best = acc;
    return;
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      int idx = i * n + j;
      if (used[idx]) continue;
      // minimal among unused: predecessors in the grid must be used
      if (i > 0 && !used[(i - 1) * n + j]) continue;
      if (j > 0 && !used[i * n + j - 1]) continue;
      used[idx] = true;
      Tri next = acc;
      next.append(contrib[idx]);
      grid_extensions(contrib, m, n, used, left - 1, next, best);
      used[idx] = false;
    }
}

}  // namespace detail

// Maximal order type over rectangle-grid linear extensions of the
// componentwise product order on A x B.
inline Ordinal oracle_hprod(const Ordinal& a, const Ordinal& b) {
  auto ba = blocks_of(a), bb = blocks_of(b);
  int m = static_cast<int>(ba.size()), n = static_cast<int>(bb.size());
  if (m == 0 || n == 0) return Ordinal();
  if (m > 4 || n > 4) throw std::runtime_error("grid oracle only handles <= 4 blocks per side");
  std::vector<Tri::Blk> contrib(m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      bool oi = ba[i] == Block::Omega, oj = bb[j] == Block::Omega;
      contrib[i * n + j] = oi && oj   ? Tri::Blk::Omega2
                           : oi || oj ? Tri::Blk::Omega
                                      : Tri::Blk::Unit;
    }
  std::vector<bool> used(m * n, false);
  Tri best;
  best.c = -1;
  detail::grid_extensions(contrib, m, n, used, m * n, Tri{}, best);
  return to_ordinal(best);
}

// ---- transfinite recursion oracle for iterated natural sums -------------

// Successor, written out by hand to stay independent of add().
inline Ordinal succ(const Ordinal& e) {
  std::vector<Ordinal::Term> ts = e.terms();
  if (!ts.empty() && ts.back().exponent.is_zero()) ts.back().coeff += 1;
  else ts.push_back({Ordinal(), mpz_class(1)});
  return Ordinal(std::move(ts));
}

// sup over k < w of (base (+) a(.)k). The coefficient at a's leading
// exponent e grows without bound while everything above e is fixed, so the
// supremum is (base restricted above e) + w^(e+1).
inline Ordinal sup_affine(const Ordinal& base, const Ordinal& a) {
  if (a.is_zero()) return base;
  Ordinal se = succ(a.leading_exponent());
  std::vector<Ordinal::Term> out;
  mpz_class carry = 1;
  for (const auto& t : base.terms()) {
    if (t.exponent > se) out.push_back(t);
    else if (t.exponent == se) carry += t.coeff;
  }
  out.push_back({se, carry});
  return Ordinal(std::move(out));
}

// (+)_{i < w*j + k} a, computed by the defining transfinite recursion:
// successor steps use hsum, limit steps use sup_affine.
inline Ordinal hsum_iter_recursion(const Ordinal& a, long j, long k) {
  Ordinal s;
  for (long jj = 0; jj < j; ++jj) s = sup_affine(s, a);
  for (long kk = 0; kk < k; ++kk) s = skolem::ord::hsum(s, a);
  return s;
}

// ---- independent comparator for CNFs with small exponents ----------------

// Ground-truth order for ordinals below w^w * 2: degree-major lexicographic
// comparison of polynomial forms, with an optional w^w-level head.
struct PolyForm {
  long head = 0;                 // coefficient of w^w
  std::vector<long> coeffs;      // coeffs[d] = coefficient of w^d
};

inline PolyForm poly_form(const Ordinal& a) {
  PolyForm f;
  for (const auto& t : a.terms()) {
    if (t.exponent == Ordinal::omega()) {
      f.head = static_cast<long>(t.coeff.get_si());
      continue;
    }
    if (!t.exponent.is_finite()) throw std::runtime_error("poly oracle needs exponents < w or = w");
    std::size_t d = static_cast<std::size_t>(t.exponent.finite_value().get_si());
    if (f.coeffs.size() <= d) f.coeffs.resize(d + 1, 0);
    f.coeffs[d] = static_cast<long>(t.coeff.get_si());
  }
  return f;
}

inline int poly_cmp(const Ordinal& x, const Ordinal& y) {
  PolyForm a = poly_form(x), b = poly_form(y);
  if (a.head != b.head) return a.head < b.head ? -1 : 1;
  std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  for (std::size_t d = n; d-- > 0;) {
    long ca = d < a.coeffs.size() ? a.coeffs[d] : 0;
    long cb = d < b.coeffs.size() ? b.coeffs[d] : 0;
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

// ---- exhaustive pools -----------------------------------------------------

// All CNFs with exponents drawn from `exps` (descending choices), at most
// max_terms terms, coefficients 1..max_coeff.
inline std::vector<Ordinal> pool(const std::vector<Ordinal>& exps, int max_terms, int max_coeff) {
  std::vector<Ordinal> sorted = exps;
  std::sort(sorted.begin(), sorted.end(),
            [](const Ordinal& a, const Ordinal& b) { return a > b; });
  std::vector<Ordinal> out{Ordinal()};
  std::vector<Ordinal::Term> cur;
  auto rec = [&](auto&& self, std::size_t from, int left) -> void {
    if (left == 0) return;
    for (std::size_t i = from; i < sorted.size(); ++i) {
      for (int c = 1; c <= max_coeff; ++c) {
        cur.push_back({sorted[i], mpz_class(c)});
        out.push_back(Ordinal(cur));
        self(self, i + 1, left - 1);
        cur.pop_back();
      }
    }
  };
  rec(rec, 0, max_terms);
  return out;
}

}  // namespace ordinal_oracles
