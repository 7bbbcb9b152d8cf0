#pragma once

#include <gmpxx.h>

#include <unordered_map>
#include <vector>

#include "skolem/series.hpp"
#include "skolem/term.hpp"

// Expansion of Skolem terms into truncated Ressayre forms. f^g goes through
// exp(g log f); small integer exponents take the exact repeated-product
// path so polynomial identities stay exact.

namespace skolem::engine {

struct Config {
  int depth = 8;                 // series terms kept
  unsigned precision_cap = 256;  // bits
  std::vector<mpq_class> oracle_points = {mpq_class(20), mpq_class(40)};
};

class Expander {
 public:
  explicit Expander(Config cfg = {}) : cfg_(std::move(cfg)) {
    if (cfg_.depth < 1) throw precondition_error("depth must be >= 1");
    if (cfg_.precision_cap < 32) throw precondition_error("precision cap must be >= 32");
  }

  const Config& config() const { return cfg_; }
  // Working budget: intermediates carry extra terms so that the requested
  // depth of the final result is exact above its error order.
  ts::Ctx ctx() const { return {cfg_.depth + kSlack, cfg_.precision_cap}; }

  const ts::Series& expand(const term::TermPtr& t) {
    const std::string k = term::key(t);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    ts::Series s = compute(t);
    return memo_.emplace(std::move(k), std::move(s)).first->second;
  }

  // Expansion truncated to the configured display depth.
  ts::Series expand_display(const term::TermPtr& t) {
    return ts::truncate_to(expand(t), cfg_.depth, ctx());
  }

 private:
  ts::Series compute(const term::TermPtr& t) {
    using namespace skolem::ts;
    Ctx c = ctx();
    switch (t->kind) {
      case term::K::One: return series_const(cnst::Constant::rational(1), c);
      case term::K::X: return series_x();
      case term::K::Add: return series_add(expand(t->a), expand(t->b), c);
      case term::K::Mul: return series_mul(expand(t->a), expand(t->b), c);
      case term::K::Pow: {
        auto k = term::semantic_nat(t->b);
        if (k && k->fits_ulong_p() && k->get_ui() <= 64)
          return series_pow_int(expand(t->a), k->get_ui(), c);
        return series_pow(expand(t->a), expand(t->b), c);
      }
    }
    throw engine_fault("unreachable term kind");
  }

  static constexpr int kSlack = 6;

  Config cfg_;
  std::unordered_map<std::string, ts::Series> memo_;
};

}  // namespace skolem::engine
