#pragma once

#include <optional>
#include <string>

#include "skolem/expand.hpp"
#include "skolem/oracle.hpp"
#include "skolem/series.hpp"
#include "skolem/term.hpp"

// Asymptotic order and equivalence of Skolem terms, decided on truncated
// expansions. The symbolic engine is the decision maker; the numeric oracle
// is a mandatory tripwire on strict verdicts (a disagreement is an engine
// fault, not a soft failure).

namespace skolem::asym {

struct CmpResult {
  enum V { Less, Greater, EqualToDepth, Undetermined } v;
  int depth = 0;        // EqualToDepth: depth both sides were expanded to
  std::string reason;   // Undetermined: why
  bool operator==(V o) const { return v == o; }
};

enum class Dom { StrictlyDominated, SameArchimedeanClass, StrictlyDominates };

struct DomRelation {
  Dom rel;
  std::optional<cnst::Constant> ratio;  // present iff SameArchimedeanClass
};

struct LimitRatio {
  enum K { Zero, Finite, Infinite } kind;
  std::optional<cnst::Constant> r;  // present iff Finite
};

class Comparator {
 public:
  explicit Comparator(engine::Config cfg = {}) : exp_(cfg) {}

  engine::Expander& expander() { return exp_; }
  oracle::Oracle& numeric() { return orc_; }
  const engine::Config& config() const { return exp_.config(); }

  // f < g as germs at infinity. Strict verdicts are final under
  // depth/precision increase and are cross-checked numerically.
  CmpResult compare(const term::TermPtr& f, const term::TermPtr& g) {
    ts::Ctx c = exp_.ctx();
    ts::Series d = ts::series_sub(exp_.expand(f), exp_.expand(g), c);
    if (d.order_uncertain)
      return {CmpResult::Undetermined, 0,
              "monomial order undecidable at the precision cap (precision cap)"};
    CmpResult r{CmpResult::EqualToDepth, exp_.config().depth, ""};
    if (!d.terms.empty()) {
      const ts::Term& lead = d.terms.front();
      if (lead.sign_unknown)
        return {CmpResult::Undetermined, 0,
                "leading coefficient sign unknown at the precision cap (precision cap)"};
      cnst::Sign s = cnst::sign(lead.coeff, exp_.config().precision_cap);
      if (s == cnst::Sign::Unknown)
        return {CmpResult::Undetermined, 0,
                "leading coefficient sign unknown at the precision cap (precision cap)"};
      if (s == cnst::Sign::Zero)
        throw engine_fault("zero coefficient survived merging");
      r.v = s == cnst::Sign::Positive ? CmpResult::Greater : CmpResult::Less;
    }
    if (r.v == CmpResult::Less || r.v == CmpResult::Greater) tripwire(f, g, r.v);
    return r;
  }

  // Archimedean-class relation; the ratio is leading-coefficient quotient.
  DomRelation dom_rel(const term::TermPtr& f, const term::TermPtr& g) {
    const ts::Series& ef = exp_.expand(f);
    const ts::Series& eg = exp_.expand(g);
    if (ef.terms.empty() || eg.terms.empty())
      throw engine_fault("empty expansion of a Skolem term");
    const ts::Term& lf = ef.terms.front();
    const ts::Term& lg = eg.terms.front();
    if (lf.sign_unknown || lg.sign_unknown)
      throw undetermined_error("leading coefficient sign unknown at the precision cap");
    switch (ts::mono_cmp(lf.mono, lg.mono, exp_.ctx())) {
      case ts::MonoCmp::Greater: return {Dom::StrictlyDominates, std::nullopt};
      case ts::MonoCmp::Less: return {Dom::StrictlyDominated, std::nullopt};
      case ts::MonoCmp::Equal:
        return {Dom::SameArchimedeanClass, cnst::normalize(cdiv(lf.coeff, lg.coeff))};
      case ts::MonoCmp::EqualToTrunc:
        throw undetermined_error("leading monomials agree only to the truncated exponent depth");
      case ts::MonoCmp::Undetermined:
        throw undetermined_error("leading monomials incomparable at the precision cap");
    }
    throw engine_fault("unreachable");
  }

  // f ~ g: same class with ratio provably 1.
  bool is_sim(const term::TermPtr& f, const term::TermPtr& g) {
    DomRelation d = dom_rel(f, g);
    if (d.rel != Dom::SameArchimedeanClass) return false;
    switch (cnst::cmp_const(*d.ratio, cnst::Constant::rational(1), exp_.config().precision_cap)) {
      case cnst::Order::EqualExact: return true;
      case cnst::Order::Less:
      case cnst::Order::Greater: return false;
      case cnst::Order::Unknown:
        throw undetermined_error("ratio incomparable with 1 at the precision cap");
    }
    return false;
  }

  LimitRatio limit_ratio(const term::TermPtr& f, const term::TermPtr& g) {
    DomRelation d = dom_rel(f, g);
    switch (d.rel) {
      case Dom::StrictlyDominated: return {LimitRatio::Zero, std::nullopt};
      case Dom::StrictlyDominates: return {LimitRatio::Infinite, std::nullopt};
      case Dom::SameArchimedeanClass: return {LimitRatio::Finite, d.ratio};
    }
    throw engine_fault("unreachable");
  }

  // f =<_c g and f ~_c g via  c(f-g) =< g  /  c(f-g) < g.
  bool asymp_c(const term::TermPtr& f, const term::TermPtr& g, const term::TermPtr& c) {
    return ftoc(f, g, c).asymp;
  }
  bool sim_c(const term::TermPtr& f, const term::TermPtr& g, const term::TermPtr& c) {
    FtocResult r = ftoc(f, g, c);
    if (!r.sim_known)
      throw undetermined_error("sim_c: comparison undecided at the current depth/precision");
    return r.sim;
  }

  // For c = 1: the class ratio r with h ~ r Q. For numeral c = k: r^k.
  // For unbounded c: r = exp(s) where h/Q = 1 + s/c + o(1/c).
  cnst::Constant ratio_class_coefficient(const term::TermPtr& h, const term::TermPtr& Q,
                                         const term::TermPtr& c) {
    check_c_at_least_one(c);
    if (auto k = term::semantic_nat(c)) {
      DomRelation d = dom_rel(h, Q);
      if (d.rel != Dom::SameArchimedeanClass)
        throw precondition_error("ratio_class_coefficient needs h in the class of Q");
      if (*k == 1) return *d.ratio;
      if (!k->fits_slong_p() || k->get_si() > 64)
        throw resource_error("numeral exponent too large");
      return cnst::normalize(cpow_int(*d.ratio, k->get_si()));
    }
    if (!asymp_c(h, Q, c))
      throw precondition_error("ratio_class_coefficient needs h =<_c Q");
    ts::Ctx cx = exp_.ctx();
    ts::Series ratio = ts::series_mul(exp_.expand(h), ts::series_inverse(exp_.expand(Q), cx), cx);
    ts::Series rm1 = ts::series_sub(ratio, ts::series_const(cnst::Constant::rational(1), cx), cx);
    ts::Series s_series = ts::series_mul(exp_.expand(c), rm1, cx);
    cnst::Constant s = cnst::Constant::rational(0);
    for (const auto& t : s_series.terms) {
      if (ts::is_unit(t.mono) && !t.mono->trunc) { s = t.coeff; continue; }
      ts::MonoCmp mc = ts::mono_cmp(t.mono, ts::mono_unit(), exp_.ctx());
      if (mc == ts::MonoCmp::Greater || mc == ts::MonoCmp::EqualToTrunc ||
          mc == ts::MonoCmp::Undetermined)
        throw undetermined_error("c*(h/Q - 1) has content at or above scale 1");
    }
    return cnst::normalize(cnst::cexp(s));
  }

 private:
  struct FtocResult {
    bool asymp;
    bool sim;
    bool sim_known;
  };

  void check_c_at_least_one(const term::TermPtr& c) {
    CmpResult r = compare(c, term::one());
    if (r.v == CmpResult::Less) throw precondition_error("c must be >= 1");
    if (r.v == CmpResult::Undetermined) throw undetermined_error(r.reason);
  }

  FtocResult ftoc(const term::TermPtr& f, const term::TermPtr& g, const term::TermPtr& c) {
    check_c_at_least_one(c);
    ts::Ctx cx = exp_.ctx();
    const ts::Series& eg = exp_.expand(g);
    if (eg.terms.empty()) throw engine_fault("empty expansion of a Skolem term");
    ts::Series d = ts::series_sub(exp_.expand(f), exp_.expand(g), cx);
    ts::Series cd = ts::series_mul(exp_.expand(c), d, cx);
    const ts::MonoPtr& mg = eg.terms.front().mono;
    if (cd.terms.empty()) {
      if (!cd.error) return {true, true, true};  // c(f-g) vanishes to depth
      ts::MonoCmp mc = ts::mono_cmp(cd.error, mg, cx);
      if (mc == ts::MonoCmp::Less) return {true, true, true};
      throw undetermined_error("c(f-g) is only bounded by an error order not below g");
    }
    const ts::Term& lead = cd.terms.front();
    switch (ts::mono_cmp(lead.mono, mg, cx)) {
      case ts::MonoCmp::Less: return {true, true, true};
      case ts::MonoCmp::Equal:
        if (lead.sign_unknown) return {true, false, false};  // could vanish
        return {true, false, true};
      case ts::MonoCmp::Greater:
        if (lead.sign_unknown)
          throw undetermined_error("leading coefficient of c(f-g) has unknown sign");
        return {false, false, true};
      default:
        throw undetermined_error("c(f-g) incomparable with g at the precision cap");
    }
  }

  // Strict symbolic verdicts must not contradict the numeric oracle at the
  // configured sample points. Range overflows leave the check unavailable.
  void tripwire(const term::TermPtr& f, const term::TermPtr& g, CmpResult::V v) {
    const auto& xs = exp_.config().oracle_points;
    if (xs.empty()) return;
    oracle::NumCmp n;
    try {
      n = orc_.numeric_compare(f, g, xs);
    } catch (const resource_error&) {
      return;
    }
    if ((v == CmpResult::Less && n == oracle::NumCmp::Greater) ||
        (v == CmpResult::Greater && n == oracle::NumCmp::Less))
      throw engine_fault("symbolic verdict contradicts the numeric oracle: " + term::format(f) +
                         " vs " + term::format(g));
  }

  engine::Expander exp_;
  oracle::Oracle orc_;
};

}  // namespace skolem::asym
