#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "skolem/asymptotics.hpp"
#include "skolem/skolem_ops.hpp"

using namespace skolem;
using term::TermPtr;
using asym::CmpResult;
using asym::Dom;

namespace {
asym::Comparator& CMP() {
  static asym::Comparator c;
  return c;
}
TermPtr P(const char* s) { return term::parse(s); }
}  // namespace

TEST_CASE("compare basics") {
  CHECK(CMP().compare(P("x^x"), P("2^x")).v == CmpResult::Greater);
  CHECK(CMP().compare(P("2^x"), P("x^x")).v == CmpResult::Less);
  CHECK(CMP().compare(P("(x+1)^x"), P("(x+1)^x")).v == CmpResult::EqualToDepth);
  CHECK(CMP().compare(P("2^(2^x)"), P("x^(x^2)")).v == CmpResult::Greater);
  CHECK(CMP().compare(P("x+1"), P("x")).v == CmpResult::Greater);
  CHECK(CMP().compare(P("x"), P("x+1")).v == CmpResult::Less);
  CHECK(CMP().compare(P("2^x"), P("x^5")).v == CmpResult::Greater);
  CHECK(CMP().compare(P("x^x"), P("x^x*2")).v == CmpResult::Less);
  // equal values with different builds agree to depth
  CHECK(CMP().compare(P("4^x"), P("2^x*2^x")).v != CmpResult::Less);
  CHECK(CMP().compare(P("x^(x+1)"), P("x*x^x")).v == CmpResult::EqualToDepth);
}

TEST_CASE("dominance relation") {
  auto d1 = CMP().dom_rel(P("x+1"), P("x"));
  CHECK(d1.rel == Dom::SameArchimedeanClass);
  CHECK(cnst::cmp_const(*d1.ratio, cnst::Constant::rational(1), 128) == cnst::Order::EqualExact);

  auto d2 = CMP().dom_rel(P("(x+1)^x"), P("x^x"));
  CHECK(d2.rel == Dom::SameArchimedeanClass);
  CHECK(cnst::to_string(*d2.ratio) == "e");
  CHECK(d2.ratio->flag() == cnst::EFlag::InEPlus);

  CHECK(CMP().dom_rel(P("x"), P("x*x")).rel == Dom::StrictlyDominated);
  CHECK(CMP().dom_rel(P("x*x + x"), P("x")).rel == Dom::StrictlyDominates);
}

TEST_CASE("asymptotic equivalence") {
  CHECK(CMP().is_sim(P("x+1"), P("x")));
  CHECK(!CMP().is_sim(P("(x+1)^x"), P("x^x")));
  CHECK(!CMP().is_sim(P("2*x"), P("x")));
  CHECK(CMP().is_sim(P("x^x + x"), P("x^x + 1")));
}

TEST_CASE("limit ratios") {
  auto l1 = CMP().limit_ratio(P("x+1"), P("x"));
  REQUIRE(l1.kind == asym::LimitRatio::Finite);
  CHECK(cnst::cmp_const(*l1.r, cnst::Constant::rational(1), 128) == cnst::Order::EqualExact);
  auto l2 = CMP().limit_ratio(P("(x+1)^x"), P("x^x"));
  REQUIRE(l2.kind == asym::LimitRatio::Finite);
  CHECK(cnst::to_string(*l2.r) == "e");
  CHECK(l2.r->flag() == cnst::EFlag::InEPlus);
  CHECK(CMP().limit_ratio(P("2^x"), P("x^x")).kind == asym::LimitRatio::Zero);
  CHECK(CMP().limit_ratio(P("x^x"), P("2^x")).kind == asym::LimitRatio::Infinite);
  // the numeric side agrees: 2^x/x^x is tiny at x = 30
  auto enc = CMP().numeric().numeric_limit(P("2^x"), P("x^x"), {mpq_class(30)});
  CHECK(enc[0].second < mpq_class(1, 1000000));
}

TEST_CASE("asymp_c and sim_c") {
  CHECK(CMP().asymp_c(P("x+1"), P("x"), P("x")));
  CHECK(!CMP().sim_c(P("x+1"), P("x"), P("x")));
  CHECK(CMP().sim_c(P("x^x + x"), P("x^x + x"), P("x*x")));
  CHECK(!CMP().asymp_c(P("x+1"), P("x"), P("x*x")));
  CHECK(CMP().asymp_c(P("x+1"), P("x"), P("1")));
  CHECK(CMP().sim_c(P("x+1"), P("x"), P("1")));
}

TEST_CASE("monotone coarsening of the finer relations") {
  // c >= c' >= 1 from {1, x, x*x}: asymp_c at c implies asymp_c at c'
  std::vector<TermPtr> cs = {P("1"), P("x"), P("x*x")};
  std::vector<std::pair<const char*, const char*>> pairs = {
      {"x+1", "x"},        {"x^x + x", "x^x"},   {"x^x + 1", "x^x"},
      {"(x+1)^x", "x^x"},  {"x*x + x", "x*x"},   {"2^x + x", "2^x"},
      {"x+2", "x+1"},      {"x^x", "x^x"},
  };
  for (auto [fs, gs] : pairs) {
    TermPtr f = P(fs), g = P(gs);
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        // cs[i] >= cs[j]
        if (CMP().asymp_c(f, g, cs[i])) CHECK(CMP().asymp_c(f, g, cs[j]));
        if (CMP().sim_c(f, g, cs[i])) CHECK(CMP().sim_c(f, g, cs[j]));
      }
  }
}

TEST_CASE("ftoc characterization agrees with the power definition") {
  // f ~_c g defined as f^c ~ g^c; computed here through series_pow directly
  std::vector<std::pair<const char*, const char*>> pairs = {
      {"x+1", "x"}, {"x^x + x", "x^x"}, {"x*x + x", "x*x"}, {"2*x", "x"}};
  for (auto [fs, gs] : pairs) {
    TermPtr f = P(fs), g = P(gs);
    for (const char* cs : {"x", "x*x"}) {
      TermPtr c = P(cs);
      bool via_ftoc = CMP().sim_c(f, g, c);
      bool via_def = CMP().is_sim(term::pw(f, c), term::pw(g, c));
      CHECK(via_ftoc == via_def);
      bool a_ftoc = CMP().asymp_c(f, g, c);
      bool a_def = CMP().dom_rel(term::pw(f, c), term::pw(g, c)).rel ==
                   Dom::SameArchimedeanClass;
      CHECK(a_ftoc == a_def);
    }
  }
}

TEST_CASE("ratio class coefficients") {
  auto r1 = CMP().ratio_class_coefficient(P("x+1"), P("x"), P("1"));
  CHECK(cnst::cmp_const(r1, cnst::Constant::rational(1), 128) == cnst::Order::EqualExact);
  auto r2 = CMP().ratio_class_coefficient(P("(x+1)^x"), P("x^x"), P("1"));
  CHECK(cnst::to_string(r2) == "e");
  // (1 + 1/x)^x -> e
  auto r3 = CMP().ratio_class_coefficient(P("x+1"), P("x"), P("x"));
  CHECK(cnst::to_string(r3) == "e");
  // numeric confirmation at x = 1000: (1+1/x)^x within 2e-3 of e
  auto enc = CMP().numeric().numeric_limit(term::pw(P("x+1"), P("x")), term::pw(P("x"), P("x")),
                                           {mpq_class(1000)});
  cnst::Interval e_iv = cnst::eval_interval(cexp(cnst::Constant::rational(1)), 64);
  CHECK(enc[0].first > e_iv.lo - mpq_class(2, 1000));
  CHECK(enc[0].second < e_iv.hi + mpq_class(2, 1000));
  // numeral c: r^k
  auto r4 = CMP().ratio_class_coefficient(P("2*x"), P("x"), P("3"));
  CHECK(*cnst::exact_rational(r4) == 8);
}

TEST_CASE("ratio spectrum of x at size 5") {
  auto spec = ops::ratio_spectrum(P("x"), 5, CMP());
  REQUIRE(spec.ratios.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(*cnst::exact_rational(spec.ratios[i]) == i + 1);
  CHECK(spec.undetermined.empty());
  REQUIRE(spec.min_gap.has_value());
  CHECK(*spec.min_gap > 0);
  CHECK_THROWS_AS(ops::ratio_spectrum(P("x"), 0, CMP()), skolem::precondition_error);
}

TEST_CASE("trichotomy and verdict stability") {
  auto values = ops::enumerate_values(4);
  engine::Config deeper;
  deeper.depth = 12;
  asym::Comparator big(deeper);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values.size(); ++j) {
      CmpResult a = CMP().compare(values[i].rep, values[j].rep);
      CmpResult b = CMP().compare(values[j].rep, values[i].rep);
      if (a.v == CmpResult::Less) CHECK(b.v == CmpResult::Greater);
      if (a.v == CmpResult::Greater) CHECK(b.v == CmpResult::Less);
      if (a.v == CmpResult::EqualToDepth) CHECK(b.v == CmpResult::EqualToDepth);
      // strict verdicts are final under depth increase
      if (a.v == CmpResult::Less || a.v == CmpResult::Greater)
        CHECK(big.compare(values[i].rep, values[j].rep).v == a.v);
    }
}

TEST_CASE("no strict cycles on the size-4 corpus") {
  auto values = ops::enumerate_values(4);
  // compare-sort the corpus, then verify global consistency of the order
  std::vector<TermPtr> sorted;
  for (const auto& v : values) sorted.push_back(v.rep);
  ops::detail::sort_by(sorted, [&](const TermPtr& a, const TermPtr& b) {
    return CMP().compare(a, b).v == CmpResult::Less;
  });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    CHECK(CMP().compare(sorted[i + 1], sorted[i]).v != CmpResult::Less);
}
