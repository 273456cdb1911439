#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "devmodal/rationals.hpp"

using namespace devmodal;
using namespace devmodal::rationals;

TEST_CASE("the alternating-series table") {
  auto rows = leibniz_table(4);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::make_pair(Rational(4), Rational(4, 3)));
  CHECK(rows[1] == std::make_pair(Rational(8, 3), Rational(4, 5)));
  CHECK(rows[2] == std::make_pair(Rational(52, 15), Rational(4, 7)));
  CHECK(rows[3] == std::make_pair(Rational(304, 105), Rational(4, 9)));
}

TEST_CASE("rational parsing and printing") {
  CHECK(rat_parse("3/6") == Rational(1, 2));
  CHECK(rat_text(rat_parse("-4/8")) == "-1/2");
  CHECK(rat_text(Rational(5)) == "5");
  CHECK_THROWS_AS(rat_parse("1/0"), ParseError);
  CHECK_THROWS_AS(rat_parse("x"), ParseError);
}

TEST_CASE("leibniz modulus honors its contract on samples") {
  Net l = leibniz_net();
  // formula-level minimality, checked without evaluating the net
  for (const Rational& eps :
       {Rational(1), Rational(1, 7), Rational(1, 100), Rational(1, 12345)}) {
    std::size_t n = (*l.modulus)(eps);
    CHECK(Rational(4, 2 * n + 3) < eps);
    if (n > 0) CHECK_FALSE(Rational(4, 2 * (n - 1) + 3) < eps);
  }
  // pairwise oscillation below epsilon at moderate indices (tail values of
  // the exact series carry enormous denominators)
  for (const Rational& eps : {Rational(1), Rational(1, 7), Rational(1, 30)}) {
    std::size_t n = (*l.modulus)(eps);
    for (std::size_t i : {0, 1, 9})
      for (std::size_t j : {0, 2, 23})
        CHECK(abs(l.value(n + i) - l.value(n + j)) < eps);
  }
}

TEST_CASE("component-wise arithmetic with propagated moduli") {
  Net two = const_net(Rational(2));
  Net three = const_net(Rational(3));
  Net five = add_nets(two, three);
  CHECK(five.value(7) == Rational(5));
  CHECK(mul_nets(two, three).value(0) == Rational(6));

  Net l = leibniz_net();
  Net shifted = add_nets(l, const_net(Rational(0)));
  for (std::size_t s : {0, 3, 11}) CHECK(shifted.value(s) == l.value(s));

  // doubled series approaches 2*pi with doubled bound
  Net doubled = add_nets(l, l);
  Net m2 = mul_nets(const_net(Rational(2)), machin_net());
  for (std::size_t s = 1; s <= 50; ++s) {
    Rational allowance = Rational(8, 2 * s + 3) + m2.target->bound(40);
    CHECK(abs(doubled.value(s) - m2.value(40)) <= allowance);
  }

  // product modulus verified by an independent sweep
  Net prod = mul_nets(l, l);
  for (const Rational& eps : {Rational(1), Rational(1, 10), Rational(1, 50)}) {
    std::size_t n = (*prod.modulus)(eps);
    for (std::size_t i : {0, 1, 5, 12})
      for (std::size_t j : {0, 2, 7, 20})
        CHECK(abs(prod.value(n + i) - prod.value(n + j)) < eps);
  }
}

TEST_CASE("cauchy convergence certificates") {
  CHECK(cauchy_convergent(leibniz_net(), 100).status == CertStatus::Certified);

  Net osc;
  osc.value = [](std::size_t s) { return s % 2 == 0 ? Rational(1) : Rational(-1); };
  osc.declared_periodic = std::make_pair(std::size_t{0}, std::size_t{2});
  CauchyResult r = cauchy_convergent(osc, 100);
  CHECK(r.status == CertStatus::Refuted);
  CHECK(r.detail.find("epsilon 1") != std::string::npos);

  Net blind;
  blind.value = [](std::size_t s) { return Rational(1, s + 1); };
  CHECK(cauchy_convergent(blind, 100).status == CertStatus::Unknown);
}

TEST_CASE("cauchy equivalence certificates") {
  Net l = leibniz_net();
  CHECK(cauchy_equiv(l, l, 60).status == CertStatus::Certified);

  CauchyResult far = cauchy_equiv(l, const_net(Rational(3)), 60);
  CHECK(far.status == CertStatus::Refuted);

  CauchyResult shared = cauchy_equiv(l, machin_net(), 60);
  CHECK(shared.status == CertStatus::Certified);
  CHECK(shared.detail.find("pi") != std::string::npos);

  CauchyResult diff = cauchy_equiv(machin_net(), dyadic_sqrt2_net(), 60);
  CHECK(diff.status == CertStatus::Refuted);

  // symmetric
  CHECK(cauchy_equiv(machin_net(), l, 60).status == CertStatus::Certified);

  // transitivity on a certified triple
  Net l2 = add_nets(l, const_net(Rational(0)));
  l2.target = Target{"pi", l.target->approx, l.target->bound};
  CHECK(cauchy_equiv(l, l2, 60).status == CertStatus::Certified);
  CHECK(cauchy_equiv(l2, machin_net(), 60).status == CertStatus::Certified);
}

TEST_CASE("sums respect equivalence on certified inputs") {
  Net a = add_nets(leibniz_net(), dyadic_sqrt2_net());
  Net b = add_nets(machin_net(), dyadic_sqrt2_net());
  // same composite target id on both sides
  CHECK(a.target->real_id == "(pi+sqrt2)");
  CHECK(cauchy_equiv(a, b, 60).status == CertStatus::Certified);
}

TEST_CASE("the dyadic sqrt2 net brackets its target") {
  Net d = dyadic_sqrt2_net();
  for (std::size_t s = 0; s <= 30; ++s) {
    Rational v = d.value(s);
    // v^2 <= 2 < (v + 2^-s)^2
    CHECK(v * v <= 2);
    Rational vhi = v + Rational(1, Integer(1) << s);
    CHECK(vhi * vhi > 2);
  }
}

TEST_CASE("leibniz partial sums bracket every machin approximation") {
  Net l = leibniz_net();
  Net m = machin_net();
  Rational pi_lo = m.value(10) - m.target->bound(10);
  Rational pi_hi = m.value(10) + m.target->bound(10);
  for (std::size_t s = 0; s + 1 <= 40; ++s) {
    Rational a = l.value(s), b = l.value(s + 1);
    if (s % 2 == 0) {
      CHECK(a > pi_hi);
      CHECK(b < pi_lo);
    } else {
      CHECK(a < pi_lo);
      CHECK(b > pi_hi);
    }
  }
}

TEST_CASE("best-approximant nets over a grid chain") {
  // constant target present in every grid
  Target half{"rat:1/2", [](std::size_t) { return Rational(1, 2); },
              [](std::size_t) { return Rational(0); }};
  auto grids = [](std::size_t s) {
    std::vector<Rational> g{Rational(0), Rational(1, 2), Rational(1)};
    for (std::size_t k = 0; k <= s && k < 6; ++k) g.push_back(Rational(1, k + 2));
    return g;
  };
  Net c = d_r_net(half, grids, [](std::size_t) { return Rational(0); });
  for (std::size_t s : {0, 1, 5}) CHECK(c.value(s) == Rational(1, 2));

  // tie case: 1/4 between 0 and 1/2 resolves to the least rational
  Target quarter{"rat:1/4", [](std::size_t) { return Rational(1, 4); },
                 [](std::size_t) { return Rational(0); }};
  auto two_grid = [](std::size_t) {
    return std::vector<Rational>{Rational(0), Rational(1, 2)};
  };
  Net t = d_r_net(quarter, two_grid, [](std::size_t) { return Rational(1, 4); });
  CHECK(t.value(0) == Rational(0));

  // dyadic grids shrinking around sqrt2: a window of mesh-2^-s points
  // around the certified approximation keeps deep grids small
  Net sq = dyadic_sqrt2_net();
  auto dyadic_grids = [&](std::size_t s) {
    Integer pow = Integer(1) << s;
    Rational v = sq.value(s);  // a/2^s, possibly reduced
    Integer a = numerator(v) * (pow / denominator(v));
    std::vector<Rational> g;
    for (Integer i = a - 8; i <= a + 8; ++i) g.push_back(Rational(i, pow));
    return g;
  };
  Net d = d_r_net(*sq.target, dyadic_grids,
                  [](std::size_t s) { return Rational(1, Integer(1) << s); });
  for (std::size_t s = 0; s <= 30; ++s) {
    Rational diff = d.value(s) - sq.value(s);
    Rational margin = Rational(2, Integer(1) << s);
    CHECK(abs(diff) <= margin);
  }
}

TEST_CASE("the convergence formula on a finite grid model") {
  std::vector<Rational> grid{Rational(0), Rational(1, 2), Rational(1)};

  // convergent choice: the largest element of each state
  RhoReport conv = eval_rho_finite(grid, [](const std::set<Rational>& s) {
    return *s.rbegin();
  });
  CHECK(conv.formula_holds);
  CHECK(conv.all_agree);
  CHECK(conv.formula_text.find("<<- xi") != std::string::npos);

  // constant choice
  RhoReport cst = eval_rho_finite(grid, [](const std::set<Rational>& s) {
    return *s.begin();
  });
  CHECK(cst.formula_holds);
  CHECK(cst.all_agree);
}

TEST_CASE("omega-indexed convergence goes through the modulus") {
  CHECK(eval_rho_omega(leibniz_net(), 50).status == CertStatus::Certified);
  CHECK(eval_rho_omega(const_net(Rational(2)), 50).status == CertStatus::Certified);

  Net osc;
  osc.value = [](std::size_t s) { return s % 2 == 0 ? Rational(1) : Rational(-1); };
  osc.declared_periodic = std::make_pair(std::size_t{0}, std::size_t{2});
  CauchyResult r = eval_rho_omega(osc, 50);
  CHECK(r.status == CertStatus::Refuted);
  CHECK(r.detail.find("epsilon 1") != std::string::npos);

  Net blind;
  blind.value = [](std::size_t) { return Rational(0); };
  CHECK_THROWS_AS(eval_rho_omega(blind, 10), NoModulusError);
}
