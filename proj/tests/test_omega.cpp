#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "devmodal/checker.hpp"
#include "devmodal/fuzz.hpp"
#include "devmodal/omega.hpp"

using namespace devmodal;
using namespace devmodal::logic;
using namespace devmodal::omega;
using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

namespace {

// Two-state flip lasso: unary dynamic T over a single element, alternating.
Lasso flip_lasso() {
  auto sig = std::make_shared<const Signature>(
      std::vector<Sort>{kStat},
      std::vector<RelationDecl>{{"T", {kStat}, true, false}});
  FiniteStructure on(sig, {{kStat, {"e"}}}, {{"T", {{"e"}}}});
  FiniteStructure off(sig, {{kStat, {"e"}}}, {});
  Lasso l;
  l.transient = 0;
  l.period = 2;
  l.structures = {on, off};
  return l;
}

Lasso const_lasso() {
  auto sig = std::make_shared<const Signature>(
      std::vector<Sort>{kStat},
      std::vector<RelationDecl>{{"R", {kStat}, false, false}});
  FiniteStructure u(sig, {{kStat, {"e"}}}, {{"R", {{"e"}}}});
  Lasso l;
  l.transient = 0;
  l.period = 1;
  l.structures = {u};
  return l;
}

}  // namespace

TEST_CASE("lasso validation checks the wrap edge") {
  Lasso good = flip_lasso();
  CHECK(validate_lasso(good).valid());

  // static facts may not decay around the cycle
  auto sig = std::make_shared<const Signature>(
      std::vector<Sort>{kStat},
      std::vector<RelationDecl>{{"R", {kStat}, false, false}});
  FiniteStructure with(sig, {{kStat, {"e"}}}, {{"R", {{"e"}}}});
  FiniteStructure without(sig, {{kStat, {"e"}}}, {});
  Lasso bad;
  bad.transient = 0;
  bad.period = 2;
  bad.structures = {with, without};
  CHECK_FALSE(validate_lasso(bad).valid());

  // but a static fact may enter together with a newborn element
  FiniteStructure empty(sig, {}, {});
  Lasso grow;
  grow.transient = 1;
  grow.period = 1;
  grow.structures = {empty, with};
  CHECK(validate_lasso(grow).valid());
}

TEST_CASE("flip lasso: dia on both values, box on neither") {
  Lasso l = flip_lasso();
  auto sig = l.structures.front().sig();
  auto t = parse_formula("T(x)", *sig);
  auto both = parse_formula("dia T(x) and dia not T(x)", *sig);
  auto boxed = Formula::box(both);
  structures::Assignment asg{{"x", "e"}};
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(lasso_satisfies(l, n, both, asg));
    CHECK(lasso_satisfies(l, n, boxed, asg));
    CHECK_FALSE(lasso_satisfies(l, n, Formula::box(t), asg));
  }
  CHECK(lasso_satisfies(l, 0, t, asg));
  CHECK_FALSE(lasso_satisfies(l, 1, t, asg));
}

TEST_CASE("constant lasso collapses the modalities") {
  Lasso l = const_lasso();
  auto sig = l.structures.front().sig();
  auto f = parse_formula("R(x)", *sig);
  structures::Assignment asg{{"x", "e"}};
  CHECK(lasso_satisfies(l, 0, f, asg));
  CHECK(lasso_satisfies(l, 0, Formula::box(f), asg));
  CHECK(lasso_satisfies(l, 0, Formula::dia(f), asg));
}

TEST_CASE("lasso evaluation equals the quotient development model") {
  Rng rng(404);
  auto sig = std::make_shared<const Signature>(
      std::vector<Sort>{kStat},
      std::vector<RelationDecl>{{"R", {kStat}, false, false},
                                {"T", {kStat}, true, false}});
  for (int trial = 0; trial < 40; ++trial) {
    // random lasso: element b is born somewhere on the transient (static
    // facts may only enter together with new elements), dynamic T arbitrary
    std::size_t mu = rng.below(3);
    std::size_t pi = 1 + rng.below(3);
    std::size_t birth = mu == 0 ? 0 : rng.below(mu + 1);
    bool r_a = rng.coin(), r_b = rng.coin();
    std::vector<FiniteStructure> sts;
    for (std::size_t i = 0; i < mu + pi; ++i) {
      std::vector<Element> dom{"a"};
      if (i >= birth) dom.push_back("b");
      std::set<Tuple> rs;
      if (r_a) rs.insert({"a"});
      if (r_b && i >= birth) rs.insert({"b"});
      std::set<Tuple> ts;
      for (const Element& e : dom)
        if (rng.coin()) ts.insert({e});
      sts.push_back(FiniteStructure(sig, {{kStat, dom}}, {{"R", rs}, {"T", ts}}));
    }
    Lasso l;
    l.transient = mu;
    l.period = pi;
    l.structures = sts;
    REQUIRE(validate_lasso(l).valid());

    model::DevelopmentModel q = quotient_model(l);
    fuzz::FormulaOptions fo;
    fo.quantifier_depth = 1;
    fo.modal_depth = 2;
    fo.static_only = false;
    fo.free_vars = 1;
    for (int j = 0; j < 8; ++j) {
      FormulaPtr f = fuzz::fuzz_formula(rng, *sig, fo);
      structures::Assignment asg{{"x0", rng.coin() ? "a" : "b"}};
      for (std::size_t i = 0; i < l.size(); ++i) {
        CAPTURE(print_formula(f));
        CAPTURE(i);
        CHECK(lasso_satisfies(l, i, f, asg) ==
              check::satisfies(q, "n" + std::to_string(i), f, asg));
      }
      // periodicity of the truth value itself
      for (std::size_t n = l.transient; n < l.size(); ++n)
        CHECK(lasso_satisfies(l, n, f, asg) ==
              lasso_satisfies(l, n + l.period, f, asg));
    }
  }
}

TEST_CASE("lasso evaluation agrees with the unrolled evaluator when decided") {
  Rng rng(777);
  Lasso l = flip_lasso();
  auto sig = l.structures.front().sig();
  fuzz::FormulaOptions fo;
  fo.quantifier_depth = 1;
  fo.modal_depth = 2;
  fo.static_only = false;
  fo.free_vars = 1;
  int decided = 0;
  for (int j = 0; j < 50; ++j) {
    FormulaPtr f = fuzz::fuzz_formula(rng, *sig, fo);
    structures::Assignment asg{{"x0", "e"}};
    std::size_t h3 = l.transient + 3 * l.period;
    for (std::size_t n = 0; n < l.size(); ++n) {
      int u3 = unrolled_satisfies(l, n, f, asg, h3);
      if (u3 != 0) {
        CAPTURE(print_formula(f));
        CHECK(lasso_satisfies(l, n, f, asg) == (u3 > 0));
        ++decided;
      }
    }
  }
  CHECK(decided > 20);
}

TEST_CASE("arith stream: potential successor and actual maximum") {
  StructureStream arith = arith_basic_stream();
  auto succ = parse_formula("box forall x. dia exists y. S(x,y)", *arith.sig);
  BoundedVerdict v1 = bounded_satisfies(arith, 10, succ, {});
  CHECK(v1.is_true());
  CHECK(v1.certificate.find("birth induction") != std::string::npos);

  auto maxel = parse_formula("box exists y. forall x. Leq(x,y)", *arith.sig);
  BoundedVerdict v2 = bounded_satisfies(arith, 10, maxel, {});
  CHECK(v2.is_true());
  CHECK(v2.certificate.find("state induction") != std::string::npos);

  // an atom that never becomes true stays unknown
  auto never = parse_formula("dia S(x,x)", *arith.sig);
  BoundedVerdict v3 = bounded_satisfies(arith, 10, never, {{"x", "3"}});
  CHECK(v3.kind == VerdictKind::Unknown);
  CHECK(v3.horizon == 10);
}

TEST_CASE("bounded checker sound rules") {
  StructureStream arith = arith_basic_stream();

  // dia with a genuine witness
  auto appears = parse_formula("dia exists x. exists y. (Plus(x,x,y) and S(x,y))",
                               *arith.sig);
  BoundedVerdict v = bounded_satisfies(arith, 8, appears, {});
  CHECK(v.is_true());

  // persistence-up: box of a positive existential static fact
  auto keep = parse_formula("box exists x. Z(x)", *arith.sig);
  BoundedVerdict v2 = bounded_satisfies(arith, 8, keep, {});
  CHECK(v2.is_true());
  CHECK(v2.certificate.find("persists upward") != std::string::npos);

  // box refuted by a counterexample
  auto wrong = parse_formula("box forall x. forall y. Leq(x,y)", *arith.sig);
  BoundedVerdict v3 = bounded_satisfies(arith, 8, wrong, {});
  CHECK(v3.is_false());

  // dia refuted by persistent falsity: anchored static atom
  auto neverz = parse_formula("dia Z(x)", *arith.sig);
  BoundedVerdict v4 = bounded_satisfies(arith, 8, neverz, {{"x", "0"}});
  CHECK(v4.is_true());
  BoundedVerdict v5 =
      bounded_satisfies(arith, 8, Formula::dia(parse_formula("not Z(x)", *arith.sig)),
                        {{"x", "0"}});
  CHECK(v5.is_false());
  CHECK(v5.certificate.find("falsity persists") != std::string::npos);
}

TEST_CASE("bounded verdicts are stable under doubling the horizon") {
  StructureStream arith = arith_basic_stream();
  Rng rng(6060);
  fuzz::FormulaOptions fo;
  fo.quantifier_depth = 2;
  fo.modal_depth = 2;
  fo.free_vars = 0;
  int decided = 0;
  for (int i = 0; i < 60; ++i) {
    FormulaPtr f = fuzz::fuzz_formula(rng, *arith.sig, fo);
    BoundedVerdict a = bounded_satisfies(arith, 6, f, {});
    if (a.kind == VerdictKind::Unknown) continue;
    BoundedVerdict b = bounded_satisfies(arith, 12, f, {});
    CAPTURE(print_formula(f));
    if (b.kind != VerdictKind::Unknown) CHECK(a.kind == b.kind);
    ++decided;
  }
  CHECK(decided > 5);
}

TEST_CASE("lasso files parse") {
  std::string text =
      "transient 1\n"
      "period 2\n"
      "struct {\n"
      "sort Stat = e\n"
      "dynrel T(Stat) =\n"
      "}\n"
      "struct {\n"
      "sort Stat = e\n"
      "dynrel T(Stat) = (e)\n"
      "}\n"
      "struct {\n"
      "sort Stat = e\n"
      "dynrel T(Stat) =\n"
      "}\n";
  Lasso l = parse_lasso(text);
  CHECK(l.transient == 1);
  CHECK(l.period == 2);
  CHECK(validate_lasso(l).valid());
  auto f = parse_formula("box (dia T(x) and dia not T(x))", *l.structures[0].sig());
  CHECK(lasso_satisfies(l, 0, f, {{"x", "e"}}));
}

TEST_CASE("rationals grid stream is a valid growing run") {
  StructureStream grid = rationals_grid_stream(2);
  FiniteStructure g0 = grid.at(0);
  CHECK(g0.domain(kStat) == std::vector<Element>{"0"});
  FiniteStructure g2 = grid.at(2);
  CHECK(g2.has_element(kStat, "1/2"));
  CHECK(g2.holds("Sum", {"1/2", "1/2", "1"}));
  CHECK(g2.holds("Less", {"-1/2", "1/2"}));
  CHECK(g2.holds("Zero", {"0"}));
  // monotone growth
  for (std::size_t n = 0; n < 4; ++n)
    CHECK(structures::static_substructure_check(grid.at(n), grid.at(n + 1)));
}
