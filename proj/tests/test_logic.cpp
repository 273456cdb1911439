#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "devmodal/logic.hpp"
#include "devmodal/rng.hpp"

using namespace devmodal;
using namespace devmodal::logic;

namespace {

SignaturePtr order_sig() {
  return std::make_shared<const Signature>(
      std::vector<Sort>{kStat, dyn_sort(1)},
      std::vector<RelationDecl>{{"R", {kStat}, false, false},
                                {"S", {kStat, kStat}, false, false},
                                {"leq", {kStat, kStat}, false, false},
                                {"P", {kStat}, true, false}});
}

}  // namespace

TEST_CASE("signature declares manifestation relations automatically") {
  auto sig = order_sig();
  const RelationDecl* m = sig->find(manifest_rel(1));
  REQUIRE(m != nullptr);
  CHECK(m->dynamic);
  CHECK(m->manifestation);
  CHECK(m->sorts == std::vector<Sort>{kStat, dyn_sort(1)});
  CHECK(sig->dyn_arities() == std::vector<int>{1});
}

TEST_CASE("duplicate relation names are rejected") {
  CHECK_THROWS_AS(Signature({kStat}, {{"R", {kStat}, false, false},
                                      {"R", {kStat}, true, false}}),
                  SignatureMismatchError);
}

TEST_CASE("parse basic productions") {
  auto sig = order_sig();
  auto f = parse_formula("dia exists x:Stat. R(x)", *sig);
  REQUIRE(f->kind == Conn::Dia);
  REQUIRE(f->a->kind == Conn::Exists);
  CHECK(f->a->bound.name == "x");
  CHECK(f->a->bound.sort == kStat);
  CHECK(f->a->a->kind == Conn::Atom);

  auto g = parse_formula("box forall x. forall y. (S(x,y) -> not x = y)", *sig);
  REQUIRE(g->kind == Conn::Box);
  REQUIRE(g->a->kind == Conn::Forall);
  REQUIRE(g->a->a->kind == Conn::Forall);
  auto body = g->a->a->a;
  REQUIRE(body->kind == Conn::Implies);
  CHECK(body->a->kind == Conn::Atom);
  REQUIRE(body->b->kind == Conn::Not);
  CHECK(body->b->a->kind == Conn::Eq);
}

TEST_CASE("sort annotation defaults to Stat and may be omitted") {
  auto sig = order_sig();
  auto f = parse_formula("exists x. R(x)", *sig);
  CHECK(f->bound.sort == kStat);
  auto g = parse_formula("exists d:Dyn1. (x) <<- d", *sig);
  CHECK(g->bound.sort == dyn_sort(1));
  CHECK(g->a->kind == Conn::Manifest);
}

TEST_CASE("syntax errors carry the offset") {
  auto sig = order_sig();
  try {
    parse_formula("exists x R(", *sig);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 9);  // the 'R' where '.' was expected
  }
}

TEST_CASE("sort errors name the offending symbol") {
  auto sig = order_sig();
  CHECK_THROWS_AS(parse_formula("Q(x)", *sig), SortError);
  CHECK_THROWS_AS(parse_formula("exists x:Dyn1. R(x)", *sig), SortError);
  CHECK_THROWS_AS(parse_formula("R(x) and (x) <<- x", *sig), SortError);
}

TEST_CASE("precedence: not > and > or > -> > <->") {
  auto sig = order_sig();
  auto f = parse_formula("not R(x) and R(y) or R(z) -> R(w) <-> R(v)", *sig);
  REQUIRE(f->kind == Conn::Iff);
  REQUIRE(f->a->kind == Conn::Implies);
  REQUIRE(f->a->a->kind == Conn::Or);
  REQUIRE(f->a->a->a->kind == Conn::And);
  CHECK(f->a->a->a->a->kind == Conn::Not);
}

TEST_CASE("modal and quantifier scope extends maximally right") {
  auto sig = order_sig();
  auto f = parse_formula("dia R(x) and R(y)", *sig);
  REQUIRE(f->kind == Conn::Dia);
  CHECK(f->a->kind == Conn::And);
  auto g = parse_formula("(dia R(x)) and R(y)", *sig);
  REQUIRE(g->kind == Conn::And);
  CHECK(g->a->kind == Conn::Dia);
}

TEST_CASE("potentialist translation") {
  auto sig = order_sig();
  auto f = parse_formula("exists x. R(x)", *sig);
  auto t = potentialist_translate(f);
  CHECK(print_formula(t) == "dia exists x. R(x)");

  auto g = parse_formula("forall x. forall y. (S(x,y) -> not x = y)", *sig);
  auto tg = potentialist_translate(g);
  // one box per universal quantifier
  CHECK(print_formula(tg) ==
        "box forall x. box forall y. S(x,y) -> not x = y");

  auto qf = parse_formula("R(a)", *sig);
  CHECK(equal(potentialist_translate(qf), qf));

  auto modal = parse_formula("dia R(a)", *sig);
  CHECK_THROWS_AS(potentialist_translate(modal), ModalInputError);
}

TEST_CASE("dynamic substitution wraps only mentioning atoms") {
  auto sig = order_sig();
  Var x{"x", kStat};
  Var xi{"xi", dyn_sort(1)};

  auto f = parse_formula("R(x)", *sig);
  auto sub = dynamic_substitute(f, {x}, xi);
  CHECK(print_formula(sub) == "exists x. (x) <<- xi and R(x)");

  auto untouched = parse_formula("R(y)", *sig);
  CHECK(equal(dynamic_substitute(untouched, {x}, xi), untouched));

  auto modal = parse_formula("dia R(x)", *sig);
  CHECK(print_formula(dynamic_substitute(modal, {x}, xi)) ==
        "dia exists x. (x) <<- xi and R(x)");

  auto wrapped_all = dynamic_substitute(untouched, {x}, xi, /*full_wrap=*/true);
  CHECK(print_formula(wrapped_all) == "exists x. (x) <<- xi and R(y)");

  auto bound = parse_formula("exists x. R(x)", *sig);
  CHECK_THROWS_AS(dynamic_substitute(bound, {x}, xi), BoundVariableError);

  Var xi2{"xi", dyn_sort(1)};
  CHECK_THROWS_AS(dynamic_substitute(f, {x, Var{"y", kStat}}, xi2),
                  ArityMismatchError);
}

TEST_CASE("classification flags") {
  auto sig = order_sig();
  auto lit = parse_formula("not S(x,y)", *sig);
  auto c1 = classify(lit, *sig);
  CHECK(c1.literal);
  CHECK(c1.static_language);
  CHECK(c1.modal_free);

  auto s2 = parse_formula("exists x. forall y. S(x,y)", *sig);
  CHECK(classify(s2, *sig).sigma2);
  auto not_prenex = parse_formula("exists x. not forall y. S(x,y)", *sig);
  CHECK_FALSE(classify(not_prenex, *sig).sigma2);

  auto modal = parse_formula("dia R(x)", *sig);
  auto c3 = classify(modal, *sig);
  CHECK_FALSE(c3.literal);
  CHECK_FALSE(c3.modal_free);

  auto dynatom = parse_formula("P(x)", *sig);
  CHECK_FALSE(classify(dynatom, *sig).static_language);
  CHECK_FALSE(classify(dynatom, *sig).literal);
}

TEST_CASE("desugar is idempotent and primitive-only") {
  auto sig = order_sig();
  auto f = parse_formula("box forall x. (R(x) <-> S(x,x) and R(x))", *sig);
  auto d = desugar(f);
  std::function<bool(const FormulaPtr&)> primitive = [&](const FormulaPtr& g) {
    switch (g->kind) {
      case Conn::And:
      case Conn::Implies:
      case Conn::Iff:
      case Conn::Forall:
      case Conn::Box:
        return false;
      case Conn::Not:
      case Conn::Dia:
        return primitive(g->a);
      case Conn::Or:
        return primitive(g->a) && primitive(g->b);
      case Conn::Exists:
        return primitive(g->a);
      default:
        return true;
    }
  };
  CHECK(primitive(d));
  CHECK(equal(desugar(d), d));
}

namespace {

// Random formula over the test signature; quantifier and modal depth kept
// small, free variables drawn from a fixed pool.
FormulaPtr gen(Rng& rng, int depth, std::vector<Var> scope) {
  auto var_of_sort = [&](const Sort& s) -> std::optional<Var> {
    // Innermost binding wins; only names whose visible sort matches count.
    std::map<std::string, Sort> env;
    for (const Var& v : scope) env[v.name] = v.sort;
    std::vector<Var> hits;
    for (const auto& [name, sort] : env)
      if (sort == s) hits.push_back(Var{name, sort});
    if (hits.empty()) return std::nullopt;
    return hits[rng.below(hits.size())];
  };
  if (depth == 0 || rng.chance(1, 4)) {
    for (int tries = 0; tries < 8; ++tries) {
      switch (rng.below(4)) {
        case 0: {
          auto v = var_of_sort(kStat);
          if (v) return Formula::atom("R", {*v});
          break;
        }
        case 1: {
          auto v = var_of_sort(kStat);
          auto w = var_of_sort(kStat);
          if (v && w) return Formula::atom("S", {*v, *w});
          break;
        }
        case 2: {
          auto v = var_of_sort(kStat);
          auto w = var_of_sort(kStat);
          if (v && w) return Formula::eq(*v, *w);
          break;
        }
        case 3: {
          auto v = var_of_sort(kStat);
          auto d = var_of_sort(dyn_sort(1));
          if (v && d) return Formula::manifest({*v}, *d);
          break;
        }
      }
    }
    Var x{"x" + std::to_string(rng.below(3)), kStat};
    return Formula::exists(x, Formula::atom("R", {x}));
  }
  switch (rng.below(9)) {
    case 0: return Formula::lnot(gen(rng, depth - 1, scope));
    case 1: return Formula::land(gen(rng, depth - 1, scope), gen(rng, depth - 1, scope));
    case 2: return Formula::lor(gen(rng, depth - 1, scope), gen(rng, depth - 1, scope));
    case 3:
      return Formula::implies(gen(rng, depth - 1, scope), gen(rng, depth - 1, scope));
    case 4: return Formula::iff(gen(rng, depth - 1, scope), gen(rng, depth - 1, scope));
    case 5: {
      Var x{"q" + std::to_string(rng.below(3)), rng.chance(1, 5) ? dyn_sort(1) : kStat};
      scope.push_back(x);
      return Formula::exists(x, gen(rng, depth - 1, scope));
    }
    case 6: {
      Var x{"q" + std::to_string(rng.below(3)), kStat};
      scope.push_back(x);
      return Formula::forall(x, gen(rng, depth - 1, scope));
    }
    case 7: return Formula::dia(gen(rng, depth - 1, scope));
    default: return Formula::box(gen(rng, depth - 1, scope));
  }
}

}  // namespace

TEST_CASE("round-trip: parse after print is the structural identity") {
  auto sig = order_sig();
  Rng rng(20240801);
  std::vector<Var> pool{{"x0", kStat}, {"x1", kStat}, {"d0", dyn_sort(1)}};
  for (int i = 0; i < 500; ++i) {
    FormulaPtr f = gen(rng, 3, pool);
    check_sorted(f, *sig);
    std::string text = print_formula(f);
    CAPTURE(text);
    FormulaPtr g = parse_formula(text, *sig);
    CHECK(equal(f, g));
    // printing is stable
    CHECK(print_formula(g) == text);
  }
}

TEST_CASE("desugared formulas also round-trip") {
  auto sig = order_sig();
  Rng rng(7);
  std::vector<Var> pool{{"x0", kStat}, {"x1", kStat}};
  for (int i = 0; i < 200; ++i) {
    FormulaPtr f = desugar(gen(rng, 3, pool));
    std::string text = print_formula(f);
    CAPTURE(text);
    CHECK(equal(parse_formula(text, *sig), f));
  }
}
