#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "devmodal/typereal.hpp"

using namespace devmodal;
using namespace devmodal::typereal;
using logic::parse_formula;

TEST_CASE("ambient evaluation with polarity certificates") {
  Ambient amb = arith_ambient();
  auto even = parse_formula("exists y. Plus(y,y,x)", *amb.sig());
  AmbientValue v4 = amb.eval(even, {4});
  CHECK(v4.value);
  CHECK(v4.absolute);  // existential truth transfers upward

  AmbientValue v5 = amb.eval(even, {5});
  CHECK_FALSE(v5.value);  // stabilized refutation

  auto universal = parse_formula("forall y. Leq(x,y)", *amb.sig());
  AmbientValue u3 = amb.eval(universal, {3});
  CHECK_FALSE(u3.value);
  CHECK(u3.absolute);  // refuted by a persisting counterexample
}

TEST_CASE("the constant type realizes at zero") {
  Ambient amb = arith_ambient();
  TypeFragment frag = zero_type();
  RealizerNet net = d_p(frag, amb);
  for (std::size_t s : {0, 1, 7}) CHECK(net.at(s) == std::vector<long long>{0});
  for (const TeleVerdict& v : tele_type(frag, amb, 12)) {
    CHECK(v.ok);
    CHECK(v.from_state == 0);
  }
}

TEST_CASE("the unbounded type realizes as s+1") {
  Ambient amb = arith_ambient();
  TypeFragment frag = greater_than_type(10);
  RealizerNet net = d_p(frag, amb);
  for (std::size_t s = 0; s <= 20; ++s)
    CHECK(net.at(s) == std::vector<long long>{static_cast<long long>(s) + 1});
}

TEST_CASE("contradictory prefixes are rejected with the failing index") {
  Ambient amb = arith_ambient();
  TypeFragment frag;
  frag.vars = {logic::Var{"x", logic::kStat}};
  frag.prefix.push_back(parse_formula("Z(x)", *amb.sig()));
  frag.prefix.push_back(parse_formula("not Z(x)", *amb.sig()));
  try {
    d_p(frag, amb, 16);
    FAIL("expected a realizability error");
  } catch (const PrefixUnrealizableError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("teleological verdicts hold from each formula's index") {
  Ambient amb = arith_ambient();
  TypeFragment frag = greater_than_type(10);
  auto verdicts = tele_type(frag, amb, 25);
  REQUIRE(verdicts.size() == 10);
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    CHECK(verdicts[i].ok);
    CHECK(verdicts[i].from_state == i);
  }
}

TEST_CASE("a corrupted realizer is reported with a counterexample") {
  Ambient amb = arith_ambient();
  TypeFragment frag = greater_than_type(6);
  RealizerNet bad;
  bad.at = [](std::size_t s) {
    return std::vector<long long>{s == 4 ? 2 : static_cast<long long>(s) + 1};
  };
  auto verdicts = tele_type_net(frag, amb, bad, 12);
  bool reported = false;
  for (const TeleVerdict& v : verdicts)
    if (!v.ok && v.counterexample.find("state 4") != std::string::npos) reported = true;
  CHECK(reported);
}

TEST_CASE("eventual verdicts on the unbounded type") {
  Ambient amb = arith_ambient();
  TypeFragment frag = greater_than_type(10);

  // a member of the family: satisfied by construction
  LosResult in_type = eventual_los(frag, amb, frag.prefix[5], 25);
  CHECK(in_type.verdict == LosVerdict::Satisfied);
  CHECK(in_type.pattern.by_construction);
  CHECK(in_type.pattern.tail_start == 5);
  CHECK(in_type.chain_ok);

  // x = 3: true exactly at state 2
  auto three = parse_formula(
      "exists z0. (Z(z0) and exists z1. (S(z0,z1) and exists z2. (S(z1,z2) and "
      "exists z3. (S(z2,z3) and x = z3))))",
      *amb.sig());
  LosResult at3 = eventual_los(frag, amb, three, 25);
  CHECK(at3.verdict == LosVerdict::Unsatisfied);
  REQUIRE(at3.pattern.members.size() == 1);
  CHECK(at3.pattern.members[0] == 2);
  CHECK(at3.chain_ok);

  // x even: alternates with period 2 along s+1
  auto even = parse_formula("exists y. Plus(y,y,x)", *amb.sig());
  LosResult ev = eventual_los(frag, amb, even, 25);
  CHECK(ev.verdict == LosVerdict::UltrafilterDependent);
  CHECK(ev.pattern.period == 2);
  CHECK(ev.chain_ok);
}

TEST_CASE("determinism: identical fragments produce identical nets") {
  Ambient amb = arith_ambient();
  TypeFragment f1 = greater_than_type(8);
  TypeFragment f2 = greater_than_type(8);
  RealizerNet n1 = d_p(f1, amb);
  RealizerNet n2 = d_p(f2, amb);
  for (std::size_t s = 0; s <= 16; ++s) CHECK(n1.at(s) == n2.at(s));
}

TEST_CASE("type files parse against the ambient signature") {
  Ambient amb = arith_ambient();
  TypeFragment frag = parse_type_fragment(
      "exists z0. (Z(z0) and Leq(z0,x) and not z0 = x)\n"
      "# a comment line\n"
      "exists y. Plus(y,y,x)\n",
      amb);
  CHECK(frag.prefix.size() == 2);
  REQUIRE(frag.vars.size() == 1);
  CHECK(frag.vars[0].name == "x");
  RealizerNet net = d_p(frag, amb);
  CHECK(net.at(1) == std::vector<long long>{2});  // least even above 0
}
