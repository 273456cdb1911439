#include "devmodal/rationals.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace devmodal::rationals {

using logic::FormulaPtr;
using logic::Var;
using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

Rational rat_parse(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(text));
    Integer num(text.substr(0, slash));
    Integer den(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + text + "'", 0);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw ParseError("malformed rational '" + text + "'", 0);
  }
}

std::string rat_text(const Rational& q) {
  std::ostringstream out;
  if (denominator(q) == 1)
    out << numerator(q);
  else
    out << numerator(q) << "/" << denominator(q);
  return out.str();
}

namespace {

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace

Net const_net(const Rational& q) {
  Net n;
  n.value = [q](std::size_t) { return q; };
  n.modulus = [](const Rational&) -> std::size_t { return 0; };
  n.target = Target{"rat:" + rat_text(q), [q](std::size_t) { return q; },
                    [](std::size_t) { return Rational(0); }};
  n.declared_periodic = std::make_pair(std::size_t{0}, std::size_t{1});
  return n;
}

Net leibniz_net() {
  auto value = [](std::size_t s) {
    Rational acc = 0;
    for (std::size_t k = 0; k <= s; ++k) {
      Rational term(4, 2 * k + 1);
      acc += (k % 2 == 0) ? term : -term;
    }
    return acc;
  };
  auto bound = [](std::size_t s) { return Rational(4, 2 * s + 3); };
  Net n;
  n.value = value;
  // the alternating tails nest inside an interval of width 4/(2N+3)
  n.modulus = [](const Rational& eps) -> std::size_t {
    if (eps <= 0) throw DomainError("modulus needs a positive epsilon");
    // least N with 4/(2N+3) < eps
    Rational r = (Rational(4) / eps - 3) / 2;
    Integer fl = numerator(r) / denominator(r);
    if (numerator(r) < 0 && fl * denominator(r) != numerator(r)) fl -= 1;  // floor
    Integer n = fl + 1;
    if (n < 0) n = 0;
    return static_cast<std::size_t>(n);
  };
  n.target = Target{"pi", value, bound};
  return n;
}

Net machin_net() {
  // 16 atan(1/5) - 4 atan(1/239), alternating combined terms
  auto term = [](std::size_t k) {
    Integer p5 = 1, p239 = 1;
    for (std::size_t i = 0; i < 2 * k + 1; ++i) {
      p5 *= 5;
      p239 *= 239;
    }
    return Rational(16, p5 * Integer(2 * k + 1)) -
           Rational(4, p239 * Integer(2 * k + 1));
  };
  auto value = [term](std::size_t s) {
    Rational acc = 0;
    for (std::size_t k = 0; k <= s; ++k) acc += (k % 2 == 0) ? term(k) : -term(k);
    return acc;
  };
  auto bound = [term](std::size_t s) { return term(s + 1); };
  Net n;
  n.value = value;
  n.modulus = [term](const Rational& eps) -> std::size_t {
    if (eps <= 0) throw DomainError("modulus needs a positive epsilon");
    for (std::size_t k = 0;; ++k)
      if (term(k + 1) < eps) return k;
  };
  n.target = Target{"pi", value, bound};
  return n;
}

Net dyadic_sqrt2_net() {
  auto value = [](std::size_t s) {
    Integer pow = Integer(1) << s;
    Integer a = boost::multiprecision::sqrt(Integer(2) * pow * pow);
    return Rational(a, pow);
  };
  auto bound = [](std::size_t s) { return Rational(1, Integer(1) << s); };
  Net n;
  n.value = value;
  n.modulus = [](const Rational& eps) -> std::size_t {
    if (eps <= 0) throw DomainError("modulus needs a positive epsilon");
    for (std::size_t s = 0;; ++s)
      if (Rational(2, Integer(1) << s) < eps) return s;
  };
  n.target = Target{"sqrt2", value, bound};
  return n;
}

Net add_nets(const Net& a, const Net& b) {
  Net n;
  auto av = a.value, bv = b.value;
  n.value = [av, bv](std::size_t s) { return av(s) + bv(s); };
  if (a.modulus && b.modulus) {
    auto am = *a.modulus, bm = *b.modulus;
    n.modulus = [am, bm](const Rational& eps) {
      return std::max(am(eps / 2), bm(eps / 2));
    };
  }
  if (a.target && b.target) {
    auto at = *a.target, bt = *b.target;
    n.target = Target{"(" + at.real_id + "+" + bt.real_id + ")",
                      [at, bt](std::size_t s) { return at.approx(s) + bt.approx(s); },
                      [at, bt](std::size_t s) { return at.bound(s) + bt.bound(s); }};
  }
  if (a.declared_periodic && b.declared_periodic) {
    std::size_t start = std::max(a.declared_periodic->first, b.declared_periodic->first);
    std::size_t pa = a.declared_periodic->second, pb = b.declared_periodic->second;
    n.declared_periodic = std::make_pair(start, std::lcm(pa, pb));
  }
  return n;
}

Net mul_nets(const Net& a, const Net& b) {
  Net n;
  auto av = a.value, bv = b.value;
  n.value = [av, bv](std::size_t s) { return av(s) * bv(s); };
  if (a.modulus && b.modulus) {
    auto am = *a.modulus, bm = *b.modulus;
    // tail bounds past the epsilon=1 indices
    n.modulus = [am, bm, av, bv](const Rational& eps) {
      std::size_t na1 = am(1), nb1 = bm(1);
      Rational ba = rat_abs(av(na1)) + 1;
      Rational bb = rat_abs(bv(nb1)) + 1;
      std::size_t n1 = am(eps / (2 * bb));
      std::size_t n2 = bm(eps / (2 * ba));
      return std::max({n1, n2, na1, nb1});
    };
  }
  if (a.target && b.target) {
    auto at = *a.target, bt = *b.target;
    n.target = Target{"(" + at.real_id + "*" + bt.real_id + ")",
                      [at, bt](std::size_t s) { return at.approx(s) * bt.approx(s); },
                      [at, bt](std::size_t s) {
                        return rat_abs(at.approx(s)) * bt.bound(s) +
                               (rat_abs(bt.approx(s)) + bt.bound(s)) * at.bound(s);
                      }};
  }
  if (a.declared_periodic && b.declared_periodic) {
    std::size_t start = std::max(a.declared_periodic->first, b.declared_periodic->first);
    std::size_t pa = a.declared_periodic->second, pb = b.declared_periodic->second;
    n.declared_periodic = std::make_pair(start, std::lcm(pa, pb));
  }
  return n;
}

namespace {

const std::vector<Rational>& sample_epsilons() {
  // kept moderate: exact alternating sums deep into the tail carry
  // enormous denominators
  static const std::vector<Rational> eps{Rational(1), Rational(1, 2), Rational(1, 10),
                                         Rational(1, 32)};
  return eps;
}

bool modulus_spot_check(const Net& n, std::string* why) {
  static const std::size_t offs[] = {0, 1, 2, 5, 17, 31};
  for (const Rational& eps : sample_epsilons()) {
    std::size_t base = (*n.modulus)(eps);
    for (std::size_t i : offs)
      for (std::size_t j : offs) {
        Rational d = rat_abs(n.value(base + i) - n.value(base + j));
        if (!(d < eps)) {
          if (why)
            *why = "modulus fails at epsilon " + rat_text(eps) + ", indices " +
                   std::to_string(base + i) + "," + std::to_string(base + j);
          return false;
        }
      }
  }
  return true;
}

}  // namespace

CauchyResult cauchy_convergent(const Net& n, std::size_t horizon) {
  CauchyResult out;
  out.horizon = horizon;
  if (n.modulus) {
    std::string why;
    if (modulus_spot_check(n, &why)) {
      out.status = CertStatus::Certified;
      out.detail = "modulus present; spot checks passed";
      return out;
    }
    out.detail = why + "; ";
  }
  if (n.declared_periodic) {
    auto [start, period] = *n.declared_periodic;
    Rational lo = n.value(start), hi = lo;
    std::size_t ilo = start, ihi = start;
    for (std::size_t k = 0; k < period; ++k) {
      Rational v = n.value(start + k);
      if (v < lo) {
        lo = v;
        ilo = start + k;
      }
      if (v > hi) {
        hi = v;
        ihi = start + k;
      }
    }
    if (hi > lo) {
      out.status = CertStatus::Refuted;
      out.detail += "periodic separation " + rat_text(hi - lo) + " between indices " +
                    std::to_string(ilo) + " and " + std::to_string(ihi) +
                    "; cauchy fails at epsilon " + rat_text((hi - lo) / 2);
      return out;
    }
    out.status = CertStatus::Certified;
    out.detail += "declared periodic and constant on the cycle";
    return out;
  }
  out.status = CertStatus::Unknown;
  return out;
}

CauchyResult cauchy_equiv(const Net& a, const Net& b, std::size_t horizon) {
  CauchyResult out;
  out.horizon = horizon;

  if (a.target && b.target) {
    // separation: intervals around the two limits disjoint at some index
    for (std::size_t s = 0; s <= horizon; ++s) {
      Rational d = rat_abs(a.value(s) - b.value(s));
      Rational allowance = a.target->bound(s) + b.target->bound(s);
      if (d > allowance) {
        out.status = CertStatus::Refuted;
        out.detail = "limits separated at index " + std::to_string(s) + ": |" +
                     rat_text(a.value(s)) + " - " + rat_text(b.value(s)) + "| > " +
                     rat_text(allowance);
        return out;
      }
    }
    if (a.target->real_id == b.target->real_id) {
      out.status = CertStatus::Certified;
      out.detail = "shared target " + a.target->real_id +
                   "; interval consistency verified to index " + std::to_string(horizon);
      return out;
    }
  }

  if (a.declared_periodic && b.declared_periodic) {
    std::size_t start = std::max(a.declared_periodic->first, b.declared_periodic->first);
    std::size_t period = std::lcm(a.declared_periodic->second,
                                  b.declared_periodic->second);
    Rational least(-1);
    for (std::size_t k = 0; k < period; ++k) {
      Rational d = rat_abs(a.value(start + k) - b.value(start + k));
      if (least < 0 || d < least) least = d;
    }
    if (least > 0) {
      out.status = CertStatus::Refuted;
      out.detail = "pointwise separation at least " + rat_text(least) +
                   " on the shared cycle";
      return out;
    }
    if (least == 0 && period == 1) {
      out.status = CertStatus::Certified;
      out.detail = "eventually pointwise equal";
      return out;
    }
  }

  out.status = CertStatus::Unknown;
  return out;
}

FiniteStructure grid_structure(const std::vector<Rational>& grid) {
  auto sig = std::make_shared<const logic::Signature>(
      std::vector<logic::Sort>{logic::kStat, logic::dyn_sort(1)},
      std::vector<logic::RelationDecl>{
          {"Less", {logic::kStat, logic::kStat}, false, false},
          {"Sum", {logic::kStat, logic::kStat, logic::kStat}, false, false},
          {"Prod", {logic::kStat, logic::kStat, logic::kStat}, false, false},
          {"Zero", {logic::kStat}, false, false}});
  std::vector<Rational> g = grid;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::vector<Element> dom;
  for (const Rational& q : g) dom.push_back(rat_text(q));
  std::map<std::string, std::set<Tuple>> interp;
  for (const Rational& q : g) {
    if (q == 0) interp["Zero"].insert({rat_text(q)});
    for (const Rational& r : g) {
      if (q < r) interp["Less"].insert({rat_text(q), rat_text(r)});
      Rational s = q + r;
      if (std::binary_search(g.begin(), g.end(), s))
        interp["Sum"].insert({rat_text(q), rat_text(r), rat_text(s)});
      Rational p = q * r;
      if (std::binary_search(g.begin(), g.end(), p))
        interp["Prod"].insert({rat_text(q), rat_text(r), rat_text(p)});
    }
  }
  return FiniteStructure(sig, {{logic::kStat, dom}}, std::move(interp));
}

namespace {

// |x - y| < z as a quantified relational formula: some nonnegative d is a
// difference between x and y in one of the two orders and lies below z.
std::string absdiff_text() {
  return "exists d. ((Sum(y,d,x) or Sum(x,d,y)) and ((not exists o. (Zero(o) and "
         "Less(d,o))) and Less(d,z)))";
}

}  // namespace

RhoReport eval_rho_finite(
    const std::vector<Rational>& grid,
    const std::function<Rational(const std::set<Rational>&)>& net_on_states) {
  RhoReport rep;

  std::vector<Rational> g = grid;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (g.empty()) throw DomainError("empty grid");

  FiniteStructure u = grid_structure(g);
  const logic::SignaturePtr sig = u.sig();

  // states: non-empty subsets ordered by inclusion (a dynamic individual
  // needs a manifestation target at every state)
  std::vector<std::set<Rational>> subsets;
  for (std::size_t mask = 1; mask < (std::size_t{1} << g.size()); ++mask) {
    std::set<Rational> sub;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (mask & (std::size_t{1} << i)) sub.insert(g[i]);
    subsets.push_back(std::move(sub));
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const std::set<Rational>& a, const std::set<Rational>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  auto state_id = [&](const std::set<Rational>& sub) {
    std::string id = "{";
    bool first = true;
    for (const Rational& q : sub) {
      if (!first) id += ",";
      id += rat_text(q);
      first = false;
    }
    return id + "}";
  };
  model::Frame fr;
  std::map<model::StateId, FiniteStructure> assign;
  for (const auto& sub : subsets) {
    std::set<Element> names;
    for (const Rational& q : sub) names.insert(rat_text(q));
    fr.states.push_back(state_id(sub));
    assign.emplace(state_id(sub), u.induced(names));
  }
  for (const auto& a : subsets)
    for (const auto& b : subsets)
      if (a != b && std::includes(b.begin(), b.end(), a.begin(), a.end()))
        fr.order.insert({state_id(a), state_id(b)});
  model::DevelopmentModel base(std::move(fr), std::move(assign));

  model::FunctionalDynamicTuple d;
  d.arity = 1;
  std::map<model::StateId, Rational> dval;
  for (const auto& sub : subsets) {
    Rational v = net_on_states(sub);
    if (!sub.count(v))
      throw DomainError("net value " + rat_text(v) + " is outside its state");
    d.assignment[state_id(sub)] = {rat_text(v)};
    dval[state_id(sub)] = v;
  }
  std::vector<Element> names;
  model::DevelopmentModel m = model::extend_by_dynamic(base, {d}, &names);

  // the convergence formula, built as text and parsed
  FormulaPtr absdiff = logic::parse_formula(absdiff_text(), *sig);
  FormulaPtr inner = logic::dynamic_substitute(logic::potentialist_translate(absdiff),
                                               {Var{"y", logic::kStat}},
                                               Var{"xi", logic::dyn_sort(1)});
  std::string rho_text =
      "box forall z. ((dia exists o. (Zero(o) and Less(o,z))) -> dia box exists "
      "x. ((x) <<- xi and box (" +
      logic::print_formula(inner) + ")))";
  rep.formula_text = rho_text;
  FormulaPtr rho = logic::parse_formula(rho_text, *m.sig());
  rep.formula_holds =
      check::satisfies_globally(m, rho, {{"xi", names[0]}});

  // meta-level chain over the same model
  FormulaPtr absdiff_pot = logic::potentialist_translate(absdiff);
  std::map<std::string, bool> memo;
  auto inner_modal_at = [&](const model::StateId& t2, const Rational& a,
                            const Rational& b, const Rational& z) {
    std::string key = t2 + "|" + rat_text(a) + "|" + rat_text(b) + "|" + rat_text(z);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool v = check::satisfies(m, t2, absdiff_pot,
                              {{"x", rat_text(a)}, {"y", rat_text(b)}, {"z", rat_text(z)}});
    memo[key] = v;
    return v;
  };

  const auto& states = m.states();
  auto le = [&](const model::StateId& a, const model::StateId& b) {
    return m.frame().le(a, b);
  };
  std::vector<Rational> positives;
  for (const Rational& q : g)
    if (q > 0) positives.push_back(q);

  auto states_with = [&](const Rational& z) {
    std::vector<model::StateId> out;
    for (const auto& s : states)
      if (m.at(s).has_element(logic::kStat, rat_text(z))) out.push_back(s);
    return out;
  };

  bool m1 = true, m2 = true, m3 = true, m4 = true;
  for (const Rational& z : positives) {
    auto sz = states_with(z);
    // meta line 1/2: every z-state has a tail uniformizer
    for (const auto& s : sz) {
      bool found1 = false, found2 = false;
      for (const auto& t : states) {
        if (!le(s, t)) continue;
        bool all1 = true, all2 = true;
        for (const auto& t1 : states) {
          if (!le(t, t1)) continue;
          for (const auto& t2 : states) {
            if (!le(t1, t2)) continue;
            if (!inner_modal_at(t2, dval[t1], dval[t2], z)) all1 = false;
            if (!(rat_abs(dval[t1] - dval[t2]) < z)) all2 = false;
            if (!all1 && !all2) break;
          }
          if (!all1 && !all2) break;
        }
        found1 = found1 || all1;
        found2 = found2 || all2;
        if (found1 && found2) break;
      }
      m1 = m1 && found1;
      m2 = m2 && found2;
    }
    // meta line 3: some z-state uniformizes its tail
    bool found3 = false, found4 = false;
    for (const auto& t : sz) {
      bool all3 = true;
      for (const auto& t1 : states) {
        if (!le(t, t1)) continue;
        for (const auto& t2 : states) {
          if (!le(t1, t2)) continue;
          if (!(rat_abs(dval[t1] - dval[t2]) < z)) all3 = false;
        }
      }
      found3 = found3 || all3;
      // meta line 4: both successors quantified independently
      bool all4 = true;
      for (const auto& t1 : states) {
        if (!le(t, t1)) continue;
        for (const auto& t2 : states) {
          if (!le(t, t2)) continue;
          if (!(rat_abs(dval[t1] - dval[t2]) < z)) all4 = false;
        }
      }
      found4 = found4 || all4;
    }
    m3 = m3 && found3;
    m4 = m4 && found4;
  }
  rep.chain_meta1 = m1;
  rep.chain_meta2 = m2;
  rep.chain_meta3 = m3;
  rep.chain_cauchy = m4;
  rep.all_agree = (rep.formula_holds == m1) && (m1 == m2) && (m2 == m3) && (m3 == m4);
  return rep;
}

CauchyResult eval_rho_omega(const Net& n, std::size_t horizon) {
  if (!n.modulus && !n.declared_periodic)
    throw NoModulusError("omega-indexed convergence needs a modulus or declared period");
  return cauchy_convergent(n, horizon);
}

Net d_r_net(const Target& r,
            const std::function<std::vector<Rational>(std::size_t)>& grids,
            const std::function<Rational(std::size_t)>& mesh) {
  // compare r against a rational midpoint by interval refinement
  auto cmp_mid = [r](const Rational& mid) -> int {
    if (r.real_id.rfind("rat:", 0) == 0) {
      Rational exact = rat_parse(r.real_id.substr(4));
      if (exact < mid) return -1;
      if (exact > mid) return 1;
      return 0;
    }
    for (std::size_t m = 0; m < 256; ++m) {
      Rational a = r.approx(m), b = r.bound(m);
      if (a + b < mid) return -1;
      if (a - b > mid) return 1;
    }
    throw DomainError("cannot separate the target from " + rat_text(mid) +
                      " within 256 refinements");
  };
  auto value = [r, grids, cmp_mid](std::size_t s) {
    std::vector<Rational> g = grids(s);
    if (g.empty()) throw DomainError("empty grid at index " + std::to_string(s));
    std::sort(g.begin(), g.end());
    Rational best = g.front();
    for (std::size_t i = 1; i < g.size(); ++i) {
      const Rational& q = g[i];
      // |r - q| < |r - best| iff r lies strictly on q's side of the midpoint
      Rational mid = (q + best) / 2;
      int c = cmp_mid(mid);
      bool q_better;
      if (best < q)
        q_better = c > 0;  // r above the midpoint: closer to q
      else
        q_better = c < 0;
      // ties keep the least rational, which is the current best when
      // best < q and q when q < best
      if (c == 0) q_better = q < best;
      if (q_better) best = q;
    }
    return best;
  };
  Net n;
  n.value = value;
  n.modulus = [mesh](const Rational& eps) -> std::size_t {
    for (std::size_t s = 0; s < 100000; ++s)
      if (2 * mesh(s) < eps) return s;
    throw DomainError("mesh does not shrink below " + rat_text(eps));
  };
  n.target = Target{r.real_id, value, mesh};
  return n;
}

std::vector<std::pair<Rational, Rational>> leibniz_table(std::size_t rows) {
  Net l = leibniz_net();
  std::vector<std::pair<Rational, Rational>> out;
  for (std::size_t s = 0; s < rows; ++s)
    out.emplace_back(l.value(s), Rational(4, 2 * s + 3));
  return out;
}

}  // namespace devmodal::rationals
