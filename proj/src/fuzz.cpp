#include "devmodal/fuzz.hpp"

#include <algorithm>

namespace devmodal::fuzz {

using logic::Formula;
using logic::FormulaPtr;
using logic::RelationDecl;
using logic::Signature;
using logic::SignaturePtr;
using logic::Sort;
using logic::Var;
using model::DevelopmentModel;
using model::Frame;
using model::StateId;
using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

SignaturePtr fuzz_signature(Rng& rng, const ModelOptions& opt) {
  std::vector<Sort> sorts{logic::kStat};
  std::vector<RelationDecl> rels{{"R", {logic::kStat}, false, false},
                                 {"S", {logic::kStat, logic::kStat}, false, false}};
  if (rng.chance(1, 2)) rels.push_back({"Q", {logic::kStat}, false, false});
  if (opt.dynamic_predicate && rng.chance(1, 2))
    rels.push_back({"P", {logic::kStat}, true, false});
  if (opt.max_dyn > 0) sorts.push_back(logic::dyn_sort(1));
  return std::make_shared<const Signature>(sorts, rels);
}

DevelopmentModel fuzz_model(Rng& rng, const SignaturePtr& sig, const ModelOptions& opt) {
  // Union structure over a random Stat domain.
  std::size_t n = 1 + rng.below(opt.max_elements);
  std::vector<Element> dom;
  for (std::size_t i = 0; i < n; ++i) dom.push_back(std::string(1, char('a' + i)));

  std::map<std::string, std::set<Tuple>> uni;
  for (const RelationDecl& d : sig->relations()) {
    if (d.dynamic) continue;
    std::set<Tuple> ts;
    if (d.arity() == 1) {
      for (const Element& e : dom)
        if (rng.chance(1, 2)) ts.insert({e});
    } else {
      for (const Element& e : dom)
        for (const Element& f : dom)
          if (rng.chance(1, 3)) ts.insert({e, f});
    }
    uni[d.name] = std::move(ts);
  }

  // Frame: random partial order on k states plus a top above everything.
  std::size_t k = 1 + rng.below(opt.max_states);
  Frame fr;
  for (std::size_t i = 0; i < k; ++i) fr.states.push_back("s" + std::to_string(i));
  fr.states.push_back("top");
  // edges respect the index order, so the relation is a partial order
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (rng.chance(1, 3)) fr.order.insert({fr.states[i], fr.states[j]});
  // transitive closure
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : std::set<std::pair<StateId, StateId>>(fr.order))
      for (const auto& [c, d] : std::set<std::pair<StateId, StateId>>(fr.order))
        if (b == c && !fr.order.count({a, d})) {
          fr.order.insert({a, d});
          changed = true;
        }
  }
  for (std::size_t i = 0; i < k; ++i) fr.order.insert({fr.states[i], "top"});

  // Dynamic individuals, constant domain.
  std::size_t nd = opt.max_dyn == 0 || !sig->has_sort(logic::dyn_sort(1))
                       ? 0
                       : rng.below(opt.max_dyn + 1);
  std::vector<Element> dyns;
  for (std::size_t i = 0; i < nd; ++i) dyns.push_back("d" + std::to_string(i));

  // Monotone state domains: the top state carries everything. Dynamic
  // individuals need a manifestation target everywhere, so when they exist
  // every state keeps at least one element.
  std::map<StateId, std::set<Element>> doms;
  for (std::size_t i = 0; i < k; ++i) {
    std::set<Element> d;
    for (const Element& e : dom)
      if (rng.chance(1, 2)) d.insert(e);
    if (nd > 0) d.insert(dom[0]);
    doms[fr.states[i]] = std::move(d);
  }
  doms["top"] = std::set<Element>(dom.begin(), dom.end());
  // close upward under accessibility
  for (const StateId& s : fr.states)
    for (const StateId& t : fr.states)
      if (s != t && fr.le(s, t))
        for (const Element& e : doms[s]) doms[t].insert(e);

  std::map<StateId, FiniteStructure> assign;
  for (const StateId& s : fr.states) {
    std::vector<Element> sd(doms[s].begin(), doms[s].end());
    std::map<Sort, std::vector<Element>> domains{{logic::kStat, sd}};
    if (sig->has_sort(logic::dyn_sort(1))) domains[logic::dyn_sort(1)] = dyns;

    std::map<std::string, std::set<Tuple>> interp;
    for (const RelationDecl& d : sig->relations()) {
      if (d.manifestation) continue;
      if (!d.dynamic) {
        // induced from the union: static monotonicity holds by construction
        std::set<Tuple> ts;
        for (const Tuple& t : uni[d.name]) {
          bool in = true;
          for (const Element& e : t)
            if (!doms[s].count(e)) in = false;
          if (in) ts.insert(t);
        }
        interp[d.name] = std::move(ts);
      } else {
        // dynamic facts vary freely over present tuples
        std::set<Tuple> ts;
        if (d.arity() == 1) {
          for (const Element& e : sd)
            if (rng.chance(1, 2)) ts.insert({e});
        }
        interp[d.name] = std::move(ts);
      }
    }
    if (!dyns.empty()) {
      std::set<Tuple> ms;
      for (const Element& dy : dyns) ms.insert({sd[rng.below(sd.size())], dy});
      interp[logic::manifest_rel(1)] = std::move(ms);
    }
    assign.emplace(s, FiniteStructure(sig, std::move(domains), std::move(interp)));
  }

  return DevelopmentModel(fr, assign);
}

FormulaPtr fuzz_formula(Rng& rng, const Signature& sig, const FormulaOptions& opt) {
  std::vector<std::string> static_rels, dynamic_rels;
  for (const RelationDecl& d : sig.relations()) {
    if (d.manifestation) continue;
    bool stat_sorted = true;
    for (const Sort& s : d.sorts)
      if (s != logic::kStat) stat_sorted = false;
    if (!stat_sorted) continue;
    (d.dynamic ? dynamic_rels : static_rels).push_back(d.name);
  }

  std::vector<Var> scope;
  for (std::size_t i = 0; i < opt.free_vars; ++i)
    scope.push_back({"x" + std::to_string(i), logic::kStat});

  std::size_t fresh = 0;

  std::function<FormulaPtr(int, int, std::vector<Var>)> go =
      [&](int qd, int md, std::vector<Var> vars) -> FormulaPtr {
    auto atom = [&]() -> FormulaPtr {
      std::vector<Var> stat_vars;
      std::map<std::string, Sort> env;
      for (const Var& v : vars) env[v.name] = v.sort;
      for (const auto& [name, sort] : env)
        if (sort == logic::kStat) stat_vars.push_back({name, sort});
      if (stat_vars.empty()) {
        // no variables in scope: close with a fresh existential
        Var y{"y" + std::to_string(fresh++), logic::kStat};
        return Formula::exists(y, Formula::atom(static_rels.front(), {y}));
      }
      const Var& v = stat_vars[rng.below(stat_vars.size())];
      const Var& w = stat_vars[rng.below(stat_vars.size())];
      std::vector<std::string> rels = static_rels;
      if (!opt.static_only)
        rels.insert(rels.end(), dynamic_rels.begin(), dynamic_rels.end());
      switch (rng.below(3)) {
        case 0: {
          const std::string& r = rels[rng.below(rels.size())];
          const RelationDecl& d = sig.at(r);
          std::vector<Var> args;
          for (int i = 0; i < d.arity(); ++i)
            args.push_back(rng.coin() ? v : w);
          return Formula::atom(r, args);
        }
        case 1:
          return Formula::eq(v, w);
        default: {
          const std::string& r = rels[rng.below(rels.size())];
          const RelationDecl& d = sig.at(r);
          std::vector<Var> args;
          for (int i = 0; i < d.arity(); ++i)
            args.push_back(rng.coin() ? v : w);
          return Formula::lnot(Formula::atom(r, args));
        }
      }
    };

    bool can_quant = qd > 0;
    bool can_modal = md > 0;
    std::size_t roll = rng.below(10);
    if (roll < 3 || (!can_quant && !can_modal && roll < 6)) {
      return atom();
    }
    if (roll < 5) return Formula::lnot(go(qd, md, vars));
    if (roll < 6)
      return Formula::land(go(qd, md, vars), go(qd, md, vars));
    if (roll < 7) return Formula::lor(go(qd, md, vars), go(qd, md, vars));
    if (roll < 8 && can_quant) {
      Var x{"q" + std::to_string(fresh++), logic::kStat};
      auto body_vars = vars;
      body_vars.push_back(x);
      FormulaPtr body = go(qd - 1, md, body_vars);
      return rng.coin() ? Formula::exists(x, body) : Formula::forall(x, body);
    }
    if (can_modal && roll >= 8) {
      FormulaPtr body = go(qd, md - 1, vars);
      return rng.coin() ? Formula::dia(body) : Formula::box(body);
    }
    if (can_quant) {
      Var x{"q" + std::to_string(fresh++), logic::kStat};
      auto body_vars = vars;
      body_vars.push_back(x);
      return Formula::exists(x, go(qd - 1, md, body_vars));
    }
    return atom();
  };

  return go(opt.quantifier_depth, opt.modal_depth, scope);
}

FormulaPtr fuzz_literal(Rng& rng, const Signature& sig, std::size_t free_vars) {
  std::vector<std::string> rels;
  for (const RelationDecl& d : sig.relations()) {
    if (d.dynamic || d.manifestation) continue;
    bool stat_sorted = true;
    for (const Sort& s : d.sorts)
      if (s != logic::kStat) stat_sorted = false;
    if (stat_sorted) rels.push_back(d.name);
  }
  std::vector<Var> pool;
  for (std::size_t i = 0; i < std::max<std::size_t>(free_vars, 1); ++i)
    pool.push_back({"x" + std::to_string(i), logic::kStat});
  const std::string& r = rels[rng.below(rels.size())];
  const RelationDecl& d = sig.at(r);
  std::vector<Var> args;
  for (int i = 0; i < d.arity(); ++i) args.push_back(pool[rng.below(pool.size())]);
  FormulaPtr atom = Formula::atom(r, args);
  return rng.coin() ? atom : Formula::lnot(atom);
}

std::optional<structures::Assignment> fuzz_assignment(Rng& rng,
                                                      const DevelopmentModel& m,
                                                      const FormulaPtr& f) {
  FiniteStructure uni = model::union_of(m);
  structures::Assignment asg;
  for (const Var& v : logic::free_vars(f)) {
    const auto& dom = uni.domain(v.sort);
    if (dom.empty()) return std::nullopt;
    asg[v.name] = dom[rng.below(dom.size())];
  }
  return asg;
}

DevelopmentModel fork_model() {
  auto sig = std::make_shared<const Signature>(
      std::vector<Sort>{logic::kStat},
      std::vector<RelationDecl>{{"R", {logic::kStat}, false, false}});
  FiniteStructure base(sig, {{logic::kStat, {"a"}}}, {});
  FiniteStructure with_fact(sig, {{logic::kStat, {"a"}}}, {{"R", {{"a"}}}});
  Frame fr;
  fr.states = {"s0", "s1", "s2"};
  fr.order = {{"s0", "s1"}, {"s0", "s2"}};
  return DevelopmentModel(fr, {{"s0", base}, {"s1", with_fact}, {"s2", base}});
}

}  // namespace devmodal::fuzz
