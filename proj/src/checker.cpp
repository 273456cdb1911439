#include "devmodal/checker.hpp"

#include <algorithm>
#include <sstream>

namespace devmodal::check {

using logic::Conn;
using logic::Formula;
using logic::FormulaPtr;
using logic::Sort;
using logic::Var;

namespace {

bool sat_rec(const DevelopmentModel& m, const StateId& s, const FormulaPtr& f,
             Assignment& asg) {
  const FiniteStructure& u = m.at(s);
  switch (f->kind) {
    case Conn::Atom: {
      Tuple t;
      for (const Var& v : f->args) {
        auto it = asg.find(v.name);
        if (it == asg.end())
          throw UnboundVariableError("variable '" + v.name + "' unbound");
        t.push_back(it->second);
      }
      return u.holds(f->rel, t);
    }
    case Conn::Manifest: {
      Tuple t;
      for (const Var& v : f->args) {
        auto it = asg.find(v.name);
        if (it == asg.end())
          throw UnboundVariableError("variable '" + v.name + "' unbound");
        t.push_back(it->second);
      }
      auto it = asg.find(f->dyn.name);
      if (it == asg.end())
        throw UnboundVariableError("variable '" + f->dyn.name + "' unbound");
      t.push_back(it->second);
      return u.holds(logic::manifest_rel(static_cast<int>(f->args.size())), t);
    }
    case Conn::Eq:
      return asg.at(f->args[0].name) == asg.at(f->args[1].name);
    case Conn::Not:
      return !sat_rec(m, s, f->a, asg);
    case Conn::And:
      return sat_rec(m, s, f->a, asg) && sat_rec(m, s, f->b, asg);
    case Conn::Or:
      return sat_rec(m, s, f->a, asg) || sat_rec(m, s, f->b, asg);
    case Conn::Implies:
      return !sat_rec(m, s, f->a, asg) || sat_rec(m, s, f->b, asg);
    case Conn::Iff:
      return sat_rec(m, s, f->a, asg) == sat_rec(m, s, f->b, asg);
    case Conn::Exists:
    case Conn::Forall: {
      bool ex = f->kind == Conn::Exists;
      auto old = asg.find(f->bound.name) != asg.end()
                     ? std::optional<Element>(asg[f->bound.name])
                     : std::nullopt;
      bool result = !ex;
      for (const Element& c : u.domain(f->bound.sort)) {
        asg[f->bound.name] = c;
        if (sat_rec(m, s, f->a, asg) == ex) {
          result = ex;
          break;
        }
      }
      if (old)
        asg[f->bound.name] = *old;
      else
        asg.erase(f->bound.name);
      return result;
    }
    case Conn::Dia: {
      for (const StateId& t : m.states())
        if (m.frame().le(s, t) && sat_rec(m, t, f->a, asg)) return true;
      return false;
    }
    case Conn::Box: {
      for (const StateId& t : m.states())
        if (m.frame().le(s, t) && !sat_rec(m, t, f->a, asg)) return false;
      return true;
    }
  }
  return false;
}

void check_assignment(const DevelopmentModel& m, const FormulaPtr& f,
                      const Assignment& asg) {
  FiniteStructure uni = model::union_of(m);
  for (const Var& v : logic::free_vars(f)) {
    auto it = asg.find(v.name);
    if (it == asg.end())
      throw UnboundVariableError("free variable '" + v.name + "' unbound");
    if (!uni.has_element(v.sort, it->second))
      throw SortError("parameter '" + it->second + "' is not a " + v.sort +
                      " element of the model's union");
  }
}

}  // namespace

bool satisfies(const DevelopmentModel& m, const StateId& s, const FormulaPtr& f,
               const Assignment& asg) {
  check_assignment(m, f, asg);
  Assignment work = asg;
  return sat_rec(m, s, f, work);
}

bool satisfies_globally(const DevelopmentModel& m, const FormulaPtr& f,
                        const Assignment& asg) {
  check_assignment(m, f, asg);
  for (const StateId& s : m.states()) {
    Assignment work = asg;
    if (!sat_rec(m, s, f, work)) return false;
  }
  return true;
}

TeleologyReport tele(const DevelopmentModel& m, const FormulaPtr& f,
                     const Assignment& asg) {
  check_assignment(m, f, asg);
  TeleologyReport rep;
  rep.formula = logic::print_formula(f);

  // box f per state, computed once.
  std::map<StateId, bool> box_at;
  for (const StateId& t : m.states()) {
    bool all = true;
    for (const StateId& r : m.states()) {
      if (!m.frame().le(t, r)) continue;
      Assignment work = asg;
      if (!sat_rec(m, r, f, work)) {
        all = false;
        break;
      }
    }
    box_at[t] = all;
  }

  // In a valid (directed, transitive) model one box-witness serves every
  // state: joining the witness with any state stays inside the box region.
  // So the verdict needs a single witness anywhere; the per-state table is
  // reporting detail.
  bool any = false;
  for (const StateId& t : m.states())
    if (box_at[t]) {
      any = true;
      break;
    }
  for (const StateId& s : m.states()) {
    std::optional<StateId> w;
    for (const StateId& t : m.states())
      if (m.frame().le(s, t) && box_at[t]) {
        w = t;
        break;
      }
    rep.witness[s] = w;
  }
  rep.verdict = any;
  return rep;
}

bool tele_naive(const DevelopmentModel& m, const FormulaPtr& f, const Assignment& asg) {
  FormulaPtr diabox = Formula::dia(Formula::box(f));
  return satisfies_globally(m, diabox, asg);
}

ConvergeResult check_converge(const DevelopmentModel& m, const FormulaPtr& literal,
                              const Assignment& asg) {
  if (!logic::classify(literal, *m.sig()).literal)
    throw NotALiteralError("converge check requires a literal of the static language");
  check_assignment(m, literal, asg);

  ConvergeResult r;
  FiniteStructure uni = model::union_of(m);
  r.union_holds = structures::eval_in_structure(uni, literal, asg);

  // Only parameter-containing states can evaluate the literal structurally.
  std::vector<Var> fv = logic::free_vars(literal);
  r.some_state = false;
  for (const StateId& s : m.states()) {
    const FiniteStructure& u = m.at(s);
    bool present = true;
    for (const Var& v : fv)
      if (!u.has_element(v.sort, asg.at(v.name))) {
        present = false;
        break;
      }
    if (present && structures::eval_in_structure(u, literal, asg)) {
      r.some_state = true;
      break;
    }
  }

  r.teleological = tele(m, literal, asg).verdict;
  r.agree = (r.union_holds == r.some_state) && (r.some_state == r.teleological);
  return r;
}

MirrorResult check_mirroring(const DevelopmentModel& m, const FormulaPtr& f,
                             const Assignment& asg) {
  logic::Classification c = logic::classify(f, *m.sig());
  if (!c.static_language || !c.modal_free)
    throw NotStaticLanguageError(
        "mirroring requires a modal-free formula of the static language");
  check_assignment(m, f, asg);

  MirrorResult r;
  FiniteStructure uni = model::union_of(m);
  r.union_holds = structures::eval_in_structure(uni, f, asg);

  FormulaPtr translated = logic::potentialist_translate(f);
  std::vector<Var> fv = logic::free_vars(f);

  // Evaluate at every state containing the parameters; a closed formula is
  // checked at every state.
  bool first = true;
  bool value = false;
  r.states_agree = true;
  for (const StateId& s : m.states()) {
    bool present = true;
    for (const Var& v : fv)
      if (!m.at(s).has_element(v.sort, asg.at(v.name))) {
        present = false;
        break;
      }
    if (!present) continue;
    Assignment work = asg;
    bool here = sat_rec(m, s, translated, work);
    if (first) {
      value = here;
      first = false;
    } else if (here != value) {
      r.states_agree = false;
    }
  }
  r.modal_holds = !first && r.states_agree && value;
  r.agree = r.states_agree && (r.union_holds == r.modal_holds);
  return r;
}

namespace {

// All assignments of the formula's free variables over the union structure,
// paired with the states containing them.
void for_each_instance(
    const DevelopmentModel& m, const FormulaPtr& f,
    const std::function<void(const Assignment&, const std::vector<StateId>&)>& fn) {
  std::vector<Var> fv = logic::free_vars(f);
  FiniteStructure uni = model::union_of(m);
  std::vector<std::size_t> idx(fv.size(), 0);
  while (true) {
    Assignment asg;
    bool ok = true;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      const auto& dom = uni.domain(fv[i].sort);
      if (dom.empty()) {
        ok = false;
        break;
      }
      asg[fv[i].name] = dom[idx[i]];
    }
    if (ok) {
      std::vector<StateId> present;
      for (const StateId& s : m.states()) {
        bool all = true;
        for (const Var& v : fv)
          if (!m.at(s).has_element(v.sort, asg.at(v.name))) {
            all = false;
            break;
          }
        if (all) present.push_back(s);
      }
      fn(asg, present);
    }
    if (fv.empty() || !ok) break;
    std::size_t i = 0;
    for (; i < fv.size(); ++i) {
      if (++idx[i] < uni.domain(fv[i].sort).size()) break;
      idx[i] = 0;
    }
    if (i == fv.size()) break;
  }
}

std::string asg_text(const Assignment& asg) {
  std::string out;
  for (const auto& [k, v] : asg) {
    if (!out.empty()) out += ",";
    out += k + "=" + v;
  }
  return out.empty() ? "-" : out;
}

}  // namespace

CmpReport check_cmp(const DevelopmentModel& m, const std::vector<FormulaPtr>& sample) {
  CmpReport rep;
  auto run_instance = [&](const std::string& schema, const FormulaPtr& inst,
                          const FormulaPtr& base) {
    for_each_instance(m, inst, [&](const Assignment& asg, const std::vector<StateId>& states) {
      for (const StateId& s : states) {
        ++rep.instances;
        Assignment work = asg;
        if (!sat_rec(m, s, inst, work))
          rep.violations.push_back(
              {schema, logic::print_formula(base), s, asg_text(asg)});
      }
    });
  };

  for (std::size_t i = 0; i < sample.size(); ++i) {
    const FormulaPtr& f = sample[i];
    FormulaPtr box_f = Formula::box(f);
    // T: box f -> f
    run_instance("T", Formula::implies(box_f, f), f);
    // 4: box f -> box box f
    run_instance("4", Formula::implies(box_f, Formula::box(box_f)), f);
    // G: dia box f -> box dia f
    run_instance("G",
                 Formula::implies(Formula::dia(box_f), Formula::box(Formula::dia(f))),
                 f);
    // K: box(f -> g) -> (box f -> box g), pairing consecutive samples
    const FormulaPtr& g = sample[(i + 1) % sample.size()];
    run_instance("K",
                 Formula::implies(Formula::box(Formula::implies(f, g)),
                                  Formula::implies(box_f, Formula::box(g))),
                 Formula::implies(f, g));
    // Stability for literals
    if (logic::classify(f, *m.sig()).literal)
      run_instance("Stability", Formula::implies(f, box_f), f);
  }
  return rep;
}

bool check_dynsub(const DevelopmentModel& m, const StateId& s, const FormulaPtr& f,
                  const std::vector<Var>& xs, const Assignment& asg,
                  const Element& delta) {
  // The manifestation of delta at s must be the tuple bound by xs.
  int n = static_cast<int>(xs.size());
  Tuple expected;
  for (const Var& x : xs) expected.push_back(asg.at(x.name));
  Tuple manifested;
  for (const Tuple& t : m.at(s).tuples(logic::manifest_rel(n)))
    if (t.back() == delta) {
      manifested = Tuple(t.begin(), t.end() - 1);
      break;
    }
  if (manifested != expected)
    throw NotManifestingError("element " + delta +
                              " does not manifest as the given tuple at state " + s);

  bool lhs = satisfies(m, s, f, asg);

  // Fresh dynamic variable for the substitution.
  std::string xi_name = "xi";
  std::size_t k = 0;
  auto fv = logic::free_vars(f);
  auto clash = [&](const std::string& nm) {
    for (const Var& v : fv)
      if (v.name == nm) return true;
    return asg.count(nm) != 0;
  };
  while (clash(xi_name)) xi_name = "xi" + std::to_string(k++);
  Var xi{xi_name, logic::dyn_sort(n)};

  FormulaPtr sub = logic::dynamic_substitute(f, xs, xi);
  Assignment asg2 = asg;
  for (const Var& x : xs) asg2.erase(x.name);
  asg2[xi.name] = delta;
  bool rhs = satisfies(m, s, sub, asg2);
  return lhs == rhs;
}

std::optional<Sigma2Certificate> sigma2_certificate(const FiniteStructure& u,
                                                    const FormulaPtr& f) {
  if (!logic::classify(f, *u.sig()).sigma2)
    throw NotSigma2Error("certificate requires a prenex exists*forall* formula");
  // Split the prefix.
  std::vector<Var> ex_block;
  FormulaPtr g = f;
  while (g->kind == Conn::Exists) {
    ex_block.push_back(g->bound);
    g = g->a;
  }
  FormulaPtr pi_part = g;  // forall block + body

  for (const Var& v : ex_block)
    if (v.sort != logic::kStat)
      throw NotSigma2Error("witness block must quantify over Stat");

  // Find the least witness block (lexicographic over the Stat domain).
  const auto& dom = u.domain(logic::kStat);
  std::vector<std::size_t> idx(ex_block.size(), 0);
  std::optional<Tuple> found;
  if (ex_block.empty()) {
    if (structures::eval_in_structure(u, f, {})) found = Tuple{};
  } else if (!dom.empty()) {
    while (true) {
      Assignment asg;
      Tuple t;
      for (std::size_t i = 0; i < ex_block.size(); ++i) {
        asg[ex_block[i].name] = dom[idx[i]];
        t.push_back(dom[idx[i]]);
      }
      if (structures::eval_in_structure(u, pi_part, asg)) {
        found = t;
        break;
      }
      std::size_t i = ex_block.size();
      while (i > 0) {
        --i;
        if (++idx[i] < dom.size()) break;
        idx[i] = 0;
        if (i == 0) {
          i = ex_block.size() + 1;
          break;
        }
      }
      if (i == ex_block.size() + 1) break;
    }
  }
  if (!found) return std::nullopt;

  Sigma2Certificate cert;
  cert.witnesses = *found;
  std::set<Element> base(found->begin(), found->end());
  cert.state = model::subset_state_id(base);

  // Re-verify: every superset state of fin_dev(u) satisfies f.
  model::DevelopmentModel fd = model::fin_dev(u);
  for (const StateId& s : fd.states()) {
    const FiniteStructure& w = fd.at(s);
    bool super = true;
    for (const Element& e : base)
      if (!w.has_element(logic::kStat, e)) {
        super = false;
        break;
      }
    if (!super) continue;
    if (!structures::eval_in_structure(w, f, {}))
      throw Error("persistence step failed at state " + s);
    ++cert.verified_supersets;
  }
  return cert;
}

ReflectionResult reflection_dev(const FiniteStructure& u,
                                const std::vector<FiniteStructure>& chain,
                                const std::vector<FormulaPtr>& gamma,
                                const std::vector<Element>& params,
                                const std::string& marker) {
  if (chain.empty()) throw ChainInvalidError("empty chain");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    std::set<std::string> all_static;
    for (const logic::RelationDecl& d : u.sig()->relations())
      if (!d.dynamic) all_static.insert(d.name);
    if (!structures::substructure_check(chain[i], chain[i + 1], all_static))
      throw ChainInvalidError("chain member " + std::to_string(i) +
                              " is not a substructure of the next");
  }
  if (!chain.back().same_contents(u))
    throw ChainInvalidError("chain top must equal the ambient structure");
  for (const FormulaPtr& f : gamma)
    if (!logic::classify(f, *u.sig()).modal_free)
      throw ModalInputError("reflection formulas must be modal-free");
  for (const Element& p : params)
    if (!u.has_element(logic::kStat, p))
      throw DomainError("parameter '" + p + "' is not in the ambient structure");

  // Extended signature with the dynamic unary marker.
  std::vector<Sort> sorts = u.sig()->sorts();
  std::vector<logic::RelationDecl> decls;
  for (const logic::RelationDecl& d : u.sig()->relations())
    if (!d.manifestation) decls.push_back(d);
  decls.push_back({marker, {logic::kStat}, /*dynamic=*/true, false});
  auto sig = std::make_shared<const logic::Signature>(sorts, decls);
  FiniteStructure base = u.with_signature(sig);

  // The reflection condition for chain member j at (gamma', A).
  auto member_reflects = [&](std::size_t j, const std::vector<std::size_t>& gsel,
                             const std::vector<Element>& avail) {
    const auto& mdom = chain[j].domain(logic::kStat);
    for (const Element& p : avail)
      if (!std::binary_search(mdom.begin(), mdom.end(), p)) return false;
    std::set<Element> mset(mdom.begin(), mdom.end());
    FiniteStructure probe = base.with_relation(marker, [&] {
      std::set<Tuple> ts;
      for (const Element& e : mdom) ts.insert({e});
      return ts;
    }());
    for (std::size_t gi : gsel) {
      const FormulaPtr& f = gamma[gi];
      FormulaPtr fnu = structures::relativize(f, marker);
      FormulaPtr bic = Formula::iff(f, fnu);
      std::vector<Var> fv = logic::free_vars(f);
      // All tuples of parameters drawn from avail.
      std::vector<std::size_t> idx(fv.size(), 0);
      while (true) {
        Assignment asg;
        bool ok = !fv.empty() || true;
        if (!fv.empty() && avail.empty()) break;
        for (std::size_t i = 0; i < fv.size(); ++i) asg[fv[i].name] = avail[idx[i]];
        if (ok && !structures::eval_in_structure(probe, bic, asg)) return false;
        if (fv.empty()) break;
        std::size_t i = 0;
        for (; i < fv.size(); ++i) {
          if (++idx[i] < avail.size()) break;
          idx[i] = 0;
        }
        if (i == fv.size()) break;
      }
    }
    return true;
  };

  // States: subsets of gamma x subsets of params, ordered componentwise.
  std::size_t ng = gamma.size(), np = params.size();
  if (ng > 10 || np > 10) throw BoundsTooLargeError("reflection state lattice too large");
  model::Frame fr;
  std::map<StateId, FiniteStructure> assign;
  struct StateKey {
    std::size_t gmask, pmask;
  };
  std::vector<StateKey> keys;
  auto state_name = [&](std::size_t gm, std::size_t pm) {
    std::string id = "g{";
    for (std::size_t i = 0; i < ng; ++i)
      if (gm & (std::size_t{1} << i)) id += std::to_string(i) + ",";
    id += "}p{";
    for (std::size_t i = 0; i < np; ++i)
      if (pm & (std::size_t{1} << i)) id += params[i] + ",";
    return id + "}";
  };
  for (std::size_t gm = 0; gm < (std::size_t{1} << ng); ++gm)
    for (std::size_t pm = 0; pm < (std::size_t{1} << np); ++pm) {
      keys.push_back({gm, pm});
      StateId id = state_name(gm, pm);
      fr.states.push_back(id);

      std::vector<std::size_t> gsel;
      for (std::size_t i = 0; i < ng; ++i)
        if (gm & (std::size_t{1} << i)) gsel.push_back(i);
      std::vector<Element> avail;
      for (std::size_t i = 0; i < np; ++i)
        if (pm & (std::size_t{1} << i)) avail.push_back(params[i]);

      // Least qualifying chain member; the top always qualifies.
      std::size_t pick = chain.size() - 1;
      for (std::size_t j = 0; j < chain.size(); ++j)
        if (member_reflects(j, gsel, avail)) {
          pick = j;
          break;
        }
      FiniteStructure st = base.with_relation(marker, [&] {
        std::set<Tuple> ts;
        for (const Element& e : chain[pick].domain(logic::kStat)) ts.insert({e});
        return ts;
      }());
      assign.emplace(id, std::move(st));
    }
  for (const StateKey& a : keys)
    for (const StateKey& b : keys)
      if ((a.gmask != b.gmask || a.pmask != b.pmask) &&
          (a.gmask & b.gmask) == a.gmask && (a.pmask & b.pmask) == a.pmask)
        fr.order.insert({state_name(a.gmask, a.pmask), state_name(b.gmask, b.pmask)});

  ReflectionResult out{DevelopmentModel(std::move(fr), std::move(assign)), {}};

  for (std::size_t gi = 0; gi < gamma.size(); ++gi) {
    const FormulaPtr& f = gamma[gi];
    FormulaPtr bic = Formula::iff(f, structures::relativize(f, marker));
    std::vector<Var> fv = logic::free_vars(f);
    std::vector<std::size_t> idx(fv.size(), 0);
    while (true) {
      Assignment asg;
      Tuple t;
      if (!fv.empty() && params.empty()) break;
      for (std::size_t i = 0; i < fv.size(); ++i) {
        asg[fv[i].name] = params[idx[i]];
        t.push_back(params[idx[i]]);
      }
      ReflectionResult::Row row;
      row.formula = gi;
      row.params = t;
      row.tele = tele(out.model, bic, asg).verdict;
      out.rows.push_back(row);
      if (fv.empty()) break;
      std::size_t i = 0;
      for (; i < fv.size(); ++i) {
        if (++idx[i] < params.size()) break;
        idx[i] = 0;
      }
      if (i == fv.size()) break;
    }
  }
  return out;
}

}  // namespace devmodal::check
