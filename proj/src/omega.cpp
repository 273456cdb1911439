#include "devmodal/omega.hpp"

#include <algorithm>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace devmodal::omega {

using logic::Conn;
using logic::FormulaPtr;
using logic::Signature;
using logic::SignaturePtr;
using logic::Sort;
using logic::Var;
using model::ValidationReport;
using structures::Element;
using structures::Tuple;

ValidationReport validate_lasso(const Lasso& l) {
  ValidationReport rep;
  if (l.period < 1) {
    rep.items.push_back({"frame", "period must be at least 1"});
    return rep;
  }
  if (l.structures.size() != l.size()) {
    rep.items.push_back({"frame", "expected " + std::to_string(l.size()) +
                                      " structures, got " +
                                      std::to_string(l.structures.size())});
    return rep;
  }
  const SignaturePtr& sig = l.structures.front().sig();

  // (b) manifestation totality per representative state
  for (int n : sig->dyn_arities()) {
    const std::string rel = logic::manifest_rel(n);
    const Sort ds = logic::dyn_sort(n);
    for (std::size_t i = 0; i < l.size(); ++i) {
      const FiniteStructure& u = l.structures[i];
      for (const Element& d : u.domain(ds)) {
        int count = 0;
        for (const Tuple& t : u.tuples(rel))
          if (t.back() == d) ++count;
        if (count != 1)
          rep.items.push_back({"manifestation",
                               "element " + d + " manifests as " +
                                   std::to_string(count) + " tuples at state " +
                                   std::to_string(i)});
      }
    }
  }

  // (c) static monotonicity across representative edges including the wrap
  auto check_edge = [&](std::size_t i, std::size_t j) {
    if (!structures::static_substructure_check(l.structures[i], l.structures[j]))
      rep.items.push_back({"monotonicity",
                           "static substructure fails on edge " + std::to_string(i) +
                               " -> " + std::to_string(j)});
  };
  for (std::size_t i = 0; i + 1 < l.size(); ++i) check_edge(i, i + 1);
  if (l.period >= 1 && l.size() >= 1) check_edge(l.size() - 1, l.transient);

  // constant non-Stat sorts
  for (const Sort& s : sig->sorts()) {
    if (s == logic::kStat) continue;
    for (std::size_t i = 1; i < l.size(); ++i)
      if (l.structures[i].domain(s) != l.structures[0].domain(s))
        rep.items.push_back({"constant-sort", "sort " + s + " differs at state " +
                                                  std::to_string(i)});
  }
  return rep;
}

namespace {

// Exact evaluation at representative state i. From a cycle state every
// cycle representative is reachable, so modal windows are [i, size) on the
// transient and the whole cycle block on the cycle.
bool eval_at(const Lasso& l, std::size_t i, const FormulaPtr& f,
             structures::Assignment& asg) {
  const FiniteStructure& u = l.structures[i];
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
      for (const Var& v : f->args) t.push_back(asg.at(v.name));
      t.push_back(asg.at(f->dyn.name));
      return u.holds(logic::manifest_rel(static_cast<int>(f->args.size())), t);
    }
    case Conn::Eq:
      return asg.at(f->args[0].name) == asg.at(f->args[1].name);
    case Conn::Not:
      return !eval_at(l, i, f->a, asg);
    case Conn::And:
      return eval_at(l, i, f->a, asg) && eval_at(l, i, f->b, asg);
    case Conn::Or:
      return eval_at(l, i, f->a, asg) || eval_at(l, i, f->b, asg);
    case Conn::Implies:
      return !eval_at(l, i, f->a, asg) || eval_at(l, i, f->b, asg);
    case Conn::Iff:
      return eval_at(l, i, f->a, asg) == eval_at(l, i, f->b, asg);
    case Conn::Exists:
    case Conn::Forall: {
      bool ex = f->kind == Conn::Exists;
      auto saved = asg.count(f->bound.name)
                       ? std::optional<Element>(asg[f->bound.name])
                       : std::nullopt;
      bool result = !ex;
      for (const Element& c : u.domain(f->bound.sort)) {
        asg[f->bound.name] = c;
        if (eval_at(l, i, f->a, asg) == ex) {
          result = ex;
          break;
        }
      }
      if (saved)
        asg[f->bound.name] = *saved;
      else
        asg.erase(f->bound.name);
      return result;
    }
    case Conn::Dia:
    case Conn::Box: {
      bool dia = f->kind == Conn::Dia;
      std::size_t lo = i < l.transient ? i : l.transient;
      // from a transient state the whole tail [i, size) is reachable; from a
      // cycle state every cycle representative is
      std::size_t start = i < l.transient ? i : l.transient;
      (void)lo;
      for (std::size_t j = start; j < l.size(); ++j) {
        if (i < l.transient && j < i) continue;
        if (eval_at(l, j, f->a, asg) == dia) return dia;
      }
      return !dia;
    }
  }
  return false;
}

}  // namespace

bool lasso_satisfies(const Lasso& l, std::size_t n, const FormulaPtr& f,
                     const Assignment& asg) {
  // Parameters must come from the lasso's universe.
  std::vector<FiniteStructure> all = l.structures;
  FiniteStructure uni = structures::union_structure(all);
  for (const Var& v : logic::free_vars(f)) {
    auto it = asg.find(v.name);
    if (it == asg.end())
      throw UnboundVariableError("variable '" + v.name + "' unbound");
    if (!uni.has_element(v.sort, it->second))
      throw ParameterOutOfUniverseError("parameter '" + it->second +
                                        "' is outside the lasso universe");
  }
  Assignment work = asg;
  return eval_at(l, l.rep(n), f, work);
}

namespace {

int eval_unrolled(const Lasso& l, std::size_t t, const FormulaPtr& f,
                  structures::Assignment& asg, std::size_t horizon) {
  const FiniteStructure& u = l.at(t);
  switch (f->kind) {
    case Conn::Atom: {
      Tuple tu;
      for (const Var& v : f->args) tu.push_back(asg.at(v.name));
      return u.holds(f->rel, tu) ? 1 : -1;
    }
    case Conn::Manifest: {
      Tuple tu;
      for (const Var& v : f->args) tu.push_back(asg.at(v.name));
      tu.push_back(asg.at(f->dyn.name));
      return u.holds(logic::manifest_rel(static_cast<int>(f->args.size())), tu) ? 1
                                                                                : -1;
    }
    case Conn::Eq:
      return asg.at(f->args[0].name) == asg.at(f->args[1].name) ? 1 : -1;
    case Conn::Not:
      return -eval_unrolled(l, t, f->a, asg, horizon);
    case Conn::And:
      return std::min(eval_unrolled(l, t, f->a, asg, horizon),
                      eval_unrolled(l, t, f->b, asg, horizon));
    case Conn::Or:
      return std::max(eval_unrolled(l, t, f->a, asg, horizon),
                      eval_unrolled(l, t, f->b, asg, horizon));
    case Conn::Implies:
      return std::max(-eval_unrolled(l, t, f->a, asg, horizon),
                      eval_unrolled(l, t, f->b, asg, horizon));
    case Conn::Iff: {
      int a = eval_unrolled(l, t, f->a, asg, horizon);
      int b = eval_unrolled(l, t, f->b, asg, horizon);
      if (a == 0 || b == 0) return 0;
      return a == b ? 1 : -1;
    }
    case Conn::Exists:
    case Conn::Forall: {
      bool ex = f->kind == Conn::Exists;
      auto saved = asg.count(f->bound.name)
                       ? std::optional<Element>(asg[f->bound.name])
                       : std::nullopt;
      int acc = ex ? -1 : 1;
      for (const Element& c : u.domain(f->bound.sort)) {
        asg[f->bound.name] = c;
        int v = eval_unrolled(l, t, f->a, asg, horizon);
        acc = ex ? std::max(acc, v) : std::min(acc, v);
        if ((ex && acc > 0) || (!ex && acc < 0)) break;
      }
      if (saved)
        asg[f->bound.name] = *saved;
      else
        asg.erase(f->bound.name);
      return acc;
    }
    case Conn::Dia: {
      int acc = 0;  // no witness inside the window says nothing about the tail
      for (std::size_t j = t; j < horizon; ++j) {
        int v = eval_unrolled(l, j, f->a, asg, horizon);
        if (v > 0) return 1;
      }
      return acc;
    }
    case Conn::Box: {
      for (std::size_t j = t; j < horizon; ++j) {
        int v = eval_unrolled(l, j, f->a, asg, horizon);
        if (v < 0) return -1;
      }
      return 0;
    }
  }
  return 0;
}

}  // namespace

int unrolled_satisfies(const Lasso& l, std::size_t n, const FormulaPtr& f,
                       const Assignment& asg, std::size_t horizon) {
  Assignment work = asg;
  return eval_unrolled(l, n, f, work, horizon);
}

model::DevelopmentModel quotient_model(const Lasso& l) {
  model::Frame fr;
  std::map<model::StateId, FiniteStructure> assign;
  auto name = [](std::size_t i) { return "n" + std::to_string(i); };
  for (std::size_t i = 0; i < l.size(); ++i) {
    fr.states.push_back(name(i));
    assign.emplace(name(i), l.structures[i]);
  }
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j) {
      if (i == j) continue;
      bool le = i < j || (i >= l.transient && j >= l.transient);
      if (le) fr.order.insert({name(i), name(j)});
    }
  return model::DevelopmentModel(std::move(fr), std::move(assign));
}

std::string BoundedVerdict::to_text() const {
  switch (kind) {
    case VerdictKind::True:
      return "True [" + certificate + "]";
    case VerdictKind::False:
      return "False [" + certificate + "]";
    default:
      return "Unknown(" + std::to_string(horizon) + ")";
  }
}

// ---------------------------------------------------------------------------
// Bounded three-valued checking with persistence certificates
// ---------------------------------------------------------------------------

namespace {

struct StreamCache {
  const StructureStream& stream;
  std::map<std::size_t, FiniteStructure> cache;

  const FiniteStructure& at(std::size_t n) {
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, stream.at(n)).first;
    return it->second;
  }
};

using Anchored = std::set<std::string>;

bool persist_up(const FormulaPtr& f, const Anchored& anchored, const Signature& sig);

bool persist_down(const FormulaPtr& f, const Anchored& anchored, const Signature& sig) {
  switch (f->kind) {
    case Conn::Atom: {
      if (sig.at(f->rel).dynamic) return false;
      for (const Var& v : f->args)
        if (!anchored.count(v.name)) return false;
      return true;
    }
    case Conn::Manifest:
      return false;
    case Conn::Eq:
      return true;
    case Conn::Not:
      return persist_up(f->a, anchored, sig);
    case Conn::And:
    case Conn::Or:
      return persist_down(f->a, anchored, sig) && persist_down(f->b, anchored, sig);
    case Conn::Implies:
      return persist_up(f->a, anchored, sig) && persist_down(f->b, anchored, sig);
    case Conn::Iff:
      return false;
    case Conn::Exists:
      return false;  // later states may add a witness
    case Conn::Forall: {
      Anchored a2 = anchored;
      a2.insert(f->bound.name);
      return persist_down(f->a, a2, sig);
    }
    case Conn::Dia:
      return true;  // no witness above s means none above any later state
    case Conn::Box:
      return persist_down(f->a, anchored, sig);
  }
  return false;
}

bool persist_up(const FormulaPtr& f, const Anchored& anchored, const Signature& sig) {
  switch (f->kind) {
    case Conn::Atom: {
      if (sig.at(f->rel).dynamic) return false;
      for (const Var& v : f->args)
        if (!anchored.count(v.name)) return false;
      return true;
    }
    case Conn::Manifest:
      return false;
    case Conn::Eq:
      return true;
    case Conn::Not:
      return persist_down(f->a, anchored, sig);
    case Conn::And:
    case Conn::Or:
      return persist_up(f->a, anchored, sig) && persist_up(f->b, anchored, sig);
    case Conn::Implies:
      return persist_down(f->a, anchored, sig) && persist_up(f->b, anchored, sig);
    case Conn::Iff:
      return false;
    case Conn::Exists: {
      Anchored a2 = anchored;
      a2.insert(f->bound.name);
      return persist_up(f->a, a2, sig);
    }
    case Conn::Forall:
      return false;  // later states may add a counterexample
    case Conn::Dia:
      return persist_up(f->a, anchored, sig);
    case Conn::Box:
      return true;  // box truth is inherited along the linear order
  }
  return false;
}

struct EvalCtx {
  StreamCache& cache;
  const Signature& sig;
  std::size_t cap;  // last state index (inclusive) modal scans may touch
  std::size_t horizon;
  bool uniform;
  std::string cert;  // set by the decisive top-level rule
};

int eval3(EvalCtx& ctx, std::size_t n, const FormulaPtr& f,
          structures::Assignment& asg, Anchored& anchored, bool top);

int eval3_box(EvalCtx& ctx, std::size_t n, const FormulaPtr& f,
              structures::Assignment& asg, Anchored& anchored, bool top) {
  const FormulaPtr& body = f->a;
  bool saw_unknown = false;
  for (std::size_t t = n; t <= ctx.cap; ++t) {
    int v = eval3(ctx, t, body, asg, anchored, false);
    if (v < 0) {
      if (top) ctx.cert = "counterexample at state " + std::to_string(t);
      return -1;
    }
    if (v == 0) saw_unknown = true;
  }
  if (!saw_unknown && persist_up(body, anchored, ctx.sig)) {
    if (top)
      ctx.cert = "holds at every state through " + std::to_string(ctx.cap) +
                 "; body persists upward (static facts and domains only grow)";
    return 1;
  }

  if (ctx.uniform) {
    // Birth induction: box forall x1..xk body with an upward-persistent
    // body. Every element tuple is checked at the state where its last
    // component is born; persistence carries the fact to all later states.
    std::vector<Var> bound;
    FormulaPtr inner = body;
    while (inner->kind == Conn::Forall && inner->bound.sort == logic::kStat) {
      bound.push_back(inner->bound);
      inner = inner->a;
    }
    if (!bound.empty()) {
      Anchored a2 = anchored;
      for (const Var& v : bound) a2.insert(v.name);
      if (persist_up(inner, a2, ctx.sig)) {
        EvalCtx ext{ctx.cache, ctx.sig, 2 * ctx.horizon + 2, ctx.horizon, ctx.uniform,
                    ""};
        bool ok = true;
        std::size_t checked = 0;
        for (std::size_t t = n; t <= ctx.horizon && ok; ++t) {
          const auto& dom = ctx.cache.at(t).domain(logic::kStat);
          std::set<Element> fresh;
          if (t == n) {
            fresh.insert(dom.begin(), dom.end());
          } else {
            const auto& prev = ctx.cache.at(t - 1).domain(logic::kStat);
            for (const Element& e : dom)
              if (!std::binary_search(prev.begin(), prev.end(), e)) fresh.insert(e);
          }
          if (fresh.empty()) continue;
          // all tuples over dom with at least one fresh component
          std::vector<std::size_t> idx(bound.size(), 0);
          while (ok) {
            bool has_fresh = false;
            for (std::size_t i = 0; i < bound.size(); ++i)
              if (fresh.count(dom[idx[i]])) has_fresh = true;
            if (has_fresh) {
              for (std::size_t i = 0; i < bound.size(); ++i)
                asg[bound[i].name] = dom[idx[i]];
              int v = eval3(ext, t, inner, asg, a2, false);
              for (const Var& b : bound) asg.erase(b.name);
              if (v != 1) ok = false;
              ++checked;
            }
            std::size_t i = 0;
            for (; i < bound.size(); ++i) {
              if (++idx[i] < dom.size()) break;
              idx[i] = 0;
            }
            if (i == bound.size()) break;
            if (dom.empty()) break;
          }
        }
        if (ok && checked > 0) {
          if (top)
            ctx.cert = "birth induction: " + std::to_string(checked) +
                       " tuple checks at their birth states through " +
                       std::to_string(ctx.horizon) + " (lookahead " +
                       std::to_string(2 * ctx.horizon + 2) +
                       "); body persists upward; stream declared uniform";
          return 1;
        }
      }
    }

    // State induction: a modal-free body is decided exactly at each state;
    // on a declared-uniform stream an all-true prefix extrapolates.
    if (logic::classify(body, ctx.sig).modal_free && !saw_unknown) {
      if (top)
        ctx.cert = "state induction: holds at every state through " +
                   std::to_string(ctx.cap) + "; stream declared uniform";
      return 1;
    }
  }
  return 0;
}

int eval3(EvalCtx& ctx, std::size_t n, const FormulaPtr& f,
          structures::Assignment& asg, Anchored& anchored, bool top) {
  const FiniteStructure& u = ctx.cache.at(n);
  switch (f->kind) {
    case Conn::Atom: {
      Tuple t;
      for (const Var& v : f->args) {
        auto it = asg.find(v.name);
        if (it == asg.end())
          throw UnboundVariableError("variable '" + v.name + "' unbound");
        t.push_back(it->second);
      }
      return u.holds(f->rel, t) ? 1 : -1;
    }
    case Conn::Manifest: {
      Tuple t;
      for (const Var& v : f->args) t.push_back(asg.at(v.name));
      t.push_back(asg.at(f->dyn.name));
      return u.holds(logic::manifest_rel(static_cast<int>(f->args.size())), t) ? 1 : -1;
    }
    case Conn::Eq:
      return asg.at(f->args[0].name) == asg.at(f->args[1].name) ? 1 : -1;
    case Conn::Not:
      return -eval3(ctx, n, f->a, asg, anchored, false);
    case Conn::And: {
      int a = eval3(ctx, n, f->a, asg, anchored, false);
      if (a < 0) return -1;
      int b = eval3(ctx, n, f->b, asg, anchored, false);
      return std::min(a, b);
    }
    case Conn::Or: {
      int a = eval3(ctx, n, f->a, asg, anchored, false);
      if (a > 0) return 1;
      int b = eval3(ctx, n, f->b, asg, anchored, false);
      return std::max(a, b);
    }
    case Conn::Implies: {
      int a = eval3(ctx, n, f->a, asg, anchored, false);
      if (a < 0) return 1;
      int b = eval3(ctx, n, f->b, asg, anchored, false);
      return std::max(-a, b);
    }
    case Conn::Iff: {
      int a = eval3(ctx, n, f->a, asg, anchored, false);
      int b = eval3(ctx, n, f->b, asg, anchored, false);
      if (a == 0 || b == 0) return 0;
      return a == b ? 1 : -1;
    }
    case Conn::Exists:
    case Conn::Forall: {
      bool ex = f->kind == Conn::Exists;
      auto saved = asg.count(f->bound.name)
                       ? std::optional<Element>(asg[f->bound.name])
                       : std::nullopt;
      bool was_anchored = anchored.count(f->bound.name) != 0;
      anchored.insert(f->bound.name);
      int acc = ex ? -1 : 1;
      for (const Element& c : u.domain(f->bound.sort)) {
        asg[f->bound.name] = c;
        int v = eval3(ctx, n, f->a, asg, anchored, false);
        if (ex)
          acc = std::max(acc, v);
        else
          acc = std::min(acc, v);
        if ((ex && acc > 0) || (!ex && acc < 0)) break;
      }
      if (saved)
        asg[f->bound.name] = *saved;
      else
        asg.erase(f->bound.name);
      if (!was_anchored) anchored.erase(f->bound.name);
      return acc;
    }
    case Conn::Dia: {
      bool saw_unknown = false;
      for (std::size_t t = n; t <= ctx.cap; ++t) {
        int v = eval3(ctx, t, f->a, asg, anchored, false);
        if (v > 0) {
          if (top) ctx.cert = "witness at state " + std::to_string(t);
          return 1;
        }
        if (v == 0) saw_unknown = true;
      }
      if (!saw_unknown && persist_down(f->a, anchored, ctx.sig)) {
        if (top)
          ctx.cert = "fails at every state through " + std::to_string(ctx.cap) +
                     "; falsity persists";
        return -1;
      }
      return 0;
    }
    case Conn::Box:
      return eval3_box(ctx, n, f, asg, anchored, top);
  }
  return 0;
}

}  // namespace

BoundedVerdict bounded_satisfies(const StructureStream& stream, std::size_t horizon,
                                 const logic::FormulaPtr& f, const Assignment& asg) {
  if (horizon < 1) throw BoundsTooLargeError("horizon must be at least 1");
  StreamCache cache{stream, {}};
  EvalCtx ctx{cache, *stream.sig, horizon, horizon, stream.uniform, ""};

  // External parameters anchor only when present at the evaluation state.
  Anchored anchored;
  const FiniteStructure& first = cache.at(0);
  structures::Assignment work = asg;
  for (const Var& v : logic::free_vars(f)) {
    auto it = asg.find(v.name);
    if (it == asg.end())
      throw UnboundVariableError("free variable '" + v.name + "' unbound");
    if (first.has_element(v.sort, it->second)) anchored.insert(v.name);
  }

  int v = eval3(ctx, 0, f, work, anchored, /*top=*/true);
  BoundedVerdict out;
  out.horizon = horizon;
  if (v > 0) {
    out.kind = VerdictKind::True;
    out.certificate = ctx.cert.empty() ? "three-valued evaluation over the horizon"
                                       : ctx.cert;
  } else if (v < 0) {
    out.kind = VerdictKind::False;
    out.certificate = ctx.cert.empty() ? "three-valued evaluation over the horizon"
                                       : ctx.cert;
  } else {
    out.kind = VerdictKind::Unknown;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stream presets
// ---------------------------------------------------------------------------

StructureStream arith_basic_stream() {
  std::vector<Sort> sorts{logic::kStat};
  std::vector<logic::RelationDecl> rels{{"Z", {logic::kStat}, false, false},
                                        {"S", {logic::kStat, logic::kStat}, false, false},
                                        {"Plus", {logic::kStat, logic::kStat, logic::kStat}, false, false},
                                        {"Times", {logic::kStat, logic::kStat, logic::kStat}, false, false},
                                        {"Leq", {logic::kStat, logic::kStat}, false, false}};
  auto sig = std::make_shared<const Signature>(sorts, rels);

  StructureStream s;
  s.sig = sig;
  s.name = "arith-basic";
  s.uniform = true;
  s.at = [sig](std::size_t n) {
    std::vector<Element> dom;
    for (std::size_t i = 0; i <= n; ++i) dom.push_back(std::to_string(i));
    std::map<std::string, std::set<Tuple>> interp;
    interp["Z"].insert({"0"});
    for (std::size_t i = 0; i + 1 <= n; ++i)
      interp["S"].insert({std::to_string(i), std::to_string(i + 1)});
    for (std::size_t a = 0; a <= n; ++a)
      for (std::size_t b = 0; b <= n; ++b) {
        if (a + b <= n) interp["Plus"].insert({std::to_string(a), std::to_string(b),
                                               std::to_string(a + b)});
        if (a * b <= n) interp["Times"].insert({std::to_string(a), std::to_string(b),
                                                std::to_string(a * b)});
        if (a <= b) interp["Leq"].insert({std::to_string(a), std::to_string(b)});
      }
    return FiniteStructure(sig, {{logic::kStat, dom}}, std::move(interp));
  };
  return s;
}

StructureStream rationals_grid_stream(int k) {
  using boost::multiprecision::cpp_int;
  std::vector<Sort> sorts{logic::kStat};
  std::vector<logic::RelationDecl> rels{
      {"Less", {logic::kStat, logic::kStat}, false, false},
      {"Sum", {logic::kStat, logic::kStat, logic::kStat}, false, false},
      {"Prod", {logic::kStat, logic::kStat, logic::kStat}, false, false},
      {"Zero", {logic::kStat}, false, false}};
  auto sig = std::make_shared<const Signature>(sorts, rels);

  StructureStream s;
  s.sig = sig;
  s.name = "rationals-grid:" + std::to_string(k);
  s.uniform = false;
  int kk = std::min(k, 4);
  s.at = [sig, kk](std::size_t n) {
    // dyadics i/2^m on [-r, r]; both refinement and range grow with n
    long long m = std::min<long long>(static_cast<long long>(n), kk);
    long long r = std::min<long long>(static_cast<long long>(n), 8);
    long long denom = 1LL << m;
    struct Q {
      long long num, den;  // den a power of two, gcd-reduced
    };
    std::vector<Q> grid;
    for (long long i = -r * denom; i <= r * denom; ++i) {
      long long num = i, den = denom;
      while (num % 2 == 0 && den > 1) {
        num /= 2;
        den /= 2;
      }
      grid.push_back({num, den});
    }
    auto name = [](const Q& q) {
      return q.den == 1 ? std::to_string(q.num)
                        : std::to_string(q.num) + "/" + std::to_string(q.den);
    };
    std::vector<Element> dom;
    for (const Q& q : grid) dom.push_back(name(q));
    std::map<std::string, std::set<Tuple>> interp;
    auto find = [&](long long num, long long den) -> const Q* {
      while (num % 2 == 0 && den > 1) {
        num /= 2;
        den /= 2;
      }
      for (const Q& q : grid)
        if (q.num == num && q.den == den) return &q;
      return nullptr;
    };
    interp["Zero"].insert({Tuple{"0"}});
    for (const Q& a : grid)
      for (const Q& b : grid) {
        // compare a, b over the common denominator
        long long lden = std::max(a.den, b.den);
        long long an = a.num * (lden / a.den), bn = b.num * (lden / b.den);
        if (an < bn) interp["Less"].insert({name(a), name(b)});
        if (const Q* c = find(an + bn, lden))
          interp["Sum"].insert({name(a), name(b), name(*c)});
        long long pden = a.den * b.den;
        if (const Q* c = find(a.num * b.num, pden))
          interp["Prod"].insert({name(a), name(b), name(*c)});
      }
    return FiniteStructure(sig, {{logic::kStat, dom}}, std::move(interp));
  };
  return s;
}

Lasso parse_lasso(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Lasso l;
  bool have_transient = false, have_period = false;
  std::vector<std::string> bodies;
  while (std::getline(in, line)) {
    auto posh = line.find('#');
    if (posh != std::string::npos) line = line.substr(0, posh);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "transient") {
      ls >> l.transient;
      have_transient = true;
    } else if (kw == "period") {
      ls >> l.period;
      have_period = true;
    } else if (kw == "struct") {
      std::string body, bline;
      bool closed = false;
      while (std::getline(in, bline)) {
        std::string trimmed = bline;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
          trimmed.pop_back();
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
          trimmed.erase(trimmed.begin());
        if (trimmed == "}") {
          closed = true;
          break;
        }
        body += bline + "\n";
      }
      if (!closed) throw ParseError("unterminated struct block", 0);
      bodies.push_back(body);
    } else {
      throw ParseError("unknown directive '" + kw + "' in lasso file", 0);
    }
  }
  if (!have_transient || !have_period)
    throw ParseError("lasso file needs 'transient' and 'period' headers", 0);
  if (l.period < 1) throw ParseError("period must be at least 1", 0);
  if (bodies.size() != l.transient + l.period)
    throw ParseError("expected " + std::to_string(l.transient + l.period) +
                         " struct blocks, found " + std::to_string(bodies.size()),
                     0);
  // Parse each block, then unify the signatures.
  std::vector<FiniteStructure> parsed;
  for (const std::string& b : bodies) parsed.push_back(structures::parse_structure(b));
  std::set<Sort> sorts;
  std::map<std::string, logic::RelationDecl> decls;
  for (const FiniteStructure& u : parsed) {
    for (const Sort& so : u.sig()->sorts()) sorts.insert(so);
    for (const logic::RelationDecl& d : u.sig()->relations())
      if (!d.manifestation) {
        auto it = decls.find(d.name);
        if (it == decls.end())
          decls[d.name] = d;
        else if (it->second.sorts != d.sorts || it->second.dynamic != d.dynamic)
          throw SignatureMismatchError("lasso blocks declare '" + d.name +
                                       "' inconsistently");
      }
  }
  std::vector<Sort> sorted_sorts(sorts.begin(), sorts.end());
  std::vector<logic::RelationDecl> decl_list;
  for (const auto& [_, d] : decls) decl_list.push_back(d);
  auto sig = std::make_shared<const Signature>(sorted_sorts, decl_list);
  for (FiniteStructure& u : parsed) u = u.with_signature(sig);
  l.structures = std::move(parsed);
  return l;
}

}  // namespace devmodal::omega
