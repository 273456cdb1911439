#include "devmodal/typereal.hpp"

#include <algorithm>
#include <sstream>

namespace devmodal::typereal {

using logic::Conn;
using logic::Formula;
using logic::FormulaPtr;
using logic::Var;

namespace {

// Truth is preserved into larger segments (and the full structure):
// positive facts about present elements never change, witnesses stay.
bool up_monotone(const FormulaPtr& f);
bool down_monotone(const FormulaPtr& f);

bool up_monotone(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Eq:
      return true;  // facts on present tuples are decided once and for all
    case Conn::Manifest:
      return false;
    case Conn::Not:
      return down_monotone(f->a);
    case Conn::And:
    case Conn::Or:
      return up_monotone(f->a) && up_monotone(f->b);
    case Conn::Implies:
      return down_monotone(f->a) && up_monotone(f->b);
    case Conn::Iff:
      return false;
    case Conn::Exists:
      return up_monotone(f->a);
    case Conn::Forall:
      return false;
    case Conn::Dia:
    case Conn::Box:
      return false;
  }
  return false;
}

bool down_monotone(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Eq:
      return true;
    case Conn::Manifest:
      return false;
    case Conn::Not:
      return up_monotone(f->a);
    case Conn::And:
    case Conn::Or:
      return down_monotone(f->a) && down_monotone(f->b);
    case Conn::Implies:
      return up_monotone(f->a) && down_monotone(f->b);
    case Conn::Iff:
      return false;
    case Conn::Exists:
      return false;
    case Conn::Forall:
      return down_monotone(f->a);
    case Conn::Dia:
    case Conn::Box:
      return false;
  }
  return false;
}

}  // namespace

AmbientValue Ambient::eval(const FormulaPtr& f, const std::vector<long long>& args) const {
  if (!logic::classify(f, *sig_).modal_free)
    throw ModalInputError("ambient evaluation requires modal-free formulas");
  std::vector<Var> fv = logic::free_vars(f);
  std::sort(fv.begin(), fv.end());
  if (fv.size() != args.size())
    throw UnboundVariableError("expected " + std::to_string(fv.size()) +
                               " arguments, got " + std::to_string(args.size()));
  std::map<std::string, long long> asg;
  long long maxarg = 0;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    asg[fv[i].name] = args[i];
    maxarg = std::max(maxarg, args[i]);
  }

  long long n0 = maxarg + 8;
  bool v0 = eval_(f, asg, n0);
  AmbientValue out;
  out.value = v0;
  if ((v0 && up_monotone(f)) || (!v0 && down_monotone(f))) {
    out.absolute = true;
    return out;
  }
  bool v1 = eval_(f, asg, 2 * n0 + 8);
  bool v2 = eval_(f, asg, 4 * n0 + 16);
  if (v0 == v1 && v1 == v2) {
    out.absolute = false;  // stabilized, not proof
    return out;
  }
  throw DomainError("evaluation did not stabilize across growing segments");
}

namespace {

bool arith_eval_rec(const FormulaPtr& f, std::map<std::string, long long>& asg,
                    long long n) {
  auto val = [&](const Var& v) {
    auto it = asg.find(v.name);
    if (it == asg.end())
      throw UnboundVariableError("variable '" + v.name + "' unbound");
    return it->second;
  };
  switch (f->kind) {
    case Conn::Atom: {
      std::vector<long long> a;
      for (const Var& v : f->args) a.push_back(val(v));
      for (long long x : a)
        if (x < 0 || x > n) return false;
      if (f->rel == "Z") return a[0] == 0;
      if (f->rel == "S") return a[1] == a[0] + 1;
      if (f->rel == "Plus") return a[0] + a[1] == a[2];
      if (f->rel == "Times") return a[0] * a[1] == a[2];
      if (f->rel == "Leq") return a[0] <= a[1];
      throw SortError("unknown arithmetic relation '" + f->rel + "'");
    }
    case Conn::Manifest:
      throw SortError("manifestation atoms have no ambient reading");
    case Conn::Eq:
      return val(f->args[0]) == val(f->args[1]);
    case Conn::Not:
      return !arith_eval_rec(f->a, asg, n);
    case Conn::And:
      return arith_eval_rec(f->a, asg, n) && arith_eval_rec(f->b, asg, n);
    case Conn::Or:
      return arith_eval_rec(f->a, asg, n) || arith_eval_rec(f->b, asg, n);
    case Conn::Implies:
      return !arith_eval_rec(f->a, asg, n) || arith_eval_rec(f->b, asg, n);
    case Conn::Iff:
      return arith_eval_rec(f->a, asg, n) == arith_eval_rec(f->b, asg, n);
    case Conn::Exists:
    case Conn::Forall: {
      bool ex = f->kind == Conn::Exists;
      auto saved = asg.count(f->bound.name)
                       ? std::optional<long long>(asg[f->bound.name])
                       : std::nullopt;
      bool result = !ex;
      for (long long c = 0; c <= n; ++c) {
        asg[f->bound.name] = c;
        if (arith_eval_rec(f->a, asg, n) == ex) {
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
    case Conn::Box:
      throw ModalInputError("modal operator in ambient evaluation");
  }
  return false;
}

}  // namespace

Ambient arith_ambient() {
  auto sig = omega::arith_basic_stream().sig;
  return Ambient(sig, [](const FormulaPtr& f, const std::map<std::string, long long>& asg,
                         long long n) {
    std::map<std::string, long long> work = asg;
    return arith_eval_rec(f, work, n);
  });
}

TypeFragment parse_type_fragment(const std::string& text, const Ambient& ambient) {
  TypeFragment frag;
  std::istringstream in(text);
  std::string line;
  std::set<Var> vars;
  while (std::getline(in, line)) {
    auto posh = line.find('#');
    if (posh != std::string::npos) line = line.substr(0, posh);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    FormulaPtr f = logic::parse_formula(line, *ambient.sig());
    for (const Var& v : logic::free_vars(f)) vars.insert(v);
    frag.prefix.push_back(f);
  }
  frag.vars.assign(vars.begin(), vars.end());
  for (const Var& v : frag.vars)
    if (v.sort != logic::kStat)
      throw SortError("type variables must have sort Stat; '" + v.name + "' does not");
  return frag;
}

namespace {

// i < x rendered relationally: a successor chain from zero of length i ends
// strictly below x. Guards sit directly under their quantifier so that
// evaluation prunes level by level instead of searching the full product.
FormulaPtr numeral_below(std::size_t i, const Var& x) {
  std::vector<Var> zs;
  for (std::size_t k = 0; k <= i; ++k) zs.push_back(Var{"z" + std::to_string(k), logic::kStat});
  FormulaPtr core = Formula::land(Formula::atom("Leq", {zs[i], x}),
                                  Formula::lnot(Formula::eq(zs[i], x)));
  for (std::size_t k = i; k >= 1; --k)
    core = Formula::exists(zs[k],
                           Formula::land(Formula::atom("S", {zs[k - 1], zs[k]}), core));
  return Formula::exists(zs[0], Formula::land(Formula::atom("Z", {zs[0]}), core));
}

}  // namespace

TypeFragment greater_than_type(std::size_t count) {
  TypeFragment frag;
  Var x{"x", logic::kStat};
  for (std::size_t i = 0; i < count; ++i) frag.prefix.push_back(numeral_below(i, x));
  frag.vars = {x};
  frag.generator = [x](std::size_t i) { return numeral_below(i, x); };
  return frag;
}

TypeFragment zero_type() {
  TypeFragment frag;
  Var x{"x", logic::kStat};
  frag.prefix.push_back(Formula::atom("Z", {x}));
  frag.vars = {x};
  return frag;
}

RealizerNet d_p(const TypeFragment& frag, const Ambient& ambient,
                long long search_bound) {
  if (frag.prefix.empty()) throw DomainError("empty type fragment");
  std::size_t k = frag.vars.size();
  auto cache = std::make_shared<std::map<std::size_t, std::vector<long long>>>();

  auto compute = [frag, ambient, search_bound, k](std::size_t s) {
    // tuples over [0, bound]^k ordered by max then lexicographic
    std::vector<long long> tuple(k, 0);
    auto satisfies_prefix = [&](const std::vector<long long>& t) {
      for (std::size_t i = 0; i <= s; ++i) {
        FormulaPtr p = frag.at(i);
        if (!p) break;  // no generator: the stored prefix is the whole family
        if (!ambient.eval(p, t).value) return false;
      }
      return true;
    };
    for (long long cap = 0; cap <= search_bound + static_cast<long long>(s); ++cap) {
      // enumerate tuples with max exactly cap, lexicographically
      std::function<bool(std::size_t, bool)> rec = [&](std::size_t pos,
                                                       bool has_cap) -> bool {
        if (pos == k) {
          if (!has_cap) return false;
          return satisfies_prefix(tuple);
        }
        for (long long v = 0; v <= cap; ++v) {
          tuple[pos] = v;
          if (rec(pos + 1, has_cap || v == cap)) return true;
        }
        return false;
      };
      if (k == 0) break;
      if (rec(0, false)) return tuple;
    }
    throw PrefixUnrealizableError(
        "no tuple within the search bound satisfies the first " +
            std::to_string(s + 1) + " formulas",
        s);
  };

  RealizerNet net;
  net.at = [cache, compute](std::size_t s) {
    auto it = cache->find(s);
    if (it != cache->end()) return it->second;
    auto v = compute(s);
    (*cache)[s] = v;
    return v;
  };
  // realizability of the stored prefix is part of the construction
  net.at(frag.prefix.size() - 1);
  return net;
}

std::vector<TeleVerdict> tele_type_net(const TypeFragment& frag, const Ambient& ambient,
                                       const RealizerNet& net, std::size_t horizon) {
  std::vector<TeleVerdict> out;
  for (std::size_t i = 0; i < frag.prefix.size(); ++i) {
    TeleVerdict v;
    v.formula = i;
    v.from_state = i;
    v.ok = true;
    for (std::size_t t = i; t <= horizon; ++t) {
      if (!ambient.eval(frag.prefix[i], net.at(t)).value) {
        v.ok = false;
        std::ostringstream os;
        os << "fails at state " << t << " with value (";
        auto tup = net.at(t);
        for (std::size_t j = 0; j < tup.size(); ++j) os << (j ? "," : "") << tup[j];
        os << ")";
        v.counterexample = os.str();
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<TeleVerdict> tele_type(const TypeFragment& frag, const Ambient& ambient,
                                   std::size_t horizon) {
  return tele_type_net(frag, ambient, d_p(frag, ambient), horizon);
}

LosResult eventual_los(const TypeFragment& frag, const Ambient& ambient,
                       const FormulaPtr& f, std::size_t horizon) {
  LosResult out;
  RealizerNet net = d_p(frag, ambient);

  // construction certificate: membership in the enumerated family
  std::optional<std::size_t> member_index;
  for (std::size_t i = 0; i <= horizon; ++i) {
    FormulaPtr p = frag.at(i);
    if (!p) break;
    if (logic::equal(p, f)) {
      member_index = i;
      break;
    }
  }

  std::size_t checked = std::max<std::size_t>(2 * horizon, 32);
  std::vector<char> v(checked + 1);
  for (std::size_t s = 0; s <= checked; ++s)
    v[s] = ambient.eval(f, net.at(s)).value ? 1 : 0;

  EventualPattern& pat = out.pattern;
  pat.checked_to = checked;

  if (member_index) {
    pat.kind = EventualPattern::Kind::Cofinite;
    pat.tail_start = *member_index;
    pat.by_construction = true;
    // regression guard on the prefix of the tail
    for (std::size_t s = *member_index; s <= checked; ++s)
      if (!v[s]) {
        pat.kind = EventualPattern::Kind::Unclassified;
        pat.by_construction = false;
        break;
      }
  }

  if (pat.kind == EventualPattern::Kind::Unclassified) {
    // stabilization: constant tail with margin
    std::size_t t0 = checked + 1;
    for (std::size_t s = 0; s <= checked; ++s) {
      bool constant = true;
      for (std::size_t t = s; t <= checked; ++t)
        if (v[t] != v[s]) {
          constant = false;
          break;
        }
      if (constant) {
        t0 = s;
        break;
      }
    }
    if (t0 <= checked && checked >= 2 * t0 + 8) {
      pat.tail_start = t0;
      if (v[t0]) {
        pat.kind = EventualPattern::Kind::Cofinite;
      } else {
        pat.kind = EventualPattern::Kind::Finite;
        for (std::size_t s = 0; s < t0; ++s)
          if (v[s]) pat.members.push_back(s);
      }
    } else {
      // periodicity with margin
      for (std::size_t period = 2; period <= 6 && pat.kind == EventualPattern::Kind::Unclassified;
           ++period) {
        for (std::size_t start = 0; start <= checked / 2; ++start) {
          bool periodic = true;
          for (std::size_t s = start; s + period <= checked; ++s)
            if (v[s] != v[s + period]) {
              periodic = false;
              break;
            }
          if (!periodic) continue;
          bool sees_true = false, sees_false = false;
          for (std::size_t s = start; s <= checked; ++s)
            (v[s] ? sees_true : sees_false) = true;
          if (sees_true && sees_false && checked >= 2 * start + 4 * period) {
            pat.kind = EventualPattern::Kind::Periodic;
            pat.tail_start = start;
            pat.period = period;
          }
          break;
        }
      }
    }
  }

  switch (pat.kind) {
    case EventualPattern::Kind::Cofinite:
      out.verdict = LosVerdict::Satisfied;
      break;
    case EventualPattern::Kind::Finite:
      out.verdict = LosVerdict::Unsatisfied;
      break;
    case EventualPattern::Kind::Periodic:
      out.verdict = LosVerdict::UltrafilterDependent;
      break;
    default:
      out.verdict = LosVerdict::Unclassified;
      break;
  }

  // the chain: membership in the type forces teleological truth, which
  // forces ultrapower truth
  if (member_index) {
    bool tele_ok = true;
    for (std::size_t t = *member_index; t <= horizon; ++t)
      if (!ambient.eval(f, net.at(t)).value) tele_ok = false;
    out.chain_ok = tele_ok && out.verdict == LosVerdict::Satisfied;
  } else {
    out.chain_ok = true;
  }
  return out;
}

std::string los_text(LosVerdict v) {
  switch (v) {
    case LosVerdict::Satisfied: return "Satisfied";
    case LosVerdict::Unsatisfied: return "Unsatisfied";
    case LosVerdict::UltrafilterDependent: return "UltrafilterDependent";
    default: return "Unclassified";
  }
}

}  // namespace devmodal::typereal
