#include "devmodal/structures.hpp"

#include <algorithm>
#include <sstream>

namespace devmodal::structures {

using logic::Conn;
using logic::FormulaPtr;
using logic::Signature;
using logic::SignaturePtr;
using logic::Sort;
using logic::Var;

FiniteStructure::FiniteStructure(SignaturePtr sig,
                                 std::map<Sort, std::vector<Element>> domains,
                                 std::map<std::string, std::set<Tuple>> interp)
    : sig_(std::move(sig)), domains_(std::move(domains)), interp_(std::move(interp)) {
  for (auto& [s, dom] : domains_) {
    if (!sig_->has_sort(s)) throw SortError("domain given for undeclared sort " + s);
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
  }
  for (const Sort& s : sig_->sorts())
    domains_.try_emplace(s);
  for (auto& [rel, tuples] : interp_) {
    const logic::RelationDecl& d = sig_->at(rel);
    for (const Tuple& t : tuples) {
      if (t.size() != d.sorts.size())
        throw ArityMismatchError("tuple of arity " + std::to_string(t.size()) +
                                 " in relation '" + rel + "'");
      for (std::size_t i = 0; i < t.size(); ++i)
        if (!has_element(d.sorts[i], t[i]))
          throw DomainError("tuple component '" + t[i] + "' not in domain of sort " +
                            d.sorts[i] + " (relation '" + rel + "')");
    }
  }
  for (const logic::RelationDecl& d : sig_->relations())
    interp_.try_emplace(d.name);
}

const std::vector<Element>& FiniteStructure::domain(const Sort& s) const {
  auto it = domains_.find(s);
  if (it == domains_.end()) {
    static const std::vector<Element> empty;
    return empty;
  }
  return it->second;
}

bool FiniteStructure::has_element(const Sort& s, const Element& e) const {
  const auto& dom = domain(s);
  return std::binary_search(dom.begin(), dom.end(), e);
}

const std::set<Tuple>& FiniteStructure::tuples(const std::string& rel) const {
  auto it = interp_.find(rel);
  if (it == interp_.end()) {
    static const std::set<Tuple> empty;
    return empty;
  }
  return it->second;
}

bool FiniteStructure::holds(const std::string& rel, const Tuple& t) const {
  return tuples(rel).count(t) != 0;
}

FiniteStructure FiniteStructure::with_relation(const std::string& rel,
                                               std::set<Tuple> tuples) const {
  auto interp = interp_;
  interp[rel] = std::move(tuples);
  return FiniteStructure(sig_, domains_, std::move(interp));
}

FiniteStructure FiniteStructure::with_elements(const Sort& s,
                                               const std::vector<Element>& es) const {
  auto domains = domains_;
  auto& dom = domains[s];
  dom.insert(dom.end(), es.begin(), es.end());
  return FiniteStructure(sig_, std::move(domains), interp_);
}

FiniteStructure FiniteStructure::with_signature(SignaturePtr sig) const {
  return FiniteStructure(std::move(sig), domains_, interp_);
}

FiniteStructure FiniteStructure::induced(const std::set<Element>& stat_subset) const {
  std::map<Sort, std::vector<Element>> domains = domains_;
  std::vector<Element> stat;
  for (const Element& e : domain(logic::kStat))
    if (stat_subset.count(e)) stat.push_back(e);
  domains[logic::kStat] = stat;

  std::map<std::string, std::set<Tuple>> interp;
  for (const auto& [rel, tuples] : interp_) {
    const logic::RelationDecl& d = sig_->at(rel);
    std::set<Tuple> kept;
    for (const Tuple& t : tuples) {
      bool in = true;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (d.sorts[i] == logic::kStat && !stat_subset.count(t[i])) {
          in = false;
          break;
        }
      if (in) kept.insert(t);
    }
    interp[rel] = std::move(kept);
  }
  return FiniteStructure(sig_, std::move(domains), std::move(interp));
}

bool FiniteStructure::same_contents(const FiniteStructure& o) const {
  return domains_ == o.domains_ && interp_ == o.interp_;
}

std::string FiniteStructure::to_text() const {
  std::ostringstream out;
  for (const auto& [s, dom] : domains_) {
    if (dom.empty() && s != logic::kStat) continue;
    out << (logic::is_dyn_sort(s) ? "dynsort " : "sort ") << s << " =";
    for (const Element& e : dom) out << " " << e;
    out << "\n";
  }
  for (const auto& [rel, tuples] : interp_) {
    const logic::RelationDecl& d = sig_->at(rel);
    if (d.manifestation) {
      for (const Tuple& t : tuples) {
        out << "manifest " << t.back() << " =";
        for (std::size_t i = 0; i + 1 < t.size(); ++i) out << " " << t[i];
        out << "\n";
      }
      continue;
    }
    out << (d.dynamic ? "dynrel " : "rel ") << rel << "(";
    for (std::size_t i = 0; i < d.sorts.size(); ++i)
      out << (i ? "," : "") << d.sorts[i];
    out << ") =";
    for (const Tuple& t : tuples) {
      out << " (";
      for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i];
      out << ")";
    }
    out << "\n";
  }
  return out.str();
}

namespace {

bool eval_rec(const FiniteStructure& u, const FormulaPtr& f, Assignment& asg) {
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
      return !eval_rec(u, f->a, asg);
    case Conn::And:
      return eval_rec(u, f->a, asg) && eval_rec(u, f->b, asg);
    case Conn::Or:
      return eval_rec(u, f->a, asg) || eval_rec(u, f->b, asg);
    case Conn::Implies:
      return !eval_rec(u, f->a, asg) || eval_rec(u, f->b, asg);
    case Conn::Iff:
      return eval_rec(u, f->a, asg) == eval_rec(u, f->b, asg);
    case Conn::Exists:
    case Conn::Forall: {
      bool ex = f->kind == Conn::Exists;
      auto saved = asg.find(f->bound.name) != asg.end()
                       ? std::optional<Element>(asg[f->bound.name])
                       : std::nullopt;
      for (const Element& c : u.domain(f->bound.sort)) {
        asg[f->bound.name] = c;
        bool v = eval_rec(u, f->a, asg);
        if (v == ex) {
          if (saved)
            asg[f->bound.name] = *saved;
          else
            asg.erase(f->bound.name);
          return ex;
        }
      }
      if (saved)
        asg[f->bound.name] = *saved;
      else
        asg.erase(f->bound.name);
      return !ex;  // empty/exhausted: exists false, forall true
    }
    case Conn::Dia:
    case Conn::Box:
      throw ModalInputError("modal operator in single-structure evaluation");
  }
  return false;
}

}  // namespace

bool eval_in_structure(const FiniteStructure& u, const FormulaPtr& f,
                       const Assignment& asg) {
  for (const Var& v : logic::free_vars(f)) {
    auto it = asg.find(v.name);
    if (it == asg.end())
      throw UnboundVariableError("variable '" + v.name + "' unbound");
    if (!u.has_element(v.sort, it->second))
      throw DomainError("parameter '" + it->second + "' for variable '" + v.name +
                        "' is not in the structure's " + v.sort + " domain");
  }
  Assignment work = asg;
  return eval_rec(u, f, work);
}

namespace {

void require_same_signature(const FiniteStructure& u, const FiniteStructure& v) {
  if (u.sig() == v.sig()) return;
  // Structural comparison as a fallback for separately built signatures.
  const auto& a = *u.sig();
  const auto& b = *v.sig();
  if (a.sorts() != b.sorts()) throw SignatureMismatchError("sort lists differ");
  const auto& ra = a.relations();
  const auto& rb = b.relations();
  if (ra.size() != rb.size()) throw SignatureMismatchError("relation lists differ");
  for (std::size_t i = 0; i < ra.size(); ++i)
    if (ra[i].name != rb[i].name || ra[i].sorts != rb[i].sorts ||
        ra[i].dynamic != rb[i].dynamic)
      throw SignatureMismatchError("relation '" + ra[i].name + "' declared differently");
}

}  // namespace

bool substructure_check(const FiniteStructure& u, const FiniteStructure& v,
                        const std::set<std::string>& k_rels) {
  require_same_signature(u, v);
  for (const Sort& s : u.sig()->sorts()) {
    const auto& du = u.domain(s);
    const auto& dv = v.domain(s);
    if (!std::includes(dv.begin(), dv.end(), du.begin(), du.end())) return false;
  }
  for (const std::string& rel : k_rels) {
    const logic::RelationDecl& d = u.sig()->at(rel);
    // R^u must equal R^v restricted to u's domain product.
    for (const Tuple& t : u.tuples(rel))
      if (!v.holds(rel, t)) return false;
    for (const Tuple& t : v.tuples(rel)) {
      bool inside = true;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (!u.has_element(d.sorts[i], t[i])) {
          inside = false;
          break;
        }
      if (inside && !u.holds(rel, t)) return false;
    }
  }
  return true;
}

bool static_substructure_check(const FiniteStructure& u, const FiniteStructure& v) {
  std::set<std::string> k;
  for (const logic::RelationDecl& d : u.sig()->relations())
    if (!d.dynamic) k.insert(d.name);
  return substructure_check(u, v, k);
}

bool elementary_check(const FiniteStructure& u, const FiniteStructure& v,
                      const std::vector<FormulaPtr>& k_formulas) {
  require_same_signature(u, v);
  for (const Sort& s : u.sig()->sorts()) {
    const auto& du = u.domain(s);
    const auto& dv = v.domain(s);
    if (!std::includes(dv.begin(), dv.end(), du.begin(), du.end()))
      throw DomainError("domain of sort " + s + " is not included in the superstructure");
  }
  for (const FormulaPtr& f : k_formulas) {
    if (!logic::classify(f, *u.sig()).modal_free)
      throw ModalInputError("elementary check requires modal-free formulas");
    std::vector<Var> fv = logic::free_vars(f);
    // All assignments of the free variables over u.
    std::vector<std::size_t> idx(fv.size(), 0);
    while (true) {
      Assignment asg;
      bool ok = true;
      for (std::size_t i = 0; i < fv.size(); ++i) {
        const auto& dom = u.domain(fv[i].sort);
        if (dom.empty()) {
          ok = false;
          break;
        }
        asg[fv[i].name] = dom[idx[i]];
      }
      if (ok && eval_in_structure(u, f, asg) != eval_in_structure(v, f, asg))
        return false;
      if (fv.empty() || !ok) break;
      std::size_t i = 0;
      for (; i < fv.size(); ++i) {
        if (++idx[i] < u.domain(fv[i].sort).size()) break;
        idx[i] = 0;
      }
      if (i == fv.size()) break;
    }
  }
  return true;
}

FiniteStructure union_structure(const std::vector<FiniteStructure>& ws) {
  if (ws.empty()) throw DomainError("union of an empty structure family");
  for (const FiniteStructure& w : ws) require_same_signature(ws.front(), w);
  std::map<Sort, std::vector<Element>> domains;
  std::map<std::string, std::set<Tuple>> interp;
  for (const FiniteStructure& w : ws) {
    for (const Sort& s : w.sig()->sorts()) {
      auto& dom = domains[s];
      dom.insert(dom.end(), w.domain(s).begin(), w.domain(s).end());
    }
    for (const logic::RelationDecl& d : w.sig()->relations()) {
      const auto& ts = w.tuples(d.name);
      interp[d.name].insert(ts.begin(), ts.end());
    }
  }
  return FiniteStructure(ws.front().sig(), std::move(domains), std::move(interp));
}

std::set<Tuple> interpret(const FormulaPtr& f, const FiniteStructure& u) {
  if (!logic::classify(f, *u.sig()).modal_free)
    throw ModalInputError("interpretation requires a modal-free formula");
  std::vector<Var> fv = logic::free_vars(f);
  std::sort(fv.begin(), fv.end());
  std::set<Tuple> out;
  std::vector<std::size_t> idx(fv.size(), 0);
  while (true) {
    Assignment asg;
    Tuple t;
    bool ok = true;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      const auto& dom = u.domain(fv[i].sort);
      if (dom.empty()) {
        ok = false;
        break;
      }
      asg[fv[i].name] = dom[idx[i]];
      t.push_back(dom[idx[i]]);
    }
    if (ok && eval_in_structure(u, f, asg)) out.insert(t);
    if (fv.empty() || !ok) break;
    std::size_t i = 0;
    for (; i < fv.size(); ++i) {
      if (++idx[i] < u.domain(fv[i].sort).size()) break;
      idx[i] = 0;
    }
    if (i == fv.size()) break;
  }
  return out;
}

logic::FormulaPtr relativize(const FormulaPtr& f, const std::string& nu) {
  using logic::Formula;
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Manifest:
    case Conn::Eq:
      return f;
    case Conn::Not:
      return Formula::lnot(relativize(f->a, nu));
    case Conn::And:
      return Formula::land(relativize(f->a, nu), relativize(f->b, nu));
    case Conn::Or:
      return Formula::lor(relativize(f->a, nu), relativize(f->b, nu));
    case Conn::Implies:
      return Formula::implies(relativize(f->a, nu), relativize(f->b, nu));
    case Conn::Iff:
      return Formula::iff(relativize(f->a, nu), relativize(f->b, nu));
    case Conn::Exists:
      return Formula::exists(f->bound,
                             Formula::land(Formula::atom(nu, {f->bound}),
                                           relativize(f->a, nu)));
    case Conn::Forall:
      return Formula::forall(f->bound,
                             Formula::implies(Formula::atom(nu, {f->bound}),
                                              relativize(f->a, nu)));
    case Conn::Dia:
    case Conn::Box:
      throw ModalInputError("relativization requires a modal-free formula");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Structure files
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

// "R(Stat,Stat)" -> name + sort list
std::pair<std::string, std::vector<Sort>> parse_rel_head(const std::string& w) {
  auto lp = w.find('(');
  auto rp = w.rfind(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp)
    throw ParseError("malformed relation declaration '" + w + "'", 0);
  std::string name = w.substr(0, lp);
  std::string inner = w.substr(lp + 1, rp - lp - 1);
  std::vector<Sort> sorts;
  std::string cur;
  for (char c : inner) {
    if (c == ',') {
      if (!cur.empty()) sorts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) sorts.push_back(cur);
  return {name, sorts};
}

// "(a,b)" -> tuple
Tuple parse_tuple_text(const std::string& w) {
  if (w.size() < 2 || w.front() != '(' || w.back() != ')')
    throw ParseError("malformed tuple '" + w + "'", 0);
  Tuple t;
  std::string cur;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    char c = w[i];
    if (c == ',') {
      t.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty() || !t.empty()) t.push_back(cur);
  for (const Element& e : t)
    if (e.empty()) throw ParseError("empty component in tuple '" + w + "'", 0);
  return t;
}

}  // namespace

FiniteStructure parse_structure(const std::string& text) {
  std::map<Sort, std::vector<Element>> domains;
  std::vector<logic::RelationDecl> decls;
  std::map<std::string, std::vector<Tuple>> pending;           // rel -> tuples
  std::vector<std::pair<Element, Tuple>> manifests;            // dyn elem -> stat tuple
  std::set<std::string> seen_sorts, seen_rels;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = strip_comment(raw);
    std::vector<std::string> w = split_ws(line);
    if (w.empty()) continue;
    const std::string& kw = w[0];
    if (kw == "sort" || kw == "dynsort") {
      if (w.size() < 3 || w[2] != "=")
        throw ParseError("expected '" + kw + " <name> = <elements>'", 0);
      const Sort s = w[1];
      if (kw == "dynsort" && !logic::is_dyn_sort(s))
        throw ParseError("dynsort must declare a Dyn<n> sort, got '" + s + "'", 0);
      if (kw == "sort" && logic::is_dyn_sort(s))
        throw ParseError("Dyn sorts must use 'dynsort'", 0);
      if (!seen_sorts.insert(s).second)
        throw ParseError("duplicate sort declaration '" + s + "'", 0);
      auto& dom = domains[s];
      for (std::size_t i = 3; i < w.size(); ++i) {
        if (std::find(dom.begin(), dom.end(), w[i]) != dom.end())
          throw ParseError("duplicate element '" + w[i] + "' in sort " + s, 0);
        dom.push_back(w[i]);
      }
    } else if (kw == "rel" || kw == "dynrel") {
      if (w.size() < 3 || w[2] != "=")
        throw ParseError("expected '" + kw + " R(sorts) = tuples'", 0);
      auto [name, sorts] = parse_rel_head(w[1]);
      if (!seen_rels.insert(name).second)
        throw ParseError("duplicate relation declaration '" + name + "'", 0);
      logic::RelationDecl d;
      d.name = name;
      d.sorts = sorts;
      d.dynamic = kw == "dynrel";
      decls.push_back(d);
      for (std::size_t i = 3; i < w.size(); ++i)
        pending[name].push_back(parse_tuple_text(w[i]));
    } else if (kw == "manifest") {
      if (w.size() < 4 || w[2] != "=")
        throw ParseError("expected 'manifest <dyn> = <stat elements>'", 0);
      Tuple t(w.begin() + 3, w.end());
      manifests.emplace_back(w[1], t);
    } else {
      throw ParseError("unknown directive '" + kw + "'", 0);
    }
  }

  std::vector<Sort> sorts;
  for (const auto& [s, _] : domains) sorts.push_back(s);
  auto sig = std::make_shared<const Signature>(sorts, decls);

  std::map<std::string, std::set<Tuple>> interp;
  for (const auto& [rel, ts] : pending)
    for (const Tuple& t : ts)
      if (!interp[rel].insert(t).second)
        throw ParseError("duplicate tuple in relation '" + rel + "'", 0);
  for (const auto& [dyn, stat] : manifests) {
    int n = static_cast<int>(stat.size());
    Tuple full = stat;
    full.push_back(dyn);
    if (!interp[logic::manifest_rel(n)].insert(full).second)
      throw ParseError("duplicate manifestation for '" + dyn + "'", 0);
  }
  return FiniteStructure(sig, std::move(domains), std::move(interp));
}

}  // namespace devmodal::structures
