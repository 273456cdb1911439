#include "devmodal/devmodel.hpp"

#include <algorithm>
#include <sstream>

namespace devmodal::model {

using logic::Signature;
using logic::SignaturePtr;
using logic::Sort;

std::vector<StateId> Frame::successors(const StateId& s) const {
  std::vector<StateId> out;
  for (const StateId& t : states)
    if (le(s, t)) out.push_back(t);
  return out;
}

bool Frame::is_reflexive_transitive_directed(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (const auto& [s, t] : order) {
    if (std::find(states.begin(), states.end(), s) == states.end() ||
        std::find(states.begin(), states.end(), t) == states.end())
      return fail("edge mentions unknown state " + s + " or " + t);
  }
  for (const StateId& s : states)
    for (const StateId& t : states)
      for (const StateId& r : states)
        if (le(s, t) && le(t, r) && !le(s, r))
          return fail("not transitive: " + s + " <= " + t + " <= " + r);
  for (const StateId& s : states) {
    for (const StateId& t : states) {
      bool joined = false;
      for (const StateId& r : states)
        if (le(s, r) && le(t, r)) {
          joined = true;
          break;
        }
      if (!joined) return fail("not directed: no join of " + s + " and " + t);
    }
  }
  return true;
}

DevelopmentModel::DevelopmentModel(Frame frame, std::map<StateId, FiniteStructure> assign)
    : frame_(std::move(frame)), assign_(std::move(assign)) {
  if (frame_.states.empty()) throw FrameInvalidError("a model needs at least one state");
  for (const StateId& s : frame_.states)
    if (!assign_.count(s))
      throw FrameInvalidError("state '" + s + "' has no assigned structure");
  sig_ = assign_.begin()->second.sig();
}

const FiniteStructure& DevelopmentModel::at(const StateId& s) const {
  auto it = assign_.find(s);
  if (it == assign_.end()) throw FrameInvalidError("unknown state '" + s + "'");
  return it->second;
}

std::optional<StateId> DevelopmentModel::join(const StateId& s, const StateId& t) const {
  for (const StateId& r : frame_.states)
    if (frame_.le(s, r) && frame_.le(t, r)) return r;
  return std::nullopt;
}

ValidationReport validate(const DevelopmentModel& m) {
  ValidationReport rep;
  const Frame& fr = m.frame();

  std::string why;
  for (const StateId& s : fr.states)
    for (const StateId& t : fr.states)
      for (const StateId& r : fr.states)
        if (fr.le(s, t) && fr.le(t, r) && !fr.le(s, r))
          rep.items.push_back({"frame", "not transitive: " + s + " <= " + t +
                                            " <= " + r + " but not " + s + " <= " + r});
  for (const StateId& s : fr.states) {
    for (const StateId& t : fr.states) {
      bool joined = false;
      for (const StateId& r : fr.states)
        if (fr.le(s, r) && fr.le(t, r)) joined = true;
      if (!joined)
        rep.items.push_back({"frame", "not directed: states " + s + " and " + t});
    }
  }
  for (const StateId& s : fr.states)
    for (const StateId& t : fr.states)
      if (s != t && fr.le(s, t) && fr.le(t, s))
        rep.items.push_back(
            {"frame", "antisymmetry: " + s + " <= " + t + " <= " + s, /*warning=*/true});

  const SignaturePtr& sig = m.sig();

  // (b) every dynamic element manifests as exactly one tuple per state
  for (int n : sig->dyn_arities()) {
    const std::string rel = logic::manifest_rel(n);
    const Sort ds = logic::dyn_sort(n);
    for (const StateId& s : fr.states) {
      const FiniteStructure& u = m.at(s);
      for (const Element& d : u.domain(ds)) {
        int count = 0;
        for (const Tuple& t : u.tuples(rel))
          if (t.back() == d) ++count;
        if (count != 1)
          rep.items.push_back({"manifestation",
                               "element " + d + " of " + ds + " manifests as " +
                                   std::to_string(count) + " tuples at state " + s});
      }
    }
  }

  // (c) static substructure along accessibility
  for (const StateId& s : fr.states)
    for (const StateId& t : fr.states) {
      if (s == t || !fr.le(s, t)) continue;
      const FiniteStructure& us = m.at(s);
      const FiniteStructure& ut = m.at(t);
      for (const Sort& sort : sig->sorts()) {
        const auto& ds = us.domain(sort);
        const auto& dt = ut.domain(sort);
        if (!std::includes(dt.begin(), dt.end(), ds.begin(), ds.end()))
          rep.items.push_back({"monotonicity", "domain of sort " + sort +
                                                   " shrinks from " + s + " to " + t});
      }
      for (const logic::RelationDecl& d : sig->relations()) {
        if (d.dynamic) continue;
        for (const Tuple& tu : us.tuples(d.name))
          if (!ut.holds(d.name, tu))
            rep.items.push_back({"monotonicity",
                                 "static fact " + d.name + " lost from " + s + " to " +
                                     t + " (witness tuple)"});
        for (const Tuple& tu : ut.tuples(d.name)) {
          bool inside = true;
          for (std::size_t i = 0; i < tu.size(); ++i)
            if (!us.has_element(d.sorts[i], tu[i])) {
              inside = false;
              break;
            }
          if (inside && !us.holds(d.name, tu))
            rep.items.push_back({"monotonicity",
                                 "static fact " + d.name + " at " + t +
                                     " is missing at " + s + " though its tuple is present"});
        }
      }
    }

  // constancy of non-Stat sorts
  for (const Sort& sort : sig->sorts()) {
    if (sort == logic::kStat) continue;
    const auto& first = m.at(fr.states.front()).domain(sort);
    for (const StateId& s : fr.states)
      if (m.at(s).domain(sort) != first)
        rep.items.push_back({"constant-sort",
                             "domain of sort " + sort + " differs between states " +
                                 fr.states.front() + " and " + s});
  }
  return rep;
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  if (items.empty()) {
    out << "valid\n";
    return out.str();
  }
  for (const Violation& v : items)
    out << (v.warning ? "warning" : "violation") << " [" << v.clause << "] " << v.detail
        << "\n";
  return out.str();
}

StateId subset_state_id(const std::set<Element>& subset) {
  std::string id = "{";
  bool first = true;
  for (const Element& e : subset) {
    if (!first) id += ",";
    id += e;
    first = false;
  }
  return id + "}";
}

DevelopmentModel fin_dev(const FiniteStructure& u) {
  for (const Sort& s : u.sig()->sorts())
    if (s != logic::kStat && !u.domain(s).empty())
      throw DynSortPresentError("full statewise finite development requires only Stat "
                                "to be populated; sort " +
                                s + " is not empty");
  const auto& dom = u.domain(logic::kStat);
  if (dom.size() > 16)
    throw BoundsTooLargeError("2^" + std::to_string(dom.size()) + " states");
  std::size_t n = dom.size();
  Frame fr;
  std::map<StateId, FiniteStructure> assign;
  std::vector<std::set<Element>> subsets;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::set<Element> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) sub.insert(dom[i]);
    subsets.push_back(sub);
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const std::set<Element>& a, const std::set<Element>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  for (const auto& sub : subsets) {
    StateId id = subset_state_id(sub);
    fr.states.push_back(id);
    assign.emplace(id, u.induced(sub));
  }
  for (const auto& a : subsets)
    for (const auto& b : subsets)
      if (a != b && std::includes(b.begin(), b.end(), a.begin(), a.end()))
        fr.order.insert({subset_state_id(a), subset_state_id(b)});
  return DevelopmentModel(std::move(fr), std::move(assign));
}

DevelopmentModel simple_dev(const FiniteStructure& u, const Frame& a) {
  std::string why;
  if (!a.is_reflexive_transitive_directed(&why))
    throw FrameInvalidError("simple development needs a directed preorder: " + why);
  std::map<StateId, FiniteStructure> assign;
  for (const StateId& s : a.states) assign.emplace(s, u);
  return DevelopmentModel(a, std::move(assign));
}

FunctionalDynamicTuple induced_tuple(const DevelopmentModel& m, const Element& delta,
                                     int arity) {
  FunctionalDynamicTuple d;
  d.arity = arity;
  const std::string rel = logic::manifest_rel(arity);
  for (const StateId& s : m.states()) {
    for (const Tuple& t : m.at(s).tuples(rel))
      if (t.back() == delta) {
        d.assignment[s] = Tuple(t.begin(), t.end() - 1);
        break;
      }
    if (!d.assignment.count(s))
      throw NotManifestingError("element " + delta + " does not manifest at state " + s);
  }
  return d;
}

DevelopmentModel extend_by_dynamic(const DevelopmentModel& m,
                                   const std::vector<FunctionalDynamicTuple>& ds,
                                   std::vector<Element>* new_names) {
  for (const FunctionalDynamicTuple& d : ds) {
    for (const StateId& s : m.states()) {
      auto it = d.assignment.find(s);
      if (it == d.assignment.end())
        throw PartialTupleError("functional tuple lacks a value at state " + s);
      if (static_cast<int>(it->second.size()) != d.arity)
        throw PartialTupleError("functional tuple value arity mismatch at state " + s);
      for (const Element& e : it->second)
        if (!m.at(s).has_element(logic::kStat, e))
          throw PartialTupleError("functional tuple value '" + e +
                                  "' is outside state " + s);
    }
  }

  // The signature may need new Dyn sorts.
  std::set<int> arities;
  for (const FunctionalDynamicTuple& d : ds) arities.insert(d.arity);
  SignaturePtr sig = m.sig();
  {
    std::vector<Sort> sorts = sig->sorts();
    bool changed = false;
    for (int n : arities)
      if (!sig->has_sort(logic::dyn_sort(n))) {
        sorts.push_back(logic::dyn_sort(n));
        changed = true;
      }
    if (changed) {
      std::vector<logic::RelationDecl> decls;
      for (const logic::RelationDecl& d : sig->relations())
        if (!d.manifestation) decls.push_back(d);
      sig = std::make_shared<const Signature>(sorts, decls);
    }
  }

  // Fresh names, injective per tuple.
  std::set<Element> used;
  for (int n : sig->dyn_arities())
    for (const StateId& s : m.states())
      for (const Element& e : m.at(s).domain(logic::dyn_sort(n))) used.insert(e);
  std::vector<Element> fresh;
  std::size_t counter = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Element name;
    do {
      name = "delta" + std::to_string(counter++);
    } while (used.count(name));
    used.insert(name);
    fresh.push_back(name);
  }
  if (new_names) *new_names = fresh;

  std::map<StateId, FiniteStructure> assign;
  for (const StateId& s : m.states()) {
    FiniteStructure u = m.at(s).with_signature(sig);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const FunctionalDynamicTuple& d = ds[i];
      u = u.with_elements(logic::dyn_sort(d.arity), {fresh[i]});
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const FunctionalDynamicTuple& d = ds[i];
      const std::string rel = logic::manifest_rel(d.arity);
      auto tuples = u.tuples(rel);
      Tuple t = d.assignment.at(s);
      t.push_back(fresh[i]);
      tuples.insert(t);
      u = u.with_relation(rel, std::move(tuples));
    }
    assign.emplace(s, std::move(u));
  }
  return DevelopmentModel(m.frame(), std::move(assign));
}

FiniteStructure union_of(const DevelopmentModel& m) {
  std::vector<FiniteStructure> ws;
  for (const StateId& s : m.states()) ws.push_back(m.at(s));
  return structures::union_structure(ws);
}

StatesContaining states_containing(
    const DevelopmentModel& m,
    const std::vector<std::pair<Sort, Element>>& tuple) {
  StatesContaining out;
  FiniteStructure uni = union_of(m);
  out.tuple_in_union = true;
  for (const auto& [sort, e] : tuple)
    if (!uni.has_element(sort, e)) out.tuple_in_union = false;
  if (!out.tuple_in_union) return out;
  for (const StateId& s : m.states()) {
    bool all = true;
    for (const auto& [sort, e] : tuple)
      if (!m.at(s).has_element(sort, e)) {
        all = false;
        break;
      }
    if (all) out.states.insert(s);
  }
  return out;
}

std::string model_to_text(const DevelopmentModel& m) {
  std::ostringstream out;
  for (const StateId& s : m.states()) {
    out << "state " << s << " {\n";
    std::istringstream body(m.at(s).to_text());
    std::string line;
    while (std::getline(body, line)) out << "  " << line << "\n";
    out << "}\n";
  }
  for (const auto& [a, b] : m.frame().order)
    if (a != b) out << "edge " << a << " <= " << b << "\n";
  return out.str();
}

DevelopmentModel parse_devmodel(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  Frame fr;
  std::map<StateId, std::string> bodies;
  struct DynDecl {
    Element name;
    int arity;
    std::map<StateId, Tuple> values;
  };
  std::vector<DynDecl> dyns;

  auto trim = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };

  while (std::getline(in, raw)) {
    auto posh = raw.find('#');
    std::string line = trim(posh == std::string::npos ? raw : raw.substr(0, posh));
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "state") {
      std::string name, brace;
      ls >> name >> brace;
      if (name.empty() || brace != "{")
        throw ParseError("expected 'state <name> {'", 0);
      if (bodies.count(name)) throw ParseError("duplicate state '" + name + "'", 0);
      std::string body, bline;
      bool closed = false;
      while (std::getline(in, bline)) {
        if (trim(bline) == "}") {
          closed = true;
          break;
        }
        body += bline + "\n";
      }
      if (!closed) throw ParseError("unterminated state block '" + name + "'", 0);
      fr.states.push_back(name);
      bodies[name] = body;
    } else if (kw == "edge") {
      std::string s, op, t;
      ls >> s >> op >> t;
      if (op != "<=") throw ParseError("expected 'edge s <= t'", 0);
      fr.order.insert({s, t});
    } else if (kw == "dyn") {
      // dyn d0 : Dyn1 { s0 -> a ; s1 -> b }
      std::string name, colon, sort, rest;
      ls >> name >> colon >> sort;
      std::getline(ls, rest);
      if (colon != ":") throw ParseError("expected 'dyn <name> : Dyn<n> { ... }'", 0);
      int n = logic::dyn_arity(sort);
      if (n <= 0) throw ParseError("'" + sort + "' is not a Dyn sort", 0);
      rest = trim(rest);
      while (rest.find('}') == std::string::npos) {
        std::string more;
        if (!std::getline(in, more))
          throw ParseError("unterminated dyn block '" + name + "'", 0);
        rest += " " + trim(more);
      }
      auto lb = rest.find('{');
      auto rb = rest.rfind('}');
      if (lb == std::string::npos || rb == std::string::npos)
        throw ParseError("expected '{ ... }' in dyn block", 0);
      DynDecl dd;
      dd.name = name;
      dd.arity = n;
      std::string inner = rest.substr(lb + 1, rb - lb - 1);
      std::istringstream parts(inner);
      std::string chunk;
      std::vector<std::string> entries;
      std::string cur;
      for (char c : inner) {
        if (c == ';') {
          entries.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!trim(cur).empty()) entries.push_back(cur);
      for (std::string& e : entries) {
        std::istringstream es(e);
        std::string st, arrow;
        es >> st >> arrow;
        if (arrow != "->") throw ParseError("expected '<state> -> <elements>'", 0);
        Tuple t;
        std::string el;
        while (es >> el) t.push_back(el);
        if (static_cast<int>(t.size()) != n)
          throw ParseError("dyn value arity mismatch for '" + name + "'", 0);
        dd.values[st] = t;
      }
      dyns.push_back(std::move(dd));
    } else {
      throw ParseError("unknown directive '" + kw + "' in model file", 0);
    }
  }

  if (fr.states.empty()) throw ParseError("model has no states", 0);

  // Parse state structures, then unify signatures across states.
  std::map<StateId, FiniteStructure> parsed;
  for (const auto& [s, body] : bodies) parsed.emplace(s, structures::parse_structure(body));

  std::set<Sort> sorts;
  std::map<std::string, logic::RelationDecl> decls;
  for (const auto& [s, u] : parsed) {
    for (const Sort& so : u.sig()->sorts()) sorts.insert(so);
    for (const logic::RelationDecl& d : u.sig()->relations())
      if (!d.manifestation) {
        auto it = decls.find(d.name);
        if (it == decls.end())
          decls[d.name] = d;
        else if (it->second.sorts != d.sorts || it->second.dynamic != d.dynamic)
          throw SignatureMismatchError("state structures declare '" + d.name +
                                       "' inconsistently");
      }
  }
  for (const DynDecl& dd : dyns) sorts.insert(logic::dyn_sort(dd.arity));
  std::vector<Sort> sorted_sorts(sorts.begin(), sorts.end());
  std::vector<logic::RelationDecl> decl_list;
  for (const auto& [_, d] : decls) decl_list.push_back(d);
  auto sig = std::make_shared<const Signature>(sorted_sorts, decl_list);

  std::map<StateId, FiniteStructure> assign;
  for (const StateId& s : fr.states) {
    auto it = parsed.find(s);
    if (it == parsed.end()) throw ParseError("state '" + s + "' missing a block", 0);
    FiniteStructure u = it->second.with_signature(sig);
    for (const DynDecl& dd : dyns) {
      u = u.with_elements(logic::dyn_sort(dd.arity), {dd.name});
      auto vit = dd.values.find(s);
      if (vit == dd.values.end())
        throw PartialTupleError("dyn '" + dd.name + "' has no value at state " + s);
      auto tuples = u.tuples(logic::manifest_rel(dd.arity));
      Tuple t = vit->second;
      t.push_back(dd.name);
      tuples.insert(t);
      u = u.with_relation(logic::manifest_rel(dd.arity), std::move(tuples));
    }
    assign.emplace(s, std::move(u));
  }
  return DevelopmentModel(std::move(fr), std::move(assign));
}

}  // namespace devmodal::model
