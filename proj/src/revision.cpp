#include "devmodal/revision.hpp"

#include <algorithm>
#include <sstream>

namespace devmodal::revision {

using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

BoolPtr BoolExpr::constant(bool v) {
  auto e = std::make_shared<BoolExpr>();
  e->kind = v ? Kind::True : Kind::False;
  return e;
}

BoolPtr BoolExpr::t_atom(std::string name) {
  auto e = std::make_shared<BoolExpr>();
  e->kind = Kind::TAtom;
  e->name = std::move(name);
  return e;
}

BoolPtr BoolExpr::base_atom(std::string name) {
  auto e = std::make_shared<BoolExpr>();
  e->kind = Kind::BaseAtom;
  e->name = std::move(name);
  return e;
}

BoolPtr BoolExpr::lnot(BoolPtr x) {
  auto e = std::make_shared<BoolExpr>();
  e->kind = Kind::Not;
  e->a = std::move(x);
  return e;
}

BoolPtr BoolExpr::binary(Kind k, BoolPtr l, BoolPtr r) {
  auto e = std::make_shared<BoolExpr>();
  e->kind = k;
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

std::string print_bool(const BoolPtr& e) {
  switch (e->kind) {
    case BoolExpr::Kind::True: return "true";
    case BoolExpr::Kind::False: return "false";
    case BoolExpr::Kind::TAtom: return "T(" + e->name + ")";
    case BoolExpr::Kind::BaseAtom: return e->name;
    case BoolExpr::Kind::Not: return "not (" + print_bool(e->a) + ")";
    case BoolExpr::Kind::And:
      return "(" + print_bool(e->a) + " and " + print_bool(e->b) + ")";
    case BoolExpr::Kind::Or:
      return "(" + print_bool(e->a) + " or " + print_bool(e->b) + ")";
    case BoolExpr::Kind::Implies:
      return "(" + print_bool(e->a) + " -> " + print_bool(e->b) + ")";
    case BoolExpr::Kind::Iff:
      return "(" + print_bool(e->a) + " <-> " + print_bool(e->b) + ")";
  }
  return "?";
}

namespace {

// Tiny recursive-descent parser for bodies, same precedence ladder as the
// formula language.
struct BodyParser {
  const std::string& s;
  std::size_t pos = 0;

  void ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool lit(const std::string& w) {
    ws();
    if (s.compare(pos, w.size(), w) == 0) {
      // keywords must not run into identifiers
      if (std::isalpha(static_cast<unsigned char>(w[0]))) {
        std::size_t end = pos + w.size();
        if (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) ||
                               s[end] == '_' || s[end] == '('))
          if (w != "T") return false;
      }
      pos += w.size();
      return true;
    }
    return false;
  }
  std::string ident() {
    ws();
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                              s[pos] == '_'))
      ++pos;
    if (start == pos) throw ParseError("expected an identifier in body", pos);
    return s.substr(start, pos - start);
  }

  BoolPtr parse() {
    BoolPtr e = iff();
    ws();
    if (pos != s.size()) throw ParseError("trailing input in body", pos);
    return e;
  }
  BoolPtr iff() {
    BoolPtr l = imp();
    while (lit("<->")) l = BoolExpr::binary(BoolExpr::Kind::Iff, l, imp());
    return l;
  }
  BoolPtr imp() {
    BoolPtr l = disj();
    ws();
    if (lit("->")) return BoolExpr::binary(BoolExpr::Kind::Implies, l, imp());
    return l;
  }
  BoolPtr disj() {
    BoolPtr l = conj();
    while (true) {
      std::size_t save = pos;
      if (lit("or")) {
        l = BoolExpr::binary(BoolExpr::Kind::Or, l, conj());
      } else {
        pos = save;
        break;
      }
    }
    return l;
  }
  BoolPtr conj() {
    BoolPtr l = unary();
    while (true) {
      std::size_t save = pos;
      if (lit("and")) {
        l = BoolExpr::binary(BoolExpr::Kind::And, l, unary());
      } else {
        pos = save;
        break;
      }
    }
    return l;
  }
  BoolPtr unary() {
    ws();
    if (lit("not")) return BoolExpr::lnot(unary());
    if (lit("(")) {
      BoolPtr e = iff();
      ws();
      if (!lit(")")) throw ParseError("expected ')' in body", pos);
      return e;
    }
    if (lit("true")) return BoolExpr::constant(true);
    if (lit("false")) return BoolExpr::constant(false);
    if (lit("T")) {
      ws();
      if (!lit("(")) throw ParseError("expected '(' after T", pos);
      std::string n = ident();
      ws();
      if (!lit(")")) throw ParseError("expected ')' after T(...", pos);
      return BoolExpr::t_atom(n);
    }
    std::string n = ident();
    ws();
    if (lit("(")) {
      ws();
      if (!lit(")")) throw ParseError("expected '()' after base atom", pos);
    }
    return BoolExpr::base_atom(n);
  }
};

void check_body(const BoolPtr& e, const SentenceNetwork& net) {
  switch (e->kind) {
    case BoolExpr::Kind::TAtom:
      if (std::find(net.names.begin(), net.names.end(), e->name) == net.names.end())
        throw ParseError("body references undeclared sentence '" + e->name + "'", 0);
      return;
    case BoolExpr::Kind::BaseAtom:
      if (!net.base_val.count(e->name))
        throw ParseError("body references undeclared base atom '" + e->name + "'", 0);
      return;
    case BoolExpr::Kind::Not:
      check_body(e->a, net);
      return;
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False:
      return;
    default:
      check_body(e->a, net);
      check_body(e->b, net);
      return;
  }
}

}  // namespace

SentenceNetwork parse_network(const std::string& text) {
  SentenceNetwork net;
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, std::string>> raw_bodies;
  while (std::getline(in, line)) {
    auto posh = line.find('#');
    if (posh != std::string::npos) line = line.substr(0, posh);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "name") {
      std::string n, colon;
      ls >> n >> colon;
      if (colon != ":") throw ParseError("expected 'name <id> : <body>'", 0);
      if (net.body.count(n)) throw ParseError("duplicate sentence '" + n + "'", 0);
      std::string rest;
      std::getline(ls, rest);
      net.names.push_back(n);
      net.body[n] = nullptr;
      raw_bodies.emplace_back(n, rest);
    } else if (kw == "base") {
      std::string n, eq, v;
      ls >> n >> eq >> v;
      if (eq != "=" || (v != "true" && v != "false"))
        throw ParseError("expected 'base <id> = true|false'", 0);
      if (net.base_val.count(n)) throw ParseError("duplicate base atom '" + n + "'", 0);
      net.base_names.push_back(n);
      net.base_val[n] = v == "true";
    } else {
      throw ParseError("unknown directive '" + kw + "' in network file", 0);
    }
  }
  for (auto& [n, b] : raw_bodies) {
    BodyParser bp{b};
    net.body[n] = bp.parse();
  }
  for (const auto& [n, b] : net.body) check_body(b, net);
  return net;
}

bool eval_body(const BoolPtr& e, const SentenceNetwork& net, const Hypothesis& p) {
  switch (e->kind) {
    case BoolExpr::Kind::True: return true;
    case BoolExpr::Kind::False: return false;
    case BoolExpr::Kind::TAtom: return p.count(e->name) != 0;
    case BoolExpr::Kind::BaseAtom: return net.base_val.at(e->name);
    case BoolExpr::Kind::Not: return !eval_body(e->a, net, p);
    case BoolExpr::Kind::And:
      return eval_body(e->a, net, p) && eval_body(e->b, net, p);
    case BoolExpr::Kind::Or:
      return eval_body(e->a, net, p) || eval_body(e->b, net, p);
    case BoolExpr::Kind::Implies:
      return !eval_body(e->a, net, p) || eval_body(e->b, net, p);
    case BoolExpr::Kind::Iff:
      return eval_body(e->a, net, p) == eval_body(e->b, net, p);
  }
  return false;
}

Hypothesis gamma(const SentenceNetwork& net, const Hypothesis& p) {
  Hypothesis out;
  for (const std::string& n : net.names)
    if (eval_body(net.body.at(n), net, p)) out.insert(n);
  return out;
}

RevisionLasso revision_sequence(const SentenceNetwork& net, const Hypothesis& p0) {
  RevisionLasso out;
  std::vector<Hypothesis> seq{p0};
  std::map<Hypothesis, std::size_t> seen{{p0, 0}};
  while (true) {
    Hypothesis next = gamma(net, seq.back());
    auto it = seen.find(next);
    if (it != seen.end()) {
      out.transient = it->second;
      out.period = seq.size() - it->second;
      out.hypotheses.assign(seq.begin(), seq.end());
      out.hypotheses.resize(out.transient + out.period);
      return out;
    }
    seen[next] = seq.size();
    seq.push_back(std::move(next));
  }
}

omega::Lasso truth_dev_model(const SentenceNetwork& net, const Hypothesis& p0) {
  RevisionLasso rl = revision_sequence(net, p0);

  std::vector<logic::RelationDecl> rels{{"T", {logic::kStat}, /*dynamic=*/true, false}};
  for (const std::string& b : net.base_names)
    rels.push_back({b, {}, /*dynamic=*/false, false});
  auto sig = std::make_shared<const logic::Signature>(
      std::vector<logic::Sort>{logic::kStat}, rels);

  std::vector<Element> dom = net.names;
  std::sort(dom.begin(), dom.end());

  omega::Lasso l;
  l.transient = rl.transient;
  l.period = rl.period;
  for (std::size_t i = 0; i < rl.transient + rl.period; ++i) {
    std::map<std::string, std::set<Tuple>> interp;
    for (const std::string& n : rl.hypotheses[i]) interp["T"].insert({n});
    for (const std::string& b : net.base_names)
      if (net.base_val.at(b)) interp[b].insert(Tuple{});
    l.structures.push_back(
        FiniteStructure(sig, {{logic::kStat, dom}}, std::move(interp)));
  }
  return l;
}

bool MultiRootReport::split_decided(const std::string& name) const {
  bool pos = false, neg = false;
  for (const RootRow& r : roots) {
    auto it = r.box_class.find(name);
    if (it == r.box_class.end() || it->second == 0) return false;
    (it->second > 0 ? pos : neg) = true;
  }
  return pos && neg;
}

bool MultiRootReport::oscillates_everywhere(const std::string& name) const {
  for (const RootRow& r : roots) {
    auto it = r.box_class.find(name);
    if (it == r.box_class.end() || it->second != 0) return false;
  }
  return true;
}

MultiRootReport multi_root(const SentenceNetwork& net) {
  if (net.names.size() > 10)
    throw BoundsTooLargeError("multi-root analysis enumerates 2^names hypotheses");
  MultiRootReport rep;
  std::size_t n = net.names.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Hypothesis p0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) p0.insert(net.names[k]);
    RevisionLasso rl = revision_sequence(net, p0);
    omega::Lasso l = truth_dev_model(net, p0);
    RootRow row;
    row.p0 = p0;
    row.transient = rl.transient;
    row.period = rl.period;
    auto t_atom = logic::Formula::atom("T", {logic::Var{"x", logic::kStat}});
    for (const std::string& nm : net.names) {
      structures::Assignment asg{{"x", nm}};
      bool always = omega::lasso_satisfies(l, 0, logic::Formula::box(t_atom), asg);
      bool never = omega::lasso_satisfies(
          l, 0, logic::Formula::box(logic::Formula::lnot(t_atom)), asg);
      row.box_class[nm] = always ? 1 : never ? -1 : 0;
    }
    rep.roots.push_back(std::move(row));
  }
  return rep;
}

namespace {

// Depth-d fragment over T(name) and base atoms, canonically deduplicated by
// printed form.
std::vector<BoolPtr> build_fragment(const SentenceNetwork& net, int depth,
                                    std::size_t cap) {
  std::vector<BoolPtr> atoms;
  for (const std::string& n : net.names) atoms.push_back(BoolExpr::t_atom(n));
  for (const std::string& b : net.base_names) atoms.push_back(BoolExpr::base_atom(b));

  std::vector<BoolPtr> all = atoms;
  std::set<std::string> seen;
  for (const BoolPtr& a : all) seen.insert(print_bool(a));

  for (int d = 1; d <= depth; ++d) {
    std::vector<BoolPtr> base = all;  // snapshot: combinations of depth < d
    auto push = [&](BoolPtr e) {
      if (seen.insert(print_bool(e)).second) {
        all.push_back(e);
        if (all.size() > cap)
          throw BoundsTooLargeError("fragment exceeded " + std::to_string(cap));
      }
    };
    for (const BoolPtr& a : base) push(BoolExpr::lnot(a));
    for (const BoolPtr& a : base)
      for (const BoolPtr& b : base) {
        push(BoolExpr::binary(BoolExpr::Kind::And, a, b));
        push(BoolExpr::binary(BoolExpr::Kind::Or, a, b));
        push(BoolExpr::binary(BoolExpr::Kind::Implies, a, b));
      }
  }
  return all;
}

}  // namespace

UctReport uct_fragment_check(const SentenceNetwork& net, const Hypothesis& q,
                             int depth) {
  if (depth < 1) throw BoundsTooLargeError("fragment depth must be at least 1");
  UctReport rep;
  // cap sized for depth-2 checks over small networks
  std::vector<BoolPtr> fragment = build_fragment(net, depth, 400000);
  rep.fragment_size = fragment.size();

  // membership of a fragment sentence in gamma(Q): evaluation under Q
  auto in_gamma = [&](const BoolPtr& e) { return eval_body(e, net, q); };

  for (const BoolPtr& e : fragment) {
    switch (e->kind) {
      case BoolExpr::Kind::Not:
        ++rep.checks;
        if (in_gamma(e) != !in_gamma(e->a))
          rep.violations.push_back({"UCT-not", print_bool(e)});
        break;
      case BoolExpr::Kind::And:
        ++rep.checks;
        if (in_gamma(e) != (in_gamma(e->a) && in_gamma(e->b)))
          rep.violations.push_back({"UCT-and", print_bool(e)});
        break;
      case BoolExpr::Kind::Or:
        ++rep.checks;
        if (in_gamma(e) != (in_gamma(e->a) || in_gamma(e->b)))
          rep.violations.push_back({"UCT-or", print_bool(e)});
        break;
      case BoolExpr::Kind::Implies:
        ++rep.checks;
        if (in_gamma(e) != (!in_gamma(e->a) || in_gamma(e->b)))
          rep.violations.push_back({"UCT-implies", print_bool(e)});
        break;
      default:
        break;
    }
  }
  return rep;
}

std::vector<BatteryRow> battery_tabulation(const SentenceNetwork& net) {
  std::size_t n = net.names.size();
  if (n > 6) throw BoundsTooLargeError("battery tabulation enumerates 4^names cases");

  // route B: image of gamma by direct enumeration
  std::set<Hypothesis> image;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Hypothesis p;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) p.insert(net.names[k]);
    image.insert(gamma(net, p));
  }

  std::vector<BatteryRow> rows;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    BatteryRow row;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) row.q.insert(net.names[k]);

    // route A: per-name body constraints are simultaneously satisfiable by
    // some prior hypothesis
    for (std::size_t pm = 0; pm < (std::size_t{1} << n) && !row.battery; ++pm) {
      Hypothesis p;
      for (std::size_t k = 0; k < n; ++k)
        if (pm & (std::size_t{1} << k)) p.insert(net.names[k]);
      bool all = true;
      for (const std::string& nm : net.names) {
        bool want = row.q.count(nm) != 0;
        if (eval_body(net.body.at(nm), net, p) != want) {
          all = false;
          break;
        }
      }
      if (all) row.battery = true;
    }

    row.in_image = image.count(row.q) != 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace devmodal::revision
