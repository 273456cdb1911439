#include "devmodal/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace devmodal::logic {

bool is_dyn_sort(const Sort& s) { return dyn_arity(s) > 0; }

int dyn_arity(const Sort& s) {
  if (s.size() < 4 || s.compare(0, 3, "Dyn") != 0) return -1;
  for (std::size_t i = 3; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
  int n = std::stoi(s.substr(3));
  return n > 0 ? n : -1;
}

Sort dyn_sort(int n) { return "Dyn" + std::to_string(n); }

std::string manifest_rel(int n) { return "<<-" + std::to_string(n); }

Signature::Signature(std::vector<Sort> sorts, std::vector<RelationDecl> relations)
    : sorts_(std::move(sorts)), relations_(std::move(relations)) {
  if (std::find(sorts_.begin(), sorts_.end(), kStat) == sorts_.end())
    sorts_.insert(sorts_.begin(), kStat);
  std::sort(sorts_.begin(), sorts_.end());
  sorts_.erase(std::unique(sorts_.begin(), sorts_.end()), sorts_.end());

  // One manifestation relation per declared Dyn sort.
  for (const Sort& s : sorts_) {
    int n = dyn_arity(s);
    if (n <= 0) continue;
    RelationDecl m;
    m.name = manifest_rel(n);
    m.sorts.assign(static_cast<std::size_t>(n), kStat);
    m.sorts.push_back(s);
    m.dynamic = true;
    m.manifestation = true;
    relations_.push_back(std::move(m));
  }

  std::set<std::string> seen;
  for (const RelationDecl& r : relations_) {
    if (!seen.insert(r.name).second)
      throw SignatureMismatchError("duplicate relation name '" + r.name + "'");
    for (const Sort& s : r.sorts)
      if (!has_sort(s))
        throw SortError("relation '" + r.name + "' uses undeclared sort '" + s + "'");
    if (r.manifestation && !r.dynamic)
      throw SignatureMismatchError("manifestation relation '" + r.name +
                                   "' must be dynamic");
  }
}

bool Signature::has_sort(const Sort& s) const {
  return std::binary_search(sorts_.begin(), sorts_.end(), s);
}

const RelationDecl* Signature::find(const std::string& rel) const {
  for (const RelationDecl& r : relations_)
    if (r.name == rel) return &r;
  return nullptr;
}

const RelationDecl& Signature::at(const std::string& rel) const {
  const RelationDecl* r = find(rel);
  if (!r) throw SortError("unknown relation '" + rel + "'");
  return *r;
}

std::vector<int> Signature::dyn_arities() const {
  std::vector<int> out;
  for (const Sort& s : sorts_) {
    int n = dyn_arity(s);
    if (n > 0) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::shared_ptr<Formula> node(Conn k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

}  // namespace

FormulaPtr Formula::atom(std::string rel, std::vector<Var> args) {
  auto f = node(Conn::Atom);
  f->rel = std::move(rel);
  f->args = std::move(args);
  return f;
}

FormulaPtr Formula::manifest(std::vector<Var> tuple, Var xi) {
  auto f = node(Conn::Manifest);
  f->args = std::move(tuple);
  f->dyn = std::move(xi);
  return f;
}

FormulaPtr Formula::eq(Var v, Var w) {
  auto f = node(Conn::Eq);
  f->args = {std::move(v), std::move(w)};
  return f;
}

FormulaPtr Formula::lnot(FormulaPtr g) {
  auto f = node(Conn::Not);
  f->a = std::move(g);
  return f;
}

FormulaPtr Formula::land(FormulaPtr l, FormulaPtr r) {
  auto f = node(Conn::And);
  f->a = std::move(l);
  f->b = std::move(r);
  return f;
}

FormulaPtr Formula::lor(FormulaPtr l, FormulaPtr r) {
  auto f = node(Conn::Or);
  f->a = std::move(l);
  f->b = std::move(r);
  return f;
}

FormulaPtr Formula::implies(FormulaPtr l, FormulaPtr r) {
  auto f = node(Conn::Implies);
  f->a = std::move(l);
  f->b = std::move(r);
  return f;
}

FormulaPtr Formula::iff(FormulaPtr l, FormulaPtr r) {
  auto f = node(Conn::Iff);
  f->a = std::move(l);
  f->b = std::move(r);
  return f;
}

FormulaPtr Formula::exists(Var v, FormulaPtr body) {
  auto f = node(Conn::Exists);
  f->bound = std::move(v);
  f->a = std::move(body);
  return f;
}

FormulaPtr Formula::forall(Var v, FormulaPtr body) {
  auto f = node(Conn::Forall);
  f->bound = std::move(v);
  f->a = std::move(body);
  return f;
}

FormulaPtr Formula::dia(FormulaPtr g) {
  auto f = node(Conn::Dia);
  f->a = std::move(g);
  return f;
}

FormulaPtr Formula::box(FormulaPtr g) {
  auto f = node(Conn::Box);
  f->a = std::move(g);
  return f;
}

bool equal(const FormulaPtr& f, const FormulaPtr& g) {
  if (f == g) return true;
  if (!f || !g) return false;
  if (f->kind != g->kind) return false;
  switch (f->kind) {
    case Conn::Atom:
      return f->rel == g->rel && f->args == g->args;
    case Conn::Manifest:
      return f->args == g->args && f->dyn == g->dyn;
    case Conn::Eq:
      return f->args == g->args;
    case Conn::Not:
    case Conn::Dia:
    case Conn::Box:
      return equal(f->a, g->a);
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
    case Conn::Iff:
      return equal(f->a, g->a) && equal(f->b, g->b);
    case Conn::Exists:
    case Conn::Forall:
      return f->bound == g->bound && equal(f->a, g->a);
  }
  return false;
}

namespace {

void check_sorted_rec(const FormulaPtr& f, const Signature& sig,
                      std::map<std::string, Sort>& env) {
  switch (f->kind) {
    case Conn::Atom: {
      const RelationDecl& r = sig.at(f->rel);
      if (r.arity() != static_cast<int>(f->args.size()))
        throw SortError("relation '" + f->rel + "' expects " +
                        std::to_string(r.arity()) + " arguments, got " +
                        std::to_string(f->args.size()));
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        const Var& v = f->args[i];
        auto it = env.find(v.name);
        Sort expected = r.sorts[i];
        Sort actual = it != env.end() ? it->second : v.sort;
        if (actual != expected)
          throw SortError("variable '" + v.name + "' has sort " + actual +
                          " but position " + std::to_string(i + 1) + " of '" +
                          f->rel + "' needs " + expected);
        if (v.sort != actual)
          throw SortError("variable '" + v.name + "' annotated " + v.sort +
                          " but bound with sort " + actual);
      }
      return;
    }
    case Conn::Manifest: {
      int n = static_cast<int>(f->args.size());
      if (!sig.find(manifest_rel(n)))
        throw SortError("manifestation arity " + std::to_string(n) +
                        " not declared (no sort " + dyn_sort(n) + ")");
      for (const Var& v : f->args) {
        auto it = env.find(v.name);
        Sort actual = it != env.end() ? it->second : v.sort;
        if (actual != kStat)
          throw SortError("variable '" + v.name +
                          "' in a manifestation tuple must have sort Stat");
      }
      auto it = env.find(f->dyn.name);
      Sort actual = it != env.end() ? it->second : f->dyn.sort;
      if (actual != dyn_sort(n))
        throw SortError("variable '" + f->dyn.name + "' has sort " + actual +
                        " but the manifestation needs " + dyn_sort(n));
      return;
    }
    case Conn::Eq: {
      Sort l = env.count(f->args[0].name) ? env[f->args[0].name] : f->args[0].sort;
      Sort r = env.count(f->args[1].name) ? env[f->args[1].name] : f->args[1].sort;
      if (l != r)
        throw SortError("equality between sorts " + l + " and " + r + " ('" +
                        f->args[0].name + "' = '" + f->args[1].name + "')");
      if (!sig.has_sort(l)) throw SortError("equality on undeclared sort " + l);
      return;
    }
    case Conn::Not:
    case Conn::Dia:
    case Conn::Box:
      check_sorted_rec(f->a, sig, env);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
    case Conn::Iff:
      check_sorted_rec(f->a, sig, env);
      check_sorted_rec(f->b, sig, env);
      return;
    case Conn::Exists:
    case Conn::Forall: {
      if (!sig.has_sort(f->bound.sort))
        throw SortError("quantifier binds '" + f->bound.name +
                        "' at undeclared sort " + f->bound.sort);
      auto old = env.find(f->bound.name);
      std::optional<Sort> saved;
      if (old != env.end()) saved = old->second;
      env[f->bound.name] = f->bound.sort;
      check_sorted_rec(f->a, sig, env);
      if (saved)
        env[f->bound.name] = *saved;
      else
        env.erase(f->bound.name);
      return;
    }
  }
}

void free_vars_rec(const FormulaPtr& f, std::set<std::string>& bound,
                   std::vector<Var>& out, std::set<std::string>& seen) {
  auto add = [&](const Var& v) {
    if (!bound.count(v.name) && seen.insert(v.name).second) out.push_back(v);
  };
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Eq:
      for (const Var& v : f->args) add(v);
      return;
    case Conn::Manifest:
      for (const Var& v : f->args) add(v);
      add(f->dyn);
      return;
    case Conn::Not:
    case Conn::Dia:
    case Conn::Box:
      free_vars_rec(f->a, bound, out, seen);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
    case Conn::Iff:
      free_vars_rec(f->a, bound, out, seen);
      free_vars_rec(f->b, bound, out, seen);
      return;
    case Conn::Exists:
    case Conn::Forall: {
      bool fresh = bound.insert(f->bound.name).second;
      free_vars_rec(f->a, bound, out, seen);
      if (fresh) bound.erase(f->bound.name);
      return;
    }
  }
}

}  // namespace

void check_sorted(const FormulaPtr& f, const Signature& sig) {
  std::map<std::string, Sort> env;
  check_sorted_rec(f, sig, env);
}

std::vector<Var> free_vars(const FormulaPtr& f) {
  std::vector<Var> out;
  std::set<std::string> bound, seen;
  free_vars_rec(f, bound, out, seen);
  return out;
}

FormulaPtr desugar(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Manifest:
    case Conn::Eq:
      return f;
    case Conn::Not:
      return Formula::lnot(desugar(f->a));
    case Conn::Or:
      return Formula::lor(desugar(f->a), desugar(f->b));
    case Conn::And:
      return Formula::lnot(
          Formula::lor(Formula::lnot(desugar(f->a)), Formula::lnot(desugar(f->b))));
    case Conn::Implies:
      return Formula::lor(Formula::lnot(desugar(f->a)), desugar(f->b));
    case Conn::Iff: {
      FormulaPtr l = desugar(f->a), r = desugar(f->b);
      auto dir = [](const FormulaPtr& x, const FormulaPtr& y) {
        return Formula::lor(Formula::lnot(x), y);
      };
      FormulaPtr both = Formula::lnot(
          Formula::lor(Formula::lnot(dir(l, r)), Formula::lnot(dir(r, l))));
      return both;
    }
    case Conn::Exists:
      return Formula::exists(f->bound, desugar(f->a));
    case Conn::Forall:
      return Formula::lnot(Formula::exists(f->bound, Formula::lnot(desugar(f->a))));
    case Conn::Dia:
      return Formula::dia(desugar(f->a));
    case Conn::Box:
      return Formula::lnot(Formula::dia(Formula::lnot(desugar(f->a))));
  }
  return f;
}

namespace {

// Precedence levels: <-> 1, -> 2, or 3, and 4, not 5, atoms 6. Quantifiers
// and modal operators take the maximal right scope, so they are printed
// parenthesized anywhere that scope would overrun.
int prec(Conn k) {
  switch (k) {
    case Conn::Iff: return 1;
    case Conn::Implies: return 2;
    case Conn::Or: return 3;
    case Conn::And: return 4;
    case Conn::Not: return 5;
    default: return 6;
  }
}

std::string var_txt(const Var& v, bool with_sort) {
  if (with_sort && v.sort != kStat) return v.name + ":" + v.sort;
  return v.name;
}

void print_rec(const FormulaPtr& f, std::ostringstream& out, int parent,
               bool rightmost) {
  auto wrap = [&](auto&& body, bool need) {
    if (need) out << "(";
    body();
    if (need) out << ")";
  };
  switch (f->kind) {
    case Conn::Atom: {
      out << f->rel << "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) out << ",";
        out << var_txt(f->args[i], false);
      }
      out << ")";
      return;
    }
    case Conn::Manifest: {
      out << "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) out << ",";
        out << var_txt(f->args[i], false);
      }
      out << ") <<- " << var_txt(f->dyn, false);
      return;
    }
    case Conn::Eq:
      out << var_txt(f->args[0], false) << " = " << var_txt(f->args[1], false);
      return;
    case Conn::Not:
      wrap(
          [&] {
            out << "not ";
            print_rec(f->a, out, prec(Conn::Not), rightmost);
          },
          parent > prec(Conn::Not));
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
    case Conn::Iff: {
      const char* op = f->kind == Conn::And       ? " and "
                       : f->kind == Conn::Or      ? " or "
                       : f->kind == Conn::Implies ? " -> "
                                                  : " <-> ";
      int p = prec(f->kind);
      // -> is right-associative; and/or/<-> are emitted left-associated.
      int lchild = f->kind == Conn::Implies ? p + 1 : p;
      int rchild = f->kind == Conn::Implies ? p : p + 1;
      bool need = parent > p;
      wrap(
          [&] {
            print_rec(f->a, out, lchild, false);
            out << op;
            print_rec(f->b, out, rchild, rightmost || need);
          },
          need);
      return;
    }
    case Conn::Exists:
    case Conn::Forall:
    case Conn::Dia:
    case Conn::Box: {
      bool need = !rightmost;
      wrap(
          [&] {
            if (f->kind == Conn::Exists)
              out << "exists " << var_txt(f->bound, true) << ". ";
            else if (f->kind == Conn::Forall)
              out << "forall " << var_txt(f->bound, true) << ". ";
            else if (f->kind == Conn::Dia)
              out << "dia ";
            else
              out << "box ";
            print_rec(f->a, out, 0, true);
          },
          need);
      return;
    }
  }
}

}  // namespace

std::string print_formula(const FormulaPtr& f) {
  std::ostringstream out;
  print_rec(f, out, 0, true);
  return out.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Colon, Eq, Manifest, Arrow, DArrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    tok_.offset = pos_;
    if (pos_ >= s_.size()) {
      tok_ = {Tok::End, "", pos_};
      return;
    }
    char c = s_[pos_];
    auto lit = [&](Tok k, std::size_t len) {
      tok_ = {k, s_.substr(pos_, len), pos_};
      pos_ += len;
    };
    if (s_.compare(pos_, 3, "<<-") == 0) return lit(Tok::Manifest, 3);
    if (s_.compare(pos_, 3, "<->") == 0) return lit(Tok::DArrow, 3);
    if (s_.compare(pos_, 2, "->") == 0) return lit(Tok::Arrow, 2);
    if (c == '(') return lit(Tok::LParen, 1);
    if (c == ')') return lit(Tok::RParen, 1);
    if (c == ',') return lit(Tok::Comma, 1);
    if (c == '.') return lit(Tok::Dot, 1);
    if (c == ':') return lit(Tok::Colon, 1);
    if (c == '=') return lit(Tok::Eq, 1);
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/') {
      // Identifiers cover relation names, variables and element-like names
      // (rationals such as 1/2 appear as grid element identifiers).
      std::size_t j = pos_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) ||
                               s_[j] == '_' || s_[j] == '/'))
        ++j;
      tok_ = {Tok::Ident, s_.substr(pos_, j - pos_), pos_};
      pos_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Token tok_{Tok::End, "", 0};
};

bool is_keyword(const std::string& w) {
  return w == "not" || w == "and" || w == "or" || w == "exists" || w == "forall" ||
         w == "dia" || w == "box";
}

class Parser {
public:
  Parser(const std::string& text, const Signature& sig) : lex_(text), sig_(sig) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_iff();
    if (lex_.peek().kind != Tok::End)
      throw ParseError("trailing input '" + lex_.peek().text + "'", lex_.peek().offset);
    resolve_free_defaults(f);
    check_sorted(f, sig_);
    return f;
  }

private:
  Lexer lex_;
  const Signature& sig_;
  std::vector<std::pair<std::string, Sort>> scope_;
  std::map<std::string, Sort> free_;

  std::optional<Sort> lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return it->second;
    return std::nullopt;
  }

  Var use_var(const std::string& name, std::optional<Sort> expected,
              std::size_t offset) {
    if (auto s = lookup(name)) {
      if (expected && *s != *expected)
        throw SortError("variable '" + name + "' has sort " + *s + " but " +
                        *expected + " is required (offset " +
                        std::to_string(offset) + ")");
      return Var{name, *s};
    }
    auto it = free_.find(name);
    if (it != free_.end()) {
      if (expected && it->second != *expected)
        throw SortError("free variable '" + name + "' used at sorts " + it->second +
                        " and " + *expected);
      return Var{name, it->second};
    }
    Sort s = expected ? *expected : kStat;
    free_[name] = s;
    return Var{name, s};
  }

  // Re-visit free variables: all occurrences must agree; the parse built
  // them incrementally so only the recorded final sort is applied.
  void resolve_free_defaults(const FormulaPtr&) {}

  FormulaPtr parse_iff() {
    FormulaPtr f = parse_imp();
    while (lex_.peek().kind == Tok::DArrow) {
      lex_.take();
      f = Formula::iff(f, parse_imp());
    }
    return f;
  }

  FormulaPtr parse_imp() {
    FormulaPtr f = parse_or();
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      return Formula::implies(f, parse_imp());
    }
    return f;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "or") {
      lex_.take();
      f = Formula::lor(f, parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "and") {
      lex_.take();
      f = Formula::land(f, parse_unary());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "not") {
        lex_.take();
        return Formula::lnot(parse_unary());
      }
      if (t.text == "dia") {
        lex_.take();
        return Formula::dia(parse_iff());
      }
      if (t.text == "box") {
        lex_.take();
        return Formula::box(parse_iff());
      }
      if (t.text == "exists" || t.text == "forall") {
        bool ex = t.text == "exists";
        lex_.take();
        Token v = expect(Tok::Ident, "variable");
        if (is_keyword(v.text))
          throw ParseError("keyword '" + v.text + "' cannot name a variable", v.offset);
        Sort s = kStat;
        if (lex_.peek().kind == Tok::Colon) {
          lex_.take();
          Token st = expect(Tok::Ident, "sort");
          s = st.text;
          if (!sig_.has_sort(s))
            throw SortError("undeclared sort '" + s + "' (offset " +
                            std::to_string(st.offset) + ")");
        }
        expect(Tok::Dot, "'.'");
        scope_.emplace_back(v.text, s);
        FormulaPtr body = parse_iff();
        scope_.pop_back();
        Var bound{v.text, s};
        return ex ? Formula::exists(bound, body) : Formula::forall(bound, body);
      }
    }
    return parse_atom();
  }

  Token expect(Tok k, const std::string& what) {
    if (lex_.peek().kind != k)
      throw ParseError("expected " + what + ", found '" + lex_.peek().text + "'",
                       lex_.peek().offset);
    return lex_.take();
  }

  FormulaPtr parse_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::LParen) return parse_paren();
    if (t.kind != Tok::Ident || is_keyword(t.text))
      throw ParseError("expected a formula, found '" + t.text + "'", t.offset);
    Token head = lex_.take();
    if (lex_.peek().kind == Tok::LParen) {
      // Relation atom.
      const RelationDecl* r = sig_.find(head.text);
      if (!r)
        throw SortError("unknown relation '" + head.text + "' (offset " +
                        std::to_string(head.offset) + ")");
      lex_.take();
      std::vector<Var> args;
      if (lex_.peek().kind != Tok::RParen) {
        while (true) {
          Token a = expect(Tok::Ident, "variable");
          std::size_t i = args.size();
          if (i >= r->sorts.size())
            throw SortError("too many arguments for '" + head.text + "'");
          args.push_back(use_var(a.text, r->sorts[i], a.offset));
          if (lex_.peek().kind == Tok::Comma) {
            lex_.take();
            continue;
          }
          break;
        }
      }
      expect(Tok::RParen, "')'");
      if (args.size() != r->sorts.size())
        throw SortError("relation '" + head.text + "' expects " +
                        std::to_string(r->sorts.size()) + " arguments, got " +
                        std::to_string(args.size()));
      return Formula::atom(head.text, std::move(args));
    }
    if (lex_.peek().kind == Tok::Eq) {
      lex_.take();
      Token rhs = expect(Tok::Ident, "variable");
      Var v = use_var(head.text, std::nullopt, head.offset);
      Var w = use_var(rhs.text, v.sort, rhs.offset);
      return Formula::eq(v, w);
    }
    throw ParseError("expected '(' or '=' after '" + head.text + "'",
                     lex_.peek().offset);
  }

  // '(' begins either a parenthesized formula or a manifestation tuple
  // "(x,y) <<- d". Tuples are token-level flat, so a bounded lookahead
  // distinguishes the two without backtracking the formula parser.
  FormulaPtr parse_paren() {
    Token open = expect(Tok::LParen, "'('");
    if (lex_.peek().kind == Tok::Ident && !is_keyword(lex_.peek().text)) {
      std::vector<Token> idents;
      idents.push_back(lex_.take());
      bool tuple = true;
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        if (lex_.peek().kind != Tok::Ident || is_keyword(lex_.peek().text)) {
          tuple = false;
          break;
        }
        idents.push_back(lex_.take());
      }
      if (tuple && lex_.peek().kind == Tok::RParen) {
        // Could still be "(x)" as a parenthesized variable-formula; only a
        // following "<<-" makes it a manifestation.
        Token close = lex_.take();
        if (lex_.peek().kind == Tok::Manifest) {
          lex_.take();
          Token d = expect(Tok::Ident, "dynamic variable");
          int n = static_cast<int>(idents.size());
          std::vector<Var> tup;
          for (Token& it : idents) tup.push_back(use_var(it.text, kStat, it.offset));
          Var xi = use_var(d.text, dyn_sort(n), d.offset);
          return Formula::manifest(std::move(tup), xi);
        }
        if (idents.size() == 1) {
          // "(x)" followed by "=" or "(" is not valid syntax; a single
          // parenthesized formula must re-parse the identifier context.
          // Reconstruct: treat as equality/atom start is impossible here, so
          // error out with the position.
          (void)close;
          throw ParseError("expected '<<-' after tuple", lex_.peek().offset);
        }
        throw ParseError("expected '<<-' after tuple", lex_.peek().offset);
      }
      if (tuple && idents.size() == 1 && lex_.peek().kind == Tok::Eq) {
        // "(x = y ...)" — an equality inside parens.
        lex_.take();
        Token rhs = expect(Tok::Ident, "variable");
        Var v = use_var(idents[0].text, std::nullopt, idents[0].offset);
        Var w = use_var(rhs.text, v.sort, rhs.offset);
        FormulaPtr f = finish_formula_after(Formula::eq(v, w));
        expect(Tok::RParen, "')'");
        return f;
      }
      if (tuple && idents.size() == 1 && lex_.peek().kind == Tok::LParen) {
        // "(R(x,...) ...)" — a relation atom inside parens.
        const RelationDecl* r = sig_.find(idents[0].text);
        if (!r)
          throw SortError("unknown relation '" + idents[0].text + "' (offset " +
                          std::to_string(idents[0].offset) + ")");
        lex_.take();
        std::vector<Var> args;
        if (lex_.peek().kind != Tok::RParen) {
          while (true) {
            Token a = expect(Tok::Ident, "variable");
            std::size_t i = args.size();
            if (i >= r->sorts.size())
              throw SortError("too many arguments for '" + idents[0].text + "'");
            args.push_back(use_var(a.text, r->sorts[i], a.offset));
            if (lex_.peek().kind == Tok::Comma) {
              lex_.take();
              continue;
            }
            break;
          }
        }
        expect(Tok::RParen, "')'");
        if (args.size() != r->sorts.size())
          throw SortError("relation '" + idents[0].text + "' expects " +
                          std::to_string(r->sorts.size()) + " arguments");
        FormulaPtr f = finish_formula_after(Formula::atom(idents[0].text, std::move(args)));
        expect(Tok::RParen, "')'");
        return f;
      }
      throw ParseError("cannot parse parenthesized expression", open.offset);
    }
    FormulaPtr f = parse_iff();
    expect(Tok::RParen, "')'");
    return f;
  }

  // After consuming an atom that begins a parenthesized formula, continue
  // with the binary-operator ladder until the closing paren.
  FormulaPtr finish_formula_after(FormulaPtr f) {
    // and-level
    while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "and") {
      lex_.take();
      f = Formula::land(f, parse_unary());
    }
    // or-level
    while (lex_.peek().kind == Tok::Ident && lex_.peek().text == "or") {
      lex_.take();
      f = Formula::lor(f, parse_and());
    }
    // ->
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      f = Formula::implies(f, parse_imp());
    }
    // <->
    while (lex_.peek().kind == Tok::DArrow) {
      lex_.take();
      f = Formula::iff(f, parse_imp());
    }
    return f;
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  return p.parse();
}

// ---------------------------------------------------------------------------
// Classification and translations
// ---------------------------------------------------------------------------

namespace {

bool modal_free_rec(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Dia:
    case Conn::Box:
      return false;
    case Conn::Atom:
    case Conn::Manifest:
    case Conn::Eq:
      return true;
    case Conn::Not:
    case Conn::Exists:
    case Conn::Forall:
      return modal_free_rec(f->a);
    default:
      return modal_free_rec(f->a) && modal_free_rec(f->b);
  }
}

bool static_language_rec(const FormulaPtr& f, const Signature& sig) {
  switch (f->kind) {
    case Conn::Atom:
      return !sig.at(f->rel).dynamic;
    case Conn::Manifest:
      return false;
    case Conn::Eq:
      return true;
    case Conn::Not:
    case Conn::Dia:
    case Conn::Box:
    case Conn::Exists:
    case Conn::Forall:
      return static_language_rec(f->a, sig);
    default:
      return static_language_rec(f->a, sig) && static_language_rec(f->b, sig);
  }
}

bool quantifier_free(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Exists:
    case Conn::Forall:
      return false;
    case Conn::Atom:
    case Conn::Manifest:
    case Conn::Eq:
      return true;
    case Conn::Not:
    case Conn::Dia:
    case Conn::Box:
      return quantifier_free(f->a);
    default:
      return quantifier_free(f->a) && quantifier_free(f->b);
  }
}

bool stat_atom(const FormulaPtr& f, const Signature& sig) {
  if (f->kind == Conn::Atom) {
    const RelationDecl& r = sig.at(f->rel);
    if (r.dynamic) return false;
    for (const Sort& s : r.sorts)
      if (s != kStat) return false;
    return true;
  }
  if (f->kind == Conn::Eq) return f->args[0].sort == kStat && f->args[1].sort == kStat;
  return false;
}

}  // namespace

Classification classify(const FormulaPtr& f, const Signature& sig) {
  Classification c;
  c.modal_free = modal_free_rec(f);
  c.static_language = static_language_rec(f, sig);
  c.literal = stat_atom(f, sig) || (f->kind == Conn::Not && stat_atom(f->a, sig));

  // Sigma2 detection on already-prenex input: a block of exists, then a
  // block of forall, then a quantifier-free modal-free body. No prenexing
  // is attempted here.
  if (c.modal_free) {
    FormulaPtr g = f;
    while (g->kind == Conn::Exists) g = g->a;
    while (g->kind == Conn::Forall) g = g->a;
    c.sigma2 = quantifier_free(g);
  }
  return c;
}

FormulaPtr potentialist_translate(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Dia:
    case Conn::Box:
      throw ModalInputError("potentialist translation requires a modal-free input");
    case Conn::Atom:
    case Conn::Manifest:
    case Conn::Eq:
      return f;
    case Conn::Not:
      return Formula::lnot(potentialist_translate(f->a));
    case Conn::And:
      return Formula::land(potentialist_translate(f->a), potentialist_translate(f->b));
    case Conn::Or:
      return Formula::lor(potentialist_translate(f->a), potentialist_translate(f->b));
    case Conn::Implies:
      return Formula::implies(potentialist_translate(f->a),
                              potentialist_translate(f->b));
    case Conn::Iff:
      return Formula::iff(potentialist_translate(f->a), potentialist_translate(f->b));
    case Conn::Exists:
      return Formula::dia(Formula::exists(f->bound, potentialist_translate(f->a)));
    case Conn::Forall:
      return Formula::box(Formula::forall(f->bound, potentialist_translate(f->a)));
  }
  return f;
}

namespace {

bool mentions_any(const FormulaPtr& atom, const std::vector<Var>& xs) {
  auto in = [&](const Var& v) {
    for (const Var& x : xs)
      if (x.name == v.name) return true;
    return false;
  };
  for (const Var& v : atom->args)
    if (in(v)) return true;
  if (atom->kind == Conn::Manifest && in(atom->dyn)) return true;
  return false;
}

void forbid_bound(const FormulaPtr& f, const std::vector<Var>& xs, const Var& xi) {
  switch (f->kind) {
    case Conn::Exists:
    case Conn::Forall:
      for (const Var& x : xs)
        if (f->bound.name == x.name)
          throw BoundVariableError("variable '" + x.name +
                                   "' occurs bound; dynamic substitution requires it free");
      if (f->bound.name == xi.name)
        throw BoundVariableError("substituted variable '" + xi.name +
                                 "' occurs bound in the formula");
      forbid_bound(f->a, xs, xi);
      return;
    case Conn::Not:
    case Conn::Dia:
    case Conn::Box:
      forbid_bound(f->a, xs, xi);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
    case Conn::Iff:
      forbid_bound(f->a, xs, xi);
      forbid_bound(f->b, xs, xi);
      return;
    default:
      return;
  }
}

FormulaPtr dynsub_rec(const FormulaPtr& f, const std::vector<Var>& xs, const Var& xi,
                      bool full_wrap) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Manifest:
    case Conn::Eq: {
      if (!full_wrap && !mentions_any(f, xs)) return f;
      FormulaPtr wrapped = Formula::land(Formula::manifest(xs, xi), f);
      for (auto it = xs.rbegin(); it != xs.rend(); ++it)
        wrapped = Formula::exists(*it, wrapped);
      return wrapped;
    }
    case Conn::Not:
      return Formula::lnot(dynsub_rec(f->a, xs, xi, full_wrap));
    case Conn::Dia:
      return Formula::dia(dynsub_rec(f->a, xs, xi, full_wrap));
    case Conn::Box:
      return Formula::box(dynsub_rec(f->a, xs, xi, full_wrap));
    case Conn::And:
      return Formula::land(dynsub_rec(f->a, xs, xi, full_wrap),
                           dynsub_rec(f->b, xs, xi, full_wrap));
    case Conn::Or:
      return Formula::lor(dynsub_rec(f->a, xs, xi, full_wrap),
                          dynsub_rec(f->b, xs, xi, full_wrap));
    case Conn::Implies:
      return Formula::implies(dynsub_rec(f->a, xs, xi, full_wrap),
                              dynsub_rec(f->b, xs, xi, full_wrap));
    case Conn::Iff:
      return Formula::iff(dynsub_rec(f->a, xs, xi, full_wrap),
                          dynsub_rec(f->b, xs, xi, full_wrap));
    case Conn::Exists:
      return Formula::exists(f->bound, dynsub_rec(f->a, xs, xi, full_wrap));
    case Conn::Forall:
      return Formula::forall(f->bound, dynsub_rec(f->a, xs, xi, full_wrap));
  }
  return f;
}

}  // namespace

FormulaPtr dynamic_substitute(const FormulaPtr& f, const std::vector<Var>& xs,
                              const Var& xi, bool full_wrap) {
  int n = dyn_arity(xi.sort);
  if (n < 0 || static_cast<std::size_t>(n) != xs.size())
    throw ArityMismatchError("dynamic variable '" + xi.name + "' has sort " +
                             xi.sort + " but the tuple has length " +
                             std::to_string(xs.size()));
  for (const Var& x : xs)
    if (x.sort != kStat)
      throw ArityMismatchError("substituted tuple variable '" + x.name +
                               "' must have sort Stat");
  forbid_bound(f, xs, xi);
  for (const Var& v : free_vars(f))
    if (v.name == xi.name)
      throw BoundVariableError("variable '" + xi.name + "' must be fresh in the formula");
  return dynsub_rec(f, xs, xi, full_wrap);
}

}  // namespace devmodal::logic
