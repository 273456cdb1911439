#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "devmodal/errors.hpp"

namespace devmodal::logic {

// Sorts are plain names. "Stat" is the sort of static individuals; "Dyn<n>"
// is the sort of dynamic n-tuples; anything else is an extra sort.
using Sort = std::string;

inline const Sort kStat = "Stat";

bool is_dyn_sort(const Sort& s);
int dyn_arity(const Sort& s);  // -1 when s is not a Dyn sort
Sort dyn_sort(int n);
std::string manifest_rel(int n);  // reserved relation name "<<-n"

struct RelationDecl {
  std::string name;
  std::vector<Sort> sorts;
  bool dynamic = false;
  bool manifestation = false;

  int arity() const { return static_cast<int>(sorts.size()); }
};

// A sorted relational signature. Declaring sort Dyn<n> automatically
// declares the manifestation relation <<-n : (Stat^n, Dyn<n>), classified
// dynamic. Relations whose declaration passes `dynamic` are dynamic; all
// others are static and subject to growth monotonicity in development
// models.
class Signature {
public:
  Signature(std::vector<Sort> sorts, std::vector<RelationDecl> relations);

  bool has_sort(const Sort& s) const;
  const RelationDecl* find(const std::string& rel) const;  // nullptr if absent
  const RelationDecl& at(const std::string& rel) const;    // throws

  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::vector<RelationDecl>& relations() const { return relations_; }

  std::vector<int> dyn_arities() const;  // declared Dyn sorts, ascending

private:
  std::vector<Sort> sorts_;
  std::vector<RelationDecl> relations_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

struct Var {
  std::string name;
  Sort sort = kStat;

  bool operator==(const Var& o) const { return name == o.name && sort == o.sort; }
  bool operator<(const Var& o) const {
    return name != o.name ? name < o.name : sort < o.sort;
  }
};

enum class Conn {
  Atom,      // rel(args)
  Manifest,  // (args) <<- dyn
  Eq,        // args[0] = args[1]
  Not,
  And,
  Or,
  Implies,
  Iff,
  Exists,
  Forall,
  Dia,
  Box,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable AST. Sugar (and/->/<->/forall/box) is a first-class node kind;
// desugar() rewrites to the primitive base (not/or/exists/dia).
class Formula {
public:
  Conn kind;
  std::string rel;        // Atom
  std::vector<Var> args;  // Atom arguments, Manifest tuple, Eq pair
  Var dyn;                // Manifest right-hand side
  Var bound;              // Exists/Forall
  FormulaPtr a, b;        // children; unary connectives use only a

  static FormulaPtr atom(std::string rel, std::vector<Var> args);
  static FormulaPtr manifest(std::vector<Var> tuple, Var xi);
  static FormulaPtr eq(Var v, Var w);
  static FormulaPtr lnot(FormulaPtr f);
  static FormulaPtr land(FormulaPtr l, FormulaPtr r);
  static FormulaPtr lor(FormulaPtr l, FormulaPtr r);
  static FormulaPtr implies(FormulaPtr l, FormulaPtr r);
  static FormulaPtr iff(FormulaPtr l, FormulaPtr r);
  static FormulaPtr exists(Var v, FormulaPtr body);
  static FormulaPtr forall(Var v, FormulaPtr body);
  static FormulaPtr dia(FormulaPtr f);
  static FormulaPtr box(FormulaPtr f);
};

bool equal(const FormulaPtr& f, const FormulaPtr& g);

// Throws SortError when the formula does not type against the signature.
void check_sorted(const FormulaPtr& f, const Signature& sig);

std::vector<Var> free_vars(const FormulaPtr& f);

FormulaPtr desugar(const FormulaPtr& f);

std::string print_formula(const FormulaPtr& f);

// Parses the concrete syntax. Unannotated variables default to sort Stat
// unless an atom position forces another sort. print then parse is the
// structural identity; parse errors carry the byte offset.
FormulaPtr parse_formula(const std::string& text, const Signature& sig);

struct Classification {
  bool literal = false;
  bool sigma2 = false;           // already-prenex exists*forall* over a
                                 // quantifier-free modal-free body
  bool static_language = false;  // mentions static predicates (and =) only
  bool modal_free = false;
};

Classification classify(const FormulaPtr& f, const Signature& sig);

// exists -> dia exists, forall -> box forall, on the sugared AST.
// Throws ModalInputError if f already contains dia/box.
FormulaPtr potentialist_translate(const FormulaPtr& f);

// Replaces each atomic subformula psi mentioning a variable of xs by
// exists xs ((xs) <<- xi and psi). With full_wrap every atom is wrapped,
// matching the definition read literally.
FormulaPtr dynamic_substitute(const FormulaPtr& f, const std::vector<Var>& xs,
                              const Var& xi, bool full_wrap = false);

}  // namespace devmodal::logic
