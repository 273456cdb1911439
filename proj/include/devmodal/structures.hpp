#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "devmodal/logic.hpp"

namespace devmodal::structures {

using Element = std::string;
using Tuple = std::vector<Element>;
using Assignment = std::map<std::string, Element>;  // variable name -> element

// A finite sorted relational structure. Domains are kept sorted; element
// identifiers are opaque strings compared by identity.
class FiniteStructure {
public:
  FiniteStructure() = default;
  FiniteStructure(logic::SignaturePtr sig,
                  std::map<logic::Sort, std::vector<Element>> domains,
                  std::map<std::string, std::set<Tuple>> interp);

  const logic::SignaturePtr& sig() const { return sig_; }
  const std::vector<Element>& domain(const logic::Sort& s) const;
  bool has_element(const logic::Sort& s, const Element& e) const;
  const std::set<Tuple>& tuples(const std::string& rel) const;
  bool holds(const std::string& rel, const Tuple& t) const;

  std::size_t domain_size(const logic::Sort& s) const { return domain(s).size(); }

  // Copy with the given relation replaced.
  FiniteStructure with_relation(const std::string& rel, std::set<Tuple> tuples) const;
  // Copy with extra elements added to a sort.
  FiniteStructure with_elements(const logic::Sort& s, const std::vector<Element>& es) const;
  // Copy with a different (compatible) signature.
  FiniteStructure with_signature(logic::SignaturePtr sig) const;

  // Induced substructure on the given Stat subset (non-Stat domains kept).
  FiniteStructure induced(const std::set<Element>& stat_subset) const;

  bool same_contents(const FiniteStructure& o) const;

  std::string to_text() const;

private:
  logic::SignaturePtr sig_;
  std::map<logic::Sort, std::vector<Element>> domains_;
  std::map<std::string, std::set<Tuple>> interp_;
};

// First-order evaluation in a single structure; f must be modal-free and
// the assignment must land inside the structure's domains.
bool eval_in_structure(const FiniteStructure& u, const logic::FormulaPtr& f,
                       const Assignment& asg);

// u is a K-substructure of v: domains included sort-wise, and each R in K
// restricted to u's domain product agrees with u's interpretation.
bool substructure_check(const FiniteStructure& u, const FiniteStructure& v,
                        const std::set<std::string>& k_rels);

// Static substructure: K = all static relation symbols.
bool static_substructure_check(const FiniteStructure& u, const FiniteStructure& v);

// For all tuples from u and formulas in K, u and v agree. Brute force.
bool elementary_check(const FiniteStructure& u, const FiniteStructure& v,
                      const std::vector<logic::FormulaPtr>& k_formulas);

FiniteStructure union_structure(const std::vector<FiniteStructure>& ws);

// { a-tuple in u : u |= f(a) }, free variables taken in name order.
std::set<Tuple> interpret(const logic::FormulaPtr& f, const FiniteStructure& u);

// Restrict every quantifier to the unary marker nu: exists x (nu(x) and ...),
// forall x (nu(x) -> ...).
logic::FormulaPtr relativize(const logic::FormulaPtr& f, const std::string& nu);

// Line-oriented structure files:
//   sort Stat = a b c
//   rel R(Stat,Stat) = (a,b) (b,c)
//   dynrel P(Stat) = (a)
//   dynsort Dyn1 = d0
//   manifest d0 = a
// '#' starts a comment. Duplicate declarations are rejected.
FiniteStructure parse_structure(const std::string& text);

}  // namespace devmodal::structures
