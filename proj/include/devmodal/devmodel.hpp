#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "devmodal/structures.hpp"

namespace devmodal::model {

using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

using StateId = std::string;

// Accessibility is stored explicitly; nothing is closed or repaired
// automatically. A non-transitive input is a validation failure.
struct Frame {
  std::vector<StateId> states;
  std::set<std::pair<StateId, StateId>> order;  // reflexive pairs implicit

  bool le(const StateId& s, const StateId& t) const {
    return s == t || order.count({s, t}) != 0;
  }
  std::vector<StateId> successors(const StateId& s) const;
  bool is_reflexive_transitive_directed(std::string* why = nullptr) const;
};

struct Violation {
  std::string clause;  // "frame", "manifestation", "monotonicity", "constant-sort"
  std::string detail;
  bool warning = false;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool valid() const {
    for (const Violation& v : items)
      if (!v.warning) return false;
    return true;
  }
  std::string to_text() const;
};

class DevelopmentModel {
public:
  DevelopmentModel() = default;
  DevelopmentModel(Frame frame, std::map<StateId, FiniteStructure> assign);

  const Frame& frame() const { return frame_; }
  const logic::SignaturePtr& sig() const { return sig_; }
  const FiniteStructure& at(const StateId& s) const;
  const std::vector<StateId>& states() const { return frame_.states; }

  // There is always a state above any two states in a valid model; this
  // returns one such join (first in state order).
  std::optional<StateId> join(const StateId& s, const StateId& t) const;

private:
  Frame frame_;
  std::map<StateId, FiniteStructure> assign_;
  logic::SignaturePtr sig_;
};

// Checks Definition-level clauses: (a) frame reflexive/transitive/directed,
// antisymmetry as a warning; (b) total unique manifestation per state;
// (c) static substructure along accessibility; constancy of non-Stat sorts.
ValidationReport validate(const DevelopmentModel& m);

// States are all subsets of u's Stat domain ordered by inclusion, each
// carrying the induced substructure. u must not populate any Dyn sort.
DevelopmentModel fin_dev(const FiniteStructure& u);

StateId subset_state_id(const std::set<Element>& subset);

// Every state of the given frame carries u itself.
DevelopmentModel simple_dev(const FiniteStructure& u, const Frame& a);

struct FunctionalDynamicTuple {
  int arity = 1;
  std::map<StateId, Tuple> assignment;  // total over states, tuples from Stat
};

// Derives the functional tuple induced by an existing dynamic element.
FunctionalDynamicTuple induced_tuple(const DevelopmentModel& m, const Element& delta,
                                     int arity);

// Adds one fresh Dyn element per functional tuple, manifesting per state as
// the tuple's value. Returns the extension; fresh element names are reported
// through new_names when non-null.
DevelopmentModel extend_by_dynamic(const DevelopmentModel& m,
                                   const std::vector<FunctionalDynamicTuple>& ds,
                                   std::vector<Element>* new_names = nullptr);

FiniteStructure union_of(const DevelopmentModel& m);

struct StatesContaining {
  std::set<StateId> states;
  bool tuple_in_union = false;
};

// Components are (sort, element) pairs so mixed-sort tuples are supported.
StatesContaining states_containing(const DevelopmentModel& m,
                                   const std::vector<std::pair<logic::Sort, Element>>& tuple);

// Model files:
//   state s0 { <structure body> }
//   edge s0 <= s1
//   dyn d0 : Dyn1 { s0 -> a ; s1 -> b }
// Reflexive edges are implicit; listed edges are taken as given (no closure).
DevelopmentModel parse_devmodel(const std::string& text);

// Serialization in the model file format (manifestations inlined per state).
std::string model_to_text(const DevelopmentModel& m);

}  // namespace devmodal::model
