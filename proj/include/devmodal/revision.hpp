#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "devmodal/omega.hpp"

namespace devmodal::revision {

// Boolean sentence bodies over truth atoms T(name) and base-fact atoms.
struct BoolExpr;
using BoolPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
  enum class Kind { True, False, TAtom, BaseAtom, Not, And, Or, Implies, Iff };
  Kind kind;
  std::string name;  // TAtom / BaseAtom
  BoolPtr a, b;

  static BoolPtr constant(bool v);
  static BoolPtr t_atom(std::string name);
  static BoolPtr base_atom(std::string name);
  static BoolPtr lnot(BoolPtr x);
  static BoolPtr binary(Kind k, BoolPtr l, BoolPtr r);
};

std::string print_bool(const BoolPtr& e);

// A self-referential sentence network: named sentences with boolean bodies
// plus a fixed valuation of base facts.
struct SentenceNetwork {
  std::vector<std::string> names;           // declaration order
  std::map<std::string, BoolPtr> body;
  std::vector<std::string> base_names;
  std::map<std::string, bool> base_val;
};

// Network files:
//   name lambda : not T(lambda)
//   base b = true
//   name s : T(lambda) and b()   # b() and b both accepted in bodies
SentenceNetwork parse_network(const std::string& text);

using Hypothesis = std::set<std::string>;

bool eval_body(const BoolPtr& e, const SentenceNetwork& net, const Hypothesis& p);

// One revision step: the names whose bodies hold under the hypothesis.
Hypothesis gamma(const SentenceNetwork& net, const Hypothesis& p);

struct RevisionLasso {
  std::size_t transient = 0;
  std::size_t period = 1;
  std::vector<Hypothesis> hypotheses;  // transient + period entries

  const Hypothesis& at(std::size_t n) const {
    return hypotheses[n < transient ? n : transient + (n - transient) % period];
  }
};

// Iterates gamma from p0 until the first repeat; the pigeonhole bound
// 2^names + 1 always terminates it.
RevisionLasso revision_sequence(const SentenceNetwork& net, const Hypothesis& p0);

// The omega-frame model whose state n carries the constant base structure
// with dynamic predicate T read from the n-th revision hypothesis.
omega::Lasso truth_dev_model(const SentenceNetwork& net, const Hypothesis& p0);

struct RootRow {
  Hypothesis p0;
  std::size_t transient = 0;
  std::size_t period = 1;
  // per name: +1 box T, -1 box not T, 0 oscillates
  std::map<std::string, int> box_class;
};

struct MultiRootReport {
  std::vector<RootRow> roots;

  // every root decides T(name) one way; both kinds occur
  bool split_decided(const std::string& name) const;
  // every root satisfies dia T(name) and dia not T(name)
  bool oscillates_everywhere(const std::string& name) const;
};

MultiRootReport multi_root(const SentenceNetwork& net);

struct UctViolation {
  std::string axiom;
  std::string sentence;
};

struct UctReport {
  std::size_t fragment_size = 0;
  std::size_t checks = 0;
  std::vector<UctViolation> violations;  // one-step compositional reading
  bool ok() const { return violations.empty(); }
};

// Compositional truth axioms for the pair (Q, gamma(Q)) over the depth-d
// fragment: membership of a compound in gamma(Q) against membership of its
// parts. Holds by construction of the compositional extension; kept as a
// regression guard.
UctReport uct_fragment_check(const SentenceNetwork& net, const Hypothesis& q, int depth);

struct BatteryRow {
  Hypothesis q;
  bool battery = false;   // body-constraint coherence: some P revises to q
  bool in_image = false;  // q is gamma(P) for some P, by direct enumeration
};

// Exhaustive tabulation over all hypotheses of a small network; the two
// columns are computed by independent routes and expected to agree.
std::vector<BatteryRow> battery_tabulation(const SentenceNetwork& net);

}  // namespace devmodal::revision
