#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "devmodal/devmodel.hpp"

namespace devmodal::forcing {

// Hereditarily finite set in canonical form: children sorted by the
// structural total order and deduplicated, so extensional equality is
// structural equality.
class HFSet {
 public:
  HFSet() = default;
  explicit HFSet(std::vector<HFSet> children);

  const std::vector<HFSet>& children() const { return kids_; }
  bool empty() const { return kids_.empty(); }
  int rank() const;

  static int cmp(const HFSet& a, const HFSet& b);
  bool operator==(const HFSet& o) const { return cmp(*this, o) == 0; }
  bool operator<(const HFSet& o) const { return cmp(*this, o) < 0; }

  std::string to_text() const;  // {{},{{}}} style

 private:
  std::vector<HFSet> kids_;
};

struct Poset {
  std::vector<std::string> elems;
  std::set<std::pair<std::string, std::string>> le;  // reflexive pairs implicit
  std::string bottom;

  bool leq(const std::string& a, const std::string& b) const {
    return a == b || le.count({a, b}) != 0;
  }
  bool contains(const std::string& e) const;
  // partial order with 0 below everything
  bool well_formed(std::string* why = nullptr) const;
};

// Poset files: "elem p q r", "le p q", "bottom p".
Poset parse_poset(const std::string& text);

// All posets over the first n labels of `labels` that have a bottom
// element, by raw enumeration of antisymmetric transitive relations.
std::vector<Poset> enumerate_posets(std::size_t n);

// A set-name over a poset: finitely many (name, condition) pairs, canonical.
class PName {
 public:
  PName() = default;
  explicit PName(std::vector<std::pair<PName, std::string>> pairs);

  const std::vector<std::pair<PName, std::string>>& pairs() const { return pairs_; }
  int rank() const;
  std::size_t width() const { return pairs_.size(); }

  static int cmp(const PName& a, const PName& b);
  bool operator==(const PName& o) const { return cmp(*this, o) == 0; }
  bool operator<(const PName& o) const { return cmp(*this, o) < 0; }

  std::string to_text() const;  // {} | {(tau,p),...}

 private:
  std::vector<std::pair<PName, std::string>> pairs_;
};

// Name literals: nested "{(name, cond), ...}".
PName parse_pname(const std::string& text, const Poset& p);

using Ideal = std::set<std::string>;

bool is_ideal(const Poset& p, const Ideal& i);
bool is_upward_dense(const Poset& p, const std::set<std::string>& d);
// Generic: meets every upward-dense subset; enumeration capped at |P| <= 12.
bool is_generic_ideal(const Poset& p, const Ideal& i);

std::vector<Ideal> all_ideals(const Poset& p, bool include_empty = false);

// Maximal elements are exactly what every upward-dense set must contain,
// so for finite posets genericity has a direct characterization.
bool contains_maximal_element(const Poset& p, const Ideal& i);

// All names of tree rank <= rank_bound with at most width_bound pairs per
// name, deterministic order, deduplicated. Throws when the count explodes.
std::vector<PName> gen_pnames(const Poset& p, int rank_bound, int width_bound,
                              std::size_t cap = 200000);

HFSet val(const PName& tau, const Ideal& i);

// Membership of sigma in tau decided at condition s: some pair of tau has a
// condition below s.
bool in_star(const PName& sigma, const PName& tau, const Poset& p,
             const std::string& s);

// Eventual membership: some pair of tau has its condition inside the ideal.
bool in_tilde(const PName& sigma, const PName& tau, const Ideal& i);

// States are the ideal's conditions, ordered by the poset; every state
// carries the constant name universe with the dynamic membership relation
// "In" read at that condition. The ideal must be non-empty (a development
// model needs a state).
model::DevelopmentModel forcing_dev_model(const Poset& p, const Ideal& i,
                                          const std::vector<PName>& names);

struct TeleMembershipResult {
  bool tele = false;       // dia box In(sigma,tau) at every state
  bool eventual = false;   // dia In(sigma,tau) at every state
  bool pairwise = false;   // a pair of tau is conditioned inside the ideal
  bool agree = false;
};

TeleMembershipResult tele_membership(const model::DevelopmentModel& m,
                                     const Poset& p, const Ideal& i,
                                     const PName& sigma, const PName& tau);

// Mostowski collapse of a membership relation on names, given as the
// function from a name to its predecessors; throws NotWellFounded (with a
// cycle witness) on cyclic input.
std::map<PName, HFSet> mostowski(
    const std::vector<PName>& names,
    const std::function<std::vector<PName>(const PName&)>& predecessors);

struct CollapseCheck {
  bool pointwise = true;   // mos(tau) == val(tau, I) for every name
  bool image_equal = true; // {mos(tau)} == {val(tau, I)} extensionally
  std::size_t instances = 0;
  std::optional<std::string> first_mismatch;
};

// The collapse of in_tilde equals the evaluation map val.
CollapseCheck check_collapse(const Poset& p, const Ideal& i,
                             const std::vector<PName>& names);

// D_tau(s) = { (sigma, bottom) : some pair (sigma, q) of tau has q <= s },
// itself a name; the induced functional dynamic tuple over the ideal-model.
PName d_tau_at(const PName& tau, const Poset& p, const std::string& s);

}  // namespace devmodal::forcing
