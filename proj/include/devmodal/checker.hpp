#pragma once

#include <optional>

#include "devmodal/devmodel.hpp"

namespace devmodal::check {

using model::DevelopmentModel;
using model::StateId;
using structures::Assignment;
using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

// Possible-worlds satisfaction at a state. Atoms with a parameter missing
// from the state's domain are false there; equality is rigid identifier
// equality. Quantifiers range over the state's domain of the bound sort,
// dia over accessible states.
bool satisfies(const DevelopmentModel& m, const StateId& s, const logic::FormulaPtr& f,
               const Assignment& asg);

// M |= f(asg): satisfaction at every state.
bool satisfies_globally(const DevelopmentModel& m, const logic::FormulaPtr& f,
                        const Assignment& asg);

struct TeleologyReport {
  bool verdict = false;
  // state -> the dia-witness t at which box f holds, when one exists
  std::map<StateId, std::optional<StateId>> witness;
  std::string formula;
};

// M |= dia box f(asg). Uses the directedness collapse (one witness state
// serves every base state); tele_naive is the unoptimized comparison point.
TeleologyReport tele(const DevelopmentModel& m, const logic::FormulaPtr& f,
                     const Assignment& asg);
bool tele_naive(const DevelopmentModel& m, const logic::FormulaPtr& f,
                const Assignment& asg);

struct ConvergeResult {
  bool union_holds = false;   // union structure satisfies the literal
  bool some_state = false;    // some tuple-containing state satisfies it
  bool teleological = false;  // M |= dia box literal
  bool agree = false;
};

ConvergeResult check_converge(const DevelopmentModel& m, const logic::FormulaPtr& literal,
                              const Assignment& asg);

struct MirrorResult {
  bool union_holds = false;
  bool modal_holds = false;   // at every parameter-containing state
  bool states_agree = false;  // all parameter-containing states gave one value
  bool agree = false;
};

// Union satisfaction of a static-language modal-free formula against the
// full modalization evaluated at the parameter-containing states.
MirrorResult check_mirroring(const DevelopmentModel& m, const logic::FormulaPtr& f,
                             const Assignment& asg);

struct CmpViolation {
  std::string schema;
  std::string formula;
  StateId state;
  std::string assignment;
};

struct CmpReport {
  std::size_t instances = 0;
  std::vector<CmpViolation> violations;
  bool ok() const { return violations.empty(); }
};

// K, T, 4, G instances for each sample formula (plus K over consecutive
// sample pairs), and the stability schema for literal samples. Instances
// with free variables are closed over all parameter tuples and checked at
// every state containing the parameters.
CmpReport check_cmp(const DevelopmentModel& m,
                    const std::vector<logic::FormulaPtr>& sample);

// At a state where delta manifests as the tuple bound by xs in asg,
// f(tuple) and f(tuple dynamically replaced by delta) agree.
bool check_dynsub(const DevelopmentModel& m, const StateId& s, const logic::FormulaPtr& f,
                  const std::vector<logic::Var>& xs, const Assignment& asg,
                  const Element& delta);

struct Sigma2Certificate {
  Tuple witnesses;        // values for the exists block
  StateId state;          // the subset state of fin_dev(u) holding them
  std::size_t verified_supersets = 0;
};

// For a prenex exists*forall* formula true in u, produces the witness block
// plus the fin_dev state from which the formula persists, verified over
// every superset state. Returns nothing when u does not satisfy f.
std::optional<Sigma2Certificate> sigma2_certificate(const FiniteStructure& u,
                                                    const logic::FormulaPtr& f);

struct ReflectionResult {
  DevelopmentModel model;
  // one row per (formula index, parameter tuple): teleological verdict
  struct Row {
    std::size_t formula;
    Tuple params;
    bool tele = false;
  };
  std::vector<Row> rows;
  bool all_tele() const {
    for (const Row& r : rows)
      if (!r.tele) return false;
    return true;
  }
};

// States are pairs (subset of gamma, subset of params) ordered by
// componentwise inclusion. The dynamic unary marker relation manifests at
// each state as the least chain member that contains the parameter subset
// and reflects every chosen formula at every parameter tuple.
ReflectionResult reflection_dev(const FiniteStructure& u,
                                const std::vector<FiniteStructure>& chain,
                                const std::vector<logic::FormulaPtr>& gamma,
                                const std::vector<Element>& params,
                                const std::string& marker = "nu");

}  // namespace devmodal::check
