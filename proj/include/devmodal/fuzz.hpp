#pragma once

#include "devmodal/devmodel.hpp"
#include "devmodal/rng.hpp"

namespace devmodal::fuzz {

struct ModelOptions {
  std::size_t max_elements = 4;   // union Stat domain size, at least 1
  std::size_t max_states = 5;     // plus a forced top state
  std::size_t max_dyn = 2;        // dynamic individuals
  bool dynamic_predicate = true;  // include a unary dynamic predicate
};

// A small signature: static R/1, S/2, optionally dynamic P/1 and Dyn1.
logic::SignaturePtr fuzz_signature(Rng& rng, const ModelOptions& opt);

// A valid development model over the signature: random directed partial
// order with a top state, monotone domains, static relations induced from a
// random union structure, dynamic facts and manifestations varying freely.
model::DevelopmentModel fuzz_model(Rng& rng, const logic::SignaturePtr& sig,
                                   const ModelOptions& opt);

struct FormulaOptions {
  int quantifier_depth = 2;
  int modal_depth = 0;
  std::size_t free_vars = 1;     // drawn from x0, x1, ...
  bool static_only = true;       // restrict to static predicates and equality
  bool allow_manifest = false;   // allow manifestation atoms (needs Dyn1)
};

logic::FormulaPtr fuzz_formula(Rng& rng, const logic::Signature& sig,
                               const FormulaOptions& opt);

// Literal of the static language (atom or negated atom over Stat).
logic::FormulaPtr fuzz_literal(Rng& rng, const logic::Signature& sig,
                               std::size_t free_vars);

// Assignment of the formula's free variables to elements of the model's
// union structure (empty option when a needed domain is empty).
std::optional<structures::Assignment> fuzz_assignment(Rng& rng,
                                                      const model::DevelopmentModel& m,
                                                      const logic::FormulaPtr& f);

// Three-state fork s0 <= s1, s0 <= s2 with a static fact present only at s1.
// Not directed; the G schema fails on it.
model::DevelopmentModel fork_model();

}  // namespace devmodal::fuzz
