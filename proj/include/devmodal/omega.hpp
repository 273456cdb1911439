#pragma once

#include <functional>

#include "devmodal/devmodel.hpp"

namespace devmodal::omega {

using structures::Assignment;
using structures::FiniteStructure;

// Eventually periodic omega-indexed development model: state n carries
// structures[n] for n < transient and structures[transient + (n-transient)
// mod period] afterwards. The frame is (omega, <=).
struct Lasso {
  std::size_t transient = 0;  // mu
  std::size_t period = 1;     // pi >= 1
  std::vector<FiniteStructure> structures;  // transient + period entries

  std::size_t rep(std::size_t n) const {
    return n < transient ? n : transient + (n - transient) % period;
  }
  const FiniteStructure& at(std::size_t n) const { return structures[rep(n)]; }
  std::size_t size() const { return transient + period; }
};

// Clause checks on the finite quotient: manifestation totality per
// representative state, static monotonicity across consecutive edges
// including the wrap edge, constant non-Stat sorts.
model::ValidationReport validate_lasso(const Lasso& l);

// Exact satisfaction at state n. Truth of every subformula is eventually
// periodic with the lasso's own (transient, period); dia/box on the cycle
// reduce to a disjunction/conjunction over the cycle block.
bool lasso_satisfies(const Lasso& l, std::size_t n, const logic::FormulaPtr& f,
                     const Assignment& asg);

// Comparison evaluator: unrolls the lasso to `horizon` linearly ordered
// states and evaluates three-valued, +1/-1/0; dia without a witness in the
// window and box without a counterexample are 0 (truncated).
int unrolled_satisfies(const Lasso& l, std::size_t n, const logic::FormulaPtr& f,
                       const Assignment& asg, std::size_t horizon);

// The finite development model with states 0..size-1 where cycle states
// reach each other (wrap accessibility); agrees with lasso_satisfies.
model::DevelopmentModel quotient_model(const Lasso& l);

// A deterministic infinite run of structures. `uniform` declares that the
// stream is produced by a stage-uniform rule, which the bounded checker's
// induction certificates require.
struct StructureStream {
  logic::SignaturePtr sig;
  std::string name;
  std::function<FiniteStructure(std::size_t)> at;
  bool uniform = false;
};

enum class VerdictKind { True, False, Unknown };

struct BoundedVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::size_t horizon = 0;
  std::string certificate;  // empty for Unknown

  bool is_true() const { return kind == VerdictKind::True; }
  bool is_false() const { return kind == VerdictKind::False; }
  std::string to_text() const;
};

// Three-valued bounded evaluation at state 0. True/False are returned only
// with a certificate: a witness/counterexample state inside the horizon, a
// persistence argument (static facts and domains only grow), or an
// induction over births/states on a stream declared uniform.
BoundedVerdict bounded_satisfies(const StructureStream& stream, std::size_t horizon,
                                 const logic::FormulaPtr& f, const Assignment& asg);

// Initial segments {0..n} of arithmetic with Z, S, Plus, Times, Leq.
StructureStream arith_basic_stream();

// Growing symmetric dyadic grids of rationals with Less, Sum, Zero;
// refinement depth is capped at k.
StructureStream rationals_grid_stream(int k);

// Parse a lasso file: "transient <mu>", "period <pi>", then one
// "struct { ... }" block per representative state.
Lasso parse_lasso(const std::string& text);

}  // namespace devmodal::omega
