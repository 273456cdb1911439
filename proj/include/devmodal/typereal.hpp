#pragma once

#include "devmodal/omega.hpp"

namespace devmodal::typereal {

// Evaluation in the ambient run of growing structures. `absolute` marks
// values justified by polarity (existential truths and universal
// refutations transfer to every larger segment); everything else is
// stabilized across three growing segments and flagged accordingly.
struct AmbientValue {
  bool value = false;
  bool absolute = false;
};

// An omega-indexed family of growing structures with a direct evaluator;
// the arithmetic preset computes its atoms instead of materializing
// relation tables, so evaluation stays cheap at large segment sizes.
class Ambient {
 public:
  using EvalAtSize = std::function<bool(const logic::FormulaPtr& f,
                                        const std::map<std::string, long long>& asg,
                                        long long size)>;

  Ambient(logic::SignaturePtr sig, EvalAtSize eval)
      : sig_(std::move(sig)), eval_(std::move(eval)) {}

  const logic::SignaturePtr& sig() const { return sig_; }

  // args bind the formula's free variables (name order) to element indices.
  AmbientValue eval(const logic::FormulaPtr& f, const std::vector<long long>& args) const;

 private:
  logic::SignaturePtr sig_;
  EvalAtSize eval_;
};

// The standard-arithmetic preset over Z, S, Plus, Times, Leq.
Ambient arith_ambient();

// An enumerated prefix of a type: formulas sharing the same free variables.
// A generator, when present, extends the enumeration past the stored
// prefix (the built-in unbounded families carry one; file-loaded fragments
// stop at their stored prefix).
struct TypeFragment {
  std::vector<logic::FormulaPtr> prefix;
  std::vector<logic::Var> vars;  // shared free variables, name order
  std::function<logic::FormulaPtr(std::size_t)> generator;  // may be empty

  logic::FormulaPtr at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (generator) return generator(i);
    return nullptr;
  }
};

// One formula per line, over the ambient signature.
TypeFragment parse_type_fragment(const std::string& text, const Ambient& ambient);

// "the i-th numeral is below x" for i = 0..count-1, generated beyond.
TypeFragment greater_than_type(std::size_t count);
// x = 0 as a one-formula constant type.
TypeFragment zero_type();

struct RealizerNet {
  // tuple of element indices per state
  std::function<std::vector<long long>(std::size_t)> at;
};

// The least tuple (by max-then-lex enumeration) satisfying the first s+1
// enumerated formulas; throws PrefixUnrealizable naming the failing index
// when the bounded search exhausts.
RealizerNet d_p(const TypeFragment& frag, const Ambient& ambient,
                long long search_bound = 128);

struct TeleVerdict {
  std::size_t formula = 0;
  bool ok = false;
  std::size_t from_state = 0;
  std::string counterexample;  // empty when ok
};

// For each stored prefix formula p_i: checked true at every state in
// [i, horizon] along the realizer net.
std::vector<TeleVerdict> tele_type(const TypeFragment& frag, const Ambient& ambient,
                                   std::size_t horizon);
std::vector<TeleVerdict> tele_type_net(const TypeFragment& frag, const Ambient& ambient,
                                       const RealizerNet& net, std::size_t horizon);

enum class LosVerdict { Satisfied, Unsatisfied, UltrafilterDependent, Unclassified };

struct EventualPattern {
  enum class Kind { Finite, Cofinite, Periodic, Unclassified };
  Kind kind = Kind::Unclassified;
  std::size_t tail_start = 0;        // stabilization witness
  std::size_t period = 0;            // Periodic only
  std::vector<std::size_t> members;  // Finite only: the truth set
  std::size_t checked_to = 0;
  bool by_construction = false;  // cofinite via prefix membership
};

struct LosResult {
  LosVerdict verdict = LosVerdict::Unclassified;
  EventualPattern pattern;
  bool chain_ok = true;  // prefix membership => tele true => not unsatisfied
};

// Classifies { s : ambient |= f(D(s)) } as finite / cofinite / periodic by
// prefix-membership certificates and stabilization with margin, then maps
// the class to the ultrapower verdict: cofinite truth sets are in every
// non-principal ultrafilter, finite ones in none, genuinely recurring
// alternation depends on the ultrafilter.
LosResult eventual_los(const TypeFragment& frag, const Ambient& ambient,
                       const logic::FormulaPtr& f, std::size_t horizon);

std::string los_text(LosVerdict v);

}  // namespace devmodal::typereal
