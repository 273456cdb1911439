#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <optional>

#include "devmodal/checker.hpp"

namespace devmodal::rationals {

// Exact arithmetic throughout; no floating point anywhere in this module.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

Rational rat_parse(const std::string& text);
std::string rat_text(const Rational& q);

// A declared limit: approximations with a shrinking error bound, tagged by
// the real they approximate so that two certified approximators of the same
// real can be recognized.
struct Target {
  std::string real_id;  // "pi", "sqrt2", "rat:<q>", ...
  std::function<Rational(std::size_t)> approx;
  std::function<Rational(std::size_t)> bound;  // |approx(s) - real| <= bound(s)
};

// An omega-indexed net of rationals. The optional modulus maps a positive
// epsilon to an index past which the net oscillates below epsilon; the
// optional declared periodicity supports refutations.
struct Net {
  std::function<Rational(std::size_t)> value;
  std::optional<std::function<std::size_t(const Rational&)>> modulus;
  std::optional<Target> target;
  std::optional<std::pair<std::size_t, std::size_t>> declared_periodic;  // start, period
};

Net const_net(const Rational& q);
// Partial sums of 4/1 - 4/3 + 4/5 - ...; the error bound at index s is
// 4/(2s+3) and the modulus derives from it.
Net leibniz_net();
// Partial sums of 16 atan(1/5) - 4 atan(1/239) expansions; same target.
Net machin_net();
// Best dyadic approximations of sqrt(2) at precision 2^-s.
Net dyadic_sqrt2_net();

Net add_nets(const Net& a, const Net& b);
Net mul_nets(const Net& a, const Net& b);

enum class CertStatus { Certified, Refuted, Unknown };

struct CauchyResult {
  CertStatus status = CertStatus::Unknown;
  std::size_t horizon = 0;
  std::string detail;
};

// Certified by a spot-checked modulus; refuted by a persistent separation
// on a declared-periodic net; unknown otherwise.
CauchyResult cauchy_convergent(const Net& n, std::size_t horizon);

// Certified when both nets target the same real and the interval
// consistency |a(s)-b(s)| <= bound_a(s)+bound_b(s) verifies at samples;
// refuted by an interval separation at any index.
CauchyResult cauchy_equiv(const Net& a, const Net& b, std::size_t horizon);

// The convergence formula over a finite grid model (states: subsets of the
// grid) with the net attached as a dynamic individual: box forall z>0 dia
// box exists x (x <<- xi and box |x-xi|<z translated potentialist-style).
// The formula is built as text and parsed, never hand-evaluated.
struct RhoReport {
  bool formula_holds = false;     // the parsed formula, via the checker
  bool chain_meta1 = false;       // per-state tail quantification, modal inner
  bool chain_meta2 = false;       // per-state tail quantification, exact inner
  bool chain_meta3 = false;       // exists-tail form, exact
  bool chain_cauchy = false;      // forall z exists t forall t',t'' >= t
  bool all_agree = false;
  std::string formula_text;
};

// Finite instance: grid must contain 0 and be closed under absolute
// differences of its members.
RhoReport eval_rho_finite(const std::vector<Rational>& grid,
                          const std::function<Rational(const std::set<Rational>&)>& net_on_states);

// omega instance: decided by the net's modulus (the chain's closing line).
CauchyResult eval_rho_omega(const Net& n, std::size_t horizon);

// The best-approximant net of a target over an increasing grid chain with a
// nonincreasing mesh: grids(s) must contain a point within mesh(s) of the
// target. Ties break to the least rational.
Net d_r_net(const Target& r, const std::function<std::vector<Rational>(std::size_t)>& grids,
            const std::function<Rational(std::size_t)>& mesh);

// Statewise field relations on a finite grid: Less, Sum, Prod, Zero.
structures::FiniteStructure grid_structure(const std::vector<Rational>& grid);

// Rows (value, error bound) of the alternating-series table.
std::vector<std::pair<Rational, Rational>> leibniz_table(std::size_t rows);

}  // namespace devmodal::rationals
