#pragma once

#include "ransomneg/money.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ransomneg::mechanism {

// Widest intermediate product the fixed-point semantics (and the circuit)
// will carry.
inline constexpr unsigned kDefaultMaxWidth = 64;

struct MechanismParams {
  Money q;       // victim's pay-probability in round 4, in (0, 1/2]
  Money p_bar;   // probability of the low round-2 counteroffer, in [1/2, 1]
  unsigned k_theta = 8;
  unsigned k = 8;

  bool operator==(const MechanismParams&) const = default;
};

// Throws std::invalid_argument unless p_bar (1 - q) = 1/2 exactly,
// q in (0, 1/2], p_bar in [1/2, 1] and both bit-counts are in [1, 62].
void validate(const MechanismParams& params);

// Non-fatal findings (currently: q not dyadic, so fixed-point scaling rounds).
std::vector<std::string> warnings(const MechanismParams& params);

// p_bar = 1 / (2 (1 - q)).
Money p_bar_for(const Money& q);

struct ScaledParams {
  std::uint64_t p_scale = 0;      // floor(p_bar 2^k)
  std::uint64_t q_scale = 0;      // floor(q 2^k)
  std::uint64_t inv_q_scale = 0;  // floor(2^k / q)

  bool operator==(const ScaledParams&) const = default;
};

class WidthOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws WidthOverflow if a constant does not fit in 64 bits.
ScaledParams scale(const MechanismParams& params);

// Bit widths of the two constant multiplications; both products must fit in
// max_width. Throws WidthOverflow.
struct ArithmeticWidths {
  unsigned q_product;    // k_theta + k
  unsigned inv_bits;     // bit width of inv_q_scale
  unsigned inv_product;  // k_theta + inv_bits
  unsigned r3;           // inv_product - k, width of r2 / q after the shift
};
ArithmeticWidths arithmetic_widths(const MechanismParams& params, const ScaledParams& scaled,
                                   unsigned max_width = kDefaultMaxWidth);

struct Report {
  Money theta_v;
  Money theta_a;
};

struct MechanismOutcome {
  bool alpha = false;
  Money r_f{0};
  bool sigma = false;

  bool operator==(const MechanismOutcome&) const = default;
};

// Outcome for a fixed pair of coin results: low_offer is the round-2 coin
// (probability p_bar), pay is the round-4 coin (probability q).
MechanismOutcome outcome_branch(const MechanismParams& params, const Report& report,
                                bool low_offer, bool pay);

// Coins drawn as u0 < p_bar and u1 < q with u0, u1 in [0, 1).
MechanismOutcome outcome_real(const MechanismParams& params, const Report& report,
                              const Money& u0, const Money& u1);

struct FixedReport {
  std::uint64_t theta_v = 0;
  std::uint64_t theta_a = 0;
};

struct FixedOutcome {
  bool alpha = false;
  std::uint64_t r_f = 0;
  bool sigma = false;

  bool operator==(const FixedOutcome&) const = default;
};

// Integer semantics realized by the circuit: q theta_v = (q_scale theta_v) >> k,
// r2 / q = (r2 inv_q_scale) >> k, coins s0 < p_scale and s1 < q_scale.
// Throws std::invalid_argument on out-of-range inputs, WidthOverflow when an
// intermediate product exceeds max_width bits.
FixedOutcome outcome_fixed(const MechanismParams& params, const ScaledParams& scaled,
                           const FixedReport& report, std::uint64_t s0, std::uint64_t s1,
                           unsigned max_width = kDefaultMaxWidth);

// Branch probabilities as (low_offer, pay) -> probability.
Money branch_probability(const MechanismParams& params, bool low_offer, bool pay);

// Attacker's expected utility beta - alpha theta_a over both coins.
Money expected_attacker_utility(const MechanismParams& params, const Money& theta_a_true,
                                const Money& report_a, const Money& theta_v_report);

struct UniformPrior {
  Money lo{0};
  Money hi{1};

  Money cdf(const Money& x) const;
};

// Victim's interim expected utility alpha theta_v - beta, averaged over the
// coins and over a truthful attacker whose type follows the prior.
Money expected_victim_utility(const MechanismParams& params, const Money& theta_v_true,
                              const Money& report_v, const UniformPrior& prior = {});

// Expected payment of a truthful victim when theta_a <= theta_v:
// (1 - p_bar + p_bar q) theta_v, which is theta_v / 2 on the BIC surface.
Money expected_payment(const MechanismParams& params, const Money& theta_v);

// ---------------------------------------------------------------------------
// Grid verification of incentive compatibility.

struct AttackerDominanceReport {
  std::size_t cases = 0;
  std::size_t violations = 0;
  Money worst_gap{0};  // max over cases of best deviation minus truthful utility
};

// For every (theta_v report, theta_a, attacker report) on the grid i/(n-1) of
// [0, 1], compares the truthful report against each alternative exactly.
AttackerDominanceReport verify_attacker_dominance(const MechanismParams& params,
                                                  std::size_t grid_points);

struct VictimOptimalityReport {
  std::size_t cases = 0;
  std::size_t violations = 0;
  Money worst_distance{0};  // max |argmax report - theta_v|
  Money step{0};
};

// Reports on the grid j 2^-step_exp of [0, 1]; theta_v values are the given
// list. A case passes when the best report lies within one grid step.
VictimOptimalityReport verify_victim_optimality(const MechanismParams& params,
                                                unsigned step_exp,
                                                const std::vector<Money>& theta_values,
                                                const UniformPrior& prior = {});

}  // namespace ransomneg::mechanism
