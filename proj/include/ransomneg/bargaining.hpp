#pragma once

#include "ransomneg/loss_model.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ransomneg::bargaining {

struct BargainingInstance {
  VictimParams victim;
  Money r_min{0};
  std::optional<std::size_t> horizon;  // odd when present
};

class HorizonError : public std::runtime_error {
 public:
  enum class Kind {
    NoFeasibleHorizon,  // r_min >= v(1)
    NonOddHorizon,      // the unique last round is even
    InfiniteHorizon,    // r_min <= tail, bargaining never stops
    BoundaryTie,        // r_min equals some v(n); no strict crossing exists
  };

  HorizonError(Kind kind, std::size_t round, const std::string& what)
      : std::runtime_error(what), kind_(kind), round_(round) {}

  Kind kind() const { return kind_; }
  // The offending round for NonOddHorizon / BoundaryTie, 0 otherwise.
  std::size_t round() const { return round_; }

 private:
  Kind kind_;
  std::size_t round_;
};

class NoDeal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Offers r*_1..r*_N; offers[0] is round 1.
struct OfferSchedule {
  std::vector<Money> offers;

  const Money& at(std::size_t round) const { return offers.at(round - 1); }
  std::size_t rounds() const { return offers.size(); }
  bool operator==(const OfferSchedule&) const = default;
};

// The unique N with v(N) > r_min > v(N+1). Throws HorizonError.
std::size_t determine_horizon(const BargainingInstance& inst);

// Closed-form equilibrium offer of round n in an N-round game (N odd).
// Throws std::out_of_range / std::invalid_argument.
Money closed_form_offer(const LossProfile& profile, std::size_t n, std::size_t horizon);
Money closed_form_offer(const BargainingInstance& inst, std::size_t n, std::size_t horizon);

// Schedule from the closed form.
OfferSchedule closed_form_schedule(const LossProfile& profile, std::size_t horizon);

// Independent route: backward induction from the last round, where the
// attacker asks v(N) and each earlier round follows from the responder's
// indifference between accepting now and the next round's offer.
OfferSchedule backward_induction_offers(const LossProfile& profile, std::size_t horizon);
OfferSchedule backward_induction_offers(const BargainingInstance& inst, std::size_t horizon);

// Infinite-horizon split (min(v, r_max) + r_min) / 2. Throws NoDeal.
Money rubinstein_split(const Money& v, const Money& r_max, const Money& r_min);

struct Round1Limit {
  Money exact;           // b_1 + b_3 + b_5 + ... (+ tail / 2)
  Money approx;          // total_value / 2
  bool tail_attributed;  // true when half of a nonzero tail was added to exact
};

Round1Limit round1_limit(const LossProfile& profile);

// Feasibility of a deal in round n given the schedule.
bool deal_feasible(const OfferSchedule& schedule, std::size_t n, const Money& r_min);

// Warns when the marginal-loss assumption b_{N-1} << v(N+1) fails, i.e. when
// b_{N-1} / v(N+1) exceeds the ratio threshold.
std::optional<std::string> marginal_loss_lint(const LossProfile& profile, std::size_t horizon,
                                              const Money& threshold = Money(1, 10));

// ---------------------------------------------------------------------------
// Incomplete information: randomized victim strategy in rounds 2 and 4.

struct IncompleteInfoProfile {
  Money q;
  Money p_bar;
  Money rho;
};

struct IncompleteInfoBounds {
  Money q_lo, q_hi;  // B2 / V, B2 / B3
  Money rho_lo;      // max(0, (qV - B2) / v(3))
  Money p_bar_lo;    // v(2) / (rho v(3) + (1 - q) V)
};

IncompleteInfoBounds incomplete_info_bounds(const LossProfile& loss, const Money& q,
                                            const Money& rho);

// Throws std::invalid_argument when the profile violates its bounds.
void validate(const IncompleteInfoProfile& profile, const LossProfile& loss);

// The victim's low round-2 counteroffer q * V - B2.
Money low_counteroffer(const IncompleteInfoProfile& profile, const LossProfile& loss);

enum class AttackerMove { Accept, Counter };

struct BestResponse {
  AttackerMove move;
  Money counteroffer;  // r_3 when move == Counter, else 0
};

// Attacker's round-3 best response to the victim's round-2 offer r2.
BestResponse prop4_best_response(const IncompleteInfoProfile& profile, const Money& r2,
                                 const Money& r_min, const LossProfile& loss);

std::ostream& operator<<(std::ostream& os, HorizonError::Kind kind);

}  // namespace ransomneg::bargaining
