#include "ransomneg/bargaining.hpp"

#include <algorithm>

namespace ransomneg::bargaining {

std::ostream& operator<<(std::ostream& os, HorizonError::Kind kind) {
  switch (kind) {
    case HorizonError::Kind::NoFeasibleHorizon: return os << "NoFeasibleHorizon";
    case HorizonError::Kind::NonOddHorizon: return os << "NonOddHorizon";
    case HorizonError::Kind::InfiniteHorizon: return os << "InfiniteHorizon";
    case HorizonError::Kind::BoundaryTie: return os << "BoundaryTie";
  }
  return os;
}

std::size_t determine_horizon(const BargainingInstance& inst) {
  const LossProfile& p = inst.victim.profile;
  const Money& r_min = inst.r_min;
  using Kind = HorizonError::Kind;

  if (r_min >= p.residual_value(1))
    throw HorizonError(Kind::NoFeasibleHorizon, 0,
                       "attacker reservation is not below the value after round 1");
  if (r_min <= p.tail())
    throw HorizonError(Kind::InfiniteHorizon, 0,
                       "attacker reservation does not exceed the tail mass; no last round");

  // v is non-increasing and equals tail < r_min from round M on, so the scan ends.
  std::size_t n = 1;
  while (p.residual_value(n + 1) > r_min) ++n;
  if (p.residual_value(n + 1) == r_min)
    throw HorizonError(Kind::BoundaryTie, n + 1,
                       "attacker reservation equals v(" + std::to_string(n + 1) + ")");
  if (n % 2 == 0)
    throw HorizonError(Kind::NonOddHorizon, n,
                       "last bargaining round N=" + std::to_string(n) + " is even");
  return n;
}

namespace {

void check_round(std::size_t n, std::size_t horizon) {
  if (horizon == 0 || horizon % 2 == 0)
    throw std::invalid_argument("horizon must be an odd positive integer");
  if (n < 1 || n > horizon) throw std::out_of_range("round index outside 1..N");
}

}  // namespace

Money closed_form_offer(const LossProfile& profile, std::size_t n, std::size_t horizon) {
  check_round(n, horizon);
  Money offer = profile.total_value();
  // Blocks b_{N-1}, b_{N-3}, ... for k = 0 .. floor((N-n)/2) - 1.
  const std::size_t terms = (horizon - n) / 2;
  for (std::size_t k = 0; k < terms; ++k) offer -= profile.block(horizon - 1 - 2 * k);
  offer -= profile.elapsed(2 * (n / 2) + 1);
  return offer;
}

Money closed_form_offer(const BargainingInstance& inst, std::size_t n, std::size_t horizon) {
  return closed_form_offer(inst.victim.profile, n, horizon);
}

OfferSchedule closed_form_schedule(const LossProfile& profile, std::size_t horizon) {
  OfferSchedule s;
  s.offers.reserve(horizon);
  for (std::size_t n = 1; n <= horizon; ++n) s.offers.push_back(closed_form_offer(profile, n, horizon));
  return s;
}

OfferSchedule backward_induction_offers(const LossProfile& profile, std::size_t horizon) {
  check_round(1, horizon);
  std::vector<Money> offers(horizon);
  // Last round: the attacker extracts everything that is left.
  offers[horizon - 1] = profile.residual_value(horizon);
  for (std::size_t n = horizon - 1; n >= 1; --n) {
    const Money& next = offers[n];
    if (n % 2 == 0) {
      // Victim proposes; the attacker accepts anything matching its next demand.
      offers[n - 1] = next;
    } else {
      // Attacker proposes; the victim is indifferent between paying now and
      // paying next round's amount after one more round of loss.
      offers[n - 1] = next + (profile.residual_value(n) - profile.residual_value(n + 1));
    }
  }
  return OfferSchedule{std::move(offers)};
}

OfferSchedule backward_induction_offers(const BargainingInstance& inst, std::size_t horizon) {
  return backward_induction_offers(inst.victim.profile, horizon);
}

Money rubinstein_split(const Money& v, const Money& r_max, const Money& r_min) {
  const Money cap = std::min(v, r_max);
  if (r_min > cap) throw NoDeal("attacker reservation exceeds min(v, r_max); the victim never pays");
  return (cap + r_min) / 2;
}

Round1Limit round1_limit(const LossProfile& profile) {
  Round1Limit out;
  const auto& blocks = profile.blocks();
  for (std::size_t j = 1; j < blocks.size(); j += 2) out.exact += blocks[j];
  out.tail_attributed = profile.tail() > 0;
  if (out.tail_attributed) out.exact += profile.tail() / 2;
  out.approx = profile.total_value() / 2;
  return out;
}

bool deal_feasible(const OfferSchedule& schedule, std::size_t n, const Money& r_min) {
  return r_min <= schedule.at(n);
}

std::optional<std::string> marginal_loss_lint(const LossProfile& profile, std::size_t horizon,
                                              const Money& threshold) {
  if (horizon == 0) return std::nullopt;
  const Money marginal = profile.block(horizon - 1);
  const Money future = profile.residual_value(horizon + 1);
  if (marginal == 0) return std::nullopt;
  if (future == 0 || marginal / future > threshold)
    return "marginal round loss b_" + std::to_string(horizon - 1) + "=" + to_decimal(marginal) +
           " is not negligible against v(" + std::to_string(horizon + 1) + ")=" +
           to_decimal(future);
  return std::nullopt;
}

IncompleteInfoBounds incomplete_info_bounds(const LossProfile& loss, const Money& q,
                                            const Money& rho) {
  const Money total = loss.total_value();
  const Money b2 = loss.elapsed(2);
  const Money b3 = loss.elapsed(3);
  const Money v3 = loss.residual_value(3);
  if (total == 0 || b3 == 0) throw std::invalid_argument("profile has no loss in the first rounds");

  IncompleteInfoBounds b;
  b.q_lo = b2 / total;
  b.q_hi = b2 / b3;
  b.rho_lo = 0;
  if (v3 > 0) b.rho_lo = std::max(Money(0), Money((q * total - b2) / v3));
  const Money denom = rho * v3 + (1 - q) * total;
  if (denom == 0) throw std::invalid_argument("degenerate p_bar bound");
  b.p_bar_lo = loss.residual_value(2) / denom;
  return b;
}

void validate(const IncompleteInfoProfile& profile, const LossProfile& loss) {
  const auto b = incomplete_info_bounds(loss, profile.q, profile.rho);
  if (profile.q < b.q_lo || profile.q > b.q_hi)
    throw std::invalid_argument("q outside [B2/V, B2/B3]");
  if (profile.rho < b.rho_lo || profile.rho > 1) throw std::invalid_argument("rho outside bounds");
  if (profile.p_bar < b.p_bar_lo || profile.p_bar > 1)
    throw std::invalid_argument("p_bar outside bounds");
}

Money low_counteroffer(const IncompleteInfoProfile& profile, const LossProfile& loss) {
  return profile.q * loss.total_value() - loss.elapsed(2);
}

BestResponse prop4_best_response(const IncompleteInfoProfile& profile, const Money& r2,
                                 const Money& r_min, const LossProfile&) {
  if (r_min <= r2) return {AttackerMove::Accept, Money(0)};
  if (profile.q == 0) throw std::invalid_argument("q must be positive");
  return {AttackerMove::Counter, std::max(Money(r2 / profile.q), r_min)};
}

}  // namespace ransomneg::bargaining
