#include "ransomneg/loss_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace ransomneg {

LossProfile::LossProfile(Money l0, std::vector<Money> blocks, Money tail, Money round_length)
    : l0_(std::move(l0)),
      blocks_(std::move(blocks)),
      tail_(std::move(tail)),
      round_length_(std::move(round_length)) {
  if (l0_ < 0) throw std::invalid_argument("l0 must be non-negative");
  if (tail_ < 0) throw std::invalid_argument("tail must be non-negative");
  if (round_length_ <= 0) throw std::invalid_argument("round_length must be positive");
  prefix_.reserve(blocks_.size() + 1);
  prefix_.emplace_back(0);
  for (const auto& b : blocks_) {
    if (b < 0) throw std::invalid_argument("block masses must be non-negative");
    prefix_.push_back(prefix_.back() + b);
  }
}

Money LossProfile::block(RoundIndex j) const {
  return j < blocks_.size() ? blocks_[j] : Money(0);
}

Money LossProfile::elapsed(RoundIndex n) const {
  if (prefix_.empty()) return Money(0);
  return prefix_[std::min(n, blocks_.size())];
}

Money LossProfile::total_value() const { return elapsed(blocks_.size()) + tail_; }

Money LossProfile::residual_value(RoundIndex n) const { return total_value() - elapsed(n); }

VictimParams::VictimParams(Money r_max_in, LossProfile profile_in)
    : r_max(std::move(r_max_in)), profile(std::move(profile_in)) {
  if (r_max < 0) throw std::invalid_argument("r_max must be non-negative");
}

Money reservation(const VictimParams& victim, RoundIndex n) {
  Money residual = victim.profile.residual_value(n);
  return residual < victim.r_max ? residual : victim.r_max;
}

Money total_loss(const VictimParams& victim, RoundIndex settle_round, const Money& r_f,
                 bool released) {
  if (r_f < 0) throw std::invalid_argument("ransom must be non-negative");
  const LossProfile& p = victim.profile;
  Money accumulated = released ? p.elapsed(settle_round) : p.total_value();
  return p.l0() + accumulated + r_f;
}

}  // namespace ransomneg
