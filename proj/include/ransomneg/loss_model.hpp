#pragma once

#include "ransomneg/money.hpp"

#include <cstddef>
#include <vector>

namespace ransomneg {

using RoundIndex = std::size_t;

// Loss-rate profile of the encrypted data, held as the integral of the loss
// rate over each bargaining round plus the mass remaining after the last
// block. Round j covers [jT, (j+1)T).
class LossProfile {
 public:
  LossProfile() = default;
  // Throws std::invalid_argument if any mass is negative.
  LossProfile(Money l0, std::vector<Money> blocks, Money tail, Money round_length = 1);

  const Money& l0() const { return l0_; }
  const std::vector<Money>& blocks() const { return blocks_; }
  const Money& tail() const { return tail_; }
  const Money& round_length() const { return round_length_; }

  // Block mass b_j; zero for j past the explicit blocks.
  Money block(RoundIndex j) const;

  // Loss accumulated over the first n rounds.
  Money elapsed(RoundIndex n) const;

  // Value of the data when it is never recovered: sum of blocks plus tail.
  Money total_value() const;

  // Value remaining after n rounds: total minus elapsed; equals tail for n >= M.
  Money residual_value(RoundIndex n) const;

 private:
  Money l0_{0};
  std::vector<Money> blocks_;
  Money tail_{0};
  Money round_length_{1};
  std::vector<Money> prefix_;  // prefix_[n] = b_0 + ... + b_{n-1}
};

struct VictimParams {
  Money r_max;
  LossProfile profile;

  VictimParams() = default;
  VictimParams(Money r_max, LossProfile profile);
};

inline Money total_value(const LossProfile& p) { return p.total_value(); }
inline Money residual_value(const LossProfile& p, RoundIndex n) { return p.residual_value(n); }

// Victim reservation after n rounds: min(residual value, r_max).
Money reservation(const VictimParams& victim, RoundIndex n);

// Total financial loss with no intangible-loss term. When released, the data
// comes back after settle_round rounds; otherwise the whole value is lost.
// Throws std::invalid_argument for negative r_f.
Money total_loss(const VictimParams& victim, RoundIndex settle_round, const Money& r_f,
                 bool released);

}  // namespace ransomneg
