// Reference computations written directly from the model definitions, kept
// apart from the library so the two can be compared.
#pragma once

#include "ransomneg/mechanism.hpp"
#include "ransomneg/money.hpp"
#include "ransomneg/stage_game.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using ransomneg::Money;

// v(n): everything not yet lost after n rounds.
inline Money v(const std::vector<Money>& blocks, const Money& tail, std::size_t n) {
  Money rest = tail;
  for (std::size_t j = n; j < blocks.size(); ++j) rest += blocks[j];
  return rest;
}

// Scan for v(N) > r_min > v(N+1); nullopt when there is none.
inline std::optional<std::size_t> horizon(const std::vector<Money>& blocks, const Money& tail, const Money& r_min) {
  for (std::size_t n = 1; n <= blocks.size() + 1; ++n)
    if (v(blocks, tail, n) > r_min && r_min > v(blocks, tail, n + 1)) return n;
  return std::nullopt;
}

// Backward induction: the last proposer asks v(N); a victim round (even n)
// offers what the attacker would get next round; an attacker round adds the
// loss the victim avoids by settling one round earlier.
inline std::vector<Money> offers(const std::vector<Money>& blocks, const Money& tail, std::size_t N) {
  std::vector<Money> r(N + 2);
  r[N] = v(blocks, tail, N);
  for (std::size_t n = N - 1; n >= 1; --n) {
    r[n] = n % 2 == 0 ? r[n + 1] : r[n + 1] + v(blocks, tail, n) - v(blocks, tail, n + 1);
    if (n == 1) break;
  }
  return std::vector<Money>(r.begin() + 1, r.begin() + N + 1);
}

// Leaf pairs of the one-shot game, listed as (victim action, attacker action).
struct Leaf {
  ransomneg::stage::VictimAction victim;
  ransomneg::stage::AttackerAction attacker;
  Money pv, pa;
};

inline std::vector<Leaf> leaves(const ransomneg::stage::ReputationParams& p, const Money& r_f, const Money& v) {
  using ransomneg::stage::AttackerAction;
  using ransomneg::stage::VictimAction;
  return {
      {VictimAction::V1, AttackerAction::A4, -r_f, r_f - p.c_r + p.tau_g},
      {VictimAction::V1, AttackerAction::A5, -r_f - v, r_f - p.c_d - p.tau_l},
      {VictimAction::V2, AttackerAction::A6, 0, -p.c_r - p.kappa_l + p.tau_g},
      {VictimAction::V2, AttackerAction::A7, -v, -p.c_d + p.kappa_g},
  };
}

// Brute force: for each victim move keep the attacker's best leaf (first on
// ties), then let the victim pick the strictly better one; paying requires
// r_f < r_max.
inline Leaf spne(const ransomneg::stage::ReputationParams& p, const Money& r_f, const Money& v, const Money& r_max) {
  const auto ls = leaves(p, r_f, v);
  const Leaf& pay = ls[1].pa > ls[0].pa ? ls[1] : ls[0];
  const Leaf& refuse = ls[3].pa > ls[2].pa ? ls[3] : ls[2];
  return r_f < r_max && pay.pv > refuse.pv ? pay : refuse;
}

// Integer mechanism, written out with 128-bit products.
inline ransomneg::mechanism::FixedOutcome fixed(unsigned k, std::uint64_t p_scale, std::uint64_t q_scale,
                                                std::uint64_t inv_q_scale, std::uint64_t tv, std::uint64_t ta,
                                                std::uint64_t s0, std::uint64_t s1) {
  using u128 = unsigned __int128;
  const std::uint64_t r2 = s0 < p_scale ? static_cast<std::uint64_t>((u128{q_scale} * tv) >> k) : tv;
  if (ta <= r2) return {r2 > 0, r2, false};
  const u128 up = (u128{r2} * inv_q_scale) >> k;
  const u128 r3 = up > ta ? up : u128{ta};
  if (r3 > tv) return {false, 0, false};
  if (s1 < q_scale) return {r3 > 0, static_cast<std::uint64_t>(r3), false};
  return {true, 0, true};
}

// Victim interim utility against a truthful Unif[0,1] attacker:
// F(x) (theta - (1 - p_bar + p_bar q) x).
inline Money victim_utility(const Money& q, const Money& p_bar, const Money& theta, const Money& x) {
  Money F = x < 0 ? Money(0) : x > 1 ? Money(1) : x;
  return F * (theta - (1 - p_bar + p_bar * q) * x);
}

// Attacker expected utility by enumerating the two coins.
inline Money attacker_utility(const Money& q, const Money& p_bar, const Money& t, const Money& y, const Money& x) {
  Money total = 0;
  for (int low = 0; low < 2; ++low) {
    const Money pl = low ? p_bar : 1 - p_bar;
    const Money r2 = low ? Money(q * x) : x;
    if (y <= r2) {
      if (r2 > 0) total += pl * (r2 - t);  // a zero ransom allocates nothing
      continue;
    }
    const Money up = r2 / q;
    const Money r3 = up > y ? up : y;
    if (r3 > x) continue;
    total += pl * q * (r3 - t);       // pays r3
    total += pl * (1 - q) * (0 - t);  // released unpaid
  }
  return total;
}

inline Money random_money(std::mt19937_64& rng, int max_num = 20, int max_den = 7) {
  std::uniform_int_distribution<int> num(0, max_num), den(1, max_den);
  Money m(num(rng), den(rng));
  m.canonicalize();
  return m;
}

}  // namespace oracle
