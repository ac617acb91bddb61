#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "ransomneg/bargaining.hpp"

using namespace ransomneg;
using namespace ransomneg::bargaining;

namespace {

BargainingInstance instance(std::vector<Money> blocks, Money tail, Money r_min, Money r_max = 1000) {
  return {VictimParams(r_max, LossProfile(0, std::move(blocks), tail)), r_min, std::nullopt};
}

HorizonError::Kind horizon_error(const BargainingInstance& inst) {
  try {
    determine_horizon(inst);
  } catch (const HorizonError& e) {
    return e.kind();
  }
  FAIL("no HorizonError");
  return HorizonError::Kind::NoFeasibleHorizon;
}

std::vector<Money> random_blocks(std::mt19937_64& rng, std::size_t max_len) {
  std::vector<Money> b(1 + rng() % max_len);
  for (auto& x : b) x = oracle::random_money(rng);
  return b;
}

}  // namespace

TEST_CASE("horizon") {
  CHECK(determine_horizon(instance({1, 1, 1, 1, 1}, 0, fraction(3, 2))) == 3);

  const auto even = instance({1, 1, 1, 1, 1}, 0, fraction(1, 2));
  CHECK(horizon_error(even) == HorizonError::Kind::NonOddHorizon);
  try {
    determine_horizon(even);
  } catch (const HorizonError& e) {
    CHECK(e.round() == 4);
  }
  CHECK(horizon_error(instance({1, 1, 1, 1, 1}, 0, 10)) == HorizonError::Kind::NoFeasibleHorizon);
  CHECK(horizon_error(instance({1, 1}, 3, 2)) == HorizonError::Kind::InfiniteHorizon);
  CHECK(horizon_error(instance({1, 1, 1, 1, 1}, 0, 2)) == HorizonError::Kind::BoundaryTie);
}

TEST_CASE("horizon matches a plain scan") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 400; ++i) {
    const auto blocks = random_blocks(rng, 15);
    const Money tail = oracle::random_money(rng, 3);
    const Money r_min = oracle::random_money(rng, 60);
    const auto ref = oracle::horizon(blocks, tail, r_min);
    const auto inst = instance(blocks, tail, r_min);
    if (ref && *ref % 2 == 1) {
      CHECK(determine_horizon(inst) == *ref);
    } else {
      CHECK_THROWS_AS(determine_horizon(inst), HorizonError);
    }
  }
}

TEST_CASE("closed form on the five-block profile") {
  const LossProfile p(0, {1, 1, 1, 1, 1}, 0);
  CHECK(closed_form_offer(p, 1, 3) == 3);
  CHECK(closed_form_offer(p, 2, 3) == 2);
  CHECK(closed_form_offer(p, 3, 3) == 2);
  CHECK(backward_induction_offers(p, 3).offers == std::vector<Money>{3, 2, 2});
  CHECK(closed_form_offer(p, 1, 1) == p.residual_value(1));
  CHECK(backward_induction_offers(p, 1).offers == std::vector<Money>{p.residual_value(1)});
  CHECK_THROWS(closed_form_offer(p, 0, 3));
  CHECK_THROWS(closed_form_offer(p, 4, 3));
  CHECK_THROWS(closed_form_offer(p, 1, 2));
}

TEST_CASE("closed form against the reference induction") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 150; ++i) {
    const auto blocks = random_blocks(rng, 21);
    const Money tail = oracle::random_money(rng);
    const LossProfile p(0, blocks, tail);
    for (std::size_t N = 1; N <= 21; N += 2) {
      const auto ref = oracle::offers(blocks, tail, N);
      const auto cf = closed_form_schedule(p, N);
      CHECK(cf.offers == ref);
      CHECK(backward_induction_offers(p, N) == cf);
      for (std::size_t n = 1; n <= N; ++n) {
        CHECK(cf.at(n) <= p.residual_value(n));
        if (n > 1) CHECK(cf.at(n) <= cf.at(n - 1));
        if (n % 2 == 0 && n < N) CHECK(cf.at(n) == cf.at(n + 1));
      }
    }
  }
}

TEST_CASE("offers shrink with a longer horizon") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const LossProfile p(0, random_blocks(rng, 21), oracle::random_money(rng));
    for (std::size_t N = 1; N + 2 <= 21; N += 2)
      for (std::size_t n = 1; n <= N; ++n) CHECK(closed_form_offer(p, n, N + 2) <= closed_form_offer(p, n, N));
  }
}

TEST_CASE("rubinstein split") {
  CHECK(rubinstein_split(10, 8, 2) == 5);
  CHECK(rubinstein_split(6, 10, 6) == 6);
  CHECK_THROWS_AS(rubinstein_split(4, 4, 5), NoDeal);
}

TEST_CASE("round-1 limit") {
  auto r = round1_limit(LossProfile(0, {1, 1, 1, 1, 1, 1}, 0));
  CHECK(r.exact == 3);
  CHECK(r.approx == 3);
  CHECK_FALSE(r.tail_attributed);

  r = round1_limit(LossProfile(0, {4}, 0));
  CHECK(r.exact == 0);
  CHECK(r.approx == 2);

  r = round1_limit(LossProfile(0, {1, 1}, 2));
  CHECK(r.exact == 2);
  CHECK(r.tail_attributed);

  Money prev_gap = 1;
  for (std::size_t m : {11, 101, 1001}) {
    const auto lim = round1_limit(LossProfile(0, std::vector<Money>(m, 1), 0));
    const Money gap = abs(lim.exact / lim.approx - 1);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < fraction(1, 500));
}

TEST_CASE("feasibility and marginal-loss lint") {
  const LossProfile p(0, {1, 1, 1, 1, 1}, 0);
  const auto s = closed_form_schedule(p, 3);
  CHECK(deal_feasible(s, 1, 3));
  CHECK_FALSE(deal_feasible(s, 2, 3));
  CHECK(marginal_loss_lint(p, 3).has_value());
  const LossProfile slow(0, {fraction(1, 100), fraction(1, 100), fraction(1, 100), fraction(1, 100)}, 10);
  CHECK_FALSE(marginal_loss_lint(slow, 3).has_value());
}

TEST_CASE("incomplete information best response") {
  const LossProfile loss(0, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 0);  // V = 10, B2 = 2, B3 = 3
  const auto b = incomplete_info_bounds(loss, fraction(1, 2), 0);
  CHECK(b.q_lo == fraction(1, 5));
  CHECK(b.q_hi == fraction(2, 3));

  IncompleteInfoProfile prof{fraction(1, 2), 1, fraction(3, 7)};
  CHECK_NOTHROW(validate(prof, loss));
  const Money r2 = low_counteroffer(prof, loss);
  CHECK(r2 == 3);
  auto br = prop4_best_response(prof, r2, 2, loss);
  CHECK(br.move == AttackerMove::Accept);
  br = prop4_best_response(prof, r2, 4, loss);
  CHECK(br.move == AttackerMove::Counter);
  CHECK(br.counteroffer == 6);
  br = prop4_best_response(prof, r2, 7, loss);
  CHECK(br.counteroffer == 7);

  CHECK_THROWS_AS(validate({fraction(1, 10), 1, 1}, loss), std::invalid_argument);
}

TEST_CASE("counteroffer at the upper q bound stays within v(3)") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    auto blocks = random_blocks(rng, 10);
    blocks.resize(std::max<std::size_t>(blocks.size(), 4), 1);
    blocks[0] += 1;
    const LossProfile loss(0, blocks, oracle::random_money(rng));
    const Money q = loss.elapsed(2) / loss.elapsed(3);
    const Money r2 = low_counteroffer({q, 1, 1}, loss);
    CHECK(r2 / q <= loss.residual_value(3));
  }
}
