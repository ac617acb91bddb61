#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "ransomneg/mechanism.hpp"

using namespace ransomneg;
using namespace ransomneg::mechanism;

namespace {

MechanismParams params(Money q, unsigned k_theta = 8, unsigned k = 8) {
  return {q, p_bar_for(q), k_theta, k};
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK(p_bar_for(fraction(1, 4)) == fraction(2, 3));
  CHECK_NOTHROW(validate(params(fraction(1, 4))));
  CHECK_NOTHROW(validate(params(fraction(1, 2))));
  CHECK_THROWS_AS(validate({fraction(1, 4), fraction(1, 2), 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(validate(params(fraction(3, 4))), std::invalid_argument);
  CHECK_THROWS_AS(validate({0, fraction(1, 2), 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(validate(params(fraction(1, 4), 0, 8)), std::invalid_argument);
  CHECK_THROWS_AS(validate(params(fraction(1, 4), 8, 63)), std::invalid_argument);
  CHECK(warnings(params(fraction(1, 4))).empty());
  CHECK_FALSE(warnings(params(fraction(1, 3))).empty());
}

TEST_CASE("outcome with real coins") {
  const auto p = params(fraction(1, 4));
  auto o = outcome_real(p, {100, 30}, fraction(1, 10), fraction(9, 10));
  CHECK(o.alpha);
  CHECK(o.sigma);
  CHECK(o.r_f == 0);

  o = outcome_real(p, {100, 30}, fraction(9, 10), fraction(9, 10));
  CHECK(o.alpha);
  CHECK(o.r_f == 100);

  o = outcome_real(p, {100, 120}, fraction(9, 10), Money(0));
  CHECK_FALSE(o.alpha);
  CHECK(o.r_f == 0);

  o = outcome_real(p, {100, 25}, Money(0), Money(0));
  CHECK(o.r_f == 25);
  o = outcome_real(p, {100, 30}, Money(0), fraction(1, 8));
  CHECK(o.r_f == 100);
  CHECK_THROWS_AS(outcome_real(p, {1, 1}, Money(1), Money(0)), std::invalid_argument);
}

TEST_CASE("scaling constants") {
  auto s = scale(params(fraction(1, 4)));
  CHECK(s.q_scale == 64);
  CHECK(s.inv_q_scale == 1024);
  CHECK(s.p_scale == 170);
  s = scale(params(fraction(1, 4), 4, 4));
  CHECK(s.q_scale == 4);
  CHECK(s.inv_q_scale == 64);
  CHECK(s.p_scale == 10);
  CHECK_THROWS_AS(scale(params(fraction(1, 4), 8, 62)), WidthOverflow);
  const auto w = arithmetic_widths(params(fraction(1, 4), 16, 32), scale(params(fraction(1, 4), 16, 32)));
  CHECK(w.q_product == 48);
  CHECK(w.inv_product == 16 + 35);
  CHECK_THROWS_AS(arithmetic_widths(params(fraction(1, 4), 40, 30), scale(params(fraction(1, 4), 40, 30))),
                  WidthOverflow);
}

TEST_CASE("fixed-point outcome") {
  const auto p = params(fraction(1, 4));
  const auto s = scale(p);
  auto o = outcome_fixed(p, s, {100, 30}, 169, 255);
  CHECK(o.sigma);
  CHECK(o.r_f == 0);
  o = outcome_fixed(p, s, {100, 20}, 169, 0);
  CHECK(o.r_f == 25);
  o = outcome_fixed(p, s, {100, 20}, 170, 0);
  CHECK(o.r_f == 100);
  for (std::uint64_t s0 : {0, 169, 170, 255})
    for (std::uint64_t s1 : {0, 63, 64, 255})
      for (std::uint64_t ta : {0, 5, 200}) {
        o = outcome_fixed(p, s, {0, ta}, s0, s1);
        CHECK(o.r_f == 0);
      }
  CHECK_THROWS_AS(outcome_fixed(p, s, {256, 0}, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(outcome_fixed(p, s, {1, 0}, 256, 0), std::invalid_argument);
}

TEST_CASE("fixed-point outcome matches the reference exhaustively at 4 bits") {
  for (Money q : {fraction(1, 4), fraction(1, 2), fraction(1, 8), fraction(3, 8)}) {
    const auto p = params(q, 4, 4);
    const auto s = scale(p);
    for (std::uint64_t tv = 0; tv < 16; ++tv)
      for (std::uint64_t ta = 0; ta < 16; ++ta)
        for (std::uint64_t s0 = 0; s0 < 16; ++s0)
          for (std::uint64_t s1 = 0; s1 < 16; ++s1) {
            const auto o = outcome_fixed(p, s, {tv, ta}, s0, s1);
            CHECK(o == oracle::fixed(4, s.p_scale, s.q_scale, s.inv_q_scale, tv, ta, s0, s1));
            CHECK(o.alpha == (o.r_f > 0 || o.sigma));
            if (o.sigma) CHECK(o.r_f == 0);
          }
  }
}

TEST_CASE("fixed and real semantics agree for dyadic q") {
  // With q = 2^-j, q theta and r2 / q are exact whenever theta is a multiple of 2^j.
  std::mt19937_64 rng(9);
  for (unsigned j : {1, 2, 3}) {
    const auto p = params(fraction(1, 1 << j), 12, 10);
    const auto s = scale(p);
    for (int i = 0; i < 2000; ++i) {
      const std::uint64_t tv = (rng() % (4096 >> j)) << j;
      const std::uint64_t ta = rng() % 4096;
      const std::uint64_t s0 = rng() % 1024, s1 = rng() % 1024;
      const auto f = outcome_fixed(p, s, {tv, ta}, s0, s1);
      const bool low = s0 < s.p_scale, pay = s1 < s.q_scale;
      const auto r = outcome_branch(p, {tv, ta}, low, pay);
      CHECK(f.alpha == r.alpha);
      CHECK(f.sigma == r.sigma);
      CHECK(Money(f.r_f) == r.r_f);
    }
  }
}

TEST_CASE("floor scaling keeps r2 / q within theta_v on the low branch") {
  for (Money q : {fraction(1, 4), fraction(1, 8), fraction(3, 8), fraction(5, 16)}) {
    const auto p = params(q, 10, 8);
    const auto s = scale(p);
    for (std::uint64_t tv = 0; tv < 1024; ++tv) {
      using u128 = unsigned __int128;
      const std::uint64_t r2 = static_cast<std::uint64_t>((u128{s.q_scale} * tv) >> 8);
      CHECK(static_cast<std::uint64_t>((u128{r2} * s.inv_q_scale) >> 8) <= tv);
    }
  }
}

TEST_CASE("branch probabilities sum to one") {
  const auto p = params(fraction(3, 8));
  Money total = 0;
  for (bool low : {false, true})
    for (bool pay : {false, true}) total += branch_probability(p, low, pay);
  CHECK(total == 1);
  CHECK(branch_probability(p, true, true) == p.p_bar * p.q);
}

TEST_CASE("attacker expected utility") {
  const auto p = params(fraction(1, 4));
  CHECK(expected_attacker_utility(p, 30, 30, 100) == 20);
  CHECK(expected_attacker_utility(p, 30, 101, 100) == 0);
  CHECK(expected_attacker_utility(p, 30, 500, 100) == 0);
  // report <= q theta_v
  CHECK(expected_attacker_utility(p, 10, 20, 100) == p.p_bar * (25 - 10) + (1 - p.p_bar) * (100 - 10));

  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const Money t = oracle::random_money(rng, 30, 4), y = oracle::random_money(rng, 30, 4),
                x = oracle::random_money(rng, 30, 4);
    CHECK(expected_attacker_utility(p, t, y, x) == oracle::attacker_utility(p.q, p.p_bar, t, y, x));
  }
}

TEST_CASE("victim interim utility") {
  std::mt19937_64 rng(13);
  for (Money q : {fraction(1, 4), fraction(1, 2), fraction(1, 8)}) {
    const auto p = params(q);
    for (int i = 0; i < 300; ++i) {
      const Money theta = oracle::random_money(rng, 12, 12);
      const Money x = oracle::random_money(rng, 14, 12);
      CHECK(expected_victim_utility(p, theta, x) == oracle::victim_utility(q, p.p_bar, theta, x));
    }
  }
  const auto p = params(fraction(1, 4));
  CHECK(expected_victim_utility(p, 0, 0) == 0);
  // The grid maximizer of theta = 0.6 on {0, 0.01, ..., 1} is 0.6.
  Money best = -1, arg = 0;
  for (int j = 0; j <= 100; ++j) {
    const Money u = expected_victim_utility(p, fraction(3, 5), fraction(j, 100));
    if (u > best) {
      best = u;
      arg = fraction(j, 100);
    }
  }
  CHECK(arg == fraction(3, 5));
}

TEST_CASE("expected payment") {
  const auto p = params(fraction(1, 4));
  CHECK(expected_payment(p, 100) == 50);
  CHECK(expected_payment(p, 0) == 0);
  CHECK(expected_payment(params(fraction(3, 8)), 7) == fraction(7, 2));
}

TEST_CASE("attacker deviations pay off only for types between half and all of the victim report") {
  // Every report up to theta_v yields theta_v / 2 - theta_a and any higher
  // report yields 0, so truth-telling loses exactly when that value is negative.
  const auto p = params(fraction(1, 4));
  const std::size_t n = 17;
  std::size_t inside = 0, outside_violations = 0, inside_violations = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Money x = fraction(i, n - 1), t = fraction(j, n - 1);
      const Money truthful = expected_attacker_utility(p, t, t, x);
      bool violated = false;
      for (std::size_t a = 0; a < n; ++a)
        if (expected_attacker_utility(p, t, fraction(a, n - 1), x) > truthful) violated = true;
      // Over-reporting needs a grid point above x.
      const bool gap_region = x / 2 < t && t <= x && x < 1;
      inside += gap_region;
      if (gap_region && violated) ++inside_violations;
      if (!gap_region && violated) ++outside_violations;
    }
  CHECK(outside_violations == 0);
  CHECK(inside_violations == inside);
  CHECK(inside > 0);
  CHECK(verify_attacker_dominance(p, n).violations > 0);
}

TEST_CASE("victim grid verification") {
  const auto p = params(fraction(1, 4));
  std::vector<Money> thetas{0, fraction(1, 3), fraction(3, 5), 1};
  const auto opt = verify_victim_optimality(p, 6, thetas);
  CHECK(opt.cases == 4);
  CHECK(opt.violations == 0);
  CHECK(opt.step == fraction(1, 64));
}

TEST_CASE("uniform prior on a general support") {
  const UniformPrior prior{2, 6};
  CHECK(prior.cdf(1) == 0);
  CHECK(prior.cdf(3) == fraction(1, 4));
  CHECK(prior.cdf(7) == 1);
  const auto p = params(fraction(1, 4));
  const auto opt = verify_victim_optimality(p, 5, {fraction(1, 2)}, {0, 1});
  CHECK(opt.violations == 0);
}
