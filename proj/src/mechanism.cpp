#include "ransomneg/mechanism.hpp"

#include <algorithm>
#include <bit>
#include <optional>

namespace ransomneg::mechanism {

namespace {

using u128 = unsigned __int128;

mpz_class pow2(unsigned e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

std::uint64_t to_u64(const mpz_class& v, const char* what) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64)
    throw WidthOverflow(std::string(what) + " does not fit in 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

bool is_dyadic(const Money& x) {
  const mpz_class& den = x.get_den();
  return mpz_popcount(den.get_mpz_t()) == 1;
}

unsigned bit_width_u128(u128 v) {
  unsigned w = 0;
  while (v != 0) {
    ++w;
    v >>= 1;
  }
  return w;
}

}  // namespace

void validate(const MechanismParams& p) {
  if (p.q <= 0 || p.q > fraction(1, 2)) throw std::invalid_argument("q must lie in (0, 1/2]");
  if (p.p_bar < fraction(1, 2) || p.p_bar > 1) throw std::invalid_argument("p_bar must lie in [1/2, 1]");
  if (p.p_bar * (1 - p.q) != fraction(1, 2))
    throw std::invalid_argument("p_bar (1 - q) must equal 1/2 exactly");
  if (p.k_theta < 1 || p.k_theta > 62) throw std::invalid_argument("k_theta must lie in [1, 62]");
  if (p.k < 1 || p.k > 62) throw std::invalid_argument("k must lie in [1, 62]");
}

std::vector<std::string> warnings(const MechanismParams& p) {
  std::vector<std::string> w;
  if (!is_dyadic(p.q)) w.push_back("q=" + to_string(p.q) + " is not dyadic; fixed-point scaling rounds");
  return w;
}

Money p_bar_for(const Money& q) { return Money(1) / (2 * (1 - q)); }

ScaledParams scale(const MechanismParams& p) {
  validate(p);
  const Money two_k(pow2(p.k));
  ScaledParams s;
  s.p_scale = to_u64(floor_of(p.p_bar * two_k), "p_scale");
  s.q_scale = to_u64(floor_of(p.q * two_k), "q_scale");
  s.inv_q_scale = to_u64(floor_of(two_k / p.q), "inv_q_scale");
  return s;
}

ArithmeticWidths arithmetic_widths(const MechanismParams& p, const ScaledParams& s,
                                   unsigned max_width) {
  ArithmeticWidths w;
  w.q_product = p.k_theta + p.k;
  w.inv_bits = static_cast<unsigned>(std::bit_width(s.inv_q_scale));
  w.inv_product = p.k_theta + w.inv_bits;
  w.r3 = w.inv_product > p.k ? w.inv_product - p.k : 1;
  if (w.q_product > max_width || w.inv_product > max_width)
    throw WidthOverflow("product width " + std::to_string(std::max(w.q_product, w.inv_product)) +
                        " exceeds the configured maximum " + std::to_string(max_width));
  return w;
}

MechanismOutcome outcome_branch(const MechanismParams& p, const Report& rep, bool low_offer,
                                bool pay) {
  MechanismOutcome out;
  const Money r2 = low_offer ? Money(p.q * rep.theta_v) : rep.theta_v;
  if (rep.theta_a <= r2) {
    out.r_f = r2;
  } else {
    const Money r3 = std::max(Money(r2 / p.q), rep.theta_a);
    if (r3 <= rep.theta_v) {
      if (pay)
        out.r_f = r3;
      else
        out.sigma = true;
    }
  }
  out.alpha = out.r_f > 0 || out.sigma;
  return out;
}

MechanismOutcome outcome_real(const MechanismParams& p, const Report& rep, const Money& u0,
                              const Money& u1) {
  validate(p);
  if (u0 < 0 || u0 >= 1 || u1 < 0 || u1 >= 1)
    throw std::invalid_argument("coin draws must lie in [0, 1)");
  return outcome_branch(p, rep, u0 < p.p_bar, u1 < p.q);
}

FixedOutcome outcome_fixed(const MechanismParams& p, const ScaledParams& s,
                           const FixedReport& rep, std::uint64_t s0, std::uint64_t s1,
                           unsigned max_width) {
  const std::uint64_t theta_limit = std::uint64_t{1} << p.k_theta;
  const std::uint64_t coin_limit = std::uint64_t{1} << p.k;
  if (rep.theta_v >= theta_limit || rep.theta_a >= theta_limit)
    throw std::invalid_argument("reported type does not fit in k_theta bits");
  if (s0 >= coin_limit || s1 >= coin_limit)
    throw std::invalid_argument("random string does not fit in k bits");
  arithmetic_widths(p, s, max_width);

  FixedOutcome out;
  const std::uint64_t qv = static_cast<std::uint64_t>((u128{s.q_scale} * rep.theta_v) >> p.k);
  const std::uint64_t r2 = s0 < s.p_scale ? qv : rep.theta_v;
  if (rep.theta_a <= r2) {
    out.r_f = r2;
  } else {
    const u128 r2_over_q = (u128{r2} * s.inv_q_scale) >> p.k;
    const u128 r3 = std::max(r2_over_q, u128{rep.theta_a});
    if (bit_width_u128(r3) > max_width) throw WidthOverflow("r3 exceeds the arithmetic width");
    if (r3 <= rep.theta_v) {
      if (s1 < s.q_scale)
        out.r_f = static_cast<std::uint64_t>(r3);
      else
        out.sigma = true;
    }
  }
  out.alpha = out.r_f > 0 || out.sigma;
  return out;
}

Money branch_probability(const MechanismParams& p, bool low_offer, bool pay) {
  const Money a = low_offer ? p.p_bar : Money(1 - p.p_bar);
  const Money b = pay ? p.q : Money(1 - p.q);
  return a * b;
}

Money expected_attacker_utility(const MechanismParams& p, const Money& theta_a_true,
                                const Money& report_a, const Money& theta_v_report) {
  Money total = 0;
  const Report rep{theta_v_report, report_a};
  for (bool low : {true, false}) {
    for (bool pay : {true, false}) {
      const MechanismOutcome o = outcome_branch(p, rep, low, pay);
      const Money utility = o.r_f - (o.alpha ? theta_a_true : Money(0));
      total += branch_probability(p, low, pay) * utility;
    }
  }
  return total;
}

Money UniformPrior::cdf(const Money& x) const {
  if (x <= lo) return Money(0);
  if (x >= hi) return Money(1);
  return (x - lo) / (hi - lo);
}

namespace {

Money victim_utility_given(const MechanismParams& p, const Money& theta_v_true,
                           const Money& report_v, const Money& theta_a) {
  Money total = 0;
  const Report rep{report_v, theta_a};
  for (bool low : {true, false}) {
    for (bool pay : {true, false}) {
      const MechanismOutcome o = outcome_branch(p, rep, low, pay);
      const Money utility = (o.alpha ? theta_v_true : Money(0)) - o.r_f;
      total += branch_probability(p, low, pay) * utility;
    }
  }
  return total;
}

}  // namespace

Money expected_victim_utility(const MechanismParams& p, const Money& theta_v_true,
                              const Money& report_v, const UniformPrior& prior) {
  if (prior.hi < prior.lo) throw std::invalid_argument("prior support is empty");
  if (prior.hi == prior.lo) return victim_utility_given(p, theta_v_true, report_v, prior.lo);

  // The outcome depends on theta_a only through comparisons against
  // q report, report and report / q, so it is constant between those points.
  std::vector<Money> cuts{prior.lo, prior.hi};
  for (const Money& c : {Money(p.q * report_v), report_v, Money(report_v / p.q)})
    if (c > prior.lo && c < prior.hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Money total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Money mid = (cuts[i] + cuts[i + 1]) / 2;
    const Money weight = (cuts[i + 1] - cuts[i]) / (prior.hi - prior.lo);
    total += weight * victim_utility_given(p, theta_v_true, report_v, mid);
  }
  return total;
}

Money expected_payment(const MechanismParams& p, const Money& theta_v) {
  return (1 - p.p_bar + p.p_bar * p.q) * theta_v;
}

AttackerDominanceReport verify_attacker_dominance(const MechanismParams& p,
                                                  std::size_t grid_points) {
  if (grid_points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<Money> grid;
  grid.reserve(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i)
    grid.emplace_back(Money(static_cast<long>(i), static_cast<long>(grid_points - 1)));
  for (auto& g : grid) g.canonicalize();

  AttackerDominanceReport report;
  std::optional<Money> worst;
  for (const Money& theta_v_report : grid) {
    for (const Money& theta_a : grid) {
      const Money truthful = expected_attacker_utility(p, theta_a, theta_a, theta_v_report);
      for (const Money& alt : grid) {
        const Money gap = expected_attacker_utility(p, theta_a, alt, theta_v_report) - truthful;
        ++report.cases;
        if (gap > 0) ++report.violations;
        if (!worst || gap > *worst) worst = gap;
      }
    }
  }
  report.worst_gap = worst.value_or(Money(0));
  return report;
}

VictimOptimalityReport verify_victim_optimality(const MechanismParams& p, unsigned step_exp,
                                                const std::vector<Money>& theta_values,
                                                const UniformPrior& prior) {
  const long steps = 1L << step_exp;
  VictimOptimalityReport report;
  report.step = fraction(1, steps);
  for (const Money& theta : theta_values) {
    std::optional<Money> best_value;
    Money best_report;
    for (long j = 0; j <= steps; ++j) {
      Money r(j, steps);
      r.canonicalize();
      const Money u = expected_victim_utility(p, theta, r, prior);
      if (!best_value || u > *best_value) {
        best_value = u;
        best_report = r;
      }
    }
    const Money distance = abs(best_report - theta);
    ++report.cases;
    if (distance > report.step) ++report.violations;
    if (distance > report.worst_distance) report.worst_distance = distance;
  }
  return report;
}

}  // namespace ransomneg::mechanism
