#include "ransomneg/bench.hpp"

#include "ransomneg/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <random>

namespace ransomneg::bench {

namespace {

NegotiationConfig make_config(Role role, unsigned k_theta, unsigned k, std::uint64_t theta) {
  NegotiationConfig cfg;
  cfg.role = role;
  cfg.params.q = fraction(1, 4);
  cfg.params.p_bar = mechanism::p_bar_for(cfg.params.q);
  cfg.params.k_theta = k_theta;
  cfg.params.k = k;
  cfg.theta = theta;
  return cfg;
}

crypto::Bytes seed_bytes(std::mt19937_64& rng) {
  crypto::Bytes out(16);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

double one_run(unsigned k_theta, unsigned k, std::mt19937_64& rng, bool& ok) {
  const std::uint64_t mask = (std::uint64_t{1} << k_theta) - 1;
  const auto victim = make_config(Role::Victim, k_theta, k, rng() & mask);
  const auto attacker = make_config(Role::Attacker, k_theta, k, rng() & mask);
  protocol::SessionOptions vo, ao;
  vo.seed = seed_bytes(rng);
  ao.seed = seed_bytes(rng);
  const auto r = protocol::run_loopback(victim, attacker, vo, ao);
  ok = ok && r.victim.ok() && r.attacker.ok() && *r.victim.outcome == *r.attacker.outcome;
  return r.elapsed.count();
}

}  // namespace

Grid run_grid(const std::vector<unsigned>& k_thetas, const std::vector<unsigned>& ks, unsigned repetitions,
              unsigned long long seed) {
  Grid g{k_thetas, ks, {}};
  std::mt19937_64 rng(seed);
  for (unsigned kt : k_thetas) {
    for (unsigned k : ks) {
      Cell cell{kt, k, 0, 0, true};
      bool warm = true;
      one_run(kt, k, rng, warm);
      cell.all_ok = warm;
      std::vector<double> times;
      for (unsigned i = 0; i < repetitions; ++i) times.push_back(one_run(kt, k, rng, cell.all_ok));
      std::sort(times.begin(), times.end());
      if (!times.empty()) {
        const std::size_t n = times.size();
        cell.median_ms = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
        cell.max_ms = times.back();
      }
      g.cells.push_back(cell);
    }
  }
  return g;
}

bool monotone(const Grid& g) {
  for (std::size_t r = 0; r < g.k_thetas.size(); ++r)
    for (std::size_t c = 0; c < g.ks.size(); ++c) {
      const double t = g.at(r, c).median_ms;
      if (r + 1 < g.k_thetas.size() && g.at(r + 1, c).median_ms < t) return false;
      if (c + 1 < g.ks.size() && g.at(r, c + 1).median_ms < t) return false;
    }
  return true;
}

void print_table(std::ostream& os, const Grid& g) {
  os << "k_theta  k   Execution time\n";
  char line[64];
  for (const auto& cell : g.cells) {
    std::snprintf(line, sizeof line, "%-8u %-3u %.2f ms\n", cell.k_theta, cell.k, cell.median_ms);
    os << line;
  }
}

}  // namespace ransomneg::bench
