// Command-line front end: analytical tools, the two protocol roles and the
// timing benchmark.
#include "ransomneg/bargaining.hpp"
#include "ransomneg/bench.hpp"
#include "ransomneg/config.hpp"
#include "ransomneg/mechanism.hpp"
#include "ransomneg/protocol.hpp"
#include "ransomneg/stage_game.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ransomneg;

namespace {

// Loss-profile options shared by offers and horizon; explicit flags override
// keys read from --config.
struct ProfileArgs {
  std::string config;
  std::string blocks, tail, l0, r_max;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key-value file with loss-profile keys");
    app->add_option("--blocks", blocks, "comma-separated block masses b_0,b_1,...");
    app->add_option("--tail", tail, "mass after the last block");
    app->add_option("--l0", l0, "immediate loss");
    app->add_option("--r-max", r_max, "largest ransom the victim can pay (default: total value)");
  }

  VictimParams load() const {
    KeyValues kv = config.empty() ? KeyValues{} : load_key_values(config);
    if (!blocks.empty()) kv["blocks"] = blocks;
    if (!tail.empty()) kv["tail"] = tail;
    if (!l0.empty()) kv["l0"] = l0;
    if (!r_max.empty()) kv["r_max"] = r_max;
    return victim_params_from(kv);
  }
};

void print_horizon_error(const bargaining::HorizonError& e) {
  std::cerr << "error: " << e.kind();
  if (e.round()) std::cerr << " at N=" << e.round();
  std::cerr << ": " << e.what() << "\n";
}

int report_session(const protocol::SessionResult& r, const std::string& transcript) {
  if (!transcript.empty()) net::persist_transcript(r.transcript, transcript);
  if (r.abort) {
    const char* kind = r.abort->kind == protocol::AbortInfo::Kind::Peer ? "peer abort" : "abort";
    std::cerr << kind << " [" << r.abort->stage << "]: " << r.abort->reason << "\n";
    return protocol::exit_code(r.abort);
  }
  std::cout << "r_f=" << r.outcome->r_f << " alpha=" << r.outcome->alpha << " sigma=" << r.outcome->sigma
            << "\n";
  return 0;
}

protocol::SessionOptions session_options(const std::string& seed_hex) {
  protocol::SessionOptions opts;
  if (!seed_hex.empty()) opts.seed = crypto::from_hex(seed_hex);
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ransomware negotiation models and privacy-preserving negotiation protocol"};
  app.require_subcommand(1);

  // offers / horizon
  ProfileArgs offers_profile;
  std::string offers_r_min;
  std::size_t offers_horizon = 0;
  bool offers_csv = false;
  auto* offers = app.add_subcommand("offers", "equilibrium offer schedule of the finite-horizon game");
  offers_profile.add(offers);
  offers->add_option("--r-min", offers_r_min, "attacker's minimum ransom")->required();
  offers->add_option("--horizon", offers_horizon, "use this odd N instead of deriving it");
  offers->add_flag("--csv", offers_csv, "emit round,offer,reservation as CSV");

  ProfileArgs horizon_profile;
  std::string horizon_r_min;
  auto* horizon = app.add_subcommand("horizon", "number of bargaining rounds");
  horizon_profile.add(horizon);
  horizon->add_option("--r-min", horizon_r_min, "attacker's minimum ransom")->required();

  // rubinstein
  std::string rub_v, rub_r_max, rub_r_min;
  auto* rubinstein = app.add_subcommand("rubinstein", "infinite-horizon split");
  rubinstein->add_option("--v", rub_v)->required();
  rubinstein->add_option("--r-max", rub_r_max)->required();
  rubinstein->add_option("--r-min", rub_r_min)->required();

  // stage-game
  std::string sg_tau_g = "0", sg_tau_l = "0", sg_kappa_g = "0", sg_kappa_l = "0", sg_c_r = "0", sg_c_d = "0";
  std::string sg_r_f, sg_v, sg_r_max;
  auto* stage_game = app.add_subcommand("stage-game", "equilibrium of the one-shot payment game");
  stage_game->add_option("--tau-g", sg_tau_g);
  stage_game->add_option("--tau-l", sg_tau_l);
  stage_game->add_option("--kappa-g", sg_kappa_g);
  stage_game->add_option("--kappa-l", sg_kappa_l);
  stage_game->add_option("--c-r", sg_c_r);
  stage_game->add_option("--c-d", sg_c_d);
  stage_game->add_option("--r-f", sg_r_f)->required();
  stage_game->add_option("--v", sg_v)->required();
  stage_game->add_option("--r-max", sg_r_max)->required();

  // mechanism
  auto* mech = app.add_subcommand("mechanism", "negotiation mechanism");
  mech->require_subcommand(1);
  std::string me_q = "1/4", me_p_bar;
  unsigned me_k = 8, me_k_theta = 8;
  std::uint64_t me_theta_v = 0, me_theta_a = 0, me_s0 = 0, me_s1 = 0;
  auto* eval = mech->add_subcommand("eval", "fixed-point outcome for given reports and coins");
  eval->add_option("--theta-v", me_theta_v)->required();
  eval->add_option("--theta-a", me_theta_a)->required();
  eval->add_option("--q", me_q);
  eval->add_option("--p-bar", me_p_bar, "default 1/(2(1-q))");
  eval->add_option("--k", me_k);
  eval->add_option("--k-theta", me_k_theta);
  eval->add_option("--s0", me_s0)->required();
  eval->add_option("--s1", me_s1)->required();

  std::string vb_q = "1/4";
  std::size_t vb_grid = 64;
  unsigned vb_step_exp = 10;
  auto* verify = mech->add_subcommand("verify-bic", "grid check of incentive compatibility");
  verify->add_option("--q", vb_q);
  verify->add_option("--grid", vb_grid, "attacker grid points per axis");
  verify->add_option("--step-exp", vb_step_exp, "victim report grid step 2^-e");

  // protocol roles
  std::string v_config, v_listen, v_seed, v_transcript;
  auto* victim = app.add_subcommand("victim", "run the garbler side of the protocol");
  victim->add_option("--config", v_config)->required();
  victim->add_option("--listen", v_listen)->required();
  victim->add_option("--seed", v_seed, "hex seed for a reproducible test run");
  victim->add_option("--transcript", v_transcript);

  std::string a_config, a_connect, a_seed, a_transcript;
  auto* attacker = app.add_subcommand("attacker", "run the evaluator side of the protocol");
  attacker->add_option("--config", a_config)->required();
  attacker->add_option("--connect", a_connect)->required();
  attacker->add_option("--seed", a_seed, "hex seed for a reproducible test run");
  attacker->add_option("--transcript", a_transcript);

  unsigned bench_reps = 9;
  auto* bench_cmd = app.add_subcommand("bench", "loopback timing over k_theta in {8,16}, k in {8,16,32}");
  bench_cmd->add_option("--reps", bench_reps);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*offers) {
      bargaining::BargainingInstance inst{offers_profile.load(), parse_money(offers_r_min), std::nullopt};
      std::size_t n = offers_horizon;
      if (n == 0) {
        try {
          n = bargaining::determine_horizon(inst);
        } catch (const bargaining::HorizonError& e) {
          print_horizon_error(e);
          return 1;
        }
      }
      const auto schedule = bargaining::closed_form_schedule(inst.victim.profile, n);
      if (offers_csv) {
        std::cout << "round,offer,reservation\n";
        for (std::size_t i = 1; i <= n; ++i)
          std::cout << i << "," << to_string(schedule.at(i)) << "," << to_string(reservation(inst.victim, i))
                    << "\n";
      } else {
        std::cout << "N = " << n << "\n";
        std::cout << "round  offer  reservation\n";
        for (std::size_t i = 1; i <= n; ++i)
          std::cout << i << "  " << to_string(schedule.at(i)) << "  " << to_string(reservation(inst.victim, i))
                    << "\n";
      }
      if (auto lint = bargaining::marginal_loss_lint(inst.victim.profile, n)) std::cerr << "warning: " << *lint << "\n";
      return 0;
    }
    if (*horizon) {
      bargaining::BargainingInstance inst{horizon_profile.load(), parse_money(horizon_r_min), std::nullopt};
      try {
        std::cout << "N = " << bargaining::determine_horizon(inst) << "\n";
      } catch (const bargaining::HorizonError& e) {
        print_horizon_error(e);
        return 1;
      }
      return 0;
    }
    if (*rubinstein) {
      try {
        std::cout << to_string(bargaining::rubinstein_split(parse_money(rub_v), parse_money(rub_r_max),
                                                            parse_money(rub_r_min)))
                  << "\n";
      } catch (const bargaining::NoDeal& e) {
        std::cerr << "no deal: " << e.what() << "\n";
        return 1;
      }
      return 0;
    }
    if (*stage_game) {
      stage::ReputationParams rep{parse_money(sg_tau_g), parse_money(sg_tau_l), parse_money(sg_kappa_g),
                                  parse_money(sg_kappa_l), parse_money(sg_c_r), parse_money(sg_c_d)};
      const auto eq = stage::spne(rep, parse_money(sg_r_f), parse_money(sg_v), parse_money(sg_r_max));
      std::cout << "equilibrium: (" << stage::to_string(eq.victim_action) << ", "
                << stage::to_string(eq.attacker_action) << ")\n"
                << "victim payoff: " << to_string(eq.payoffs.victim) << "\n"
                << "attacker payoff: " << to_string(eq.payoffs.attacker) << "\n";
      for (const auto& w : eq.warnings) std::cerr << "warning: " << w << "\n";
      return 0;
    }
    if (*eval) {
      mechanism::MechanismParams p;
      p.q = parse_money(me_q);
      p.p_bar = me_p_bar.empty() ? mechanism::p_bar_for(p.q) : parse_money(me_p_bar);
      p.k = me_k;
      p.k_theta = me_k_theta;
      mechanism::validate(p);
      for (const auto& w : mechanism::warnings(p)) std::cerr << "warning: " << w << "\n";
      const auto scaled = mechanism::scale(p);
      const auto o = mechanism::outcome_fixed(p, scaled, {me_theta_v, me_theta_a}, me_s0, me_s1);
      std::cout << "r_f=" << o.r_f << " alpha=" << o.alpha << " sigma=" << o.sigma << "\n";
      return 0;
    }
    if (*verify) {
      mechanism::MechanismParams p;
      p.q = parse_money(vb_q);
      p.p_bar = mechanism::p_bar_for(p.q);
      mechanism::validate(p);
      const auto dom = mechanism::verify_attacker_dominance(p, vb_grid);
      std::cout << (dom.violations == 0 ? "PASS" : "FAIL") << " attacker dominance: " << dom.cases
                << " cases, " << dom.violations << " violations, worst gap " << to_string(dom.worst_gap) << "\n";
      std::vector<Money> thetas;
      for (int i = 1; i <= 16; ++i) thetas.push_back(fraction(i, 17));
      const auto opt = mechanism::verify_victim_optimality(p, vb_step_exp, thetas);
      std::cout << (opt.violations == 0 ? "PASS" : "FAIL") << " victim optimality: " << opt.cases
                << " cases, " << opt.violations << " violations, worst distance "
                << to_string(opt.worst_distance) << " (step " << to_string(opt.step) << ")\n";
      return dom.violations == 0 && opt.violations == 0 ? 0 : 1;
    }
    if (*victim) {
      const auto cfg = negotiation_config_from(load_key_values(v_config), Role::Victim);
      protocol::SessionResult r;
      try {
        net::TcpListener listener(v_listen);
        net::TcpChannel ch = listener.accept(std::chrono::minutes(10));
        r = protocol::run_victim(cfg, ch, session_options(v_seed));
      } catch (const net::TransportError& e) {
        r.abort = protocol::AbortInfo{protocol::AbortInfo::Kind::Transport, protocol::kStageTransport, e.what()};
      }
      return report_session(r, v_transcript);
    }
    if (*attacker) {
      const auto cfg = negotiation_config_from(load_key_values(a_config), Role::Attacker);
      protocol::SessionResult r;
      try {
        net::TcpChannel ch = net::TcpChannel::connect(a_connect);
        r = protocol::run_attacker(cfg, ch, session_options(a_seed));
      } catch (const net::TransportError& e) {
        r.abort = protocol::AbortInfo{protocol::AbortInfo::Kind::Transport, protocol::kStageTransport, e.what()};
      }
      return report_session(r, a_transcript);
    }
    if (*bench_cmd) {
      const auto grid = bench::run_grid({8, 16}, {8, 16, 32}, bench_reps);
      bench::print_table(std::cout, grid);
      bool ok = bench::monotone(grid);
      for (const auto& c : grid.cells) ok = ok && c.all_ok && c.max_ms <= 1000;
      std::cout << (ok ? "trend: monotone" : "trend: NOT monotone or a cell failed") << "\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
