#include "ransomneg/stage_game.hpp"

#include <stdexcept>

namespace ransomneg::stage {

std::string to_string(VictimAction a) { return a == VictimAction::V1 ? "V1" : "V2"; }

std::string to_string(AttackerAction a) {
  switch (a) {
    case AttackerAction::A4: return "A4";
    case AttackerAction::A5: return "A5";
    case AttackerAction::A6: return "A6";
    case AttackerAction::A7: return "A7";
  }
  return "?";
}

Payoffs payoffs(const ReputationParams& rep, const Money& r_f, const Money& v,
                VictimAction victim, AttackerAction attacker) {
  if (victim == VictimAction::V1) {
    if (attacker == AttackerAction::A4) return {-r_f, r_f - rep.c_r + rep.tau_g};
    if (attacker == AttackerAction::A5) return {-r_f - v, r_f - rep.c_d - rep.tau_l};
  } else {
    if (attacker == AttackerAction::A6) return {Money(0), -rep.c_r - rep.kappa_l + rep.tau_g};
    if (attacker == AttackerAction::A7) return {-v, -rep.c_d + rep.kappa_g};
  }
  throw std::invalid_argument("attacker action " + to_string(attacker) +
                              " does not follow victim action " + to_string(victim));
}

std::vector<std::string> premise_warnings(const ReputationParams& rep) {
  std::vector<std::string> w;
  if (!(rep.c_r > rep.c_d)) w.push_back("c_r > c_d does not hold");
  if (rep.c_d < 0) w.push_back("c_d is negative");
  if (rep.tau_g < 0 || rep.tau_l < 0 || rep.kappa_g < 0 || rep.kappa_l < 0)
    w.push_back("negative reputation delta");

  const bool no_trust = rep.tau_g == 0 && rep.tau_l == 0;
  const bool threat = rep.kappa_g > 0 && rep.kappa_l > 0;
  const bool reputed = rep.kappa_g > rep.tau_g && rep.kappa_l > rep.tau_l && rep.tau_g > 0 &&
                       rep.tau_l > 0 && rep.tau_g + rep.tau_l > rep.c_r;
  if (!(no_trust && threat) && !reputed)
    w.push_back("neither the zero-trust (tau=0, kappa>0) nor the reputation "
                "(kappa>tau>0, tau_g+tau_l>c_r) premise holds");
  return w;
}

namespace {

AttackerAction best_response(const ReputationParams& rep, const Money& r_f, const Money& v,
                             VictimAction victim) {
  const AttackerAction first = victim == VictimAction::V1 ? AttackerAction::A4 : AttackerAction::A6;
  const AttackerAction second = victim == VictimAction::V1 ? AttackerAction::A5 : AttackerAction::A7;
  const Money a = payoffs(rep, r_f, v, victim, first).attacker;
  const Money b = payoffs(rep, r_f, v, victim, second).attacker;
  return b > a ? second : first;
}

}  // namespace

StageOutcome spne(const ReputationParams& rep, const Money& r_f, const Money& v,
                  const Money& r_max) {
  if (r_f < 0) throw std::invalid_argument("ransom must be non-negative");

  const AttackerAction after_pay = best_response(rep, r_f, v, VictimAction::V1);
  const AttackerAction after_refuse = best_response(rep, r_f, v, VictimAction::V2);
  const Payoffs pay = payoffs(rep, r_f, v, VictimAction::V1, after_pay);
  const Payoffs refuse = payoffs(rep, r_f, v, VictimAction::V2, after_refuse);

  const bool can_pay = r_f < r_max;
  StageOutcome out{VictimAction::V2, after_refuse, refuse, premise_warnings(rep)};
  if (can_pay && pay.victim > refuse.victim) {
    out.victim_action = VictimAction::V1;
    out.attacker_action = after_pay;
    out.payoffs = pay;
  }
  return out;
}

}  // namespace ransomneg::stage
