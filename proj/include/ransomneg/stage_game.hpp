#pragma once

#include "ransomneg/money.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ransomneg::stage {

enum class VictimAction { V1, V2 };                // pay, don't pay
enum class AttackerAction { A4, A5, A6, A7 };      // cooperate, defect, release, punish

std::string to_string(VictimAction a);
std::string to_string(AttackerAction a);

struct ReputationParams {
  Money tau_g{0};
  Money tau_l{0};
  Money kappa_g{0};
  Money kappa_l{0};
  Money c_r{0};
  Money c_d{0};
};

struct Payoffs {
  Money victim;
  Money attacker;
};

struct StageOutcome {
  VictimAction victim_action;
  AttackerAction attacker_action;
  Payoffs payoffs;
  std::vector<std::string> warnings;
};

// Leaf payoffs of the one-shot game tree. Throws std::invalid_argument when
// the attacker action does not follow the victim action (A4/A5 after V1,
// A6/A7 after V2).
Payoffs payoffs(const ReputationParams& rep, const Money& r_f, const Money& v,
                VictimAction victim, AttackerAction attacker);

// Checks the premises of the two equilibrium characterizations and the
// parameter-type invariants; returns human-readable warnings.
std::vector<std::string> premise_warnings(const ReputationParams& rep);

// Subgame perfect equilibrium by backward induction. Paying is available to
// the victim only when r_f < r_max. Ties: the victim refuses (V2); the
// attacker picks the lower-numbered action.
StageOutcome spne(const ReputationParams& rep, const Money& r_f, const Money& v,
                  const Money& r_max);

}  // namespace ransomneg::stage
