#pragma once

#include "ransomneg/loss_model.hpp"
#include "ransomneg/mechanism.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ransomneg {

// Plain "key = value" lines; '#' starts a comment. Later keys override earlier.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
// Throws std::runtime_error when the file cannot be read.
KeyValues load_key_values(const std::filesystem::path& path);

// Loss profile keys: l0, round_length, blocks (comma separated), tail.
LossProfile loss_profile_from(const KeyValues& kv);
// Adds r_max.
VictimParams victim_params_from(const KeyValues& kv);

enum class Role { Victim, Attacker };

struct NegotiationConfig {
  Role role = Role::Victim;
  mechanism::MechanismParams params;
  Money exchange_round{0};  // t_e, counted in bargaining rounds
  std::uint64_t theta = 0;  // own reported type, < 2^k_theta
};

// Reads q, p_bar, k, k_theta and t_e. The private type comes from theta_hex;
// a victim without theta_hex uses floor(psi(t_e)) from the loss-profile keys.
// Throws std::invalid_argument.
NegotiationConfig negotiation_config_from(const KeyValues& kv, Role role);

// Canonical text of the public strategy profile exchanged in HELLO.
std::string profile_text(const NegotiationConfig& cfg);
// Parses profile_text output back into params and exchange round.
std::pair<mechanism::MechanismParams, Money> parse_profile_text(const std::string& text);

}  // namespace ransomneg
