#include "ransomneg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ransomneg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::string& require(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::invalid_argument("missing config key '" + key + "'");
  return it->second;
}

Money money_or(const KeyValues& kv, const std::string& key, const Money& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_money(it->second);
}

unsigned parse_bits(const std::string& text, const char* what) {
  const Money v = parse_money(text);
  if (v.get_den() != 1 || v < 1 || v > 62)
    throw std::invalid_argument(std::string(what) + " must be an integer in [1, 62]");
  return static_cast<unsigned>(v.get_num().get_ui());
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

LossProfile loss_profile_from(const KeyValues& kv) {
  std::vector<Money> blocks;
  if (auto it = kv.find("blocks"); it != kv.end()) {
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (!item.empty()) blocks.push_back(parse_money(item));
    }
  }
  return LossProfile(money_or(kv, "l0", 0), std::move(blocks), money_or(kv, "tail", 0),
                     money_or(kv, "round_length", 1));
}

VictimParams victim_params_from(const KeyValues& kv) {
  LossProfile profile = loss_profile_from(kv);
  Money r_max = kv.count("r_max") ? parse_money(kv.at("r_max")) : profile.total_value();
  return VictimParams(std::move(r_max), std::move(profile));
}

NegotiationConfig negotiation_config_from(const KeyValues& kv, Role role) {
  NegotiationConfig cfg;
  cfg.role = role;
  cfg.params.q = parse_money(require(kv, "q"));
  cfg.params.p_bar = kv.count("p_bar") ? parse_money(kv.at("p_bar")) : mechanism::p_bar_for(cfg.params.q);
  cfg.params.k = parse_bits(require(kv, "k"), "k");
  cfg.params.k_theta = parse_bits(require(kv, "k_theta"), "k_theta");
  mechanism::validate(cfg.params);
  cfg.exchange_round = money_or(kv, "t_e", 0);
  if (cfg.exchange_round < 0 || cfg.exchange_round.get_den() != 1)
    throw std::invalid_argument("t_e must be a non-negative whole number of rounds");

  const std::uint64_t limit = std::uint64_t{1} << cfg.params.k_theta;
  if (auto it = kv.find("theta_hex"); it != kv.end()) {
    std::string hex = it->second;
    if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
    if (hex.empty() || hex.size() > 16 || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
      throw std::invalid_argument("theta_hex must be a hexadecimal integer of at most 64 bits");
    cfg.theta = std::stoull(hex, nullptr, 16);
  } else if (role == Role::Victim) {
    const VictimParams victim = victim_params_from(kv);
    const auto round = static_cast<RoundIndex>(cfg.exchange_round.get_num().get_ui());
    const mpz_class psi = floor_of(reservation(victim, round));
    if (psi >= mpz_class(std::to_string(limit)))
      throw std::invalid_argument("psi(t_e) does not fit in k_theta bits");
    cfg.theta = psi.get_ui();
  } else {
    throw std::invalid_argument("missing config key 'theta_hex'");
  }
  if (cfg.theta >= limit) throw std::invalid_argument("theta does not fit in k_theta bits");
  return cfg;
}

std::string profile_text(const NegotiationConfig& cfg) {
  std::ostringstream out;
  out << "q=" << to_string(cfg.params.q) << "\np_bar=" << to_string(cfg.params.p_bar)
      << "\nk=" << cfg.params.k << "\nk_theta=" << cfg.params.k_theta
      << "\nt_e=" << to_string(cfg.exchange_round) << "\n";
  return out.str();
}

std::pair<mechanism::MechanismParams, Money> parse_profile_text(const std::string& text) {
  const KeyValues kv = parse_key_values(text);
  mechanism::MechanismParams p;
  p.q = parse_money(require(kv, "q"));
  p.p_bar = parse_money(require(kv, "p_bar"));
  p.k = parse_bits(require(kv, "k"), "k");
  p.k_theta = parse_bits(require(kv, "k_theta"), "k_theta");
  mechanism::validate(p);
  return {p, parse_money(require(kv, "t_e"))};
}

}  // namespace ransomneg
