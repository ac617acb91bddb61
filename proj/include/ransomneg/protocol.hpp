#pragma once

#include "ransomneg/channel.hpp"
#include "ransomneg/circuit.hpp"
#include "ransomneg/config.hpp"
#include "ransomneg/mechanism.hpp"
#include "ransomneg/transcript.hpp"

#include <chrono>
#include <optional>
#include <string>

namespace ransomneg::protocol {

// Stage tags carried by aborts.
inline constexpr const char* kStagePi = "step1-profile";
inline constexpr const char* kStageCircuit = "step4-circuit-check";
inline constexpr const char* kStageDecode = "step4-output-decode";
inline constexpr const char* kStageOutputCheck = "step5-output-check";
inline constexpr const char* kStageResult = "result-ack";
inline constexpr const char* kStageStateMachine = "state-machine";
inline constexpr const char* kStageTransport = "transport";

struct AbortInfo {
  enum class Kind {
    Check,      // a local consistency check failed
    Peer,       // the peer sent ABORT
    Transport,  // connection failure or timeout
  };
  Kind kind;
  std::string stage;
  std::string reason;
};

// Exit code of a session outcome: 0 success, 2 abort by check, 3 transport.
int exit_code(const std::optional<AbortInfo>& abort);

// Deliberate misbehaviour for negative-path tests.
struct TamperOptions {
  // Victim: garble a circuit built from these parameters instead of the agreed ones.
  std::optional<mechanism::MechanismParams> circuit_params;
  // Victim: flip one byte of every row of the AND table feeding the alpha output.
  bool flip_table_byte = false;
  // Attacker: flip a bit of the first output label before sending it.
  bool forge_output_label = false;
};

struct SessionOptions {
  // Seeded test mode: all randomness derives from this key and the session
  // exposes its coin shares. Otherwise randomness comes from the OS.
  std::optional<crypto::Bytes> seed;
  TamperOptions tamper;
};

struct SessionResult {
  std::optional<mechanism::FixedOutcome> outcome;
  std::optional<AbortInfo> abort;
  net::SessionTranscript transcript;
  // Own coin shares; populated in seeded mode only.
  std::optional<std::uint64_t> s0;
  std::optional<std::uint64_t> s1;

  bool ok() const { return outcome.has_value(); }
};

// Garbler side. Never throws for protocol failures; they become `abort`.
SessionResult run_victim(const NegotiationConfig& cfg, net::Channel& channel,
                         const SessionOptions& options = {});

// Evaluator side.
SessionResult run_attacker(const NegotiationConfig& cfg, net::Channel& channel,
                           const SessionOptions& options = {});

// Outcome encoding in RESULT_ACK: u64 r_f | u8 alpha | u8 sigma.
crypto::Bytes encode_outcome(const mechanism::FixedOutcome& o);
mechanism::FixedOutcome decode_outcome(std::span<const std::uint8_t> bytes);

// Index of the AND table whose output reaches the alpha output through XOR
// and NOT gates only.
std::size_t alpha_feeding_table(const circuit::Circuit& c);

struct LoopbackResult {
  SessionResult victim;
  SessionResult attacker;
  std::chrono::duration<double, std::milli> elapsed;
};

// Runs both roles over a 127.0.0.1 TCP connection, victim on a helper thread.
LoopbackResult run_loopback(const NegotiationConfig& victim_cfg, const NegotiationConfig& attacker_cfg,
                            const SessionOptions& victim_options = {},
                            const SessionOptions& attacker_options = {},
                            std::chrono::milliseconds timeout = std::chrono::seconds(10));

}  // namespace ransomneg::protocol
