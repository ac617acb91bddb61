#include "ransomneg/protocol.hpp"

#include "ransomneg/garble.hpp"
#include "ransomneg/ot.hpp"

#include <map>
#include <thread>

namespace ransomneg::protocol {

using crypto::Block;
using crypto::Bytes;
using net::Frame;
using net::MessageType;

int exit_code(const std::optional<AbortInfo>& abort) {
  if (!abort) return 0;
  return abort->kind == AbortInfo::Kind::Transport ? 3 : 2;
}

namespace {

// Unwinds a session; converted into SessionResult::abort at the top level.
struct SessionAbort {
  AbortInfo info;
};

[[noreturn]] void fail(const char* stage, const std::string& reason) {
  throw SessionAbort{{AbortInfo::Kind::Check, stage, reason}};
}

Bytes text_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::string bytes_text(const Bytes& b) { return std::string(b.begin(), b.end()); }

Frame expect(net::Channel& ch, MessageType want) {
  Frame f = ch.receive();
  if (f.type == MessageType::Abort) {
    const std::string text = bytes_text(f.payload);
    const auto tab = text.find('\t');
    throw SessionAbort{{AbortInfo::Kind::Peer, text.substr(0, tab),
                        tab == std::string::npos ? std::string() : text.substr(tab + 1)}};
  }
  if (f.type != want)
    fail(kStageStateMachine, "expected " + net::to_string(want) + ", received " + net::to_string(f.type));
  return f;
}

Bytes encode_blocks(const std::vector<Block>& blocks) {
  Bytes out(blocks.size() * 16);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].write(out.data() + 16 * i);
  return out;
}

std::vector<Block> decode_blocks(const Bytes& bytes, std::size_t expected, const char* stage) {
  if (bytes.size() != expected * 16)
    fail(stage, "expected " + std::to_string(expected) + " labels, got " + std::to_string(bytes.size()) + " bytes");
  std::vector<Block> out(expected);
  for (std::size_t i = 0; i < expected; ++i) out[i] = Block::read(bytes.data() + 16 * i);
  return out;
}

Bytes master_key(const SessionOptions& options) {
  return options.seed ? *options.seed : crypto::system_random(32);
}

std::vector<bool> concat_bits(std::initializer_list<std::pair<std::uint64_t, unsigned>> parts) {
  std::vector<bool> bits;
  for (auto [value, width] : parts) {
    const auto b = circuit::to_bits(value, width);
    bits.insert(bits.end(), b.begin(), b.end());
  }
  return bits;
}

// Runs `body`, translating every failure into a structured abort and telling
// the peer about locally detected ones.
template <typename Body>
SessionResult run_session(net::Channel& channel, Body body) {
  SessionResult res;
  net::RecordingChannel ch(channel, res.transcript);
  auto notify = [&](const AbortInfo& info) {
    try {
      ch.send({MessageType::Abort, text_bytes(info.stage + "\t" + info.reason)});
      ch.finish();
    } catch (const net::TransportError&) {
    }
  };
  try {
    body(ch, res);
  } catch (const SessionAbort& a) {
    res.abort = a.info;
    if (a.info.kind == AbortInfo::Kind::Check) notify(a.info);
  } catch (const net::TransportError& e) {
    res.abort = AbortInfo{AbortInfo::Kind::Transport, kStageTransport, e.what()};
  } catch (const std::exception& e) {
    res.abort = AbortInfo{AbortInfo::Kind::Check, kStageStateMachine, e.what()};
    notify(*res.abort);
  }
  if (res.abort) res.outcome.reset();
  return res;
}

}  // namespace

Bytes encode_outcome(const mechanism::FixedOutcome& o) {
  Bytes out;
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(o.r_f >> (8 * i)));
  out.push_back(o.alpha ? 1 : 0);
  out.push_back(o.sigma ? 1 : 0);
  return out;
}

mechanism::FixedOutcome decode_outcome(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 10 || bytes[8] > 1 || bytes[9] > 1) throw std::invalid_argument("malformed outcome");
  mechanism::FixedOutcome o;
  for (int i = 0; i < 8; ++i) o.r_f |= std::uint64_t{bytes[i]} << (8 * i);
  o.alpha = bytes[8] != 0;
  o.sigma = bytes[9] != 0;
  return o;
}

std::size_t alpha_feeding_table(const circuit::Circuit& c) {
  std::map<circuit::Wire, std::size_t> producer;
  std::vector<std::size_t> and_ordinal(c.gates.size(), 0);
  std::size_t ands = 0;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    producer[c.gates[i].out] = i;
    if (c.gates[i].kind == circuit::GateKind::And) and_ordinal[i] = ands++;
  }
  std::vector<circuit::Wire> stack{c.output("alpha").wires.at(0)};
  while (!stack.empty()) {
    const circuit::Wire w = stack.back();
    stack.pop_back();
    auto it = producer.find(w);
    if (it == producer.end()) continue;
    const auto& g = c.gates[it->second];
    if (g.kind == circuit::GateKind::And) return and_ordinal[it->second];
    stack.push_back(g.in_a);
    if (g.kind == circuit::GateKind::Xor) stack.push_back(g.in_b);
  }
  throw std::logic_error("alpha output does not depend on an AND gate");
}

SessionResult run_victim(const NegotiationConfig& cfg, net::Channel& channel,
                         const SessionOptions& options) {
  return run_session(channel, [&](net::Channel& ch, SessionResult& res) {
    const auto& params = cfg.params;
    const Bytes master = master_key(options);

    // Step 1: propose the strategy profile.
    ch.send({MessageType::Hello, text_bytes(profile_text(cfg))});
    expect(ch, MessageType::PiAck);

    // Step 2: build and garble the circuit for the agreed profile.
    const auto& circuit_params = options.tamper.circuit_params ? *options.tamper.circuit_params : params;
    const circuit::Circuit circuit =
        circuit::build_mechanism_circuit(circuit_params, mechanism::scale(circuit_params));
    garble::Garbling g = garble::garble(circuit, crypto::derive_seed(master, "victim/garble"));
    if (options.tamper.flip_table_byte) {
      for (auto& row : g.gc.and_tables.at(alpha_feeding_table(circuit))) row.lo ^= 0xff;
    }
    ch.send({MessageType::Circuit, garble::serialize(g.gc)});

    // Step 3(a): own coin shares and type, encoded directly.
    crypto::Prg coins(crypto::derive_seed(master, "victim/coins"));
    const std::uint64_t s0 = coins.next_bits(params.k);
    const std::uint64_t s1 = coins.next_bits(params.k);
    const auto own_bits = concat_bits({{s0, params.k}, {s1, params.k}, {cfg.theta, params.k_theta}});
    std::vector<Block> own_labels;
    for (std::size_t w = 0; w < own_bits.size(); ++w) own_labels.push_back(g.labels.input_label(w, own_bits[w]));
    ch.send({MessageType::GarblerInputLabels, encode_blocks(own_labels)});

    // Step 3(b): OT sender for the attacker's input wires.
    crypto::Prg ot_prg(crypto::derive_seed(master, "victim/ot"));
    ot::Sender sender(ot_prg);
    ch.send({MessageType::OtMsg1, sender.first_message()});
    const Frame m2 = expect(ch, MessageType::OtMsg2);
    std::vector<std::pair<Block, Block>> pairs;
    for (std::size_t w = own_bits.size(); w < circuit.input_count(); ++w) pairs.push_back(g.labels.input_pair(w));
    ch.send({MessageType::OtMsg3, sender.respond(m2.payload, pairs)});

    // Step 5: check the returned output labels.
    const Frame out = expect(ch, MessageType::OutputLabels);
    const auto labels = decode_blocks(out.payload, g.labels.output_zero.size(), kStageOutputCheck);
    std::vector<bool> bits;
    try {
      bits = garble::verify_output_labels(g.labels, labels);
    } catch (const garble::GarbleError& e) {
      fail(kStageOutputCheck, e.what());
    }
    const auto outcome = circuit::decode_mechanism_outputs(circuit, bits);
    ch.send({MessageType::ResultAck, encode_outcome(outcome)});

    res.outcome = outcome;
    if (options.seed) {
      res.s0 = s0;
      res.s1 = s1;
    }
  });
}

SessionResult run_attacker(const NegotiationConfig& cfg, net::Channel& channel,
                           const SessionOptions& options) {
  return run_session(channel, [&](net::Channel& ch, SessionResult& res) {
    const auto& params = cfg.params;
    const Bytes master = master_key(options);

    // Step 1: accept only the profile this party agreed to.
    const Frame hello = expect(ch, MessageType::Hello);
    mechanism::MechanismParams proposed;
    Money proposed_te;
    try {
      std::tie(proposed, proposed_te) = parse_profile_text(bytes_text(hello.payload));
    } catch (const std::exception& e) {
      fail(kStagePi, std::string("unreadable profile: ") + e.what());
    }
    if (!(proposed == params) || proposed_te != cfg.exchange_round)
      fail(kStagePi, "proposed profile differs from the local one");
    ch.send({MessageType::PiAck, {}});

    // Step 4 check, done before evaluating: rebuild locally and compare digests.
    const Frame circuit_frame = expect(ch, MessageType::Circuit);
    garble::GarbledCircuit gc;
    try {
      gc = garble::deserialize(circuit_frame.payload);
    } catch (const garble::GarbleError& e) {
      fail(kStageCircuit, e.what());
    }
    const circuit::Circuit circuit = circuit::build_mechanism_circuit(params, mechanism::scale(params));
    if (gc.base_circuit_digest != circuit::circuit_digest(circuit))
      fail(kStageCircuit, "garbled circuit does not correspond to the agreed mechanism");

    const std::size_t garbler_inputs = 2 * params.k + params.k_theta;
    const Frame garbler_frame = expect(ch, MessageType::GarblerInputLabels);
    std::vector<Block> labels = decode_blocks(garbler_frame.payload, garbler_inputs, kStageStateMachine);

    // Step 3(b): own inputs by OT.
    crypto::Prg coins(crypto::derive_seed(master, "attacker/coins"));
    const std::uint64_t s0 = coins.next_bits(params.k);
    const std::uint64_t s1 = coins.next_bits(params.k);
    crypto::Prg ot_prg(crypto::derive_seed(master, "attacker/ot"));
    ot::Receiver receiver(ot_prg, concat_bits({{s0, params.k}, {s1, params.k}, {cfg.theta, params.k_theta}}));
    const Frame m1 = expect(ch, MessageType::OtMsg1);
    ch.send({MessageType::OtMsg2, receiver.respond(m1.payload)});
    const Frame m3 = expect(ch, MessageType::OtMsg3);
    const auto own = receiver.finish(m3.payload);
    labels.insert(labels.end(), own.begin(), own.end());

    // Step 4: evaluate and extract.
    std::vector<Block> out_labels;
    garble::DecodedOutput decoded;
    try {
      out_labels = garble::evaluate(gc, circuit, labels);
      decoded = garble::decode_and_prove(gc, out_labels);
    } catch (const garble::GarbleError& e) {
      fail(kStageDecode, e.what());
    }
    const auto outcome = circuit::decode_mechanism_outputs(circuit, decoded.bits);

    // Step 5: hand the labels back for verification.
    if (options.tamper.forge_output_label) out_labels.at(0).hi ^= 1;
    ch.send({MessageType::OutputLabels, encode_blocks(out_labels)});
    const Frame ack = expect(ch, MessageType::ResultAck);
    if (decode_outcome(ack.payload) != outcome) fail(kStageResult, "victim reports a different outcome");

    res.outcome = outcome;
    if (options.seed) {
      res.s0 = s0;
      res.s1 = s1;
    }
  });
}

LoopbackResult run_loopback(const NegotiationConfig& victim_cfg, const NegotiationConfig& attacker_cfg,
                            const SessionOptions& victim_options, const SessionOptions& attacker_options,
                            std::chrono::milliseconds timeout) {
  LoopbackResult result;
  const auto start = std::chrono::steady_clock::now();
  net::TcpListener listener("127.0.0.1:0");
  std::thread victim([&] {
    try {
      net::TcpChannel ch = listener.accept(timeout);
      result.victim = run_victim(victim_cfg, ch, victim_options);
    } catch (const net::TransportError& e) {
      result.victim.abort = AbortInfo{AbortInfo::Kind::Transport, kStageTransport, e.what()};
    }
  });
  try {
    net::TcpChannel ch = net::TcpChannel::connect("127.0.0.1:" + std::to_string(listener.port()), timeout);
    result.attacker = run_attacker(attacker_cfg, ch, attacker_options);
  } catch (const net::TransportError& e) {
    result.attacker.abort = AbortInfo{AbortInfo::Kind::Transport, kStageTransport, e.what()};
  }
  victim.join();
  result.elapsed = std::chrono::steady_clock::now() - start;
  return result;
}

}  // namespace ransomneg::protocol
