#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ransomneg/protocol.hpp"

#include <filesystem>
#include <random>
#include <thread>

using namespace ransomneg;
using namespace ransomneg::protocol;
using net::MessageType;

namespace {

NegotiationConfig config(Role role, std::uint64_t theta, unsigned k_theta = 8, unsigned k = 8,
                         Money q = fraction(1, 4)) {
  NegotiationConfig cfg;
  cfg.role = role;
  cfg.params = {q, mechanism::p_bar_for(q), k_theta, k};
  cfg.theta = theta;
  return cfg;
}

SessionOptions seeded(std::uint8_t tag) {
  SessionOptions o;
  o.seed = crypto::Bytes(16, tag);
  return o;
}

mechanism::FixedOutcome expected(const LoopbackResult& r, const NegotiationConfig& v, const NegotiationConfig& a) {
  return mechanism::outcome_fixed(v.params, mechanism::scale(v.params), {v.theta, a.theta},
                                  *r.victim.s0 ^ *r.attacker.s0, *r.victim.s1 ^ *r.attacker.s1);
}

std::vector<std::pair<std::string, std::uint32_t>> shape(const net::SessionTranscript& t) {
  std::vector<std::pair<std::string, std::uint32_t>> out;
  for (const auto& r : t.records()) out.emplace_back(r.type, r.length);
  return out;
}

// Attacker-side wrapper that drops the connection instead of sending OT_MSG2.
class DropBeforeOt final : public net::Channel {
 public:
  explicit DropBeforeOt(net::TcpChannel& inner) : inner_(inner) {}
  void send(const net::Frame& f) override {
    if (f.type == MessageType::OtMsg2) {
      inner_.close();
      throw net::TransportError("connection dropped");
    }
    inner_.send(f);
  }
  net::Frame receive() override { return inner_.receive(); }

 private:
  net::TcpChannel& inner_;
};

// Runs `role` against a scripted peer that sends `frames`, half-closes and
// drains whatever comes back.
SessionResult against_script(const std::function<SessionResult(net::Channel&)>& role,
                             const std::vector<net::Frame>& frames) {
  net::TcpListener listener("127.0.0.1:0");
  SessionResult result;
  std::thread t([&] {
    net::TcpChannel ch = listener.accept(std::chrono::seconds(5));
    result = role(ch);
  });
  {
    net::TcpChannel peer = net::TcpChannel::connect("127.0.0.1:" + std::to_string(listener.port()),
                                                    std::chrono::seconds(5));
    try {
      for (const auto& f : frames) peer.send(f);
      peer.shutdown_send();
      for (;;) peer.receive();
    } catch (const net::TransportError&) {
    }
  }
  t.join();
  return result;
}

}  // namespace

TEST_CASE("frame encoding") {
  const auto bytes = net::encode_frame({MessageType::OtMsg1, {1, 2, 3}});
  CHECK(bytes == crypto::Bytes{3, 0, 0, 0, 5, 1, 2, 3});
  CHECK(net::to_string(MessageType::Abort) == "ABORT");
  CHECK(net::split_address("127.0.0.1:8080") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 8080});
  CHECK_THROWS(net::split_address("nope"));
}

TEST_CASE("outcome encoding") {
  const mechanism::FixedOutcome o{true, 0x1234, false};
  CHECK(decode_outcome(encode_outcome(o)) == o);
  CHECK_THROWS(decode_outcome(crypto::Bytes(9)));
}

TEST_CASE("negotiation config") {
  const auto kv = parse_key_values(
      "q = 1/4\nk = 8\nk_theta = 8\nt_e = 1\nblocks = 40, 30, 30\ntail = 20\nr_max = 100\n");
  const auto victim = negotiation_config_from(kv, Role::Victim);
  CHECK(victim.params.p_bar == fraction(2, 3));
  CHECK(victim.theta == 80);
  auto kv2 = kv;
  kv2["r_max"] = "50.5";
  CHECK(negotiation_config_from(kv2, Role::Victim).theta == 50);
  CHECK_THROWS(negotiation_config_from(kv, Role::Attacker));
  kv2["theta_hex"] = "0x1e";
  CHECK(negotiation_config_from(kv2, Role::Attacker).theta == 30);
  kv2["theta_hex"] = "100";
  CHECK_THROWS(negotiation_config_from(kv2, Role::Attacker));
  kv2["theta_hex"] = "1e";
  kv2["p_bar"] = "1/2";
  CHECK_THROWS(negotiation_config_from(kv2, Role::Attacker));

  const auto [params, t_e] = parse_profile_text(profile_text(victim));
  CHECK(params == victim.params);
  CHECK(t_e == 1);
}

TEST_CASE("honest loopback run") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30);
  const auto r = run_loopback(v, a, seeded(1), seeded(2));
  REQUIRE(r.victim.ok());
  REQUIRE(r.attacker.ok());
  CHECK(*r.victim.outcome == *r.attacker.outcome);
  CHECK(*r.victim.outcome == expected(r, v, a));
  const auto rf = r.victim.outcome->r_f;
  CHECK((rf == 25 || rf == 100 || rf == 0));
  CHECK(exit_code(r.victim.abort) == 0);
}

TEST_CASE("attacker type above victim type ends without a deal") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 120);
  int high_branch = 0;
  for (std::uint8_t s = 0; s < 12; ++s) {
    const auto r = run_loopback(v, a, seeded(s), seeded(100 + s));
    REQUIRE(r.victim.ok());
    CHECK(*r.victim.outcome == *r.attacker.outcome);
    CHECK(*r.victim.outcome == expected(r, v, a));
    const auto scaled = mechanism::scale(v.params);
    if ((*r.victim.s0 ^ *r.attacker.s0) >= scaled.p_scale) {
      ++high_branch;
      CHECK(r.victim.outcome->r_f == 0);
      CHECK_FALSE(r.victim.outcome->alpha);
    }
  }
  CHECK(high_branch > 0);
}

TEST_CASE("randomized loopback runs agree with the plaintext mechanism") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 25; ++i) {
    const unsigned kt = i % 2 ? 8 : 12;
    const auto v = config(Role::Victim, rng() % (1u << kt), kt, 8);
    const auto a = config(Role::Attacker, rng() % (1u << kt), kt, 8);
    const auto r = run_loopback(v, a, seeded(rng()), seeded(rng()));
    REQUIRE(r.victim.ok());
    REQUIRE(r.attacker.ok());
    CHECK(*r.victim.outcome == *r.attacker.outcome);
    CHECK(*r.victim.outcome == expected(r, v, a));
  }
}

TEST_CASE("profile disagreement aborts at step 1") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30, 8, 16);
  const auto r = run_loopback(v, a, seeded(1), seeded(2));
  REQUIRE(r.attacker.abort);
  CHECK(r.attacker.abort->kind == AbortInfo::Kind::Check);
  CHECK(r.attacker.abort->stage == kStagePi);
  REQUIRE(r.victim.abort);
  CHECK(r.victim.abort->kind == AbortInfo::Kind::Peer);
  CHECK(r.victim.abort->stage == kStagePi);
  CHECK(exit_code(r.victim.abort) == 2);
  CHECK_FALSE(r.victim.outcome);
}

TEST_CASE("circuit for a different q aborts at step 4") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30);
  auto vo = seeded(1);
  vo.tamper.circuit_params = mechanism::MechanismParams{fraction(1, 8), mechanism::p_bar_for(fraction(1, 8)), 8, 8};
  const auto r = run_loopback(v, a, vo, seeded(2));
  REQUIRE(r.attacker.abort);
  CHECK(r.attacker.abort->stage == kStageCircuit);
  REQUIRE(r.victim.abort);
  CHECK(r.victim.abort->stage == kStageCircuit);
  CHECK_FALSE(r.attacker.outcome);
}

TEST_CASE("modified table byte aborts at output decoding") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30);
  auto vo = seeded(3);
  vo.tamper.flip_table_byte = true;
  const auto r = run_loopback(v, a, vo, seeded(4));
  REQUIRE(r.attacker.abort);
  CHECK(r.attacker.abort->kind == AbortInfo::Kind::Check);
  CHECK(r.attacker.abort->stage == kStageDecode);
  REQUIRE(r.victim.abort);
  CHECK(r.victim.abort->kind == AbortInfo::Kind::Peer);
  CHECK(r.victim.transcript.records().back().type == "ABORT");
}

TEST_CASE("forged output label aborts at step 5") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30);
  auto ao = seeded(6);
  ao.tamper.forge_output_label = true;
  const auto r = run_loopback(v, a, seeded(5), ao);
  REQUIRE(r.victim.abort);
  CHECK(r.victim.abort->kind == AbortInfo::Kind::Check);
  CHECK(r.victim.abort->stage == kStageOutputCheck);
  CHECK_FALSE(r.victim.outcome);
  REQUIRE(r.attacker.abort);
  CHECK(r.attacker.abort->stage == kStageOutputCheck);
  CHECK_FALSE(r.attacker.outcome);
  CHECK(r.victim.transcript.records().back().type == "ABORT");
  CHECK(r.victim.transcript.records().back().direction == net::Direction::Sent);
}

TEST_CASE("connection drop during OT is a transport abort") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30);
  net::TcpListener listener("127.0.0.1:0");
  SessionResult victim;
  std::thread t([&] {
    net::TcpChannel ch = listener.accept(std::chrono::seconds(5));
    victim = run_victim(v, ch, seeded(1));
  });
  net::TcpChannel ch = net::TcpChannel::connect("127.0.0.1:" + std::to_string(listener.port()));
  DropBeforeOt drop(ch);
  const auto attacker = run_attacker(a, drop, seeded(2));
  t.join();
  REQUIRE(attacker.abort);
  CHECK(attacker.abort->kind == AbortInfo::Kind::Transport);
  CHECK(exit_code(attacker.abort) == 3);
  CHECK_FALSE(attacker.outcome);
  REQUIRE(victim.abort);
  CHECK(victim.abort->kind == AbortInfo::Kind::Transport);
  CHECK_FALSE(victim.outcome);
}

TEST_CASE("no peer at all") {
  net::TcpListener listener("127.0.0.1:0");
  CHECK_THROWS_AS(listener.accept(std::chrono::milliseconds(50)), net::TransportError);
}

TEST_CASE("seeded runs are reproducible and transcripts persist") {
  const auto v = config(Role::Victim, 77);
  const auto a = config(Role::Attacker, 12);
  const auto r1 = run_loopback(v, a, seeded(8), seeded(9));
  const auto r2 = run_loopback(v, a, seeded(8), seeded(9));
  REQUIRE(r1.victim.ok());
  CHECK(r1.victim.transcript.payload_digests() == r2.victim.transcript.payload_digests());
  CHECK(r1.attacker.transcript.payload_digests() == r2.attacker.transcript.payload_digests());
  const auto r3 = run_loopback(v, a, seeded(10), seeded(9));
  CHECK(r1.victim.transcript.payload_digests() != r3.victim.transcript.payload_digests());

  const auto path = std::filesystem::temp_directory_path() / "ransomneg_transcript_test.tsv";
  net::persist_transcript(r1.victim.transcript, path);
  CHECK(net::load_transcript(path) == r1.victim.transcript);
  std::filesystem::remove(path);

  const auto& recs = r1.victim.transcript.records();
  REQUIRE(recs.size() == 9);
  const std::vector<std::string> order{"HELLO", "PI_ACK", "CIRCUIT", "GARBLER_INPUT_LABELS", "OT_MSG1",
                                       "OT_MSG2", "OT_MSG3", "OUTPUT_LABELS", "RESULT_ACK"};
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i].type == order[i]);
}

TEST_CASE("victim transcript shape does not depend on the attacker's input") {
  const auto v = config(Role::Victim, 150);
  std::optional<std::vector<std::pair<std::string, std::uint32_t>>> first;
  for (std::uint64_t ta : {0, 1, 77, 150, 255}) {
    const auto r = run_loopback(v, config(Role::Attacker, ta), seeded(1), seeded(static_cast<std::uint8_t>(ta)));
    REQUIRE(r.victim.ok());
    const auto s = shape(r.victim.transcript);
    if (!first) first = s;
    CHECK(s == *first);
  }
}

TEST_CASE("unexpected messages are answered with ABORT") {
  const auto v = config(Role::Victim, 100);
  const auto a = config(Role::Attacker, 30);
  std::mt19937_64 rng(31);
  const std::vector<MessageType> types{MessageType::Hello,        MessageType::PiAck,
                                       MessageType::Circuit,      MessageType::GarblerInputLabels,
                                       MessageType::OtMsg1,       MessageType::OtMsg2,
                                       MessageType::OtMsg3,       MessageType::OutputLabels,
                                       MessageType::ResultAck,    MessageType::Abort,
                                       static_cast<MessageType>(42)};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<net::Frame> frames(1 + rng() % 5);
    for (auto& f : frames) {
      f.type = types[rng() % types.size()];
      f.payload.resize(rng() % 64);
      for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng());
    }
    if (trial % 3 == 0) {
      const std::string hello = profile_text(a);
      frames.insert(frames.begin(), net::Frame{MessageType::Hello, crypto::Bytes(hello.begin(), hello.end())});
    }
    const bool test_victim = trial % 2 == 0;
    const auto r = against_script(
        [&](net::Channel& ch) { return test_victim ? run_victim(v, ch, seeded(1)) : run_attacker(a, ch, seeded(2)); },
        frames);
    CHECK_FALSE(r.ok());
    REQUIRE(r.abort);
    if (r.abort->kind == AbortInfo::Kind::Check) CHECK(r.transcript.records().back().type == "ABORT");
  }
}
