#pragma once

#include "ransomneg/crypto.hpp"
#include "ransomneg/mechanism.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ransomneg::circuit {

using Wire = std::uint32_t;
using Bus = std::vector<Wire>;  // least significant bit first

inline constexpr Wire kNoWire = 0xffffffffu;

enum class GateKind : std::uint8_t { Xor = 0, And = 1, Not = 2 };

struct Gate {
  GateKind kind;
  Wire in_a;
  Wire in_b;  // kNoWire for Not
  Wire out;

  bool operator==(const Gate&) const = default;
};

struct InputRange {
  std::string name;
  Wire start;
  std::uint32_t length;

  bool operator==(const InputRange&) const = default;
};

struct OutputGroup {
  std::string name;
  Bus wires;

  bool operator==(const OutputGroup&) const = default;
};

// Combinational circuit over XOR/AND/NOT. Input wires are 0..input_count()-1
// in the order of `inputs`; every gate output is a fresh wire above them and
// gates are listed in topological order.
struct Circuit {
  std::uint32_t wire_count = 0;
  std::vector<Gate> gates;
  std::vector<InputRange> inputs;
  std::vector<OutputGroup> outputs;
  Wire overflow_wire = kNoWire;  // internal probe, not an output

  std::uint32_t input_count() const;
  Bus output_wires() const;
  std::size_t and_count() const;
  const InputRange& input(const std::string& name) const;
  const OutputGroup& output(const std::string& name) const;

  // Throws std::invalid_argument when the structural invariants fail.
  void validate() const;

  bool operator==(const Circuit&) const = default;
};

// Canonical little-endian serialization:
//   "RNGC" | u32 version | u32 wire_count | u32 gate_count
//   | u32 n_inputs  { u8 name_len | name | u32 start | u32 length }
//   | u32 n_outputs { u8 name_len | name | u32 count | u32 wire... }
//   | u32 overflow_wire
//   | gates { u8 kind | u32 in_a | u32 in_b | u32 out }
crypto::Bytes serialize(const Circuit& c);
// Throws std::invalid_argument on malformed input.
Circuit deserialize(std::span<const std::uint8_t> bytes);

// SHA-256 of the canonical serialization.
crypto::Digest circuit_digest(const Circuit& c);

// Gate-by-gate evaluation. `inputs` holds one bit per input wire; returns
// one bit per output wire (groups concatenated). Throws on length mismatch.
std::vector<bool> eval_plain(const Circuit& c, const std::vector<bool>& inputs);
// Same, returning every wire value.
std::vector<bool> eval_wires(const Circuit& c, const std::vector<bool>& inputs);

// Incremental builder with ripple-carry arithmetic.
class Builder {
 public:
  Bus input(const std::string& name, std::uint32_t width);
  void output(const std::string& name, Bus wires);
  void set_overflow_probe(Wire w) { overflow_ = w; }

  Wire XOR(Wire a, Wire b);
  Wire AND(Wire a, Wire b);
  Wire NOT(Wire a);
  Wire OR(Wire a, Wire b);
  Wire zero();
  Wire one();

  Bus constant(std::uint64_t value, std::uint32_t width);
  Bus zero_extend(const Bus& a, std::uint32_t width);
  Bus xor_bus(const Bus& a, const Bus& b);
  // Sum of equal-or-unequal width operands, width max(|a|, |b|) + 1.
  Bus add(const Bus& a, const Bus& b);
  // a < b, unsigned; operands are zero-extended to a common width.
  Wire less_than(const Bus& a, const Bus& b);
  Wire less_equal(const Bus& a, const Bus& b);
  // sel ? a : b, width max(|a|, |b|).
  Bus mux(Wire sel, const Bus& a, const Bus& b);
  // Shift-and-add product, width |a| + |b|.
  Bus multiply(const Bus& a, const Bus& b);
  Bus and_each(Wire sel, const Bus& a);
  Wire or_reduce(const Bus& a);
  static Bus shift_right(const Bus& a, std::uint32_t amount);
  static Bus slice(const Bus& a, std::uint32_t from, std::uint32_t count);

  Circuit finish() &&;

 private:
  Wire fresh() { return next_wire_++; }
  void require_inputs_first() const;

  std::uint32_t next_wire_ = 0;
  std::vector<Gate> gates_;
  std::vector<InputRange> inputs_;
  std::vector<OutputGroup> outputs_;
  std::optional<Wire> zero_;
  std::optional<Wire> one_;
  Wire overflow_ = kNoWire;
};

// Input names of the mechanism circuit, in wire order.
inline constexpr const char* kMechanismInputs[] = {"s0_v", "s1_v", "theta_v",
                                                   "s0_a", "s1_a", "theta_a"};

// Circuit computing outcome_fixed from both parties' shares of the coins and
// their reported types. Outputs: "r_f" (k_theta + 1 bits), "alpha", "sigma".
// Throws mechanism::WidthOverflow when a product would exceed max_width.
Circuit build_mechanism_circuit(const mechanism::MechanismParams& params,
                                const mechanism::ScaledParams& scaled,
                                unsigned max_width = mechanism::kDefaultMaxWidth);

// Packs plaintext values into the mechanism circuit's input bit order.
std::vector<bool> mechanism_inputs(const Circuit& c, std::uint64_t s0_v, std::uint64_t s1_v,
                                   std::uint64_t theta_v, std::uint64_t s0_a,
                                   std::uint64_t s1_a, std::uint64_t theta_a);

// Decodes the mechanism circuit's output bits.
mechanism::FixedOutcome decode_mechanism_outputs(const Circuit& c, const std::vector<bool>& bits);

// Little-endian helpers shared by the circuit and protocol layers.
std::vector<bool> to_bits(std::uint64_t value, std::uint32_t width);
std::uint64_t from_bits(const std::vector<bool>& bits, std::size_t from, std::size_t count);

}  // namespace ransomneg::circuit
