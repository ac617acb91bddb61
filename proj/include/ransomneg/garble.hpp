#pragma once

#include "ransomneg/circuit.hpp"
#include "ransomneg/crypto.hpp"

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ransomneg::garble {

using crypto::Block;
using crypto::Digest;

class GarbleError : public std::runtime_error {
 public:
  enum class Kind { DigestMismatch, MalformedTable, InvalidOutputLabel };
  GarbleError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// What the garbler sends: four ciphertext rows per AND gate, indexed by the
// color bits of the two input labels, plus a hash commitment to both labels
// of every output wire.
struct GarbledCircuit {
  Digest base_circuit_digest{};
  std::uint32_t gate_count = 0;
  std::vector<std::array<Block, 4>> and_tables;
  std::vector<std::pair<Digest, Digest>> output_decode;

  bool operator==(const GarbledCircuit&) const = default;
};

// Little-endian: digest | u32 gate_count | u32 n_tables | tables (raw 16-byte
// blocks) | u32 n_outputs | (commit0, commit1) pairs.
crypto::Bytes serialize(const GarbledCircuit& gc);
// Throws GarbleError(MalformedTable) on malformed input.
GarbledCircuit deserialize(std::span<const std::uint8_t> bytes);

// Garbler-side secrets. Label for bit 1 is always label0 ^ delta.
struct GarblerLabels {
  Block delta;
  std::vector<Block> input_zero;   // per input wire
  std::vector<Block> output_zero;  // per output wire

  Block input_label(std::size_t wire, bool bit) const {
    return bit ? input_zero[wire] ^ delta : input_zero[wire];
  }
  std::pair<Block, Block> input_pair(std::size_t wire) const {
    return {input_zero[wire], input_zero[wire] ^ delta};
  }
};

struct Garbling {
  GarbledCircuit gc;
  GarblerLabels labels;
};

// Free-XOR, point-and-permute garbling; all labels come from the seed.
Garbling garble(const circuit::Circuit& c, const Block& seed);

// Evaluates under encryption. `input_labels` has one label per input wire.
// Throws GarbleError(DigestMismatch) when gc was not built for `c`,
// GarbleError(MalformedTable) on a table count mismatch.
std::vector<Block> evaluate(const GarbledCircuit& gc, const circuit::Circuit& c,
                            const std::vector<Block>& input_labels);

// Commitment to one output label: SHA-256(label || output index).
Digest commit_label(const Block& label, std::uint32_t output_index);

struct DecodedOutput {
  std::vector<bool> bits;
  std::vector<Block> proof_labels;  // the labels, sent back to the garbler
};

// Evaluator-side decoding against the commitments.
// Throws GarbleError(InvalidOutputLabel) if a label matches neither commitment.
DecodedOutput decode_and_prove(const GarbledCircuit& gc, const std::vector<Block>& output_labels);

// Garbler-side check of labels returned by the evaluator.
// Throws GarbleError(InvalidOutputLabel) on any label that is not one of the
// two labels of its wire.
std::vector<bool> verify_output_labels(const GarblerLabels& labels,
                                       const std::vector<Block>& output_labels);

}  // namespace ransomneg::garble
