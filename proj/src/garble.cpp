#include "ransomneg/garble.hpp"

#include <cstring>

namespace ransomneg::garble {

using circuit::GateKind;

namespace {

void put_u32(crypto::Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_block(crypto::Bytes& out, const Block& b) {
  std::uint8_t buf[16];
  b.write(buf);
  out.insert(out.end(), buf, buf + 16);
}

[[noreturn]] void malformed(const std::string& what) {
  throw GarbleError(GarbleError::Kind::MalformedTable, what);
}

}  // namespace

crypto::Bytes serialize(const GarbledCircuit& gc) {
  crypto::Bytes out(gc.base_circuit_digest.begin(), gc.base_circuit_digest.end());
  put_u32(out, gc.gate_count);
  put_u32(out, static_cast<std::uint32_t>(gc.and_tables.size()));
  out.reserve(out.size() + gc.and_tables.size() * 64 + gc.output_decode.size() * 64 + 8);
  for (const auto& t : gc.and_tables)
    for (const auto& row : t) put_block(out, row);
  put_u32(out, static_cast<std::uint32_t>(gc.output_decode.size()));
  for (const auto& [c0, c1] : gc.output_decode) {
    out.insert(out.end(), c0.begin(), c0.end());
    out.insert(out.end(), c1.begin(), c1.end());
  }
  return out;
}

GarbledCircuit deserialize(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (bytes.size() - pos < n) malformed("truncated garbled circuit");
  };
  auto u32 = [&] {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes[pos + i]} << (8 * i);
    pos += 4;
    return v;
  };
  GarbledCircuit gc;
  need(32);
  std::memcpy(gc.base_circuit_digest.data(), bytes.data(), 32);
  pos = 32;
  gc.gate_count = u32();
  const std::uint32_t n_tables = u32();
  if (n_tables > (bytes.size() - pos) / 64) malformed("table count exceeds payload");
  gc.and_tables.resize(n_tables);
  for (auto& t : gc.and_tables)
    for (auto& row : t) {
      need(16);
      row = Block::read(bytes.data() + pos);
      pos += 16;
    }
  const std::uint32_t n_out = u32();
  if (n_out > (bytes.size() - pos) / 64) malformed("output count exceeds payload");
  gc.output_decode.resize(n_out);
  for (auto& [c0, c1] : gc.output_decode) {
    need(64);
    std::memcpy(c0.data(), bytes.data() + pos, 32);
    std::memcpy(c1.data(), bytes.data() + pos + 32, 32);
    pos += 64;
  }
  if (pos != bytes.size()) malformed("trailing bytes after garbled circuit");
  return gc;
}

Digest commit_label(const Block& label, std::uint32_t output_index) {
  std::uint8_t buf[20];
  label.write(buf);
  for (int i = 0; i < 4; ++i) buf[16 + i] = static_cast<std::uint8_t>(output_index >> (8 * i));
  return crypto::sha256(std::span<const std::uint8_t>(buf, sizeof buf));
}

Garbling garble(const circuit::Circuit& c, const Block& seed) {
  crypto::Prg prg(seed);
  crypto::GarblingHash hash;

  Garbling g;
  GarblerLabels& labels = g.labels;
  labels.delta = prg.next_block();
  labels.delta.lo |= 1;  // opposite color bits on every wire

  std::vector<Block> zero(c.wire_count);
  const std::uint32_t n_in = c.input_count();
  for (std::uint32_t w = 0; w < n_in; ++w) zero[w] = prg.next_block();
  labels.input_zero.assign(zero.begin(), zero.begin() + n_in);

  const Block& delta = labels.delta;
  g.gc.and_tables.reserve(c.and_count());
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const auto& gate = c.gates[gi];
    switch (gate.kind) {
      case GateKind::Xor:
        zero[gate.out] = zero[gate.in_a] ^ zero[gate.in_b];
        break;
      case GateKind::Not:
        // The evaluator copies the label; the garbler swaps the meaning.
        zero[gate.out] = zero[gate.in_a] ^ delta;
        break;
      case GateKind::And: {
        zero[gate.out] = prg.next_block();
        std::array<Block, 4> table{};
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const Block la = a ? zero[gate.in_a] ^ delta : zero[gate.in_a];
            const Block lb = b ? zero[gate.in_b] ^ delta : zero[gate.in_b];
            const Block out = (a & b) ? zero[gate.out] ^ delta : zero[gate.out];
            const int row = (la.color() ? 2 : 0) + (lb.color() ? 1 : 0);
            table[row] = hash(la, lb, gi) ^ out;
          }
        }
        g.gc.and_tables.push_back(table);
        break;
      }
    }
  }

  const circuit::Bus outs = c.output_wires();
  for (std::uint32_t i = 0; i < outs.size(); ++i) {
    const Block l0 = zero[outs[i]];
    labels.output_zero.push_back(l0);
    g.gc.output_decode.emplace_back(commit_label(l0, i), commit_label(l0 ^ delta, i));
  }
  g.gc.base_circuit_digest = circuit::circuit_digest(c);
  g.gc.gate_count = static_cast<std::uint32_t>(c.gates.size());
  return g;
}

std::vector<Block> evaluate(const GarbledCircuit& gc, const circuit::Circuit& c,
                            const std::vector<Block>& input_labels) {
  if (gc.base_circuit_digest != circuit::circuit_digest(c))
    throw GarbleError(GarbleError::Kind::DigestMismatch,
                      "garbled circuit was not built from the expected circuit");
  if (gc.gate_count != c.gates.size() || gc.and_tables.size() != c.and_count())
    malformed("garbled table count does not match the circuit");
  if (gc.output_decode.size() != c.output_wires().size())
    malformed("output commitment count does not match the circuit");
  if (input_labels.size() != c.input_count())
    throw std::invalid_argument("one label per input wire required");

  crypto::GarblingHash hash;
  std::vector<Block> label(c.wire_count);
  std::copy(input_labels.begin(), input_labels.end(), label.begin());
  std::size_t table = 0;
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const auto& gate = c.gates[gi];
    switch (gate.kind) {
      case GateKind::Xor: label[gate.out] = label[gate.in_a] ^ label[gate.in_b]; break;
      case GateKind::Not: label[gate.out] = label[gate.in_a]; break;
      case GateKind::And: {
        const Block& la = label[gate.in_a];
        const Block& lb = label[gate.in_b];
        const int row = (la.color() ? 2 : 0) + (lb.color() ? 1 : 0);
        label[gate.out] = gc.and_tables[table++][row] ^ hash(la, lb, gi);
        break;
      }
    }
  }
  std::vector<Block> out;
  for (auto w : c.output_wires()) out.push_back(label[w]);
  return out;
}

DecodedOutput decode_and_prove(const GarbledCircuit& gc, const std::vector<Block>& output_labels) {
  if (output_labels.size() != gc.output_decode.size())
    throw GarbleError(GarbleError::Kind::InvalidOutputLabel, "wrong number of output labels");
  DecodedOutput d;
  d.proof_labels = output_labels;
  for (std::uint32_t i = 0; i < output_labels.size(); ++i) {
    const Digest h = commit_label(output_labels[i], i);
    if (h == gc.output_decode[i].first)
      d.bits.push_back(false);
    else if (h == gc.output_decode[i].second)
      d.bits.push_back(true);
    else
      throw GarbleError(GarbleError::Kind::InvalidOutputLabel,
                        "output label " + std::to_string(i) + " matches neither commitment");
  }
  return d;
}

std::vector<bool> verify_output_labels(const GarblerLabels& labels,
                                       const std::vector<Block>& output_labels) {
  if (output_labels.size() != labels.output_zero.size())
    throw GarbleError(GarbleError::Kind::InvalidOutputLabel, "wrong number of output labels");
  std::vector<bool> bits;
  for (std::size_t i = 0; i < output_labels.size(); ++i) {
    if (output_labels[i] == labels.output_zero[i])
      bits.push_back(false);
    else if (output_labels[i] == (labels.output_zero[i] ^ labels.delta))
      bits.push_back(true);
    else
      throw GarbleError(GarbleError::Kind::InvalidOutputLabel,
                        "output label " + std::to_string(i) + " is not a valid label");
  }
  return bits;
}

}  // namespace ransomneg::garble
