#include "ransomneg/circuit.hpp"

#include <algorithm>
#include <stdexcept>

namespace ransomneg::circuit {

std::uint32_t Circuit::input_count() const {
  std::uint32_t n = 0;
  for (const auto& r : inputs) n += r.length;
  return n;
}

Bus Circuit::output_wires() const {
  Bus all;
  for (const auto& g : outputs) all.insert(all.end(), g.wires.begin(), g.wires.end());
  return all;
}

std::size_t Circuit::and_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == GateKind::And; }));
}

const InputRange& Circuit::input(const std::string& name) const {
  for (const auto& r : inputs)
    if (r.name == name) return r;
  throw std::out_of_range("no input range named " + name);
}

const OutputGroup& Circuit::output(const std::string& name) const {
  for (const auto& g : outputs)
    if (g.name == name) return g;
  throw std::out_of_range("no output group named " + name);
}

void Circuit::validate() const {
  Wire expected = 0;
  for (const auto& r : inputs) {
    if (r.start != expected) throw std::invalid_argument("input ranges must be contiguous from wire 0");
    expected += r.length;
  }
  const std::uint32_t n_in = expected;
  if (n_in > wire_count) throw std::invalid_argument("more inputs than wires");

  std::vector<bool> assigned(wire_count, false);
  for (Wire w = 0; w < n_in; ++w) assigned[w] = true;
  for (const auto& g : gates) {
    if (g.kind != GateKind::Xor && g.kind != GateKind::And && g.kind != GateKind::Not)
      throw std::invalid_argument("unknown gate kind");
    if (g.out >= wire_count) throw std::invalid_argument("gate output out of range");
    if (assigned[g.out]) throw std::invalid_argument("wire assigned twice");
    if (g.in_a >= wire_count || !assigned[g.in_a])
      throw std::invalid_argument("gate input not yet defined");
    if (g.kind == GateKind::Not) {
      if (g.in_b != kNoWire) throw std::invalid_argument("NOT gate with second input");
    } else if (g.in_b >= wire_count || !assigned[g.in_b]) {
      throw std::invalid_argument("gate input not yet defined");
    }
    assigned[g.out] = true;
  }
  for (const auto& o : outputs)
    for (Wire w : o.wires)
      if (w >= wire_count || !assigned[w]) throw std::invalid_argument("output wire undefined");
  if (overflow_wire != kNoWire && (overflow_wire >= wire_count || !assigned[overflow_wire]))
    throw std::invalid_argument("overflow probe undefined");
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(crypto::Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_name(crypto::Bytes& out, const std::string& name) {
  if (name.size() > 255) throw std::invalid_argument("name too long");
  out.push_back(static_cast<std::uint8_t>(name.size()));
  out.insert(out.end(), name.begin(), name.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string name() {
    const std::size_t n = u8();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw std::invalid_argument("truncated circuit");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

crypto::Bytes serialize(const Circuit& c) {
  crypto::Bytes out{'R', 'N', 'G', 'C'};
  put_u32(out, kVersion);
  put_u32(out, c.wire_count);
  put_u32(out, static_cast<std::uint32_t>(c.gates.size()));
  put_u32(out, static_cast<std::uint32_t>(c.inputs.size()));
  for (const auto& r : c.inputs) {
    put_name(out, r.name);
    put_u32(out, r.start);
    put_u32(out, r.length);
  }
  put_u32(out, static_cast<std::uint32_t>(c.outputs.size()));
  for (const auto& g : c.outputs) {
    put_name(out, g.name);
    put_u32(out, static_cast<std::uint32_t>(g.wires.size()));
    for (Wire w : g.wires) put_u32(out, w);
  }
  put_u32(out, c.overflow_wire);
  out.reserve(out.size() + 13 * c.gates.size());
  for (const auto& g : c.gates) {
    out.push_back(static_cast<std::uint8_t>(g.kind));
    put_u32(out, g.in_a);
    put_u32(out, g.in_b);
    put_u32(out, g.out);
  }
  return out;
}

Circuit deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.u8() != 'R' || r.u8() != 'N' || r.u8() != 'G' || r.u8() != 'C')
    throw std::invalid_argument("bad circuit magic");
  if (r.u32() != kVersion) throw std::invalid_argument("unsupported circuit version");
  Circuit c;
  c.wire_count = r.u32();
  const std::uint32_t gate_count = r.u32();
  const std::uint32_t n_inputs = r.u32();
  for (std::uint32_t i = 0; i < n_inputs; ++i) {
    InputRange range;
    range.name = r.name();
    range.start = r.u32();
    range.length = r.u32();
    c.inputs.push_back(std::move(range));
  }
  const std::uint32_t n_outputs = r.u32();
  for (std::uint32_t i = 0; i < n_outputs; ++i) {
    OutputGroup g;
    g.name = r.name();
    const std::uint32_t n = r.u32();
    if (n > c.wire_count) throw std::invalid_argument("output group larger than circuit");
    for (std::uint32_t j = 0; j < n; ++j) g.wires.push_back(r.u32());
    c.outputs.push_back(std::move(g));
  }
  c.overflow_wire = r.u32();
  if (gate_count > bytes.size() / 13) throw std::invalid_argument("gate count exceeds payload");
  c.gates.reserve(gate_count);
  for (std::uint32_t i = 0; i < gate_count; ++i) {
    Gate g;
    const std::uint8_t kind = r.u8();
    if (kind > 2) throw std::invalid_argument("unknown gate kind");
    g.kind = static_cast<GateKind>(kind);
    g.in_a = r.u32();
    g.in_b = r.u32();
    g.out = r.u32();
    c.gates.push_back(g);
  }
  if (!r.done()) throw std::invalid_argument("trailing bytes after circuit");
  c.validate();
  return c;
}

crypto::Digest circuit_digest(const Circuit& c) { return crypto::sha256(serialize(c)); }

// ---------------------------------------------------------------------------
// Evaluation

std::vector<bool> eval_wires(const Circuit& c, const std::vector<bool>& inputs) {
  if (inputs.size() != c.input_count())
    throw std::invalid_argument("expected " + std::to_string(c.input_count()) + " input bits, got " +
                                std::to_string(inputs.size()));
  std::vector<bool> v(c.wire_count, false);
  std::copy(inputs.begin(), inputs.end(), v.begin());
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::Xor: v[g.out] = v[g.in_a] != v[g.in_b]; break;
      case GateKind::And: v[g.out] = v[g.in_a] && v[g.in_b]; break;
      case GateKind::Not: v[g.out] = !v[g.in_a]; break;
    }
  }
  return v;
}

std::vector<bool> eval_plain(const Circuit& c, const std::vector<bool>& inputs) {
  const std::vector<bool> v = eval_wires(c, inputs);
  std::vector<bool> out;
  for (Wire w : c.output_wires()) out.push_back(v[w]);
  return out;
}

// ---------------------------------------------------------------------------
// Builder

void Builder::require_inputs_first() const {
  if (!gates_.empty()) throw std::logic_error("inputs must be declared before any gate");
}

Bus Builder::input(const std::string& name, std::uint32_t width) {
  require_inputs_first();
  Bus b;
  const Wire start = next_wire_;
  for (std::uint32_t i = 0; i < width; ++i) b.push_back(fresh());
  inputs_.push_back({name, start, width});
  return b;
}

void Builder::output(const std::string& name, Bus wires) { outputs_.push_back({name, std::move(wires)}); }

Wire Builder::XOR(Wire a, Wire b) {
  const Wire o = fresh();
  gates_.push_back({GateKind::Xor, a, b, o});
  return o;
}

Wire Builder::AND(Wire a, Wire b) {
  const Wire o = fresh();
  gates_.push_back({GateKind::And, a, b, o});
  return o;
}

Wire Builder::NOT(Wire a) {
  const Wire o = fresh();
  gates_.push_back({GateKind::Not, a, kNoWire, o});
  return o;
}

Wire Builder::OR(Wire a, Wire b) { return XOR(XOR(a, b), AND(a, b)); }

Wire Builder::zero() {
  if (!zero_) {
    if (next_wire_ == 0) throw std::logic_error("constant wires need at least one input");
    zero_ = XOR(0, 0);
  }
  return *zero_;
}

Wire Builder::one() {
  if (!one_) one_ = NOT(zero());
  return *one_;
}

Bus Builder::constant(std::uint64_t value, std::uint32_t width) {
  Bus b;
  for (std::uint32_t i = 0; i < width; ++i)
    b.push_back(i < 64 && ((value >> i) & 1) ? one() : zero());
  return b;
}

Bus Builder::zero_extend(const Bus& a, std::uint32_t width) {
  Bus b = a;
  while (b.size() < width) b.push_back(zero());
  return b;
}

Bus Builder::xor_bus(const Bus& a, const Bus& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor of unequal widths");
  Bus o;
  for (std::size_t i = 0; i < a.size(); ++i) o.push_back(XOR(a[i], b[i]));
  return o;
}

Bus Builder::add(const Bus& a, const Bus& b) {
  const std::size_t n = std::max(a.size(), b.size());
  Bus sum;
  std::optional<Wire> carry;
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_a = i < a.size();
    const bool has_b = i < b.size();
    if (has_a && has_b) {
      if (!carry) {
        sum.push_back(XOR(a[i], b[i]));
        carry = AND(a[i], b[i]);
      } else {
        const Wire ac = XOR(a[i], *carry);
        const Wire bc = XOR(b[i], *carry);
        sum.push_back(XOR(ac, b[i]));
        carry = XOR(*carry, AND(ac, bc));
      }
    } else {
      const Wire x = has_a ? a[i] : b[i];
      if (!carry) {
        sum.push_back(x);
      } else {
        sum.push_back(XOR(x, *carry));
        carry = AND(x, *carry);
      }
    }
  }
  sum.push_back(carry ? *carry : zero());
  return sum;
}

Wire Builder::less_than(const Bus& a_in, const Bus& b_in) {
  const std::uint32_t n = static_cast<std::uint32_t>(std::max(a_in.size(), b_in.size()));
  if (n == 0) return zero();
  const Bus a = zero_extend(a_in, n);
  const Bus b = zero_extend(b_in, n);
  // lt_i = MAJ(!a_i, b_i, lt_{i-1}): the highest differing bit decides.
  Wire lt = AND(NOT(a[0]), b[0]);
  for (std::uint32_t i = 1; i < n; ++i) {
    const Wire x = NOT(XOR(a[i], lt));
    const Wire y = XOR(b[i], lt);
    lt = XOR(lt, AND(x, y));
  }
  return lt;
}

Wire Builder::less_equal(const Bus& a, const Bus& b) { return NOT(less_than(b, a)); }

Bus Builder::mux(Wire sel, const Bus& a_in, const Bus& b_in) {
  const std::uint32_t n = static_cast<std::uint32_t>(std::max(a_in.size(), b_in.size()));
  const Bus a = zero_extend(a_in, n);
  const Bus b = zero_extend(b_in, n);
  Bus o;
  for (std::uint32_t i = 0; i < n; ++i) o.push_back(XOR(b[i], AND(sel, XOR(a[i], b[i]))));
  return o;
}

Bus Builder::and_each(Wire sel, const Bus& a) {
  Bus o;
  for (Wire w : a) o.push_back(AND(sel, w));
  return o;
}

Wire Builder::or_reduce(const Bus& a) {
  if (a.empty()) return zero();
  Wire acc = a[0];
  for (std::size_t i = 1; i < a.size(); ++i) acc = OR(acc, a[i]);
  return acc;
}

Bus Builder::multiply(const Bus& a, const Bus& b) {
  const std::size_t width = a.size() + b.size();
  if (a.empty() || b.empty()) return Bus(width, zero());
  Bus acc = and_each(b[0], a);
  for (std::size_t i = 1; i < b.size(); ++i) {
    // Bits below i are final; add the partial product into the rest.
    const Bus partial = and_each(b[i], a);
    Bus high(acc.begin() + static_cast<std::ptrdiff_t>(i), acc.end());
    Bus sum = add(high, partial);
    acc.resize(i);
    acc.insert(acc.end(), sum.begin(), sum.end());
  }
  return zero_extend(slice(acc, 0, static_cast<std::uint32_t>(std::min(acc.size(), width))),
                     static_cast<std::uint32_t>(width));
}

Bus Builder::shift_right(const Bus& a, std::uint32_t amount) {
  if (amount >= a.size()) return {};
  return Bus(a.begin() + amount, a.end());
}

Bus Builder::slice(const Bus& a, std::uint32_t from, std::uint32_t count) {
  if (from + count > a.size()) throw std::out_of_range("slice past bus end");
  return Bus(a.begin() + from, a.begin() + from + count);
}

Circuit Builder::finish() && {
  Circuit c;
  c.wire_count = next_wire_;
  c.gates = std::move(gates_);
  c.inputs = std::move(inputs_);
  c.outputs = std::move(outputs_);
  c.overflow_wire = overflow_;
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Mechanism circuit

Circuit build_mechanism_circuit(const mechanism::MechanismParams& params,
                                const mechanism::ScaledParams& scaled, unsigned max_width) {
  mechanism::validate(params);
  const auto widths = mechanism::arithmetic_widths(params, scaled, max_width);
  const std::uint32_t k = params.k;
  const std::uint32_t kt = params.k_theta;

  Builder b;
  const Bus s0_v = b.input("s0_v", k);
  const Bus s1_v = b.input("s1_v", k);
  const Bus theta_v = b.input("theta_v", kt);
  const Bus s0_a = b.input("s0_a", k);
  const Bus s1_a = b.input("s1_a", k);
  const Bus theta_a = b.input("theta_a", kt);

  // Joint coins: neither share alone determines them.
  const Bus s0 = b.xor_bus(s0_v, s0_a);
  const Bus s1 = b.xor_bus(s1_v, s1_a);

  // p_scale may equal 2^k, so that comparison runs one bit wider.
  const Wire low_offer = b.less_than(s0, b.constant(scaled.p_scale, k + 1));
  const Wire pay = b.less_than(s1, b.constant(scaled.q_scale, k));

  const Bus q_theta_v =
      Builder::slice(Builder::shift_right(b.multiply(theta_v, b.constant(scaled.q_scale, k)), k), 0, kt);
  const Bus r2 = b.mux(low_offer, q_theta_v, theta_v);
  const Wire accept = b.less_equal(theta_a, r2);

  const Bus r2_over_q =
      Builder::shift_right(b.multiply(r2, b.constant(scaled.inv_q_scale, widths.inv_bits)), k);
  const Bus theta_a_wide = b.zero_extend(theta_a, static_cast<std::uint32_t>(r2_over_q.size()));
  const Bus r3 = b.mux(b.less_than(r2_over_q, theta_a_wide), theta_a_wide, r2_over_q);
  const Wire within = b.less_equal(r3, theta_v);

  const Wire countered = b.AND(b.NOT(accept), within);
  const Wire take_r3 = b.AND(countered, pay);
  const Wire sigma = b.AND(countered, b.NOT(pay));

  const std::uint32_t out_width = kt + 1;
  const Bus r3_low = b.zero_extend(
      Builder::slice(r3, 0, std::min<std::uint32_t>(out_width, static_cast<std::uint32_t>(r3.size()))),
      out_width);
  const Bus r_f = b.mux(accept, b.zero_extend(r2, out_width), b.and_each(take_r3, r3_low));
  const Wire alpha = b.OR(b.or_reduce(r_f), sigma);

  if (r3.size() > out_width) {
    const Bus r3_high = Builder::slice(r3, out_width, static_cast<std::uint32_t>(r3.size()) - out_width);
    b.set_overflow_probe(b.AND(take_r3, b.or_reduce(r3_high)));
  }

  b.output("r_f", r_f);
  b.output("alpha", {alpha});
  b.output("sigma", {sigma});
  return std::move(b).finish();
}

std::vector<bool> to_bits(std::uint64_t value, std::uint32_t width) {
  std::vector<bool> bits(width);
  for (std::uint32_t i = 0; i < width; ++i) bits[i] = i < 64 && ((value >> i) & 1);
  return bits;
}

std::uint64_t from_bits(const std::vector<bool>& bits, std::size_t from, std::size_t count) {
  if (from + count > bits.size()) throw std::out_of_range("bit range past end");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < count && i < 64; ++i)
    if (bits[from + i]) v |= std::uint64_t{1} << i;
  return v;
}

std::vector<bool> mechanism_inputs(const Circuit& c, std::uint64_t s0_v, std::uint64_t s1_v,
                                   std::uint64_t theta_v, std::uint64_t s0_a, std::uint64_t s1_a,
                                   std::uint64_t theta_a) {
  const std::uint64_t values[] = {s0_v, s1_v, theta_v, s0_a, s1_a, theta_a};
  std::vector<bool> bits;
  bits.reserve(c.input_count());
  for (std::size_t i = 0; i < 6; ++i) {
    const InputRange& r = c.input(kMechanismInputs[i]);
    if (r.length < 64 && (values[i] >> r.length) != 0)
      throw std::invalid_argument(std::string("value does not fit input ") + kMechanismInputs[i]);
    const auto part = to_bits(values[i], r.length);
    bits.insert(bits.end(), part.begin(), part.end());
  }
  return bits;
}

mechanism::FixedOutcome decode_mechanism_outputs(const Circuit& c, const std::vector<bool>& bits) {
  const std::size_t rf_width = c.output("r_f").wires.size();
  if (bits.size() != rf_width + 2) throw std::invalid_argument("unexpected output width");
  mechanism::FixedOutcome o;
  o.r_f = from_bits(bits, 0, rf_width);
  o.alpha = bits[rf_width];
  o.sigma = bits[rf_width + 1];
  return o;
}

}  // namespace ransomneg::circuit
