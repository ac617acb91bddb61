#include "ransomneg/ot.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

namespace ransomneg::ot {

namespace {

constexpr std::size_t kPointBytes = 33;  // compressed SEC1

struct BnFree {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct GroupFree {
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};
struct CtxFree {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using PointPtr = std::unique_ptr<EC_POINT, PointFree>;

struct Group {
  std::unique_ptr<EC_GROUP, GroupFree> group{EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)};
  std::unique_ptr<BN_CTX, CtxFree> ctx{BN_CTX_new()};

  Group() {
    if (!group || !ctx) throw OtError("cannot initialize P-256");
  }

  PointPtr point() const {
    PointPtr p(EC_POINT_new(group.get()));
    if (!p) throw OtError("EC_POINT_new failed");
    return p;
  }

  // Uniform scalar in [1, n) from 48 PRG bytes.
  BnPtr scalar(crypto::Prg& prg) const {
    std::uint8_t buf[48];
    prg.fill(buf);
    BnPtr raw(BN_bin2bn(buf, sizeof buf, nullptr));
    BnPtr s(BN_new());
    const BIGNUM* order = EC_GROUP_get0_order(group.get());
    BnPtr order_minus_one(BN_dup(order));
    if (!raw || !s || !order_minus_one || !BN_sub_word(order_minus_one.get(), 1) ||
        !BN_nnmod(s.get(), raw.get(), order_minus_one.get(), ctx.get()) || !BN_add_word(s.get(), 1))
      throw OtError("scalar derivation failed");
    return s;
  }

  PointPtr mul_base(const BIGNUM* k) const {
    PointPtr p = point();
    if (!EC_POINT_mul(group.get(), p.get(), k, nullptr, nullptr, ctx.get()))
      throw OtError("EC_POINT_mul failed");
    return p;
  }

  PointPtr mul(const EC_POINT* q, const BIGNUM* k) const {
    PointPtr p = point();
    if (!EC_POINT_mul(group.get(), p.get(), nullptr, q, k, ctx.get()))
      throw OtError("EC_POINT_mul failed");
    return p;
  }

  PointPtr add(const EC_POINT* a, const EC_POINT* b) const {
    PointPtr p = point();
    if (!EC_POINT_add(group.get(), p.get(), a, b, ctx.get())) throw OtError("EC_POINT_add failed");
    return p;
  }

  PointPtr sub(const EC_POINT* a, const EC_POINT* b) const {
    PointPtr neg(EC_POINT_dup(b, group.get()));
    if (!neg || !EC_POINT_invert(group.get(), neg.get(), ctx.get())) throw OtError("EC_POINT_invert failed");
    return add(a, neg.get());
  }

  void encode(const EC_POINT* p, std::uint8_t* out) const {
    if (EC_POINT_point2oct(group.get(), p, POINT_CONVERSION_COMPRESSED, out, kPointBytes,
                           ctx.get()) != kPointBytes)
      throw OtError("point encoding failed");
  }

  PointPtr decode(const std::uint8_t* in) const {
    PointPtr p = point();
    if (!EC_POINT_oct2point(group.get(), p.get(), in, kPointBytes, ctx.get()) ||
        EC_POINT_is_at_infinity(group.get(), p.get()) ||
        EC_POINT_is_on_curve(group.get(), p.get(), ctx.get()) != 1)
      throw OtError("malformed group element");
    return p;
  }

  // Key derivation H(index || A || B || P) truncated to one block.
  Block kdf(std::uint32_t index, const std::uint8_t* a_enc, const std::uint8_t* b_enc,
            const EC_POINT* shared) const {
    std::uint8_t buf[4 + 3 * kPointBytes];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>(index >> (8 * i));
    std::copy(a_enc, a_enc + kPointBytes, buf + 4);
    std::copy(b_enc, b_enc + kPointBytes, buf + 4 + kPointBytes);
    encode(shared, buf + 4 + 2 * kPointBytes);
    const auto d = crypto::sha256(std::span<const std::uint8_t>(buf, sizeof buf));
    return Block::read(d.data());
  }
};

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
  if (in.size() < 4) throw OtError("truncated OT message");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[i]} << (8 * i);
  return v;
}

}  // namespace

struct Sender::Impl {
  Group g;
  BnPtr a;
  PointPtr A;
  PointPtr aA;
  std::uint8_t a_enc[kPointBytes];
};

Sender::Sender(crypto::Prg& prg) : impl_(std::make_unique<Impl>()) {
  impl_->a = impl_->g.scalar(prg);
  impl_->A = impl_->g.mul_base(impl_->a.get());
  impl_->aA = impl_->g.mul(impl_->A.get(), impl_->a.get());
  impl_->g.encode(impl_->A.get(), impl_->a_enc);
}

Sender::~Sender() = default;

Bytes Sender::first_message() const { return Bytes(impl_->a_enc, impl_->a_enc + kPointBytes); }

Bytes Sender::respond(std::span<const std::uint8_t> receiver_message,
                      const std::vector<std::pair<Block, Block>>& messages) const {
  const std::uint32_t n = get_u32(receiver_message);
  if (n != messages.size()) throw OtError("receiver asked for a different number of transfers");
  if (receiver_message.size() != 4 + std::size_t{n} * kPointBytes)
    throw OtError("OT receiver message has the wrong length");
  const Group& g = impl_->g;

  Bytes out;
  put_u32(out, n);
  out.reserve(4 + std::size_t{n} * 32);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint8_t* b_enc = receiver_message.data() + 4 + std::size_t{i} * kPointBytes;
    PointPtr B = g.decode(b_enc);
    PointPtr k0 = g.mul(B.get(), impl_->a.get());
    PointPtr k1 = g.sub(k0.get(), impl_->aA.get());
    const Block e0 = messages[i].first ^ g.kdf(i, impl_->a_enc, b_enc, k0.get());
    // a(B - A) is the identity only if B = A, which an honest receiver never sends.
    if (EC_POINT_is_at_infinity(g.group.get(), k1.get())) throw OtError("degenerate receiver point");
    const Block e1 = messages[i].second ^ g.kdf(i, impl_->a_enc, b_enc, k1.get());
    std::uint8_t buf[32];
    e0.write(buf);
    e1.write(buf + 16);
    out.insert(out.end(), buf, buf + 32);
  }
  return out;
}

struct Receiver::Impl {
  Group g;
  crypto::Prg* prg;
  std::vector<bool> choices;
  std::vector<BnPtr> b;
  Bytes b_enc;
  Bytes a_enc;
  PointPtr A;
};

Receiver::Receiver(crypto::Prg& prg, std::vector<bool> choices) : impl_(std::make_unique<Impl>()) {
  impl_->prg = &prg;
  impl_->choices = std::move(choices);
}

Receiver::~Receiver() = default;

Bytes Receiver::respond(std::span<const std::uint8_t> sender_message) {
  if (sender_message.size() != kPointBytes) throw OtError("OT sender message has the wrong length");
  Impl& r = *impl_;
  r.A = r.g.decode(sender_message.data());
  r.a_enc.assign(sender_message.begin(), sender_message.end());

  const auto n = static_cast<std::uint32_t>(r.choices.size());
  Bytes out;
  put_u32(out, n);
  r.b.clear();
  r.b_enc.clear();
  for (std::uint32_t i = 0; i < n; ++i) {
    BnPtr bi = r.g.scalar(*r.prg);
    PointPtr B = r.g.mul_base(bi.get());
    if (r.choices[i]) B = r.g.add(r.A.get(), B.get());
    std::uint8_t enc[kPointBytes];
    r.g.encode(B.get(), enc);
    out.insert(out.end(), enc, enc + kPointBytes);
    r.b_enc.insert(r.b_enc.end(), enc, enc + kPointBytes);
    r.b.push_back(std::move(bi));
  }
  return out;
}

std::vector<Block> Receiver::finish(std::span<const std::uint8_t> sender_ciphertexts) const {
  const Impl& r = *impl_;
  if (!r.A) throw OtError("OT receiver finished before responding");
  const std::uint32_t n = get_u32(sender_ciphertexts);
  if (n != r.choices.size() || sender_ciphertexts.size() != 4 + std::size_t{n} * 32)
    throw OtError("OT ciphertext message has the wrong length");
  std::vector<Block> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    PointPtr shared = r.g.mul(r.A.get(), r.b[i].get());
    const Block key = r.g.kdf(i, r.a_enc.data(), r.b_enc.data() + std::size_t{i} * kPointBytes, shared.get());
    const std::uint8_t* row = sender_ciphertexts.data() + 4 + std::size_t{i} * 32 + (r.choices[i] ? 16 : 0);
    out.push_back(Block::read(row) ^ key);
  }
  return out;
}

std::vector<Block> ot_transfer(const std::vector<std::pair<Block, Block>>& messages,
                               const std::vector<bool>& choices, crypto::Prg& sender_prg,
                               crypto::Prg& receiver_prg) {
  Sender sender(sender_prg);
  Receiver receiver(receiver_prg, choices);
  const Bytes m1 = sender.first_message();
  const Bytes m2 = receiver.respond(m1);
  const Bytes m3 = sender.respond(m2, messages);
  return receiver.finish(m3);
}

}  // namespace ransomneg::ot
