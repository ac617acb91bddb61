#include "ransomneg/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>
#include <stdexcept>

namespace ransomneg::crypto {

namespace {

EVP_CIPHER_CTX* make_aes(const EVP_CIPHER* cipher, const std::uint8_t* key, const std::uint8_t* iv) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  if (EVP_EncryptInit_ex(ctx, cipher, nullptr, key, iv) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    throw std::runtime_error("AES init failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx, 0);
  return ctx;
}

void aes_update(void* ctx, std::uint8_t* out, const std::uint8_t* in, int len) {
  int written = 0;
  if (EVP_EncryptUpdate(static_cast<EVP_CIPHER_CTX*>(ctx), out, &written, in, len) != 1 ||
      written != len)
    throw std::runtime_error("AES update failed");
}

// Public fixed key of the garbling permutation; part of the wire format.
constexpr std::uint8_t kFixedKey[16] = {0x5b, 0x1e, 0x8f, 0x03, 0xc4, 0x77, 0x2a, 0xd9,
                                        0x61, 0x90, 0x3e, 0xb5, 0x0c, 0xf2, 0x48, 0xa6};

}  // namespace

Block Block::doubled() const {
  Block r;
  r.hi = (hi << 1) | (lo >> 63);
  r.lo = lo << 1;
  if (hi >> 63) r.lo ^= 0x87;
  return r;
}

void Block::write(std::uint8_t* out) const {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(lo >> (8 * i));
  for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<std::uint8_t>(hi >> (8 * i));
}

Block Block::read(const std::uint8_t* in) {
  Block b;
  for (int i = 0; i < 8; ++i) b.lo |= std::uint64_t{in[i]} << (8 * i);
  for (int i = 0; i < 8; ++i) b.hi |= std::uint64_t{in[8 + i]} << (8 * i);
  return b;
}

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size())
    throw std::runtime_error("SHA-256 failed");
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (auto b : data) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int h = nibble(hex[2 * i]);
    int l = nibble(hex[2 * i + 1]);
    if (h < 0 || l < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((h << 4) | l);
  }
  return out;
}

GarblingHash::GarblingHash() : ctx_(make_aes(EVP_aes_128_ecb(), kFixedKey, nullptr)) {}

GarblingHash::~GarblingHash() { EVP_CIPHER_CTX_free(static_cast<EVP_CIPHER_CTX*>(ctx_)); }

Block GarblingHash::operator()(const Block& a, const Block& b, std::uint64_t tweak) const {
  const Block k = a.doubled() ^ b.doubled().doubled() ^ Block{tweak, 0};
  std::uint8_t in[16];
  std::uint8_t out[16];
  k.write(in);
  aes_update(ctx_, out, in, 16);
  return Block::read(out) ^ k;
}

Prg::Prg(const Block& seed) {
  std::uint8_t key[16];
  seed.write(key);
  const std::uint8_t iv[16] = {};
  ctx_ = make_aes(EVP_aes_128_ctr(), key, iv);
}

Prg::~Prg() {
  if (ctx_ != nullptr) EVP_CIPHER_CTX_free(static_cast<EVP_CIPHER_CTX*>(ctx_));
}

Prg::Prg(Prg&& o) noexcept : ctx_(o.ctx_) { o.ctx_ = nullptr; }

Prg& Prg::operator=(Prg&& o) noexcept {
  if (this != &o) {
    if (ctx_ != nullptr) EVP_CIPHER_CTX_free(static_cast<EVP_CIPHER_CTX*>(ctx_));
    ctx_ = o.ctx_;
    o.ctx_ = nullptr;
  }
  return *this;
}

void Prg::fill(std::span<std::uint8_t> out) {
  std::vector<std::uint8_t> zeros(out.size(), 0);
  aes_update(ctx_, out.data(), zeros.data(), static_cast<int>(out.size()));
}

Block Prg::next_block() {
  std::uint8_t buf[16];
  fill(buf);
  return Block::read(buf);
}

std::uint64_t Prg::next_bits(unsigned bits) {
  if (bits > 64) throw std::invalid_argument("at most 64 bits per draw");
  std::uint8_t buf[8];
  fill(buf);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return bits == 64 ? v : v & ((std::uint64_t{1} << bits) - 1);
}

Block derive_seed(std::span<const std::uint8_t> master, std::string_view purpose) {
  Bytes buf(master.begin(), master.end());
  buf.push_back(0);
  buf.insert(buf.end(), purpose.begin(), purpose.end());
  const Digest d = sha256(buf);
  return Block::read(d.data());
}

Bytes system_random(std::size_t n) {
  Bytes out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1)
    throw std::runtime_error("system entropy source failed");
  return out;
}

}  // namespace ransomneg::crypto
