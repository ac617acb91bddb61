#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ransomneg::crypto {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

// 128-bit wire label / PRF block, little-endian halves.
struct Block {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  Block operator^(const Block& o) const { return {lo ^ o.lo, hi ^ o.hi}; }
  Block& operator^=(const Block& o) {
    lo ^= o.lo;
    hi ^= o.hi;
    return *this;
  }
  bool operator==(const Block&) const = default;

  // Point-and-permute color bit.
  bool color() const { return (lo & 1) != 0; }

  // Multiplication by x in GF(2^128) (reduction polynomial x^128 + x^7 + x^2 + x + 1).
  Block doubled() const;

  void write(std::uint8_t* out) const;
  static Block read(const std::uint8_t* in);
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);
std::string to_hex(std::span<const std::uint8_t> data);
// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

// Fixed-key AES-128 permutation used as the garbling hash
// H(A, B, T) = pi(K) ^ K with K = 2A ^ 4B ^ T.
class GarblingHash {
 public:
  GarblingHash();
  ~GarblingHash();
  GarblingHash(const GarblingHash&) = delete;
  GarblingHash& operator=(const GarblingHash&) = delete;

  Block operator()(const Block& a, const Block& b, std::uint64_t tweak) const;

 private:
  void* ctx_;  // EVP_CIPHER_CTX
};

// AES-128-CTR keystream generator.
class Prg {
 public:
  explicit Prg(const Block& seed);
  ~Prg();
  Prg(const Prg&) = delete;
  Prg& operator=(const Prg&) = delete;
  Prg(Prg&&) noexcept;
  Prg& operator=(Prg&&) noexcept;

  Block next_block();
  void fill(std::span<std::uint8_t> out);
  // Uniform value in [0, 2^bits), bits <= 64.
  std::uint64_t next_bits(unsigned bits);

 private:
  void* ctx_;  // EVP_CIPHER_CTX
};

// Derives an independent PRG seed for a named purpose from master key bytes.
Block derive_seed(std::span<const std::uint8_t> master, std::string_view purpose);

// n bytes from the operating-system entropy source.
Bytes system_random(std::size_t n);

}  // namespace ransomneg::crypto
