#pragma once

#include "ransomneg/crypto.hpp"

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ransomneg::ot {

using crypto::Block;
using crypto::Bytes;

class OtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 1-out-of-2 oblivious transfer of 128-bit blocks in the style of the
// "simplest OT": three messages over the NIST P-256 group.
//
//   sender -> receiver : A = aG                           (msg1)
//   receiver -> sender : B_i = b_i G  or  A + b_i G       (msg2)
//   sender -> receiver : m0_i ^ H(aB_i), m1_i ^ H(a(B_i - A))  (msg3)
//
// The receiver recovers m_{c_i} ^ H(b_i A) ^ H(b_i A) = m_{c_i}.
class Sender {
 public:
  explicit Sender(crypto::Prg& prg);
  ~Sender();
  Sender(const Sender&) = delete;
  Sender& operator=(const Sender&) = delete;

  Bytes first_message() const;
  // Throws OtError on malformed receiver points or a count mismatch.
  Bytes respond(std::span<const std::uint8_t> receiver_message,
                const std::vector<std::pair<Block, Block>>& messages) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class Receiver {
 public:
  Receiver(crypto::Prg& prg, std::vector<bool> choices);
  ~Receiver();
  Receiver(const Receiver&) = delete;
  Receiver& operator=(const Receiver&) = delete;

  // Throws OtError on a malformed sender point.
  Bytes respond(std::span<const std::uint8_t> sender_message);
  // Throws OtError on a malformed or short ciphertext message.
  std::vector<Block> finish(std::span<const std::uint8_t> sender_ciphertexts) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// In-process run of all three messages; used by tests and benchmarks.
std::vector<Block> ot_transfer(const std::vector<std::pair<Block, Block>>& messages,
                               const std::vector<bool>& choices, crypto::Prg& sender_prg,
                               crypto::Prg& receiver_prg);

}  // namespace ransomneg::ot
