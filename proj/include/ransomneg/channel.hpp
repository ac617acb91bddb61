#pragma once

#include "ransomneg/crypto.hpp"

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ransomneg::net {

using crypto::Bytes;

enum class MessageType : std::uint8_t {
  Hello = 1,  // strategy-profile proposal
  PiAck = 2,
  Circuit = 3,
  GarblerInputLabels = 4,
  OtMsg1 = 5,
  OtMsg2 = 6,
  OtMsg3 = 7,
  OutputLabels = 8,
  ResultAck = 9,
  Abort = 0xff,
};

std::string to_string(MessageType t);

struct Frame {
  MessageType type;
  Bytes payload;
};

// Wire framing: u32 little-endian payload length | u8 type | payload.
inline constexpr std::size_t kFrameHeader = 5;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

Bytes encode_frame(const Frame& f);

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Channel {
 public:
  virtual ~Channel() = default;
  // Both throw TransportError.
  virtual void send(const Frame& f) = 0;
  virtual Frame receive() = 0;
  // After a final ABORT: stop sending and discard input until the peer hangs up.
  virtual void finish() {}
};

// Blocking TCP stream with per-operation timeouts.
class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd, std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~TcpChannel() override;
  TcpChannel(TcpChannel&& o) noexcept;
  TcpChannel& operator=(TcpChannel&& o) noexcept;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  // "host:port"; retries until the deadline so a peer may start listening late.
  static TcpChannel connect(const std::string& address,
                            std::chrono::milliseconds timeout = std::chrono::seconds(10));

  void send(const Frame& f) override;
  Frame receive() override;
  void send_raw(std::span<const std::uint8_t> bytes);
  void close();
  // Half-close: the peer reads end-of-stream, receiving still works.
  void shutdown_send();
  void finish() override;

 private:
  void read_exact(std::uint8_t* out, std::size_t n);
  int fd_ = -1;
};

class TcpListener {
 public:
  // "host:port"; port 0 picks an ephemeral port.
  explicit TcpListener(const std::string& address);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  TcpChannel accept(std::chrono::milliseconds timeout = std::chrono::seconds(10));

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Splits "host:port". Throws std::invalid_argument.
std::pair<std::string, std::uint16_t> split_address(const std::string& address);

}  // namespace ransomneg::net
