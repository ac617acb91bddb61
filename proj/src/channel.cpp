#include "ransomneg/channel.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

namespace ransomneg::net {

std::string to_string(MessageType t) {
  switch (t) {
    case MessageType::Hello: return "HELLO";
    case MessageType::PiAck: return "PI_ACK";
    case MessageType::Circuit: return "CIRCUIT";
    case MessageType::GarblerInputLabels: return "GARBLER_INPUT_LABELS";
    case MessageType::OtMsg1: return "OT_MSG1";
    case MessageType::OtMsg2: return "OT_MSG2";
    case MessageType::OtMsg3: return "OT_MSG3";
    case MessageType::OutputLabels: return "OUTPUT_LABELS";
    case MessageType::ResultAck: return "RESULT_ACK";
    case MessageType::Abort: return "ABORT";
  }
  return "UNKNOWN(" + std::to_string(static_cast<int>(t)) + ")";
}

Bytes encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayload) throw TransportError("payload too large");
  Bytes out;
  out.reserve(kFrameHeader + f.payload.size());
  const auto n = static_cast<std::uint32_t>(f.payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.push_back(static_cast<std::uint8_t>(f.type));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

std::pair<std::string, std::uint16_t> split_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size())
    throw std::invalid_argument("address must be host:port");
  const std::string host = address.substr(0, colon);
  const unsigned long port = std::stoul(address.substr(colon + 1));
  if (port > 65535) throw std::invalid_argument("port out of range");
  return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(port)};
}

namespace {

void set_timeouts(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
    throw TransportError("cannot resolve " + host);
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return addr;
}

}  // namespace

TcpChannel::TcpChannel(int fd, std::chrono::milliseconds timeout) : fd_(fd) { set_timeouts(fd_, timeout); }

TcpChannel::~TcpChannel() { close(); }

TcpChannel::TcpChannel(TcpChannel&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }

TcpChannel& TcpChannel::operator=(TcpChannel&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

void TcpChannel::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void TcpChannel::shutdown_send() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

// Closing with unread input would reset the connection before the peer reads
// the ABORT.
void TcpChannel::finish() {
  if (fd_ < 0) return;
  shutdown_send();
  std::uint8_t buf[4096];
  while (true) {
    const ssize_t r = ::recv(fd_, buf, sizeof buf, 0);
    if (r > 0) continue;
    if (r < 0 && errno == EINTR) continue;
    break;
  }
}

TcpChannel TcpChannel::connect(const std::string& address, std::chrono::milliseconds timeout) {
  const auto [host, port] = split_address(address);
  const sockaddr_in addr = resolve(host, port);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0)
      return TcpChannel(fd, timeout);
    const int err = errno;
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline)
      throw TransportError("connect to " + address + ": " + std::strerror(err));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void TcpChannel::send_raw(std::span<const std::uint8_t> bytes) {
  if (fd_ < 0) throw TransportError("channel closed");
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw TransportError("send timed out");
      throw TransportError(std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void TcpChannel::send(const Frame& f) { send_raw(encode_frame(f)); }

void TcpChannel::read_exact(std::uint8_t* out, std::size_t n) {
  if (fd_ < 0) throw TransportError("channel closed");
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd_, out + got, n - got, 0);
    if (r == 0) throw TransportError("connection closed by peer");
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw TransportError("receive timed out");
      throw TransportError(std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
}

Frame TcpChannel::receive() {
  std::uint8_t header[kFrameHeader];
  read_exact(header, sizeof header);
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= std::uint32_t{header[i]} << (8 * i);
  if (n > kMaxPayload) throw TransportError("frame exceeds the maximum payload");
  Frame f{static_cast<MessageType>(header[4]), Bytes(n)};
  if (n > 0) read_exact(f.payload.data(), n);
  return f;
}

TcpListener::TcpListener(const std::string& address) {
  const auto [host, port] = split_address(address);
  sockaddr_in addr = resolve(host, port);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 16) != 0) {
    const int err = errno;
    ::close(fd_);
    fd_ = -1;
    throw TransportError("listen on " + address + ": " + std::strerror(err));
  }
  socklen_t len = sizeof addr;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

TcpChannel TcpListener::accept(std::chrono::milliseconds timeout) {
  pollfd p{fd_, POLLIN, 0};
  const int ready = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (ready == 0) throw TransportError("no peer connected before the timeout");
  if (ready < 0) throw TransportError(std::string("poll: ") + std::strerror(errno));
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw TransportError(std::string("accept: ") + std::strerror(errno));
  return TcpChannel(fd, timeout);
}

}  // namespace ransomneg::net
