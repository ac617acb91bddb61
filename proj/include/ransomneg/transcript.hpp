#pragma once

#include "ransomneg/channel.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ransomneg::net {

enum class Direction { Sent, Received };

struct TranscriptRecord {
  Direction direction;
  std::string type;
  std::uint32_t length;
  std::string payload_digest;  // hex SHA-256
  std::int64_t timestamp_us;   // microseconds since the Unix epoch

  bool operator==(const TranscriptRecord&) const = default;
};

// Append-only log of the frames of one session. Holds digests only, never
// payload bytes.
class SessionTranscript {
 public:
  void record(Direction d, const Frame& f);
  void append(TranscriptRecord r) { records_.push_back(std::move(r)); }

  const std::vector<TranscriptRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::vector<std::string> payload_digests() const;

  bool operator==(const SessionTranscript&) const = default;

 private:
  std::vector<TranscriptRecord> records_;
};

// One tab-separated record per line after a "#"-prefixed header:
//   seq  direction  type  length  sha256  timestamp_us
// Throws std::runtime_error on I/O failure.
void persist_transcript(const SessionTranscript& t, const std::filesystem::path& path);
SessionTranscript load_transcript(const std::filesystem::path& path);

// Channel wrapper that records every frame it carries.
class RecordingChannel final : public Channel {
 public:
  RecordingChannel(Channel& inner, SessionTranscript& transcript)
      : inner_(inner), transcript_(transcript) {}

  void send(const Frame& f) override;
  Frame receive() override;
  void finish() override { inner_.finish(); }

 private:
  Channel& inner_;
  SessionTranscript& transcript_;
};

}  // namespace ransomneg::net
