#include "ransomneg/transcript.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ransomneg::net {

void SessionTranscript::record(Direction d, const Frame& f) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  records_.push_back({d, to_string(f.type), static_cast<std::uint32_t>(f.payload.size()),
                      crypto::to_hex(crypto::sha256(f.payload)),
                      std::chrono::duration_cast<std::chrono::microseconds>(now).count()});
}

std::vector<std::string> SessionTranscript::payload_digests() const {
  std::vector<std::string> out;
  for (const auto& r : records_) out.push_back(r.payload_digest);
  return out;
}

void persist_transcript(const SessionTranscript& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open transcript file " + path.string());
  out << "# ransomneg-transcript v1\n";
  std::size_t seq = 0;
  for (const auto& r : t.records()) {
    out << seq++ << '\t' << (r.direction == Direction::Sent ? "sent" : "recv") << '\t' << r.type
        << '\t' << r.length << '\t' << r.payload_digest << '\t' << r.timestamp_us << '\n';
  }
  if (!out) throw std::runtime_error("failed writing transcript " + path.string());
}

SessionTranscript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transcript file " + path.string());
  SessionTranscript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::size_t seq = 0;
    std::string dir;
    TranscriptRecord r{};
    if (!(fields >> seq >> dir >> r.type >> r.length >> r.payload_digest >> r.timestamp_us))
      throw std::runtime_error("malformed transcript line: " + line);
    if (seq != t.records().size()) throw std::runtime_error("transcript sequence gap");
    if (dir == "sent")
      r.direction = Direction::Sent;
    else if (dir == "recv")
      r.direction = Direction::Received;
    else
      throw std::runtime_error("bad transcript direction: " + dir);
    t.append(std::move(r));
  }
  return t;
}

void RecordingChannel::send(const Frame& f) {
  inner_.send(f);
  transcript_.record(Direction::Sent, f);
}

Frame RecordingChannel::receive() {
  Frame f = inner_.receive();
  transcript_.record(Direction::Received, f);
  return f;
}

}  // namespace ransomneg::net
