#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace twoion {

inline constexpr int kColumns = 1000;
inline constexpr int kRows = 1000;

// One detector click. Timestamps are integer picoseconds since run start so
// dead-time comparisons are exact and files are portable.
struct PhotonEvent {
  std::uint8_t camera;   // 1 or 2
  std::uint16_t x;       // column bin in [0, 1000)
  std::uint16_t y;       // row bin in [0, 1000)
  std::uint64_t timestamp_ps;

  friend bool operator==(const PhotonEvent&, const PhotonEvent&) = default;
};

// Event file: little-endian, 24-byte header (magic "PHEV", u32 version = 1,
// u64 record count, u64 run-start epoch ns), then 16-byte records
// (u8 camera, u8 reserved, u16 x, u16 y, u16 reserved, u64 timestamp_ps).
inline constexpr std::uint32_t kEventFileVersion = 1;
inline constexpr std::size_t kEventHeaderSize = 24;
inline constexpr std::size_t kEventRecordSize = 16;

class EventWriter {
 public:
  EventWriter(const std::string& path, std::uint64_t epoch_ns = 0);
  ~EventWriter();

  void write(const PhotonEvent& ev);
  // Patches the record count into the header and closes the file.
  void close();

  std::uint64_t count() const { return count_; }

 private:
  void flush_buffer();

  std::ofstream out_;
  std::string path_;
  std::vector<char> buf_;
  std::uint64_t count_ = 0;
  bool closed_ = false;
};

class EventReader {
 public:
  explicit EventReader(const std::string& path);

  // Returns false at end of stream. Throws DataError (with byte offset) on a
  // truncated or malformed record.
  bool next(PhotonEvent& ev);

  std::uint64_t count() const { return count_; }
  std::uint64_t epoch_ns() const { return epoch_ns_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::uint64_t count_ = 0;
  std::uint64_t epoch_ns_ = 0;
  std::uint64_t read_ = 0;
};

void write_events(const std::vector<PhotonEvent>& events,
                  const std::string& path, std::uint64_t epoch_ns = 0);
std::vector<PhotonEvent> read_events(const std::string& path);

// Plain-text debug export: header line, then camera,timestamp_ps,x,y.
void export_events_csv(const std::string& event_path,
                       const std::string& csv_path);

}  // namespace twoion
