#include "twoion/events.hpp"

#include <cstring>

#include "twoion/errors.hpp"

namespace twoion {

namespace {

const char kMagic[4] = {'P', 'H', 'E', 'V'};

template <typename T>
void put_le(char* p, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) p[i] = char((v >> (8 * i)) & 0xff);
}

template <typename T>
T get_le(const char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= T(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void encode_record(char* p, const PhotonEvent& ev) {
  p[0] = char(ev.camera);
  p[1] = 0;
  put_le<std::uint16_t>(p + 2, ev.x);
  put_le<std::uint16_t>(p + 4, ev.y);
  put_le<std::uint16_t>(p + 6, 0);
  put_le<std::uint64_t>(p + 8, ev.timestamp_ps);
}

PhotonEvent decode_record(const char* p) {
  PhotonEvent ev;
  ev.camera = static_cast<std::uint8_t>(p[0]);
  ev.x = get_le<std::uint16_t>(p + 2);
  ev.y = get_le<std::uint16_t>(p + 4);
  ev.timestamp_ps = get_le<std::uint64_t>(p + 8);
  return ev;
}

}  // namespace

EventWriter::EventWriter(const std::string& path, std::uint64_t epoch_ns)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw DataError("cannot open for writing: " + path);
  char hdr[kEventHeaderSize];
  std::memcpy(hdr, kMagic, 4);
  put_le<std::uint32_t>(hdr + 4, kEventFileVersion);
  put_le<std::uint64_t>(hdr + 8, 0);  // count patched on close
  put_le<std::uint64_t>(hdr + 16, epoch_ns);
  out_.write(hdr, kEventHeaderSize);
  buf_.reserve(kEventRecordSize * 4096);
}

EventWriter::~EventWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void EventWriter::write(const PhotonEvent& ev) {
  char rec[kEventRecordSize];
  encode_record(rec, ev);
  buf_.insert(buf_.end(), rec, rec + kEventRecordSize);
  ++count_;
  if (buf_.size() >= kEventRecordSize * 4096) flush_buffer();
}

void EventWriter::flush_buffer() {
  if (!buf_.empty()) {
    out_.write(buf_.data(), std::streamsize(buf_.size()));
    buf_.clear();
  }
}

void EventWriter::close() {
  if (closed_) return;
  flush_buffer();
  out_.seekp(8);
  char cnt[8];
  put_le<std::uint64_t>(cnt, count_);
  out_.write(cnt, 8);
  out_.flush();
  if (!out_) throw DataError("write failure: " + path_);
  out_.close();
  closed_ = true;
}

EventReader::EventReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw DataError("cannot open: " + path);
  char hdr[kEventHeaderSize];
  in_.read(hdr, kEventHeaderSize);
  if (in_.gcount() != std::streamsize(kEventHeaderSize))
    throw DataError(path + ": truncated header (file shorter than 24 bytes)");
  if (std::memcmp(hdr, kMagic, 4) != 0)
    throw DataError(path + ": bad magic, not an event file");
  std::uint32_t version = get_le<std::uint32_t>(hdr + 4);
  if (version != kEventFileVersion)
    throw DataError(path + ": unsupported event file version " +
                    std::to_string(version));
  count_ = get_le<std::uint64_t>(hdr + 8);
  epoch_ns_ = get_le<std::uint64_t>(hdr + 16);
}

bool EventReader::next(PhotonEvent& ev) {
  if (read_ >= count_) return false;
  char rec[kEventRecordSize];
  in_.read(rec, kEventRecordSize);
  if (in_.gcount() != std::streamsize(kEventRecordSize))
    throw DataError(path_ + ": truncated record at byte offset " +
                    std::to_string(kEventHeaderSize + read_ * kEventRecordSize));
  ev = decode_record(rec);
  if (ev.camera != 1 && ev.camera != 2)
    throw DataError(path_ + ": corrupt camera id at byte offset " +
                    std::to_string(kEventHeaderSize + read_ * kEventRecordSize));
  ++read_;
  return true;
}

void write_events(const std::vector<PhotonEvent>& events,
                  const std::string& path, std::uint64_t epoch_ns) {
  EventWriter w(path, epoch_ns);
  for (const auto& ev : events) w.write(ev);
  w.close();
}

std::vector<PhotonEvent> read_events(const std::string& path) {
  EventReader r(path);
  std::vector<PhotonEvent> out;
  out.reserve(r.count());
  PhotonEvent ev;
  while (r.next(ev)) out.push_back(ev);
  return out;
}

void export_events_csv(const std::string& event_path,
                       const std::string& csv_path) {
  EventReader r(event_path);
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + csv_path);
  out << "camera,timestamp_ps,x,y\n";
  PhotonEvent ev;
  while (r.next(ev))
    out << int(ev.camera) << ',' << ev.timestamp_ps << ',' << ev.x << ','
        << ev.y << '\n';
}

}  // namespace twoion
