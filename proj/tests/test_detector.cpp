#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "twoion/detector.hpp"
#include "twoion/errors.hpp"
#include "twoion/events.hpp"

using namespace twoion;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

std::string temp_path(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}
}  // namespace

TEST_CASE("column mapping is an exact affine round trip") {
  DetectorConfig cfg;  // span 4pi centered on 0
  CHECK(cfg.fov_start() == doctest::Approx(-kTwoPi));

  for (int col = 0; col < kColumns; ++col) {
    double d = column_to_delta(col, cfg);
    CHECK(delta_to_column(d, cfg) == col);
  }
  // edges
  CHECK(delta_to_column(cfg.fov_start(), cfg) == 0);
  CHECK(delta_to_column(cfg.fov_start() + cfg.fov_phase_span, cfg) == -1);
  CHECK(delta_to_column(cfg.fov_start() - 1e-9, cfg) == -1);
  CHECK(delta_to_column(100.0, cfg) == -1);
  CHECK_THROWS_AS(column_to_delta(kColumns, cfg), std::domain_error);
  CHECK_THROWS_AS(column_to_delta(-1, cfg), std::domain_error);
}

TEST_CASE("dead-time filter keeps exactly the spaced clicks") {
  DetectorConfig cfg;
  cfg.dead_time_ns = 600.0;  // 600'000 ps
  auto ev = [](std::uint8_t cam, std::uint64_t t) {
    return PhotonEvent{cam, 0, 0, t};
  };
  std::vector<PhotonEvent> in = {
      ev(1, 1'000'000), ev(1, 1'599'999),  // dropped: 1 ps short
      ev(2, 1'600'000),                    // other camera: independent
      ev(1, 1'600'000),                    // kept: exactly dead time later
      ev(2, 2'199'999),                    // dropped
      ev(2, 2'200'000),                    // kept
  };
  auto out = dead_time_filter(in, cfg);
  REQUIRE(out.size() == 4);
  CHECK(out[0] == in[0]);
  CHECK(out[1] == in[2]);
  CHECK(out[2] == in[3]);
  CHECK(out[3] == in[5]);

  // idempotent
  auto again = dead_time_filter(out, cfg);
  CHECK(again == out);

  // unsorted input is a caller bug
  std::vector<PhotonEvent> bad = {ev(1, 10), ev(1, 5)};
  CHECK_THROWS_AS(dead_time_filter(bad, cfg), std::domain_error);
}

TEST_CASE("synthesizer routes, places, and keeps order") {
  DetectorConfig cfg;
  cfg.collection_efficiency = 1.0;
  cfg.dead_time_ns = 0.0;
  cfg.timing_jitter_fwhm_ps = 0.0;

  const int n = 20000;
  std::vector<EmissionRecord> emissions;
  emissions.reserve(n);
  for (int i = 0; i < n; ++i) {
    EmissionRecord r;
    r.time = 1e-6 * (i + 1);
    r.delta = std::fmod(0.001 * i, kTwoPi);
    emissions.push_back(r);
  }
  auto events = synthesize_clicks(emissions, cfg, 99, 0.0, 1e-6 * (n + 1));
  REQUIRE(events.size() == std::size_t(n));  // unit efficiency, nothing dropped

  std::uint64_t prev = 0;
  std::size_t cam1 = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    CHECK(ev.timestamp_ps >= prev);
    prev = ev.timestamp_ps;
    CHECK((ev.camera == 1 || ev.camera == 2));
    if (ev.camera == 1) ++cam1;
    CHECK(ev.x < kColumns);
    CHECK(ev.y < kRows);

    // no jitter: timestamps are the emission times
    CHECK(ev.timestamp_ps == std::uint64_t(std::llround(emissions[i].time * 1e12)));

    // the column encodes the emission phase modulo one fringe period
    double col_phase = std::fmod(column_to_delta(ev.x, cfg) - cfg.fov_start(), kTwoPi);
    double diff = std::remainder(col_phase - emissions[i].delta, kTwoPi);
    CHECK(std::abs(diff) <= 0.5 * cfg.fov_phase_span / kColumns + 1e-9);
  }

  // 50/50 splitter: binomial within 4 sigma
  double sigma = 0.5 * std::sqrt(double(n));
  CHECK(std::abs(double(cam1) - 0.5 * n) < 4.0 * sigma);
}

TEST_CASE("collection efficiency thins the stream") {
  DetectorConfig cfg;
  cfg.collection_efficiency = 0.025;
  cfg.dead_time_ns = 0.0;
  cfg.timing_jitter_fwhm_ps = 0.0;
  const int n = 100000;
  std::vector<EmissionRecord> emissions(std::size_t(n), EmissionRecord{});
  for (int i = 0; i < n; ++i) {
    emissions[std::size_t(i)].time = 1e-7 * (i + 1);
    emissions[std::size_t(i)].delta = 1.0;
  }
  auto events = synthesize_clicks(emissions, cfg, 7, 0.0, 1e-7 * (n + 1));
  double expect = 0.025 * n;
  double sigma = std::sqrt(expect * (1.0 - 0.025));
  CHECK(std::abs(double(events.size()) - expect) < 4.0 * sigma);
}

TEST_CASE("jittered output is sorted and unbiased") {
  DetectorConfig cfg;
  cfg.collection_efficiency = 1.0;
  cfg.dead_time_ns = 0.0;
  cfg.timing_jitter_fwhm_ps = 50.0;
  const int n = 20000;
  std::vector<EmissionRecord> emissions(std::size_t(n), EmissionRecord{});
  for (int i = 0; i < n; ++i) {
    emissions[std::size_t(i)].time = 1e-9 * (i + 1) + 1e-6;
    emissions[std::size_t(i)].delta = 0.5;
  }
  auto events = synthesize_clicks(emissions, cfg, 3, 0.0, 1.0);
  REQUIRE(events.size() == std::size_t(n));
  std::uint64_t prev = 0;
  double mean_shift = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].timestamp_ps >= prev);
    prev = events[i].timestamp_ps;
  }
  // jitter is zero-mean: compare total time against the unjittered sum
  for (std::size_t i = 0; i < events.size(); ++i)
    mean_shift += double(events[i].timestamp_ps) - (1e3 * double(i + 1) + 1e6);
  mean_shift /= n;
  double sigma = 50.0 / 2.3548200450309493;
  CHECK(std::abs(mean_shift) < 4.0 * sigma / std::sqrt(double(n)) + 0.5);
}

TEST_CASE("dark counts arrive at the configured rate") {
  DetectorConfig cfg;
  cfg.collection_efficiency = 1.0;
  cfg.dead_time_ns = 0.0;
  cfg.timing_jitter_fwhm_ps = 0.0;
  cfg.dark_count_rate_hz = 5000.0;
  const double T = 2.0;
  auto events = synthesize_clicks({}, cfg, 21, 0.0, T);
  // two cameras, Poisson(2 * rate * T)
  double expect = 2.0 * cfg.dark_count_rate_hz * T;
  CHECK(std::abs(double(events.size()) - expect) < 4.0 * std::sqrt(expect));

  // uniform in column: mean column near the center
  double mx = 0.0;
  for (const auto& ev : events) mx += ev.x;
  mx /= double(events.size());
  double col_sigma = kColumns / std::sqrt(12.0) / std::sqrt(double(events.size()));
  CHECK(std::abs(mx - 0.5 * (kColumns - 1)) < 4.0 * col_sigma);
}

TEST_CASE("per-camera dead time is applied inside the synthesizer") {
  DetectorConfig cfg;
  cfg.collection_efficiency = 1.0;
  cfg.dead_time_ns = 600.0;
  cfg.timing_jitter_fwhm_ps = 0.0;
  const int n = 50000;
  std::vector<EmissionRecord> emissions(std::size_t(n), EmissionRecord{});
  for (int i = 0; i < n; ++i) {
    emissions[std::size_t(i)].time = 50e-9 * (i + 1);  // 20 MHz, far above 1/dead
    emissions[std::size_t(i)].delta = 0.2;
  }
  auto events = synthesize_clicks(emissions, cfg, 11, 0.0, 50e-9 * (n + 1));
  // saturated: each camera clicks at most once per dead time
  auto again = dead_time_filter(events, cfg);
  CHECK(again == events);
  double duration = 50e-9 * n;
  CHECK(double(events.size()) < 2.0 * duration / 600e-9 + 10.0);
  CHECK(double(events.size()) > 0.5 * duration / 600e-9);
}

TEST_CASE("event files round trip bit-identically") {
  auto path = temp_path("twoion_test_events.bin");
  std::vector<PhotonEvent> events = {
      {1, 0, 0, 0},
      {2, 999, 999, 123456789},
      {1, 500, 3, ~std::uint64_t(0) - 5},
  };
  write_events(events, path, 1700000000ULL);
  auto back = read_events(path);
  CHECK(back == events);

  EventReader reader(path);
  CHECK(reader.count() == 3);
  CHECK(reader.epoch_ns() == 1700000000ULL);

  // empty file: header only
  write_events({}, path);
  CHECK(read_events(path).empty());
  CHECK(std::filesystem::file_size(path) == kEventHeaderSize);
  std::filesystem::remove(path);
}

TEST_CASE("malformed event files raise data errors") {
  auto path = temp_path("twoion_test_trunc.bin");
  std::vector<PhotonEvent> events(10, PhotonEvent{1, 1, 1, 42});
  write_events(events, path);

  // truncate mid-record
  std::filesystem::resize_file(path, kEventHeaderSize + 3 * kEventRecordSize + 7);
  try {
    read_events(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    // diagnostic carries the byte offset of the bad record
    std::string msg = e.what();
    CHECK(msg.find(std::to_string(kEventHeaderSize + 3 * kEventRecordSize)) !=
          std::string::npos);
  }

  // corrupt camera id
  write_events(events, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(std::streamoff(kEventHeaderSize));
    char c = 7;
    f.write(&c, 1);
  }
  CHECK_THROWS_AS(read_events(path), DataError);

  // bad magic
  {
    std::ofstream f(path, std::ios::trunc | std::ios::binary);
    f << "NOPEnope";
  }
  CHECK_THROWS_AS(read_events(path), DataError);
  CHECK_THROWS_AS(EventReader("/nonexistent/path/events.bin"), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("configuration validation") {
  DetectorConfig cfg;
  cfg.validate();
  DetectorConfig bad = cfg;
  bad.collection_efficiency = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = cfg;
  bad.splitter_ratio = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = cfg;
  bad.dead_time_ns = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
}
