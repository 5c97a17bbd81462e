#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "twoion/archive.hpp"
#include "twoion/errors.hpp"
#include "twoion/pipeline.hpp"
#include "twoion/report.hpp"

using namespace twoion;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.drive.duration_s = 4e-5;
  cfg.drive.trajectories = 8;
  cfg.drive.seed = 20240816;
  cfg.detector.collection_efficiency = 1.0;
  cfg.detector.dead_time_ns = 0.0;
  cfg.detector.jitter_fwhm_ps = 0.0;
  return cfg;
}

std::string temp_file(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_hist(const CorrelationHistogram& a, const CorrelationHistogram& b) {
  return a.g2_counts == b.g2_counts && a.intensity1 == b.intensity1 &&
         a.intensity2 == b.intensity2 && a.total_pairs == b.total_pairs &&
         a.total_events == b.total_events;
}

}  // namespace

TEST_CASE("simulation is deterministic across worker counts") {
  RunConfig cfg = small_config();
  std::vector<PhotonEvent> one, three, five;
  auto s1 = simulate_events(cfg, 1, one);
  auto s3 = simulate_events(cfg, 3, three);
  auto s5 = simulate_events(cfg, 5, five);
  REQUIRE(!one.empty());
  CHECK(one == three);
  CHECK(one == five);
  CHECK(s1.emissions == s3.emissions);
  CHECK(s1.events_camera1 == s3.events_camera1);
  CHECK(s1.events_camera2 == s5.events_camera2);

  // and a different seed gives a different stream
  cfg.drive.seed += 1;
  std::vector<PhotonEvent> other;
  simulate_events(cfg, 1, other);
  CHECK(one != other);
}

TEST_CASE("simulated streams are sorted and summarized consistently") {
  RunConfig cfg = small_config();
  std::vector<PhotonEvent> events;
  auto sum = simulate_events(cfg, 2, events);
  CHECK(sum.emissions >= events.size());  // unit efficiency, in-fov only kept
  CHECK(sum.events_camera1 + sum.events_camera2 == events.size());
  CHECK(sum.simulated_time_s == doctest::Approx(cfg.drive.duration_s));
  CHECK(sum.mean_rate_hz() > 0.0);
  std::uint64_t prev = 0;
  for (const auto& ev : events) {
    CHECK(ev.timestamp_ps >= prev);
    prev = ev.timestamp_ps;
  }
}

TEST_CASE("file output is bit-identical to the in-memory stream") {
  RunConfig cfg = small_config();
  auto p1 = temp_file("twoion_pipe_a.bin");
  auto p2 = temp_file("twoion_pipe_b.bin");
  simulate_to_file(cfg, 1, p1);
  simulate_to_file(cfg, 4, p2);
  CHECK(slurp(p1) == slurp(p2));

  std::vector<PhotonEvent> mem;
  simulate_events(cfg, 2, mem);
  CHECK(read_events(p1) == mem);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("zero duration yields a header-only event file") {
  RunConfig cfg = small_config();
  cfg.drive.duration_s = 0.0;
  auto path = temp_file("twoion_pipe_empty.bin");
  auto sum = simulate_to_file(cfg, 1, path);
  CHECK(sum.emissions == 0);
  CHECK(std::filesystem::file_size(path) == kEventHeaderSize);
  CHECK(read_events(path).empty());
  std::filesystem::remove(path);
}

TEST_CASE("correlation via file equals correlation in memory, any threads") {
  RunConfig cfg = small_config();
  auto path = temp_file("twoion_pipe_corr.bin");
  simulate_to_file(cfg, 2, path);
  std::vector<PhotonEvent> mem;
  simulate_events(cfg, 2, mem);

  auto a_mem1 = correlate_events(mem, cfg, 1);
  auto a_mem3 = correlate_events(mem, cfg, 3);
  auto a_file1 = correlate_file(path, cfg, 1);
  auto a_file4 = correlate_file(path, cfg, 4);
  CHECK(same_hist(a_mem1.hist, a_mem3.hist));
  CHECK(same_hist(a_mem1.hist, a_file1.hist));
  CHECK(same_hist(a_mem1.hist, a_file4.hist));
  CHECK(a_mem1.hist.total_events == mem.size());
  CHECK(a_file1.config_hash == config_hash(cfg));
  CHECK(a_file1.fov_start == doctest::Approx(-2.0 * 3.14159265358979323846 *
                                             cfg.detector.fov_periods / 2.0));
  std::filesystem::remove(path);
}

TEST_CASE("archives round trip through JSON") {
  RunConfig cfg = small_config();
  std::vector<PhotonEvent> mem;
  simulate_events(cfg, 2, mem);
  auto archive = correlate_events(mem, cfg, 1);

  auto path = temp_file("twoion_pipe_archive.json");
  save_archive(archive, path);
  auto back = load_archive(path);
  CHECK(same_hist(back.hist, archive.hist));
  CHECK(back.fov_start == archive.fov_start);
  CHECK(back.fov_span == archive.fov_span);
  CHECK(back.config_hash == archive.config_hash);
  CHECK(back.seed == archive.seed);

  {
    std::ofstream out(path, std::ios::trunc);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_archive(path), DataError);
  {
    std::ofstream out(path, std::ios::trunc);
    out << "{\"format\": \"something-else\"}";
  }
  CHECK_THROWS_AS(load_archive(path), DataError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_archive(path), DataError);
}

TEST_CASE("report emission on a small archive") {
  RunConfig cfg = small_config();
  std::vector<PhotonEvent> mem;
  simulate_events(cfg, 2, mem);
  auto archive = correlate_events(mem, cfg, 1);

  auto dir = (std::filesystem::temp_directory_path() / "twoion_report_test").string();
  std::filesystem::remove_all(dir);
  int n = write_report(archive, cfg, dir);
  CHECK(n > 0);
  CHECK(std::filesystem::exists(dir + "/manifest.json"));
  std::size_t csvs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".csv") ++csvs;
  CHECK(csvs >= 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt event files surface as data errors") {
  RunConfig cfg = small_config();
  auto path = temp_file("twoion_pipe_bad.bin");
  // two events out of order
  {
    EventWriter w(path);
    w.write(PhotonEvent{1, 0, 0, 100});
    w.write(PhotonEvent{2, 0, 0, 50});
    w.close();
  }
  CHECK_THROWS_AS(correlate_file(path, cfg, 1), DataError);
  std::filesystem::remove(path);
}
