// Command-line front end: simulate photon streams, correlate event files,
// fit the first-photon phase, and emit plot-ready data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twoion/archive.hpp"
#include "twoion/errors.hpp"
#include "twoion/pipeline.hpp"
#include "twoion/report.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

twoion::RunConfig make_config(const std::string& config_path,
                              std::optional<std::uint64_t> seed) {
  twoion::RunConfig cfg;
  if (!config_path.empty()) cfg = twoion::load_config(config_path);
  if (seed) cfg.drive.seed = *seed;
  cfg.validate();
  return cfg;
}

int selftest() {
  using namespace twoion;
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };

  check("g2_ideal reference values",
        std::abs(g2_ideal(0.0, kPi, 0.65)) < 1e-12 &&
            std::abs(g2_ideal(0.0, 0.0, 0.0) - 0.25) < 1e-12 &&
            std::abs(g2_ideal(kPi, kPi, 0.65) - 6.443786982248521) < 1e-9);

  auto det = apply_detection(
      dicke_from_product({0, 0}, {0, 0}, {0, 0}, {1, 0}), 0.0);
  check("detection projects |e,e> onto |s> at delta = 0",
        std::abs(std::norm(det.state.normalized().c[TwoAtomState::S]) - 1.0) <
            1e-12);

  RunConfig cfg;
  cfg.drive.duration_s = 2e-6;
  cfg.drive.trajectories = 2;
  cfg.detector.collection_efficiency = 1.0;
  cfg.detector.dead_time_ns = 0.0;
  std::vector<PhotonEvent> a, b;
  simulate_events(cfg, 1, a);
  simulate_events(cfg, 3, b);
  check("simulation deterministic across worker counts", a == b && !a.empty());

  std::printf("%s\n", failures == 0 ? "selftest OK" : "selftest FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-ion collective emission simulator and correlator"};
  app.require_subcommand(1);

  std::string config_path, out_path, events_path, archive_path, report_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  double delta1_pi = 0.34;
  std::optional<int> delta1_bin;
  std::string csv_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (key = value sections)");
    sub->add_option("--seed", seed, "override the RNG seed");
    sub->add_option("--threads", threads, "worker threads");
  };

  auto* sim = app.add_subcommand("simulate", "run trajectories and write an event file");
  add_common(sim);
  sim->add_option("--out", out_path, "output event file")->required();
  sim->add_option("--csv", csv_path, "also export a CSV copy of the events");

  auto* corr = app.add_subcommand("correlate", "accumulate an event file into a histogram archive");
  add_common(corr);
  corr->add_option("events", events_path, "input event file")->required();
  corr->add_option("--out", out_path, "output archive (JSON)")->required();

  auto* fit = app.add_subcommand("fit", "fit the first-photon phase at a tau = 0 slice");
  add_common(fit);
  fit->add_option("archive", archive_path, "histogram archive")->required();
  fit->add_option("--delta1-pi", delta1_pi, "slice direction delta1 in units of pi");
  fit->add_option("--delta1-bin", delta1_bin, "slice spatial bin (overrides --delta1-pi)");
  fit->add_option("--out", out_path, "write the JSON report here instead of stdout");

  auto* rep = app.add_subcommand("report", "emit plot-ready CSV data and a manifest");
  add_common(rep);
  rep->add_option("archive", archive_path, "histogram archive")->required();
  rep->add_option("--out", report_dir, "output directory")->required();

  auto* st = app.add_subcommand("selftest", "quick built-in checks");
  (void)st;

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto cfg = make_config(config_path, seed);
      auto sum = twoion::simulate_to_file(cfg, threads, out_path);
      if (!csv_path.empty()) twoion::export_events_csv(out_path, csv_path);
      std::printf("emissions: %llu\n", (unsigned long long)sum.emissions);
      std::printf("events camera 1: %llu\n", (unsigned long long)sum.events_camera1);
      std::printf("events camera 2: %llu\n", (unsigned long long)sum.events_camera2);
      std::printf("mean detected rate: %.6g Hz\n", sum.mean_rate_hz());
    } else if (corr->parsed()) {
      auto cfg = make_config(config_path, seed);
      auto archive = twoion::correlate_file(events_path, cfg, threads);
      twoion::save_archive(archive, out_path);
      double cells = double(archive.hist.g2_counts.size());
      std::printf("total pairs: %llu\n", (unsigned long long)archive.hist.total_pairs);
      std::printf("mean counts per cell: %.6g\n", double(archive.hist.total_pairs) / cells);
    } else if (fit->parsed()) {
      auto cfg = make_config(config_path, seed);
      auto archive = twoion::load_archive(archive_path);
      double delta1 = delta1_pi * kPi;
      if (delta1_bin) {
        auto n = twoion::normalize(archive.hist, archive.fov_start, archive.fov_span);
        if (*delta1_bin < 0 || *delta1_bin >= archive.hist.cfg.spatial_bins)
          throw twoion::DataError("delta1 bin out of range");
        delta1 = n.delta_axis[std::size_t(*delta1_bin)];
      }
      auto fr = twoion::fit_archive_slice(archive, cfg, delta1);
      std::string body = twoion::fit_report_json(archive, cfg, delta1, fr);
      if (out_path.empty()) {
        std::fputs(body.c_str(), stdout);
      } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw twoion::DataError("cannot open for writing: " + out_path);
        out << body;
      }
    } else if (rep->parsed()) {
      auto cfg = make_config(config_path, seed);
      auto archive = twoion::load_archive(archive_path);
      int n = twoion::write_report(archive, cfg, report_dir);
      std::printf("wrote %d datasets to %s\n", n, report_dir.c_str());
    } else if (st->parsed()) {
      return selftest();
    }
  } catch (const twoion::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const twoion::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
