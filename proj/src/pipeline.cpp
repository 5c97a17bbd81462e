#include "twoion/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "twoion/errors.hpp"
#include "twoion/rng.hpp"

namespace twoion {

namespace {

// Gap between trajectory segments; must exceed the dead time and the pair
// window so per-trajectory detector state cannot leak across segments.
double guard_gap_s(const RunConfig& cfg) {
  double dead_s = cfg.detector.dead_time_ns * 1e-9;
  double window_s = cfg.correlator.tau_bins * cfg.correlator.tau_bin_ns * 1e-9;
  return std::max({1e-6, 4.0 * dead_s, 4.0 * window_s});
}

struct TrajResult {
  std::vector<PhotonEvent> events;
  std::uint64_t emissions = 0;
};

TrajResult run_one_trajectory(const RunConfig& cfg, std::uint64_t index,
                              double traj_duration, double offset) {
  TrajResult res;
  DriveParams drive = cfg.drive_params();
  DetectorConfig det = cfg.detector_config();
  Rng traj_rng(derive_seed(cfg.drive.seed, index, 0));
  ClickSynthesizer syn(det, derive_seed(cfg.drive.seed, index, 1), offset,
                       offset + traj_duration,
                       [&](const PhotonEvent& ev) { res.events.push_back(ev); });
  if (drive.rabi_frequency > 0.0) {
    run_trajectory(drive, traj_duration, traj_rng,
                   [&](const EmissionRecord& rec) {
                     ++res.emissions;
                     EmissionRecord shifted = rec;
                     shifted.time += offset;
                     syn.push(shifted);
                   });
  }
  syn.finish();
  return res;
}

}  // namespace

SimSummary simulate_events(const RunConfig& cfg, unsigned threads,
                           std::vector<PhotonEvent>& out) {
  cfg.validate();
  SimSummary sum;
  sum.simulated_time_s = cfg.drive.duration_s;
  out.clear();
  if (cfg.drive.duration_s <= 0.0) return sum;

  const std::uint64_t n_traj = cfg.drive.trajectories;
  const double traj_duration = cfg.drive.duration_s / double(n_traj);
  const double spacing = traj_duration + guard_gap_s(cfg);
  if (threads < 1) threads = 1;

  std::vector<TrajResult> results(n_traj);
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = next.fetch_add(1); i < n_traj;
             i = next.fetch_add(1))
          results[i] = run_one_trajectory(cfg, i, traj_duration,
                                          double(i) * spacing);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  std::size_t total = 0;
  for (const auto& r : results) total += r.events.size();
  out.reserve(total);
  for (auto& r : results) {
    sum.emissions += r.emissions;
    for (const auto& ev : r.events) {
      if (ev.camera == 1)
        ++sum.events_camera1;
      else
        ++sum.events_camera2;
      out.push_back(ev);
    }
    r.events.clear();
    r.events.shrink_to_fit();
  }
  return sum;
}

SimSummary simulate_to_file(const RunConfig& cfg, unsigned threads,
                            const std::string& out_path) {
  std::vector<PhotonEvent> events;
  SimSummary sum = simulate_events(cfg, threads, events);
  EventWriter w(out_path);
  for (const auto& ev : events) w.write(ev);
  w.close();
  return sum;
}

HistogramArchive correlate_events(const std::vector<PhotonEvent>& events,
                                  const RunConfig& cfg, unsigned threads) {
  CorrelatorConfig ccfg = cfg.correlator_config();
  CorrelationHistogram hist =
      (threads > 1) ? accumulate_pairs_parallel(events, ccfg, threads)
                    : accumulate_pairs(events, ccfg);
  HistogramArchive a{std::move(hist)};
  DetectorConfig det = cfg.detector_config();
  a.fov_start = det.fov_start();
  a.fov_span = det.fov_phase_span;
  a.config_hash = config_hash(cfg);
  a.seed = cfg.drive.seed;
  return a;
}

HistogramArchive correlate_file(const std::string& event_path,
                                const RunConfig& cfg, unsigned threads) {
  if (threads > 1) {
    return correlate_events(read_events(event_path), cfg, threads);
  }
  // streaming single pass
  CorrelatorConfig ccfg = cfg.correlator_config();
  PairAccumulator acc(ccfg);
  EventReader r(event_path);
  PhotonEvent ev;
  while (r.next(ev)) {
    try {
      acc.push(ev);
    } catch (const std::domain_error& e) {
      throw DataError(event_path + ": " + e.what());
    }
  }
  HistogramArchive a{acc.take()};
  DetectorConfig det = cfg.detector_config();
  a.fov_start = det.fov_start();
  a.fov_span = det.fov_phase_span;
  a.config_hash = config_hash(cfg);
  a.seed = cfg.drive.seed;
  return a;
}

}  // namespace twoion
