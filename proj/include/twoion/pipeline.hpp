#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twoion/archive.hpp"
#include "twoion/config.hpp"

namespace twoion {

struct SimSummary {
  std::uint64_t emissions = 0;
  std::uint64_t events_camera1 = 0;
  std::uint64_t events_camera2 = 0;
  double simulated_time_s = 0.0;

  double mean_rate_hz() const {
    return simulated_time_s > 0.0
               ? double(events_camera1 + events_camera2) / simulated_time_s
               : 0.0;
  }
};

// Run the configured number of trajectories (parallel over derived seeds,
// deterministic for any worker count) through the detector chain.
// Trajectories occupy disjoint time segments separated by a guard gap larger
// than both the dead time and the correlation window.
SimSummary simulate_events(const RunConfig& cfg, unsigned threads,
                           std::vector<PhotonEvent>& out);
SimSummary simulate_to_file(const RunConfig& cfg, unsigned threads,
                            const std::string& out_path);

// rebin -> pair accumulation; streaming single pass for threads <= 1,
// chunked in-memory otherwise (bit-identical result).
HistogramArchive correlate_file(const std::string& event_path,
                                const RunConfig& cfg, unsigned threads);
HistogramArchive correlate_events(const std::vector<PhotonEvent>& events,
                                  const RunConfig& cfg, unsigned threads);

}  // namespace twoion
