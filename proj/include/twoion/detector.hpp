#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "twoion/events.hpp"
#include "twoion/rng.hpp"
#include "twoion/trajectory.hpp"

namespace twoion {

struct DetectorConfig {
  double dead_time_ns = 600.0;
  double timing_jitter_fwhm_ps = 50.0;
  double collection_efficiency = 0.025;
  double dark_count_rate_hz = 0.0;  // per camera
  double fov_phase_span = 4.0 * 3.14159265358979323846;  // rad of delta across the columns
  double splitter_ratio = 0.5;  // probability of camera 1

  // The field of view is centered on delta = 0: columns cover
  // [-span/2, +span/2).
  double fov_start() const { return -0.5 * fov_phase_span; }

  std::uint64_t dead_time_ps() const;
  void validate() const;  // throws std::domain_error
};

// Affine map from the continuous field-of-view coordinate (a delta value in
// [fov_start, fov_start + span)) onto the 1000 columns. Returns -1 for
// coordinates outside the field of view (event dropped, not an error).
int delta_to_column(double delta, const DetectorConfig& cfg);
// Exact inverse at bin centers.
double column_to_delta(int column, const DetectorConfig& cfg);

// Per-camera dead-time filter on a timestamp-sorted stream: keeps an event
// iff its camera recorded nothing in the preceding dead_time. Idempotent.
std::vector<PhotonEvent> dead_time_filter(const std::vector<PhotonEvent>& sorted,
                                          const DetectorConfig& cfg);

using EventSink = std::function<void(const PhotonEvent&)>;

// Streaming transform EmissionRecord -> PhotonEvent implementing the
// measurement chain: collection acceptance, field-of-view placement, 50/50
// splitter routing, timing jitter, dark counts, per-camera dead time.
// Emissions must arrive sorted by time; output is sorted by timestamp.
class ClickSynthesizer {
 public:
  ClickSynthesizer(const DetectorConfig& cfg, std::uint64_t seed,
                   double start_time_s, double end_time_s, EventSink sink);

  void push(const EmissionRecord& rec);
  void finish();

  std::uint64_t emitted(int camera) const { return emitted_[camera - 1]; }

 private:
  struct Pending {
    std::uint64_t t;
    std::uint8_t camera;
    std::uint16_t x, y;
    std::uint64_t seq;
    bool operator>(const Pending& o) const {
      return t != o.t ? t > o.t : seq > o.seq;
    }
  };

  void push_pending(std::uint64_t t, std::uint8_t cam, std::uint16_t x,
                    std::uint16_t y);
  void generate_darks_until(double t);
  void drain(std::uint64_t horizon_ps);
  void emit(const Pending& p);

  DetectorConfig cfg_;
  Rng rng_;
  EventSink sink_;
  double start_s_, end_s_;
  double last_input_ = -1.0;
  double next_dark_[2];
  double jitter_sigma_ps_;
  int fov_slots_;
  std::uint64_t seq_ = 0;
  std::uint64_t last_kept_[2] = {0, 0};
  bool any_kept_[2] = {false, false};
  std::uint64_t emitted_[2] = {0, 0};
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> heap_;
  bool finished_ = false;
};

// Convenience wrapper over a whole emission list.
std::vector<PhotonEvent> synthesize_clicks(
    const std::vector<EmissionRecord>& emissions, const DetectorConfig& cfg,
    std::uint64_t seed, double start_time_s, double end_time_s);

}  // namespace twoion
