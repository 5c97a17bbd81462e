#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twoion/events.hpp"

namespace twoion {

enum class TauMode {
  OneSided,   // tau = t(cam 2) - t(cam 1) in [0, n_tau * bin)
  Symmetric,  // tau in [-n_tau * bin / 2, +n_tau * bin / 2)
};

struct CorrelatorConfig {
  int spatial_bins = 96;
  int tau_bins = 38;
  double tau_bin_ns = 2.5;
  TauMode tau_mode = TauMode::OneSided;

  std::uint64_t tau_bin_ps() const;
  std::uint64_t window_ps() const;  // full pair window span
  void validate() const;
};

// Spatially rebinned click: the 1000 columns folded to `spatial_bins` bins.
struct BinnedEvent {
  std::uint8_t camera;
  std::uint16_t bin;
  std::uint64_t timestamp_ps;
};

// bin = floor(x * spatial_bins / 1000); y discarded. Throws DataError on
// out-of-range x.
BinnedEvent rebin_column(const PhotonEvent& ev, const CorrelatorConfig& cfg);

// G2 pair counts [bin1, bin2, tau_bin] plus per-camera intensity histograms.
struct CorrelationHistogram {
  CorrelatorConfig cfg;
  std::vector<std::uint64_t> g2_counts;   // size bins*bins*tau_bins
  std::vector<std::uint64_t> intensity1;  // size bins
  std::vector<std::uint64_t> intensity2;
  std::uint64_t total_pairs = 0;
  std::uint64_t total_events = 0;

  explicit CorrelationHistogram(const CorrelatorConfig& c);

  std::uint64_t& at(int b1, int b2, int t);
  std::uint64_t at(int b1, int b2, int t) const;

  // Bin-wise addition; cfgs must match.
  CorrelationHistogram& operator+=(const CorrelationHistogram& other);

  // Center of spatial bin b on the delta axis (fov span passed by caller).
  static double bin_center(int b, int bins, double fov_start, double fov_span);
};

// Streaming single-pass pair accumulator over a timestamp-sorted click
// stream: every (camera-1, camera-2) pair inside the tau window increments
// one cell; intensities count all events. O(n * pairs-in-window).
class PairAccumulator {
 public:
  explicit PairAccumulator(const CorrelatorConfig& cfg);

  void push(const BinnedEvent& ev);
  void push(const PhotonEvent& ev);
  const CorrelationHistogram& histogram() const { return hist_; }
  CorrelationHistogram take() { return std::move(hist_); }

 private:
  struct Stored {
    std::uint64_t t;
    std::uint16_t bin;
  };
  void evict(std::vector<Stored>& dq, std::size_t& head, std::uint64_t cutoff);

  CorrelatorConfig cfg_;
  CorrelationHistogram hist_;
  std::uint64_t last_t_ = 0;
  bool any_ = false;
  // flat ring-ish deques per camera (head index advances on eviction)
  std::vector<Stored> win1_, win2_;
  std::size_t head1_ = 0, head2_ = 0;
};

CorrelationHistogram accumulate_pairs(const std::vector<PhotonEvent>& sorted,
                                      const CorrelatorConfig& cfg);

// Chunked accumulation with explicit cross-chunk pairs; result is identical
// to the sequential single pass.
CorrelationHistogram accumulate_pairs_parallel(
    const std::vector<PhotonEvent>& sorted, const CorrelatorConfig& cfg,
    unsigned threads);

// Normalized g2 = G2 / (G1 G1), rescaled so the mean over the largest-tau
// quartile of defined bins equals 1.
struct NormalizedG2 {
  CorrelatorConfig cfg;
  double fov_start = 0.0, fov_span = 0.0;
  std::vector<double> values;      // bins*bins*tau_bins; NaN where undefined
  std::vector<double> std_errors;  // Poisson-propagated
  std::vector<double> delta_axis;  // spatial bin centers, rad

  double at(int b1, int b2, int t) const;
  double err(int b1, int b2, int t) const;
  bool defined(int b1, int b2, int t) const;
  int nearest_bin(double delta) const;
};

NormalizedG2 normalize(const CorrelationHistogram& h, double fov_start,
                       double fov_span);

struct ProfilePoint {
  double x;  // delta2 (rad) or tau (ns)
  double value;
  double std_error;
  bool defined;
};

// tau = 0 cut: the first tau bin as a function of delta2, at the spatial bin
// nearest delta1.
std::vector<ProfilePoint> slice_tau0(const NormalizedG2& n, double delta1);

// g2(delta, delta, tau) versus tau bin centers (ns).
std::vector<ProfilePoint> autocorrelation_curve(const NormalizedG2& n,
                                                double delta);

}  // namespace twoion
