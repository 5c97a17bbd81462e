#include "twoion/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "twoion/errors.hpp"

namespace twoion {

std::uint64_t CorrelatorConfig::tau_bin_ps() const {
  return static_cast<std::uint64_t>(std::llround(tau_bin_ns * 1e3));
}

std::uint64_t CorrelatorConfig::window_ps() const {
  return tau_bin_ps() * std::uint64_t(tau_bins);
}

void CorrelatorConfig::validate() const {
  if (spatial_bins <= 0 || spatial_bins > 1000)
    throw std::domain_error("spatial_bins must be in 1..1000");
  if (tau_bins <= 0) throw std::domain_error("tau_bins must be > 0");
  if (!(tau_bin_ns > 0.0)) throw std::domain_error("tau_bin_ns must be > 0");
  if (tau_mode == TauMode::Symmetric && tau_bins % 2 != 0)
    throw std::domain_error("symmetric tau mode needs an even tau_bins");
}

BinnedEvent rebin_column(const PhotonEvent& ev, const CorrelatorConfig& cfg) {
  if (ev.x >= kColumns)
    throw DataError("corrupt event: column " + std::to_string(ev.x) +
                    " out of range");
  return BinnedEvent{ev.camera,
                     std::uint16_t(std::uint32_t(ev.x) * cfg.spatial_bins / kColumns),
                     ev.timestamp_ps};
}

CorrelationHistogram::CorrelationHistogram(const CorrelatorConfig& c)
    : cfg(c),
      g2_counts(std::size_t(c.spatial_bins) * c.spatial_bins * c.tau_bins, 0),
      intensity1(c.spatial_bins, 0),
      intensity2(c.spatial_bins, 0) {
  cfg.validate();
}

std::uint64_t& CorrelationHistogram::at(int b1, int b2, int t) {
  return g2_counts[(std::size_t(b1) * cfg.spatial_bins + b2) * cfg.tau_bins + t];
}

std::uint64_t CorrelationHistogram::at(int b1, int b2, int t) const {
  return g2_counts[(std::size_t(b1) * cfg.spatial_bins + b2) * cfg.tau_bins + t];
}

CorrelationHistogram& CorrelationHistogram::operator+=(
    const CorrelationHistogram& other) {
  if (cfg.spatial_bins != other.cfg.spatial_bins ||
      cfg.tau_bins != other.cfg.tau_bins ||
      cfg.tau_mode != other.cfg.tau_mode)
    throw std::domain_error("histogram merge: incompatible configurations");
  for (std::size_t i = 0; i < g2_counts.size(); ++i)
    g2_counts[i] += other.g2_counts[i];
  for (int b = 0; b < cfg.spatial_bins; ++b) {
    intensity1[b] += other.intensity1[b];
    intensity2[b] += other.intensity2[b];
  }
  total_pairs += other.total_pairs;
  total_events += other.total_events;
  return *this;
}

double CorrelationHistogram::bin_center(int b, int bins, double fov_start,
                                        double fov_span) {
  return fov_start + (b + 0.5) * fov_span / bins;
}

PairAccumulator::PairAccumulator(const CorrelatorConfig& cfg)
    : cfg_(cfg), hist_(cfg) {}

void PairAccumulator::evict(std::vector<Stored>& dq, std::size_t& head,
                            std::uint64_t cutoff) {
  while (head < dq.size() && dq[head].t < cutoff) ++head;
  if (head > 4096 && head * 2 > dq.size()) {
    dq.erase(dq.begin(), dq.begin() + std::ptrdiff_t(head));
    head = 0;
  }
}

void PairAccumulator::push(const PhotonEvent& ev) { push(rebin_column(ev, cfg_)); }

void PairAccumulator::push(const BinnedEvent& ev) {
  if (any_ && ev.timestamp_ps < last_t_)
    throw std::domain_error("accumulate_pairs: stream not sorted");
  last_t_ = ev.timestamp_ps;
  any_ = true;

  const std::uint64_t t = ev.timestamp_ps;
  const std::uint64_t bin_ps = cfg_.tau_bin_ps();
  const std::uint64_t window = cfg_.window_ps();
  const std::uint64_t half = window / 2;

  if (ev.camera == 1) {
    hist_.intensity1[ev.bin]++;
    if (cfg_.tau_mode == TauMode::OneSided) {
      // tie pairs (tau = 0) where the camera-2 click sorted first
      for (std::size_t i = win2_.size(); i-- > head2_;) {
        if (win2_[i].t != t) break;
        hist_.at(ev.bin, win2_[i].bin, 0)++;
        hist_.total_pairs++;
      }
      evict(win2_, head2_, t);  // keep only ties
    } else {
      // tau = t2 - t1 in [-half, 0]: stored camera-2 clicks with t - t2 <= half.
      // Ties (tau = 0) land here exactly when the camera-2 click sorted first,
      // so each simultaneous pair is counted once, on the later stream event.
      evict(win2_, head2_, (t > half) ? t - half : 0);
      for (std::size_t i = head2_; i < win2_.size(); ++i) {
        std::uint64_t dt = t - win2_[i].t;  // = -tau
        std::uint64_t tbin = (dt == 0) ? std::uint64_t(cfg_.tau_bins / 2)
                                       : (half - dt) / bin_ps;
        hist_.at(ev.bin, win2_[i].bin, int(tbin))++;
        hist_.total_pairs++;
      }
    }
    win1_.push_back(Stored{t, ev.bin});
  } else if (ev.camera == 2) {
    hist_.intensity2[ev.bin]++;
    std::uint64_t span = (cfg_.tau_mode == TauMode::OneSided) ? window : half;
    std::uint64_t cutoff = (t >= span) ? t - span + 1 : 0;
    evict(win1_, head1_, cutoff);
    const int tau_offset = (cfg_.tau_mode == TauMode::OneSided) ? 0 : cfg_.tau_bins / 2;
    for (std::size_t i = head1_; i < win1_.size(); ++i) {
      std::uint64_t dt = t - win1_[i].t;  // tau >= 0
      if (cfg_.tau_mode == TauMode::Symmetric && dt >= half) continue;
      hist_.at(win1_[i].bin, ev.bin, int(dt / bin_ps) + tau_offset)++;
      hist_.total_pairs++;
    }
    win2_.push_back(Stored{t, ev.bin});
  } else {
    throw DataError("corrupt event: camera id " + std::to_string(ev.camera));
  }
  hist_.total_events++;
}

CorrelationHistogram accumulate_pairs(const std::vector<PhotonEvent>& sorted,
                                      const CorrelatorConfig& cfg) {
  PairAccumulator acc(cfg);
  for (const auto& ev : sorted) acc.push(ev);
  return acc.take();
}

namespace {

// Accumulate pairs whose *later* event lies in [begin, end), with lookback
// into earlier events for partners.
CorrelationHistogram accumulate_chunk(const std::vector<PhotonEvent>& sorted,
                                      std::size_t begin, std::size_t end,
                                      const CorrelatorConfig& cfg) {
  CorrelationHistogram hist(cfg);
  const std::uint64_t bin_ps = cfg.tau_bin_ps();
  const std::uint64_t window = cfg.window_ps();
  const std::uint64_t half = window / 2;
  const bool one_sided = cfg.tau_mode == TauMode::OneSided;

  for (std::size_t i = begin; i < end; ++i) {
    BinnedEvent ev = rebin_column(sorted[i], cfg);
    if (ev.camera == 1)
      hist.intensity1[ev.bin]++;
    else
      hist.intensity2[ev.bin]++;
    hist.total_events++;

    // scan backwards over potential partners (includes earlier chunks)
    const std::uint64_t reach = one_sided ? window : half + 1;
    for (std::size_t j = i; j-- > 0;) {
      std::uint64_t dt = ev.timestamp_ps - sorted[j].timestamp_ps;
      if (dt >= reach) break;
      BinnedEvent p = rebin_column(sorted[j], cfg);
      if (p.camera == ev.camera) continue;
      if (ev.camera == 2) {
        // tau = dt >= 0
        if (one_sided) {
          hist.at(p.bin, ev.bin, int(dt / bin_ps))++;
          hist.total_pairs++;
        } else if (dt < half) {
          hist.at(p.bin, ev.bin, int(dt / bin_ps) + cfg.tau_bins / 2)++;
          hist.total_pairs++;
        }
      } else {
        // partner is camera 2, earlier in the stream: tau = -dt (ties once,
        // on the later event, mirroring the sequential accumulator)
        if (one_sided) {
          if (dt == 0) {
            hist.at(ev.bin, p.bin, 0)++;
            hist.total_pairs++;
          }
        } else if (dt <= half) {
          int tbin = (dt == 0) ? cfg.tau_bins / 2 : int((half - dt) / bin_ps);
          hist.at(ev.bin, p.bin, tbin)++;
          hist.total_pairs++;
        }
      }
    }
  }
  return hist;
}

}  // namespace

CorrelationHistogram accumulate_pairs_parallel(
    const std::vector<PhotonEvent>& sorted, const CorrelatorConfig& cfg,
    unsigned threads) {
  cfg.validate();
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].timestamp_ps < sorted[i - 1].timestamp_ps)
      throw std::domain_error("accumulate_pairs: stream not sorted");
  if (threads < 1) threads = 1;
  const std::size_t n = sorted.size();
  const std::size_t chunk = (n + threads - 1) / threads;

  std::vector<CorrelationHistogram> parts;
  parts.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) parts.emplace_back(cfg);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  for (unsigned k = 0; k < threads; ++k) {
    std::size_t b = std::min(n, k * chunk), e = std::min(n, (k + 1) * chunk);
    pool.emplace_back([&, k, b, e] {
      try {
        parts[k] = accumulate_chunk(sorted, b, e, cfg);
      } catch (...) {
        errs[k] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  CorrelationHistogram out(cfg);
  for (auto& p : parts) out += p;
  return out;
}

double NormalizedG2::at(int b1, int b2, int t) const {
  return values[(std::size_t(b1) * cfg.spatial_bins + b2) * cfg.tau_bins + t];
}

double NormalizedG2::err(int b1, int b2, int t) const {
  return std_errors[(std::size_t(b1) * cfg.spatial_bins + b2) * cfg.tau_bins + t];
}

bool NormalizedG2::defined(int b1, int b2, int t) const {
  return !std::isnan(at(b1, b2, t));
}

int NormalizedG2::nearest_bin(double delta) const {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int b = 0; b < cfg.spatial_bins; ++b) {
    double d = std::abs(delta_axis[std::size_t(b)] - delta);
    if (d < bd) {
      bd = d;
      best = b;
    }
  }
  return best;
}

NormalizedG2 normalize(const CorrelationHistogram& h, double fov_start,
                       double fov_span) {
  if (h.total_pairs == 0)
    throw DataError("normalize: histogram contains no pairs");
  const int nb = h.cfg.spatial_bins, nt = h.cfg.tau_bins;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  NormalizedG2 out;
  out.cfg = h.cfg;
  out.fov_start = fov_start;
  out.fov_span = fov_span;
  out.values.assign(h.g2_counts.size(), nan);
  out.std_errors.assign(h.g2_counts.size(), nan);
  out.delta_axis.resize(std::size_t(nb));
  for (int b = 0; b < nb; ++b)
    out.delta_axis[std::size_t(b)] =
        CorrelationHistogram::bin_center(b, nb, fov_start, fov_span);

  // stage 1: divide by the product of singles histograms
  for (int b1 = 0; b1 < nb; ++b1) {
    for (int b2 = 0; b2 < nb; ++b2) {
      double denom = double(h.intensity1[std::size_t(b1)]) *
                     double(h.intensity2[std::size_t(b2)]);
      if (denom <= 0.0) continue;  // undefined, stays NaN
      for (int t = 0; t < nt; ++t) {
        std::size_t idx = (std::size_t(b1) * nb + b2) * nt + t;
        double c = double(h.g2_counts[idx]);
        out.values[idx] = c / denom;
        // Poisson error; zero-count bins get a one-count scale so fits have
        // a finite weight.
        out.std_errors[idx] = std::sqrt(std::max(c, 1.0)) / denom;
      }
    }
  }

  // stage 2: overall scale from the large-tau plateau (largest quartile of
  // tau bins), where g2 -> 1
  int q_start = nt - nt / 4;
  double sum = 0.0;
  std::size_t cnt = 0;
  for (int b1 = 0; b1 < nb; ++b1)
    for (int b2 = 0; b2 < nb; ++b2)
      for (int t = q_start; t < nt; ++t) {
        std::size_t idx = (std::size_t(b1) * nb + b2) * nt + t;
        if (!std::isnan(out.values[idx])) {
          sum += out.values[idx];
          ++cnt;
        }
      }
  if (cnt == 0 || sum <= 0.0)
    throw DataError("normalize: empty large-tau plateau, cannot set the scale");
  double scale = double(cnt) / sum;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] *= scale;
    out.std_errors[i] *= scale;
  }
  return out;
}

std::vector<ProfilePoint> slice_tau0(const NormalizedG2& n, double delta1) {
  if (delta1 < n.fov_start || delta1 > n.fov_start + n.fov_span)
    throw std::domain_error("slice_tau0: delta1 outside the measured window");
  int b1 = n.nearest_bin(delta1);
  std::vector<ProfilePoint> out;
  out.reserve(std::size_t(n.cfg.spatial_bins));
  // "tau = 0" is the bin containing zero delay
  int t0 = (n.cfg.tau_mode == TauMode::OneSided) ? 0 : n.cfg.tau_bins / 2;
  for (int b2 = 0; b2 < n.cfg.spatial_bins; ++b2) {
    bool def = n.defined(b1, b2, t0);
    out.push_back(ProfilePoint{n.delta_axis[std::size_t(b2)],
                               def ? n.at(b1, b2, t0) : 0.0,
                               def ? n.err(b1, b2, t0) : 0.0, def});
  }
  return out;
}

std::vector<ProfilePoint> autocorrelation_curve(const NormalizedG2& n,
                                                double delta) {
  if (delta < n.fov_start || delta > n.fov_start + n.fov_span)
    throw std::domain_error("autocorrelation_curve: delta outside the window");
  int b = n.nearest_bin(delta);
  std::vector<ProfilePoint> out;
  out.reserve(std::size_t(n.cfg.tau_bins));
  const double bin_ns = n.cfg.tau_bin_ns;
  const double t_off =
      (n.cfg.tau_mode == TauMode::OneSided) ? 0.0 : -0.5 * n.cfg.tau_bins * bin_ns;
  for (int t = 0; t < n.cfg.tau_bins; ++t) {
    bool def = n.defined(b, b, t);
    out.push_back(ProfilePoint{t_off + (t + 0.5) * bin_ns,
                               def ? n.at(b, b, t) : 0.0,
                               def ? n.err(b, b, t) : 0.0, def});
  }
  return out;
}

}  // namespace twoion
