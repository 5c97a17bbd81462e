#include "twoion/detector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "twoion/errors.hpp"

namespace twoion {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
// Gaussian jitter is clamped at +-10 sigma so a bounded reorder buffer can
// restore timestamp order.
constexpr double kJitterClampSigmas = 10.0;
}  // namespace

std::uint64_t DetectorConfig::dead_time_ps() const {
  return static_cast<std::uint64_t>(std::llround(dead_time_ns * 1e3));
}

void DetectorConfig::validate() const {
  if (!(collection_efficiency > 0.0 && collection_efficiency <= 1.0))
    throw std::domain_error("collection_efficiency must be in (0, 1]");
  if (!(dead_time_ns >= 0.0)) throw std::domain_error("dead_time must be >= 0");
  if (!(splitter_ratio > 0.0 && splitter_ratio < 1.0))
    throw std::domain_error("splitter_ratio must be in (0, 1)");
  if (!(fov_phase_span > 0.0)) throw std::domain_error("fov_phase_span must be > 0");
  if (!(timing_jitter_fwhm_ps >= 0.0))
    throw std::domain_error("timing_jitter_fwhm must be >= 0");
  if (!(dark_count_rate_hz >= 0.0))
    throw std::domain_error("dark_count_rate must be >= 0");
}

int delta_to_column(double delta, const DetectorConfig& cfg) {
  double u = (delta - cfg.fov_start()) / cfg.fov_phase_span;
  if (u < 0.0 || u >= 1.0) return -1;
  int col = static_cast<int>(u * kColumns);
  if (col >= kColumns) col = kColumns - 1;
  return col;
}

double column_to_delta(int column, const DetectorConfig& cfg) {
  if (column < 0 || column >= kColumns)
    throw std::domain_error("column out of range");
  return cfg.fov_start() + (column + 0.5) * cfg.fov_phase_span / kColumns;
}

std::vector<PhotonEvent> dead_time_filter(const std::vector<PhotonEvent>& sorted,
                                          const DetectorConfig& cfg) {
  const std::uint64_t dead = cfg.dead_time_ps();
  std::vector<PhotonEvent> out;
  out.reserve(sorted.size());
  std::uint64_t last[2] = {0, 0};
  bool any[2] = {false, false};
  std::uint64_t prev_t = 0;
  for (const auto& ev : sorted) {
    if (ev.timestamp_ps < prev_t)
      throw std::domain_error("dead_time_filter: input not sorted");
    prev_t = ev.timestamp_ps;
    int ci = ev.camera - 1;
    if (any[ci] && ev.timestamp_ps - last[ci] < dead) continue;
    out.push_back(ev);
    last[ci] = ev.timestamp_ps;
    any[ci] = true;
  }
  return out;
}

ClickSynthesizer::ClickSynthesizer(const DetectorConfig& cfg,
                                   std::uint64_t seed, double start_time_s,
                                   double end_time_s, EventSink sink)
    : cfg_(cfg), rng_(seed), sink_(std::move(sink)), start_s_(start_time_s),
      end_s_(end_time_s) {
  cfg_.validate();
  jitter_sigma_ps_ = cfg_.timing_jitter_fwhm_ps / 2.3548200450309493;
  fov_slots_ = static_cast<int>(std::ceil(cfg_.fov_phase_span / kTwoPi));
  double rate = cfg_.dark_count_rate_hz;
  for (int c = 0; c < 2; ++c)
    next_dark_[c] = (rate > 0.0) ? start_s_ + rng_.exponential(rate)
                                 : std::numeric_limits<double>::infinity();
}

void ClickSynthesizer::push_pending(std::uint64_t t, std::uint8_t cam,
                                    std::uint16_t x, std::uint16_t y) {
  heap_.push(Pending{t, cam, x, y, seq_++});
}

void ClickSynthesizer::generate_darks_until(double t) {
  for (int c = 0; c < 2; ++c) {
    while (next_dark_[c] < t && next_dark_[c] < end_s_) {
      auto tp = static_cast<std::uint64_t>(
          std::max<long long>(0, std::llround(next_dark_[c] * 1e12)));
      auto x = static_cast<std::uint16_t>(rng_.uniform_u32(kColumns));
      auto y = static_cast<std::uint16_t>(rng_.uniform_u32(kRows));
      push_pending(tp, std::uint8_t(c + 1), x, y);
      next_dark_[c] += rng_.exponential(cfg_.dark_count_rate_hz);
    }
  }
}

void ClickSynthesizer::emit(const Pending& p) {
  int ci = p.camera - 1;
  const std::uint64_t dead = cfg_.dead_time_ps();
  if (any_kept_[ci] && p.t - last_kept_[ci] < dead) return;
  last_kept_[ci] = p.t;
  any_kept_[ci] = true;
  ++emitted_[ci];
  sink_(PhotonEvent{p.camera, p.x, p.y, p.t});
}

void ClickSynthesizer::drain(std::uint64_t horizon_ps) {
  while (!heap_.empty() && heap_.top().t <= horizon_ps) {
    emit(heap_.top());
    heap_.pop();
  }
}

void ClickSynthesizer::push(const EmissionRecord& rec) {
  if (finished_) throw std::logic_error("push after finish");
  if (rec.time < last_input_)
    throw std::domain_error("synthesize_clicks: emissions not sorted");
  last_input_ = rec.time;

  generate_darks_until(rec.time);

  if (rng_.bernoulli(cfg_.collection_efficiency)) {
    // Field-of-view placement: the emission phase fixes the position modulo
    // one fringe period; pick the period uniformly across the window.
    double u0 = std::fmod(rec.delta - cfg_.fov_start(), kTwoPi);
    if (u0 < 0.0) u0 += kTwoPi;
    double xi = u0 + kTwoPi * rng_.uniform_u32(std::uint32_t(fov_slots_));
    if (xi < cfg_.fov_phase_span) {
      auto col = static_cast<std::uint16_t>(
          std::min<int>(kColumns - 1, int(xi / cfg_.fov_phase_span * kColumns)));
      auto row = static_cast<std::uint16_t>(rng_.uniform_u32(kRows));
      std::uint8_t cam = rng_.bernoulli(cfg_.splitter_ratio) ? 1 : 2;
      double jitter = 0.0;
      if (jitter_sigma_ps_ > 0.0) {
        jitter = jitter_sigma_ps_ * rng_.gaussian();
        double clamp = kJitterClampSigmas * jitter_sigma_ps_;
        if (jitter > clamp) jitter = clamp;
        if (jitter < -clamp) jitter = -clamp;
      }
      long long tp = std::llround(rec.time * 1e12 + jitter);
      push_pending(std::uint64_t(std::max<long long>(0, tp)), cam, col, row);
    }
  }

  // Everything earlier than (input time - max jitter displacement) is final.
  double margin_ps = kJitterClampSigmas * jitter_sigma_ps_ + 1000.0;
  double h = rec.time * 1e12 - margin_ps;
  if (h > 0.0) drain(static_cast<std::uint64_t>(h));
}

void ClickSynthesizer::finish() {
  if (finished_) return;
  generate_darks_until(end_s_);
  drain(~std::uint64_t(0));
  finished_ = true;
}

std::vector<PhotonEvent> synthesize_clicks(
    const std::vector<EmissionRecord>& emissions, const DetectorConfig& cfg,
    std::uint64_t seed, double start_time_s, double end_time_s) {
  std::vector<PhotonEvent> out;
  ClickSynthesizer syn(cfg, seed, start_time_s, end_time_s,
                       [&](const PhotonEvent& ev) { out.push_back(ev); });
  for (const auto& rec : emissions) syn.push(rec);
  syn.finish();
  return out;
}

}  // namespace twoion
