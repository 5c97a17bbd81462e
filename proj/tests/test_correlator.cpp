#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twoion/correlator.hpp"
#include "twoion/errors.hpp"
#include "twoion/rng.hpp"

using namespace twoion;

namespace {

// Independent all-pairs oracle: for every (camera-1, camera-2) event pair,
// bin tau = t2 - t1 if it falls inside the configured window.
CorrelationHistogram brute_force(const std::vector<PhotonEvent>& events,
                                 const CorrelatorConfig& cfg) {
  CorrelationHistogram hist(cfg);
  const long long bin = (long long)cfg.tau_bin_ps();
  const long long window = (long long)cfg.window_ps();
  const long long half = window / 2;
  std::vector<BinnedEvent> b;
  b.reserve(events.size());
  for (const auto& ev : events) {
    auto be = rebin_column(ev, cfg);
    if (be.camera == 1)
      hist.intensity1[be.bin]++;
    else
      hist.intensity2[be.bin]++;
    hist.total_events++;
    b.push_back(be);
  }
  for (const auto& e1 : b) {
    if (e1.camera != 1) continue;
    for (const auto& e2 : b) {
      if (e2.camera != 2) continue;
      long long tau = (long long)e2.timestamp_ps - (long long)e1.timestamp_ps;
      int idx;
      if (cfg.tau_mode == TauMode::OneSided) {
        if (tau < 0 || tau >= window) continue;
        idx = int(tau / bin);
      } else {
        if (tau < -half || tau >= half) continue;
        idx = int((tau + half) / bin);
      }
      hist.at(e1.bin, e2.bin, idx)++;
      hist.total_pairs++;
    }
  }
  return hist;
}

std::vector<PhotonEvent> random_stream(Rng& rng, int n, std::uint64_t span_ps) {
  std::vector<PhotonEvent> ev(std::size_t(n), PhotonEvent{});
  for (auto& e : ev) {
    e.camera = rng.bernoulli(0.5) ? 1 : 2;
    e.x = std::uint16_t(rng.uniform_u32(1000));
    e.y = std::uint16_t(rng.uniform_u32(1000));
    e.timestamp_ps = std::uint64_t(rng.uniform() * double(span_ps));
  }
  std::sort(ev.begin(), ev.end(), [](const PhotonEvent& a, const PhotonEvent& b) {
    return a.timestamp_ps < b.timestamp_ps;
  });
  return ev;
}

bool same_hist(const CorrelationHistogram& a, const CorrelationHistogram& b) {
  return a.g2_counts == b.g2_counts && a.intensity1 == b.intensity1 &&
         a.intensity2 == b.intensity2 && a.total_pairs == b.total_pairs &&
         a.total_events == b.total_events;
}

}  // namespace

TEST_CASE("configuration arithmetic and validation") {
  CorrelatorConfig cfg;
  CHECK(cfg.tau_bin_ps() == 2500);
  CHECK(cfg.window_ps() == 95000);
  cfg.validate();

  CorrelatorConfig bad = cfg;
  bad.tau_mode = TauMode::Symmetric;
  bad.tau_bins = 37;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = cfg;
  bad.spatial_bins = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("column rebinning: boundaries and conservation") {
  CorrelatorConfig cfg;  // 96 bins over 1000 columns
  auto mk = [](std::uint16_t x) { return PhotonEvent{1, x, 0, 0}; };
  CHECK(rebin_column(mk(0), cfg).bin == 0);
  CHECK(rebin_column(mk(10), cfg).bin == 0);   // 10*96/1000 = 0.96
  CHECK(rebin_column(mk(11), cfg).bin == 1);   // 11*96/1000 = 1.056
  CHECK(rebin_column(mk(500), cfg).bin == 48);
  CHECK(rebin_column(mk(999), cfg).bin == 95);
  CHECK_THROWS_AS(rebin_column(mk(1000), cfg), DataError);

  // every column lands in exactly one bin; bins are contiguous and ordered
  int prev = 0;
  std::vector<int> per_bin(96, 0);
  for (int x = 0; x < 1000; ++x) {
    int b = rebin_column(mk(std::uint16_t(x)), cfg).bin;
    CHECK(b >= prev);
    CHECK(b <= prev + 1);
    prev = b;
    per_bin[std::size_t(b)]++;
  }
  int total = 0;
  for (int c : per_bin) {
    CHECK(c >= 10);  // 1000/96 is 10.4: bins hold 10 or 11 columns
    CHECK(c <= 11);
    total += c;
  }
  CHECK(total == 1000);
}

TEST_CASE("streaming accumulation equals the all-pairs oracle") {
  Rng rng(2024);
  for (int inst = 0; inst < 25; ++inst) {
    CorrelatorConfig cfg;
    cfg.spatial_bins = 1 + int(rng.uniform_u32(12)) * 8;
    cfg.tau_bins = 2 * (1 + int(rng.uniform_u32(19)));
    cfg.tau_bin_ns = 0.5 + rng.uniform() * 4.0;
    cfg.tau_mode = (inst % 2 == 0) ? TauMode::OneSided : TauMode::Symmetric;
    int n = 200 + int(rng.uniform_u32(1800));
    // span a handful of windows so many pairs fall inside
    auto events = random_stream(rng, n, cfg.window_ps() * 5);

    auto expected = brute_force(events, cfg);
    auto got = accumulate_pairs(events, cfg);
    REQUIRE(same_hist(got, expected));
  }
}

TEST_CASE("simultaneous clicks pair exactly once") {
  CorrelatorConfig cfg;
  for (auto mode : {TauMode::OneSided, TauMode::Symmetric}) {
    cfg.tau_mode = mode;
    // both orders of equal timestamps in the sorted stream
    std::vector<PhotonEvent> ev = {
        {1, 0, 0, 1000}, {2, 0, 0, 1000},  // cam1 first
        {2, 0, 0, 500000}, {1, 0, 0, 500000},  // cam2 first
    };
    auto got = accumulate_pairs(ev, cfg);
    CHECK(same_hist(got, brute_force(ev, cfg)));
    // tau = 0 lands in the zero-delay bin
    int t0 = (mode == TauMode::OneSided) ? 0 : cfg.tau_bins / 2;
    CHECK(got.at(0, 0, t0) == 2);
    CHECK(got.total_pairs == 2);
  }
}

TEST_CASE("window edges are half-open exactly as binned") {
  CorrelatorConfig cfg;
  cfg.spatial_bins = 4;
  cfg.tau_bins = 4;
  cfg.tau_bin_ns = 1.0;  // window 4000 ps
  std::vector<PhotonEvent> ev = {
      {1, 0, 0, 0},
      {2, 0, 0, 3999},  // inside, last bin
      {2, 0, 0, 4000},  // exactly one window: outside
  };
  auto got = accumulate_pairs(ev, cfg);
  CHECK(got.total_pairs == 1);
  CHECK(got.at(0, 0, 3) == 1);
  CHECK(same_hist(got, brute_force(ev, cfg)));
}

TEST_CASE("chunked parallel accumulation is bit-identical") {
  Rng rng(55);
  CorrelatorConfig cfg;
  for (auto mode : {TauMode::OneSided, TauMode::Symmetric}) {
    cfg.tau_mode = mode;
    auto events = random_stream(rng, 5000, cfg.window_ps() * 20);
    auto seq = accumulate_pairs(events, cfg);
    for (unsigned threads : {1u, 2u, 3u, 7u}) {
      auto par = accumulate_pairs_parallel(events, cfg, threads);
      CHECK(same_hist(par, seq));
    }
  }
}

TEST_CASE("histograms of separated segments merge") {
  Rng rng(31);
  CorrelatorConfig cfg;
  auto a = random_stream(rng, 1500, cfg.window_ps() * 4);
  auto b = random_stream(rng, 1500, cfg.window_ps() * 4);
  // move segment b past a's window reach
  std::uint64_t shift = cfg.window_ps() * 6;
  for (auto& ev : b) ev.timestamp_ps += shift;
  std::vector<PhotonEvent> both = a;
  both.insert(both.end(), b.begin(), b.end());

  auto ha = accumulate_pairs(a, cfg);
  auto hb = accumulate_pairs(b, cfg);
  auto hboth = accumulate_pairs(both, cfg);
  ha += hb;
  CHECK(same_hist(ha, hboth));

  CorrelationHistogram other(CorrelatorConfig{48, 38, 2.5, TauMode::OneSided});
  CHECK_THROWS_AS(ha += other, std::domain_error);
}

TEST_CASE("unsorted streams are rejected") {
  CorrelatorConfig cfg;
  std::vector<PhotonEvent> ev = {{1, 0, 0, 100}, {2, 0, 0, 50}};
  CHECK_THROWS_AS(accumulate_pairs(ev, cfg), std::domain_error);
  CHECK_THROWS_AS(accumulate_pairs_parallel(ev, cfg, 2), std::domain_error);
}

TEST_CASE("normalization: synthetic factorizable counts give exactly 1") {
  CorrelatorConfig cfg;
  cfg.spatial_bins = 6;
  cfg.tau_bins = 8;
  CorrelationHistogram h(cfg);
  std::vector<std::uint64_t> i1 = {10, 20, 30, 40, 50, 60};
  std::vector<std::uint64_t> i2 = {5, 15, 25, 35, 45, 0};  // last bin empty
  for (int b = 0; b < 6; ++b) {
    h.intensity1[std::size_t(b)] = i1[std::size_t(b)];
    h.intensity2[std::size_t(b)] = i2[std::size_t(b)];
  }
  for (int b1 = 0; b1 < 6; ++b1)
    for (int b2 = 0; b2 < 6; ++b2)
      for (int t = 0; t < 8; ++t) {
        h.at(b1, b2, t) = 3 * i1[std::size_t(b1)] * i2[std::size_t(b2)];
        h.total_pairs += h.at(b1, b2, t);
      }

  auto n = normalize(h, -3.0, 6.0);
  for (int b1 = 0; b1 < 6; ++b1)
    for (int b2 = 0; b2 < 6; ++b2)
      for (int t = 0; t < 8; ++t) {
        if (b2 == 5) {
          CHECK(!n.defined(b1, b2, t));  // zero singles: undefined, not zero
        } else {
          CHECK(n.at(b1, b2, t) == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(n.err(b1, b2, t) > 0.0);
        }
      }

  // axis covers the requested span with bin centers
  CHECK(n.delta_axis.front() == doctest::Approx(-3.0 + 0.5));
  CHECK(n.delta_axis.back() == doctest::Approx(3.0 - 0.5));
  CHECK(n.nearest_bin(-2.4) == 0);
  CHECK(n.nearest_bin(2.6) == 5);

  CorrelationHistogram empty(cfg);
  CHECK_THROWS_AS(normalize(empty, -3.0, 6.0), DataError);
}

TEST_CASE("uncorrelated Poisson streams normalize to a flat g2") {
  CorrelatorConfig cfg;
  cfg.spatial_bins = 8;
  cfg.tau_bins = 8;
  cfg.tau_bin_ns = 12.0;
  Rng rng(808);
  std::vector<PhotonEvent> ev;
  double t = 0.0;
  while (ev.size() < 240000) {
    t += rng.exponential(1.0 / 20000.0);  // 20 ns mean gap, in ps
    ev.push_back(PhotonEvent{std::uint8_t(rng.bernoulli(0.5) ? 1 : 2),
                             std::uint16_t(rng.uniform_u32(1000)),
                             0, std::uint64_t(t)});
  }
  auto h = accumulate_pairs(ev, cfg);
  auto n = normalize(h, 0.0, 1.0);

  double sum = 0.0, worst = 0.0;
  int cells = 0;
  for (int b1 = 0; b1 < 8; ++b1)
    for (int b2 = 0; b2 < 8; ++b2)
      for (int tt = 0; tt < 8; ++tt) {
        REQUIRE(n.defined(b1, b2, tt));
        sum += n.at(b1, b2, tt);
        worst = std::max(worst,
                         std::abs(n.at(b1, b2, tt) - 1.0) / n.err(b1, b2, tt));
        ++cells;
      }
  CHECK(sum / cells == doctest::Approx(1.0).epsilon(0.01));
  CHECK(worst < 5.0);  // all cells statistically consistent with flat
}

TEST_CASE("slices and autocorrelation curves address the right cells") {
  CorrelatorConfig cfg;
  cfg.spatial_bins = 4;
  cfg.tau_bins = 4;
  CorrelationHistogram h(cfg);
  for (int b = 0; b < 4; ++b) {
    h.intensity1[std::size_t(b)] = 100;
    h.intensity2[std::size_t(b)] = 100;
  }
  for (int b1 = 0; b1 < 4; ++b1)
    for (int b2 = 0; b2 < 4; ++b2)
      for (int t = 0; t < 4; ++t) {
        h.at(b1, b2, t) = std::uint64_t(1000 + 100 * b1 + 10 * b2 + t);
        h.total_pairs += h.at(b1, b2, t);
      }
  auto n = normalize(h, -2.0, 4.0);

  auto slice = slice_tau0(n, n.delta_axis[2]);
  REQUIRE(slice.size() == 4);
  for (int b2 = 0; b2 < 4; ++b2) {
    CHECK(slice[std::size_t(b2)].x == doctest::Approx(n.delta_axis[std::size_t(b2)]));
    CHECK(slice[std::size_t(b2)].value == doctest::Approx(n.at(2, b2, 0)));
    CHECK(slice[std::size_t(b2)].defined);
  }

  auto curve = autocorrelation_curve(n, n.delta_axis[1]);
  REQUIRE(curve.size() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(curve[std::size_t(t)].x == doctest::Approx((t + 0.5) * 2.5));
    CHECK(curve[std::size_t(t)].value == doctest::Approx(n.at(1, 1, t)));
  }

  CHECK_THROWS_AS(slice_tau0(n, 100.0), std::domain_error);
  CHECK_THROWS_AS(autocorrelation_curve(n, -50.0), std::domain_error);
}
