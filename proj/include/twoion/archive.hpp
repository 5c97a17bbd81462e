#pragma once

#include <cstdint>
#include <string>

#include "twoion/correlator.hpp"

namespace twoion {

// Histogram archive: raw pair counts, singles histograms and provenance in a
// single JSON file. Normalization is recomputed on load.
struct HistogramArchive {
  CorrelationHistogram hist;
  double fov_start = 0.0;
  double fov_span = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;

  HistogramArchive() : hist(CorrelatorConfig{}) {}
  explicit HistogramArchive(CorrelationHistogram h) : hist(std::move(h)) {}
};

void save_archive(const HistogramArchive& a, const std::string& path);
HistogramArchive load_archive(const std::string& path);

}  // namespace twoion
