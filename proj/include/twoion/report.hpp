#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twoion/archive.hpp"
#include "twoion/config.hpp"
#include "twoion/model.hpp"

namespace twoion {

// Fit of delta1 at one tau = 0 slice, serialized as JSON.
std::string fit_report_json(const HistogramArchive& archive,
                            const RunConfig& cfg, double delta1_guess,
                            const FitResult& fit);

FitResult fit_archive_slice(const HistogramArchive& archive,
                            const RunConfig& cfg, double delta1);

// Plot-ready data: tau = 0 slices with model overlays for the four standard
// delta1 directions, autocorrelation curves, full (delta2, tau) maps, and a
// JSON manifest. Returns the number of datasets written.
int write_report(const HistogramArchive& archive, const RunConfig& cfg,
                 const std::string& out_dir);

}  // namespace twoion
