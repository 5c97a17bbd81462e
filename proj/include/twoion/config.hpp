#pragma once

#include <cstdint>
#include <string>

#include "twoion/correlator.hpp"
#include "twoion/detector.hpp"
#include "twoion/geometry.hpp"
#include "twoion/model.hpp"
#include "twoion/trajectory.hpp"

namespace twoion {

// Full run configuration. Defaults reproduce the reference experiment's
// parameter set (s = 0.65, f = 0.51, offset 0.2, 96 spatial bins, 2.5 ns
// tau bins, 600 ns dead time, 2.5 % collection).
struct RunConfig {
  struct Geometry {
    double wavelength_nm = 397.0;
    double ion_mass_amu = 39.9625909;
    double axial_freq_mhz = 0.76;
    double radial1_freq_mhz = 1.275;
    double radial2_freq_mhz = 1.568;
    double nbar_breathing = 15.0;
    double nbar_rocking1 = 9.0;
    double nbar_rocking2 = 7.0;
    // Angle between laser and detection direction. The experimental value is
    // unpublished; this default was inferred by calibrating the Debye-Waller
    // factor to 0.51.
    double laser_detector_angle_deg = 58.3480679935;
  } geometry;

  struct Drive {
    double saturation = 0.65;
    double detuning_hz = 0.0;
    double lifetime_ns = 6.9;  // excited state lifetime, Gamma = 1/lifetime
    double duration_s = 1e-3;  // total simulated emission time
    std::uint64_t trajectories = 16;
    std::uint64_t seed = 12345;
  } drive;

  struct Detector {
    double dead_time_ns = 600.0;
    double jitter_fwhm_ps = 50.0;
    double collection_efficiency = 0.025;
    double dark_rate_hz = 0.0;
    double fov_periods = 2.0;  // field of view covers fov_periods * 2pi of delta
    double splitter_ratio = 0.5;
  } detector;

  struct Correlator {
    int spatial_bins = 96;
    int tau_bins = 38;
    double tau_bin_ns = 2.5;
    std::string tau_mode = "one_sided";  // or "symmetric"
  } correlator;

  struct Fit {
    double saturation = 0.65;
    double dwf1 = 0.51;
    double dwf2 = 0.51;
    double offset = 0.2;
    bool fit_offset = false;
  } fit;

  // Derived module configurations (validated).
  TrapGeometry trap_geometry() const;
  ModeSet mode_set() const;
  DriveParams drive_params() const;
  DetectorConfig detector_config() const;
  CorrelatorConfig correlator_config() const;
  ModelParams model_params() const;

  void validate() const;  // throws ConfigError
};

// Parse the key = value section format. Unknown sections or keys are errors
// (ConfigError carries the line number).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

// FNV-1a hash of the canonical serialization, as hex.
std::string config_hash(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace twoion
