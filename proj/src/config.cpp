#include "twoion/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "twoion/constants.hpp"
#include "twoion/errors.hpp"

namespace twoion {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": not a number: " + v);
  }
  if (pos != v.size())
    throw ConfigError("line " + std::to_string(line) + ": not a number: " + v);
  return out;
}

std::uint64_t parse_u64(const std::string& v, int line) {
  std::size_t pos = 0;
  std::uint64_t out;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": not an integer: " + v);
  }
  if (pos != v.size())
    throw ConfigError("line " + std::to_string(line) + ": not an integer: " + v);
  return out;
}

int parse_int(const std::string& v, int line) {
  return static_cast<int>(parse_u64(v, line));
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected true/false, got " + v);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  const char* section;
  const char* key;
  Setter set;
  Getter get;
};

#define FIELD_D(sec, key, member)                                         \
  Field{sec, key,                                                         \
        [](RunConfig& c, const std::string& v, int l) {                   \
          c.member = parse_double(v, l);                                  \
        },                                                                \
        [](const RunConfig& c) { return fmt_double(c.member); }}
#define FIELD_U(sec, key, member)                                         \
  Field{sec, key,                                                         \
        [](RunConfig& c, const std::string& v, int l) {                   \
          c.member = parse_u64(v, l);                                     \
        },                                                                \
        [](const RunConfig& c) { return std::to_string(c.member); }}
#define FIELD_I(sec, key, member)                                         \
  Field{sec, key,                                                         \
        [](RunConfig& c, const std::string& v, int l) {                   \
          c.member = parse_int(v, l);                                     \
        },                                                                \
        [](const RunConfig& c) { return std::to_string(c.member); }}
#define FIELD_B(sec, key, member)                                         \
  Field{sec, key,                                                         \
        [](RunConfig& c, const std::string& v, int l) {                   \
          c.member = parse_bool(v, l);                                    \
        },                                                                \
        [](const RunConfig& c) { return c.member ? "true" : "false"; }}
#define FIELD_S(sec, key, member)                                         \
  Field{sec, key,                                                         \
        [](RunConfig& c, const std::string& v, int) { c.member = v; },    \
        [](const RunConfig& c) { return c.member; }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      FIELD_D("geometry", "wavelength_nm", geometry.wavelength_nm),
      FIELD_D("geometry", "ion_mass_amu", geometry.ion_mass_amu),
      FIELD_D("geometry", "axial_freq_mhz", geometry.axial_freq_mhz),
      FIELD_D("geometry", "radial1_freq_mhz", geometry.radial1_freq_mhz),
      FIELD_D("geometry", "radial2_freq_mhz", geometry.radial2_freq_mhz),
      FIELD_D("geometry", "nbar_breathing", geometry.nbar_breathing),
      FIELD_D("geometry", "nbar_rocking1", geometry.nbar_rocking1),
      FIELD_D("geometry", "nbar_rocking2", geometry.nbar_rocking2),
      FIELD_D("geometry", "laser_detector_angle_deg",
              geometry.laser_detector_angle_deg),
      FIELD_D("drive", "saturation", drive.saturation),
      FIELD_D("drive", "detuning_hz", drive.detuning_hz),
      FIELD_D("drive", "lifetime_ns", drive.lifetime_ns),
      FIELD_D("drive", "duration_s", drive.duration_s),
      FIELD_U("drive", "trajectories", drive.trajectories),
      FIELD_U("drive", "seed", drive.seed),
      FIELD_D("detector", "dead_time_ns", detector.dead_time_ns),
      FIELD_D("detector", "jitter_fwhm_ps", detector.jitter_fwhm_ps),
      FIELD_D("detector", "collection_efficiency",
              detector.collection_efficiency),
      FIELD_D("detector", "dark_rate_hz", detector.dark_rate_hz),
      FIELD_D("detector", "fov_periods", detector.fov_periods),
      FIELD_D("detector", "splitter_ratio", detector.splitter_ratio),
      FIELD_I("correlator", "spatial_bins", correlator.spatial_bins),
      FIELD_I("correlator", "tau_bins", correlator.tau_bins),
      FIELD_D("correlator", "tau_bin_ns", correlator.tau_bin_ns),
      FIELD_S("correlator", "tau_mode", correlator.tau_mode),
      FIELD_D("fit", "saturation", fit.saturation),
      FIELD_D("fit", "dwf1", fit.dwf1),
      FIELD_D("fit", "dwf2", fit.dwf2),
      FIELD_D("fit", "offset", fit.offset),
      FIELD_B("fit", "fit_offset", fit.fit_offset),
  };
  return f;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& f : fields()) known = known || section == f.section;
      if (!known)
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside any section");
    bool matched = false;
    for (const auto& f : fields()) {
      if (section == f.section && key == f.key) {
        f.set(c, value, lineno);
        matched = true;
        break;
      }
    }
    if (!matched)
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "' in section [" + section + "]");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  std::string current;
  for (const auto& f : fields()) {
    if (current != f.section) {
      if (!current.empty()) out << '\n';
      current = f.section;
      out << '[' << current << "]\n";
    }
    out << f.key << " = " << f.get(c) << '\n';
  }
  return out.str();
}

std::string config_hash(const RunConfig& c) {
  std::string s = serialize_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

TrapGeometry RunConfig::trap_geometry() const {
  TrapGeometry g;
  g.lambda = geometry.wavelength_nm * 1e-9;
  g.k_hat = {0.0, 1.0, 0.0};  // laser in the observation plane, normal to d
  g.axial_frequency = kTwoPi * geometry.axial_freq_mhz * 1e6;
  g.radial_frequency_1 = kTwoPi * geometry.radial1_freq_mhz * 1e6;
  g.radial_frequency_2 = kTwoPi * geometry.radial2_freq_mhz * 1e6;
  g.ion_mass = geometry.ion_mass_amu * constants::atomic_mass_unit;
  g.d_vec = {1.0, 0.0, 0.0};
  double d = equilibrium_separation(g);
  g.d_vec = {d, 0.0, 0.0};  // crystal axis along x
  g.validate();
  return g;
}

ModeSet RunConfig::mode_set() const {
  return with_occupations(collective_modes(trap_geometry()),
                          geometry.nbar_breathing, geometry.nbar_rocking1,
                          geometry.nbar_rocking2);
}

DriveParams RunConfig::drive_params() const {
  double gamma = 1.0 / (drive.lifetime_ns * 1e-9);
  DriveParams p = DriveParams::from_saturation(drive.saturation, gamma);
  p.detuning = kTwoPi * drive.detuning_hz;
  return p;
}

DetectorConfig RunConfig::detector_config() const {
  DetectorConfig d;
  d.dead_time_ns = detector.dead_time_ns;
  d.timing_jitter_fwhm_ps = detector.jitter_fwhm_ps;
  d.collection_efficiency = detector.collection_efficiency;
  d.dark_count_rate_hz = detector.dark_rate_hz;
  d.fov_phase_span = detector.fov_periods * kTwoPi;
  d.splitter_ratio = detector.splitter_ratio;
  return d;
}

CorrelatorConfig RunConfig::correlator_config() const {
  CorrelatorConfig c;
  c.spatial_bins = correlator.spatial_bins;
  c.tau_bins = correlator.tau_bins;
  c.tau_bin_ns = correlator.tau_bin_ns;
  c.tau_mode =
      correlator.tau_mode == "symmetric" ? TauMode::Symmetric : TauMode::OneSided;
  return c;
}

ModelParams RunConfig::model_params() const {
  ModelParams m;
  m.s = fit.saturation;
  m.f1 = fit.dwf1;
  m.f2 = fit.dwf2;
  m.offset = fit.offset;
  return m;
}

void RunConfig::validate() const {
  try {
    if (correlator.tau_mode != "one_sided" && correlator.tau_mode != "symmetric")
      throw std::domain_error("tau_mode must be one_sided or symmetric");
    if (!(drive.saturation >= 0.0))
      throw std::domain_error("saturation must be >= 0");
    if (!(drive.lifetime_ns > 0.0))
      throw std::domain_error("lifetime must be > 0");
    if (!(drive.duration_s >= 0.0))
      throw std::domain_error("duration must be >= 0");
    if (drive.trajectories < 1)
      throw std::domain_error("trajectories must be >= 1");
    trap_geometry();
    detector_config().validate();
    correlator_config().validate();
    model_params().validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace twoion
