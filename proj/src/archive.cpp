#include "twoion/archive.hpp"

#include <fstream>

#include <json.hpp>

#include "twoion/errors.hpp"

namespace twoion {

using nlohmann::json;

void save_archive(const HistogramArchive& a, const std::string& path) {
  json j;
  j["format"] = "twoion-histogram";
  j["version"] = 1;
  j["config_hash"] = a.config_hash;
  j["seed"] = a.seed;
  j["fov_start"] = a.fov_start;
  j["fov_span"] = a.fov_span;
  j["spatial_bins"] = a.hist.cfg.spatial_bins;
  j["tau_bins"] = a.hist.cfg.tau_bins;
  j["tau_bin_ns"] = a.hist.cfg.tau_bin_ns;
  j["tau_mode"] =
      a.hist.cfg.tau_mode == TauMode::OneSided ? "one_sided" : "symmetric";
  j["total_pairs"] = a.hist.total_pairs;
  j["total_events"] = a.hist.total_events;
  j["g2_counts"] = a.hist.g2_counts;
  j["intensity1"] = a.hist.intensity1;
  j["intensity2"] = a.hist.intensity2;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw DataError("write failure: " + path);
}

HistogramArchive load_archive(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed archive: " + e.what());
  }
  try {
    if (j.at("format") != "twoion-histogram")
      throw DataError(path + ": not a histogram archive");
    if (j.at("version") != 1)
      throw DataError(path + ": unsupported archive version");
    CorrelatorConfig cfg;
    cfg.spatial_bins = j.at("spatial_bins");
    cfg.tau_bins = j.at("tau_bins");
    cfg.tau_bin_ns = j.at("tau_bin_ns");
    cfg.tau_mode = (j.at("tau_mode") == "symmetric") ? TauMode::Symmetric
                                                     : TauMode::OneSided;
    HistogramArchive a{CorrelationHistogram(cfg)};
    a.config_hash = j.at("config_hash");
    a.seed = j.at("seed");
    a.fov_start = j.at("fov_start");
    a.fov_span = j.at("fov_span");
    a.hist.total_pairs = j.at("total_pairs");
    a.hist.total_events = j.at("total_events");
    a.hist.g2_counts = j.at("g2_counts").get<std::vector<std::uint64_t>>();
    a.hist.intensity1 = j.at("intensity1").get<std::vector<std::uint64_t>>();
    a.hist.intensity2 = j.at("intensity2").get<std::vector<std::uint64_t>>();
    std::size_t expect =
        std::size_t(cfg.spatial_bins) * cfg.spatial_bins * cfg.tau_bins;
    if (a.hist.g2_counts.size() != expect ||
        a.hist.intensity1.size() != std::size_t(cfg.spatial_bins) ||
        a.hist.intensity2.size() != std::size_t(cfg.spatial_bins))
      throw DataError(path + ": archive arrays have inconsistent sizes");
    return a;
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed archive: " + e.what());
  }
}

}  // namespace twoion
