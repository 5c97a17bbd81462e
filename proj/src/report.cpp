#include "twoion/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "twoion/errors.hpp"

namespace twoion {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Fig. 2 panel directions.
const double kReportDelta1[] = {0.34 * kPi, 0.73 * kPi, 1.05 * kPi, 1.38 * kPi};
const double kAutocorrDelta[] = {0.34 * kPi, 1.05 * kPi};

std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + p.string());
  return out;
}

std::string tag_for(double delta_over_pi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fpi", delta_over_pi);
  return buf;
}

}  // namespace

FitResult fit_archive_slice(const HistogramArchive& archive,
                            const RunConfig& cfg, double delta1) {
  NormalizedG2 n = normalize(archive.hist, archive.fov_start, archive.fov_span);
  return fit_delta1(slice_tau0(n, delta1), cfg.model_params(),
                    cfg.fit.fit_offset);
}

std::string fit_report_json(const HistogramArchive& archive,
                            const RunConfig& cfg, double delta1_guess,
                            const FitResult& fit) {
  json j;
  j["delta1_rad"] = fit.delta1;
  j["delta1_over_pi"] = fit.delta1 / kPi;
  j["uncertainty_rad"] = fit.uncertainty;
  j["chi2_reduced"] = fit.chi2_reduced;
  j["slice_delta1_rad"] = delta1_guess;
  j["fixed_params"] = {{"saturation", cfg.fit.saturation},
                       {"dwf1", cfg.fit.dwf1},
                       {"dwf2", cfg.fit.dwf2},
                       {"offset", cfg.fit.offset},
                       {"fit_offset", cfg.fit.fit_offset}};
  j["provenance"] = {{"config_hash", config_hash(cfg)},
                     {"archive_config_hash", archive.config_hash},
                     {"seed", archive.seed},
                     {"total_pairs", archive.hist.total_pairs}};
  return j.dump(2) + "\n";
}

int write_report(const HistogramArchive& archive, const RunConfig& cfg,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  json manifest;
  manifest["config_hash"] = config_hash(cfg);
  manifest["archive_config_hash"] = archive.config_hash;
  manifest["seed"] = archive.seed;
  manifest["datasets"] = json::array();

  if (archive.hist.total_pairs == 0) {
    std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::trunc);
    out << manifest.dump(2) << '\n';
    return 0;
  }

  NormalizedG2 n = normalize(archive.hist, archive.fov_start, archive.fov_span);
  ModelParams model = cfg.model_params();
  int count = 0;

  for (double d1 : kReportDelta1) {
    std::string tag = tag_for(d1 / kPi);
    auto slice = slice_tau0(n, d1);

    // model overlay uses the fitted phase when the fit succeeds, the slice
    // direction otherwise (e.g. too few defined points)
    double model_d1 = d1;
    json fitinfo;
    try {
      FitResult fr = fit_delta1(slice, model, cfg.fit.fit_offset);
      model_d1 = fr.delta1;
      fitinfo = {{"delta1_rad", fr.delta1},
                 {"uncertainty_rad", fr.uncertainty},
                 {"chi2_reduced", fr.chi2_reduced}};
    } catch (const std::domain_error&) {
      fitinfo = nullptr;
    }

    std::string fname = "slice_tau0_" + tag + ".csv";
    auto out = open_csv(fs::path(out_dir) / fname);
    out << "delta2_over_pi,value,std_error,model\n";
    for (const auto& p : slice) {
      out << p.x / kPi << ',';
      if (p.defined)
        out << p.value << ',' << p.std_error;
      else
        out << ',';
      out << ',' << g2_extended(model_d1, p.x, model) << '\n';
    }
    manifest["datasets"].push_back({{"kind", "slice_tau0"},
                                    {"file", fname},
                                    {"delta1_rad", d1},
                                    {"fit", fitinfo}});
    ++count;

    // full (delta2, tau) map for this delta1
    int b1 = n.nearest_bin(d1);
    std::string mname = "map_" + tag + ".csv";
    auto mout = open_csv(fs::path(out_dir) / mname);
    mout << "delta2_over_pi,tau_ns,value,std_error\n";
    const double bin_ns = n.cfg.tau_bin_ns;
    const double t_off = (n.cfg.tau_mode == TauMode::OneSided)
                             ? 0.0
                             : -0.5 * n.cfg.tau_bins * bin_ns;
    for (int b2 = 0; b2 < n.cfg.spatial_bins; ++b2) {
      for (int t = 0; t < n.cfg.tau_bins; ++t) {
        mout << n.delta_axis[std::size_t(b2)] / kPi << ','
             << t_off + (t + 0.5) * bin_ns << ',';
        if (n.defined(b1, b2, t))
          mout << n.at(b1, b2, t) << ',' << n.err(b1, b2, t);
        else
          mout << ',';
        mout << '\n';
      }
    }
    manifest["datasets"].push_back(
        {{"kind", "map"}, {"file", mname}, {"delta1_rad", d1}});
    ++count;
  }

  for (double d : kAutocorrDelta) {
    std::string tag = tag_for(d / kPi);
    std::string fname = "autocorr_" + tag + ".csv";
    auto out = open_csv(fs::path(out_dir) / fname);
    out << "tau_ns,value,std_error\n";
    for (const auto& p : autocorrelation_curve(n, d)) {
      out << p.x << ',';
      if (p.defined)
        out << p.value << ',' << p.std_error;
      else
        out << ',';
      out << '\n';
    }
    manifest["datasets"].push_back(
        {{"kind", "autocorrelation"}, {"file", fname}, {"delta_rad", d}});
    ++count;
  }

  std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write manifest");
  out << manifest.dump(2) << '\n';
  return count;
}

}  // namespace twoion
