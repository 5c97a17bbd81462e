#include "twoion/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twoion {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void ModelParams::validate() const {
  if (!(s > 0.0)) throw std::domain_error("saturation must be > 0");
  if (!(f1 > 0.0 && f1 <= 1.0 && f2 > 0.0 && f2 <= 1.0))
    throw std::domain_error("Debye-Waller factors must lie in (0, 1]");
  if (!(offset >= 0.0)) throw std::domain_error("offset must be >= 0");
  if (!(1.0 + s - f1 > 0.0 && 1.0 + s - f2 > 0.0))
    throw std::domain_error("1 + s - f must be > 0 (finite denominator)");
}

double g2_ideal(double delta1, double delta2, double s) {
  double den1 = 1.0 + s + std::cos(delta1);
  double den2 = 1.0 + s + std::cos(delta2);
  if (!(den1 > 0.0))
    throw std::domain_error("g2_ideal: singular denominator at delta1 = " +
                            std::to_string(delta1));
  if (!(den2 > 0.0))
    throw std::domain_error("g2_ideal: singular denominator at delta2 = " +
                            std::to_string(delta2));
  double c = std::cos(0.5 * (delta1 - delta2));
  return (1.0 + s) * (1.0 + s) * c * c / (den1 * den2);
}

double g2_extended(double delta1, double delta2, const ModelParams& p) {
  p.validate();
  double den1 = 1.0 + p.s + std::cos(delta1) * p.f1;
  double den2 = 1.0 + p.s + std::cos(delta2) * p.f2;
  double c = std::cos(0.5 * (delta1 - delta2));
  return (1.0 + p.s) * (1.0 + p.s) * c * c * p.f1 * p.f2 / (den1 * den2) +
         p.offset;
}

FitResult fit_delta1(const std::vector<ProfilePoint>& profile,
                     const ModelParams& fixed, bool fit_offset) {
  fixed.validate();

  std::vector<ProfilePoint> pts;
  for (const auto& p : profile)
    if (p.defined) pts.push_back(p);
  if (pts.size() < 8)
    throw std::domain_error("fit_delta1: need at least 8 defined points");
  double vmin = pts[0].value, vmax = pts[0].value;
  for (const auto& p : pts) {
    if (!(p.std_error > 0.0))
      throw std::domain_error("fit_delta1: nonpositive point error");
    vmin = std::min(vmin, p.value);
    vmax = std::max(vmax, p.value);
  }
  if (vmax - vmin <= 1e-12 * std::max(1.0, std::abs(vmax)))
    throw std::domain_error("fit_delta1: flat profile, phase is unconstrained");

  auto chi2 = [&](double d1) {
    if (!fit_offset) {
      double acc = 0.0;
      for (const auto& p : pts) {
        double r = (p.value - g2_extended(d1, p.x, fixed)) / p.std_error;
        acc += r * r;
      }
      return acc;
    }
    // co-fit the additive offset: weighted mean of the residuals is optimal
    double sw = 0.0, swr = 0.0;
    for (const auto& p : pts) {
      double w = 1.0 / (p.std_error * p.std_error);
      double m0 = g2_extended(d1, p.x, fixed) - fixed.offset;
      sw += w;
      swr += w * (p.value - m0);
    }
    double off = swr / sw;
    double acc = 0.0;
    for (const auto& p : pts) {
      double m0 = g2_extended(d1, p.x, fixed) - fixed.offset;
      double r = (p.value - (m0 + off)) / p.std_error;
      acc += r * r;
    }
    return acc;
  };

  const int n = 1280;  // step ~0.005 rad
  const double step = kTwoPi / n;
  int best = 0;
  double best_chi = chi2(0.0);
  std::vector<double> grid(static_cast<std::size_t>(n), 0.0);
  grid[0] = best_chi;
  for (int i = 1; i < n; ++i) {
    grid[std::size_t(i)] = chi2(i * step);
    if (grid[std::size_t(i)] < best_chi) {
      best_chi = grid[std::size_t(i)];
      best = i;
    }
  }

  // parabolic refinement through the minimum and its grid neighbors
  double cm = grid[std::size_t((best + n - 1) % n)];
  double cp = grid[std::size_t((best + 1) % n)];
  double curv = cm - 2.0 * best_chi + cp;
  double d1 = best * step;
  double refined_chi = best_chi;
  if (curv > 0.0) {
    double shift = 0.5 * (cm - cp) / curv;
    d1 += shift * step;
    refined_chi = best_chi - 0.125 * (cm - cp) * (cm - cp) / curv;
  }
  d1 = std::fmod(d1, kTwoPi);
  if (d1 < 0.0) d1 += kTwoPi;

  FitResult r;
  r.delta1 = d1;
  // chi^2 + 1 interval from the local parabola chi(d) = chi_min + (d-d1)^2/sigma^2
  r.uncertainty =
      (curv > 0.0) ? step * std::sqrt(2.0 / curv) : kTwoPi;  // flat: unbounded
  std::size_t dof = pts.size() - (fit_offset ? 2 : 1);
  r.chi2_reduced = refined_chi / double(dof);
  return r;
}

}  // namespace twoion
