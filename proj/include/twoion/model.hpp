#pragma once

#include <vector>

#include "twoion/correlator.hpp"

namespace twoion {

// Parameters of the analytic coincidence model: saturation, Debye-Waller
// contrast factors of the two detection arms, and the phenomenological
// offset added after normalization.
struct ModelParams {
  double s = 0.65;
  double f1 = 0.51;
  double f2 = 0.51;
  double offset = 0.2;

  void validate() const;  // throws std::domain_error
};

// Ideal coincidence correlation of two driven two-level atoms:
//   g2 = (1+s)^2 cos^2((d1-d2)/2) / ((1+s+cos d1)(1+s+cos d2)).
// Throws std::domain_error when a denominator factor vanishes (only possible
// at s = 0, delta = pi).
double g2_ideal(double delta1, double delta2, double s);

// Motion- and background-corrected model:
//   g2 = (1+s)^2 cos^2((d1-d2)/2) f1 f2
//        / ((1+s+cos d1 f1)(1+s+cos d2 f2)) + offset.
double g2_extended(double delta1, double delta2, const ModelParams& p);

struct FitResult {
  double delta1;           // rad, in [0, 2pi)
  double uncertainty;      // rad, from the chi^2 + 1 interval
  double chi2_reduced;
};

// Weighted least-squares fit of the single floating phase delta1 against a
// tau = 0 profile. Dense grid scan over [0, 2pi) (step <= 0.01 rad) followed
// by parabolic refinement; global by construction for this periodic,
// multimodal objective. Requires >= 8 defined points with positive errors.
FitResult fit_delta1(const std::vector<ProfilePoint>& profile,
                     const ModelParams& fixed, bool fit_offset = false);

}  // namespace twoion
