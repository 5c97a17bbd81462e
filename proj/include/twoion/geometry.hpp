#pragma once

#include <array>

namespace twoion {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
Vec3 normalized(const Vec3& v);

// Trap and illumination geometry of the linear two-ion crystal.
// k_hat is the laser direction (unit); the wave number 2 pi / lambda is
// implied. d_vec points from ion 1 to ion 2.
struct TrapGeometry {
  double lambda;            // m
  Vec3 k_hat;               // unit
  Vec3 d_vec;               // m
  double axial_frequency;   // rad/s
  double radial_frequency_1;  // rad/s
  double radial_frequency_2;  // rad/s
  double ion_mass;          // kg

  double wave_number() const;  // 2 pi / lambda
  void validate() const;       // throws std::domain_error
};

// The three contrast-reducing normal modes of the two-ion crystal.
struct Mode {
  double frequency;  // rad/s
  Vec3 axis;         // unit
  double nbar;       // mean phonon number
};

struct ModeSet {
  Mode breathing;
  Mode rocking1;  // radial axis in the observation plane
  Mode rocking2;  // radial axis along the quantization (z) axis

  void validate() const;  // axes orthonormal within 1e-9
};

// delta(r) = (k_L - k_L r_hat) . d, reduced to [0, 2pi).
double optical_phase(const TrapGeometry& geom, const Vec3& r_hat);

// Breathing frequency sqrt(3) w_ax along the crystal axis; rocking
// frequencies sqrt(w_rad^2 - w_ax^2) along the radial principal axes
// (rocking2 along z). Occupations are zero; set via with_occupations.
ModeSet collective_modes(const TrapGeometry& geom);
ModeSet with_occupations(ModeSet modes, double n_breathing, double n_rocking1,
                         double n_rocking2);

// Coulomb equilibrium distance d = (e^2 / (2 pi eps0 m w_ax^2))^{1/3}.
double equilibrium_separation(const TrapGeometry& geom);

// Debye-Waller factor
//   f = exp[-sum_k hbar q_k^2 / (m w_k) (nbar_k + 1/2)]
// with q_k the projection of q(r) = k_L (k_hat - r_hat) onto mode axis k.
double debye_waller(const TrapGeometry& geom, const ModeSet& modes,
                    const Vec3& r_hat);

// Detector direction at an angle theta from the laser, rotated in the plane
// spanned by k_hat and the crystal axis.
Vec3 detection_direction(const TrapGeometry& geom, double angle);

// Root-find the laser-to-detector angle reproducing a target DWF.
// Throws std::domain_error if the target is not reachable in (0, pi).
double calibrate_detection_angle(const TrapGeometry& geom, const ModeSet& modes,
                                 double target_dwf);

}  // namespace twoion
