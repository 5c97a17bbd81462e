#include "twoion/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "twoion/constants.hpp"

namespace twoion {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  if (n <= 0.0) throw std::domain_error("cannot normalize zero vector");
  return {v[0] / n, v[1] / n, v[2] / n};
}

static Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double TrapGeometry::wave_number() const { return kTwoPi / lambda; }

void TrapGeometry::validate() const {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be > 0");
  if (std::abs(norm(k_hat) - 1.0) > 1e-12)
    throw std::domain_error("k_hat must be a unit vector");
  if (!(axial_frequency > 0.0 && radial_frequency_1 > 0.0 &&
        radial_frequency_2 > 0.0))
    throw std::domain_error("trap frequencies must be > 0");
  if (!(ion_mass > 0.0)) throw std::domain_error("ion_mass must be > 0");
  if (!(norm(d_vec) > 0.0)) throw std::domain_error("d_vec must be nonzero");
}

void ModeSet::validate() const {
  const Mode* m[3] = {&breathing, &rocking1, &rocking2};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(norm(m[i]->axis) - 1.0) > 1e-9)
      throw std::domain_error("mode axis not unit");
    if (!(m[i]->nbar >= 0.0)) throw std::domain_error("nbar must be >= 0");
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(dot(m[i]->axis, m[j]->axis)) > 1e-9)
        throw std::domain_error("mode axes not orthogonal");
  }
}

double optical_phase(const TrapGeometry& geom, const Vec3& r_hat) {
  if (std::abs(norm(r_hat) - 1.0) > 1e-9)
    throw std::domain_error("r_hat must be a unit vector");
  double k = geom.wave_number();
  double delta = k * (dot(geom.k_hat, geom.d_vec) - dot(r_hat, geom.d_vec));
  delta = std::fmod(delta, kTwoPi);
  if (delta < 0.0) delta += kTwoPi;
  return delta;
}

ModeSet collective_modes(const TrapGeometry& geom) {
  geom.validate();
  if (!(geom.radial_frequency_1 > geom.axial_frequency &&
        geom.radial_frequency_2 > geom.axial_frequency))
    throw std::domain_error(
        "radial frequencies must exceed the axial frequency (linear crystal)");

  Vec3 axis = normalized(geom.d_vec);
  Vec3 z = {0.0, 0.0, 1.0};
  Vec3 r1 = cross(z, axis);
  if (norm(r1) < 1e-9) {
    // crystal along z; fall back to x/y radial axes
    r1 = {1.0, 0.0, 0.0};
    z = cross(axis, r1);
  } else {
    r1 = normalized(r1);
    z = normalized(cross(axis, r1));
  }

  double wax2 = geom.axial_frequency * geom.axial_frequency;
  ModeSet m;
  m.breathing = {std::sqrt(3.0) * geom.axial_frequency, axis, 0.0};
  m.rocking1 = {std::sqrt(geom.radial_frequency_1 * geom.radial_frequency_1 - wax2),
                r1, 0.0};
  m.rocking2 = {std::sqrt(geom.radial_frequency_2 * geom.radial_frequency_2 - wax2),
                z, 0.0};
  return m;
}

ModeSet with_occupations(ModeSet modes, double n_breathing, double n_rocking1,
                         double n_rocking2) {
  modes.breathing.nbar = n_breathing;
  modes.rocking1.nbar = n_rocking1;
  modes.rocking2.nbar = n_rocking2;
  return modes;
}

double equilibrium_separation(const TrapGeometry& geom) {
  using namespace constants;
  double w2 = geom.axial_frequency * geom.axial_frequency;
  double d3 = elementary_charge * elementary_charge /
              (kTwoPi * epsilon0 * geom.ion_mass * w2);
  return std::cbrt(d3);
}

double debye_waller(const TrapGeometry& geom, const ModeSet& modes,
                    const Vec3& r_hat) {
  if (std::abs(norm(r_hat) - 1.0) > 1e-9)
    throw std::domain_error("r_hat must be a unit vector");
  double k = geom.wave_number();
  Vec3 q = {k * (geom.k_hat[0] - r_hat[0]), k * (geom.k_hat[1] - r_hat[1]),
            k * (geom.k_hat[2] - r_hat[2])};
  const Mode* m[3] = {&modes.breathing, &modes.rocking1, &modes.rocking2};
  double expo = 0.0;
  for (const Mode* mode : m) {
    double qk = dot(q, mode->axis);
    expo += constants::hbar * qk * qk / (geom.ion_mass * mode->frequency) *
            (mode->nbar + 0.5);
  }
  return std::exp(-expo);
}

Vec3 detection_direction(const TrapGeometry& geom, double angle) {
  // Rotate k_hat by `angle` toward the crystal axis, inside the plane they
  // span.
  Vec3 axis = normalized(geom.d_vec);
  Vec3 perp = {axis[0] - dot(axis, geom.k_hat) * geom.k_hat[0],
               axis[1] - dot(axis, geom.k_hat) * geom.k_hat[1],
               axis[2] - dot(axis, geom.k_hat) * geom.k_hat[2]};
  double pn = norm(perp);
  if (pn < 1e-12)
    throw std::domain_error("laser parallel to crystal axis; rotation plane undefined");
  perp = {perp[0] / pn, perp[1] / pn, perp[2] / pn};
  double c = std::cos(angle), s = std::sin(angle);
  return {c * geom.k_hat[0] + s * perp[0], c * geom.k_hat[1] + s * perp[1],
          c * geom.k_hat[2] + s * perp[2]};
}

double calibrate_detection_angle(const TrapGeometry& geom, const ModeSet& modes,
                                 double target_dwf) {
  if (!(target_dwf > 0.0 && target_dwf < 1.0))
    throw std::domain_error("target DWF must lie in (0, 1)");
  // f(theta) = 1 at theta = 0 (zero recoil) and falls off as the scattering
  // angle opens. Locate the first downward crossing on a coarse grid, then
  // bisect.
  auto f = [&](double th) {
    return debye_waller(geom, modes, detection_direction(geom, th));
  };
  constexpr double kPi = 3.14159265358979323846;
  const int n = 2000;
  double lo = 0.0, hi = -1.0;
  for (int i = 1; i <= n; ++i) {
    double th = kPi * i / n;
    if (f(th) <= target_dwf) {
      hi = th;
      break;
    }
    lo = th;
  }
  if (hi < 0.0)
    throw std::domain_error("target DWF not reachable at any detection angle");
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > target_dwf)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace twoion
