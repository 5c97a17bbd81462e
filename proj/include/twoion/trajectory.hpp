#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "twoion/dicke.hpp"
#include "twoion/rng.hpp"

namespace twoion {

// Laser drive and decay parameters of the two driven two-level ions.
// Saturation convention (resonant): s = 2 Omega^2 / Gamma^2.
struct DriveParams {
  double rabi_frequency = 0.0;   // Omega, rad/s
  double detuning = 0.0;         // laser - atom, rad/s
  double decay_rate = 1.0;       // Gamma, 1/s
  double laser_phase[2] = {0.0, 0.0};  // per-ion drive phase, rad

  double saturation() const;
  static DriveParams from_saturation(double s, double gamma);

  void validate() const;  // throws std::domain_error
};

// One recorded spontaneous-emission event of a trajectory.
struct EmissionRecord {
  double time;              // s since trajectory start
  double delta;             // direction phase in [0, 2pi)
  TwoAtomState post_jump_state;  // normalized
};

// Non-Hermitian evolution under
//   H_eff = H_drive - i Gamma/2 (sigma1^dag sigma1 + sigma2^dag sigma2),
// diagonalized once so steps of any size are exact.
class EffectivePropagator {
 public:
  explicit EffectivePropagator(const DriveParams& p);

  // psi(t+dt) = exp(-i H_eff dt) psi(t); no normalization.
  Eigen::Vector4cd step(const Eigen::Vector4cd& psi, double dt) const;

  // Squared norm after evolving psi for dt (psi need not be normalized).
  double survival(const Eigen::Vector4cd& psi, double dt) const;

  // Eigenbasis access used by the trajectory inner loop.
  Eigen::Vector4cd to_eigenbasis(const Eigen::Vector4cd& psi) const { return vinv_ * psi; }
  Eigen::Vector4cd from_eigenbasis(const Eigen::Vector4cd& w) const { return v_ * w; }
  Eigen::Vector4cd evolve_eigen(const Eigen::Vector4cd& w, double dt) const;

 private:
  Eigen::Matrix4cd v_, vinv_;
  Eigen::Vector4cd evals_;
};

// One no-jump step; returns the unnormalized propagated state and the
// survival probability (squared norm). Exact in dt.
std::pair<TwoAtomState, double> evolve_no_jump(const TwoAtomState& st,
                                               const DriveParams& p, double dt);

// Draw an emission direction phase from p(delta) ~ <D^dag(delta) D(delta)>.
// Throws std::domain_error if the state carries no excitation.
double sample_emission(const TwoAtomState& st, Rng& rng);

using EmissionSink = std::function<void(const EmissionRecord&)>;
using StateProbe = std::function<void(double /*time*/, const TwoAtomState& /*normalized*/)>;

// Quantum-jump unraveling: starting from |g,g>, alternate no-jump evolution
// (survival threshold drawn per segment, jump time located by bisection to
// 1e-3/Gamma) with direction-sampled detection jumps. Emits every photon.
// probe_times, if nonempty, must be sorted ascending; the normalized state at
// each probe time is reported through probe.
void run_trajectory(const DriveParams& p, double duration, Rng& rng,
                    const EmissionSink& sink,
                    std::span<const double> probe_times = {},
                    const StateProbe& probe = {});

// Convenience wrapper collecting the records.
std::vector<EmissionRecord> run_trajectory(const DriveParams& p,
                                           double duration, Rng& rng);

}  // namespace twoion
