#include "twoion/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace twoion {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
const std::complex<double> kI(0.0, 1.0);

Eigen::Vector4cd to_vec(const TwoAtomState& st) {
  return Eigen::Vector4cd(st.c[0], st.c[1], st.c[2], st.c[3]);
}

TwoAtomState to_state(const Eigen::Vector4cd& v) {
  TwoAtomState st;
  for (int i = 0; i < 4; ++i) st.c[i] = v(i);
  return st;
}

Eigen::Matrix4cd effective_hamiltonian(const DriveParams& p) {
  constexpr int GG = TwoAtomState::GG, S = TwoAtomState::S,
                A = TwoAtomState::A, EE = TwoAtomState::EE;
  // Raising part (Omega/2)(e^{i phi1} sigma1^dag + e^{i phi2} sigma2^dag):
  //   |g,g> -> [(a1+a2)|s> + (a1-a2)|a>]/sqrt2
  //   |s>   -> (a1+a2)/sqrt2 |e,e>
  //   |a>   -> (a2-a1)/sqrt2 |e,e>
  std::complex<double> a1 =
      0.5 * p.rabi_frequency * std::exp(kI * p.laser_phase[0]);
  std::complex<double> a2 =
      0.5 * p.rabi_frequency * std::exp(kI * p.laser_phase[1]);
  std::complex<double> sum = (a1 + a2) * kInvSqrt2;
  std::complex<double> dif = (a1 - a2) * kInvSqrt2;

  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  h(S, GG) = sum;
  h(A, GG) = dif;
  h(EE, S) = sum;
  h(EE, A) = -dif;
  h(GG, S) = std::conj(h(S, GG));
  h(GG, A) = std::conj(h(A, GG));
  h(S, EE) = std::conj(h(EE, S));
  h(A, EE) = std::conj(h(EE, A));

  // Detuning and decay act through the excitation number N = (0,1,1,2).
  const double n[4] = {0.0, 1.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i)
    h(i, i) += std::complex<double>(-p.detuning * n[i], -0.5 * p.decay_rate * n[i]);
  return h;
}

}  // namespace

double DriveParams::saturation() const {
  return 2.0 * rabi_frequency * rabi_frequency /
         (decay_rate * decay_rate + 4.0 * detuning * detuning);
}

DriveParams DriveParams::from_saturation(double s, double gamma) {
  DriveParams p;
  p.decay_rate = gamma;
  p.rabi_frequency = gamma * std::sqrt(0.5 * s);
  return p;
}

void DriveParams::validate() const {
  if (!(decay_rate > 0.0)) throw std::domain_error("decay_rate must be > 0");
  if (!(rabi_frequency >= 0.0))
    throw std::domain_error("rabi_frequency must be >= 0");
}

EffectivePropagator::EffectivePropagator(const DriveParams& p) {
  p.validate();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(effective_hamiltonian(p));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("effective Hamiltonian diagonalization failed");
  v_ = es.eigenvectors();
  vinv_ = v_.inverse();
  evals_ = es.eigenvalues();
}

Eigen::Vector4cd EffectivePropagator::evolve_eigen(const Eigen::Vector4cd& w,
                                                   double dt) const {
  Eigen::Vector4cd out;
  for (int i = 0; i < 4; ++i) out(i) = std::exp(-kI * evals_(i) * dt) * w(i);
  return out;
}

Eigen::Vector4cd EffectivePropagator::step(const Eigen::Vector4cd& psi,
                                           double dt) const {
  return from_eigenbasis(evolve_eigen(to_eigenbasis(psi), dt));
}

double EffectivePropagator::survival(const Eigen::Vector4cd& psi,
                                     double dt) const {
  return step(psi, dt).squaredNorm();
}

std::pair<TwoAtomState, double> evolve_no_jump(const TwoAtomState& st,
                                               const DriveParams& p,
                                               double dt) {
  if (!(dt > 0.0)) throw std::domain_error("dt must be > 0");
  EffectivePropagator prop(p);
  Eigen::Vector4cd out = prop.step(to_vec(st), dt);
  return {to_state(out), out.squaredNorm()};
}

double sample_emission(const TwoAtomState& st, Rng& rng) {
  if (st.excitation_number() <= 1e-300)
    throw std::domain_error("sample_emission: state has no excited population");
  return direction_density(st).sample(rng.uniform());
}

void run_trajectory(const DriveParams& p, double duration, Rng& rng,
                    const EmissionSink& sink,
                    std::span<const double> probe_times,
                    const StateProbe& probe) {
  p.validate();
  if (!(duration > 0.0)) throw std::domain_error("duration must be > 0");

  const double gamma = p.decay_rate;
  const double coarse_dt =
      0.5 / std::max(gamma, std::max(p.rabi_frequency, std::abs(p.detuning)));
  if (!(coarse_dt > 0.0) || coarse_dt < 1e-300)
    throw std::runtime_error("step size underflow");
  const double jump_tol = 1e-3 / gamma;

  EffectivePropagator prop(p);

  Eigen::Vector4cd psi = to_vec(TwoAtomState::ground());
  double t = 0.0;
  double last_time = -1.0;
  std::size_t next_probe = 0;

  auto emit_probe = [&](double pt, const Eigen::Vector4cd& w_seg, double dt) {
    Eigen::Vector4cd st = prop.from_eigenbasis(prop.evolve_eigen(w_seg, dt));
    st.normalize();
    probe(pt, to_state(st));
  };

  while (t < duration) {
    // One no-jump segment: evolve until the squared norm crosses a freshly
    // drawn threshold. The norm is monotone non-increasing, so coarse
    // stepping cannot skip the crossing.
    const double threshold = rng.uniform_pos();
    Eigen::Vector4cd w = prop.to_eigenbasis(psi);  // segment-start eigenbasis
    double seg_elapsed = 0.0;
    bool crossed = false;

    while (t + seg_elapsed < duration) {
      double dt = coarse_dt;
      bool probe_step = false;
      if (next_probe < probe_times.size()) {
        double until = probe_times[next_probe] - (t + seg_elapsed);
        if (until <= dt) {
          dt = until;
          probe_step = true;
        }
      }
      if (t + seg_elapsed + dt > duration) {
        dt = duration - (t + seg_elapsed);
        probe_step = false;
      }
      if (dt <= 0.0) {
        if (probe_step) {
          emit_probe(probe_times[next_probe], w, seg_elapsed);
          ++next_probe;
          continue;
        }
        break;
      }
      double trial = seg_elapsed + dt;
      double nrm = prop.from_eigenbasis(prop.evolve_eigen(w, trial)).squaredNorm();
      if (nrm <= threshold) {
        // Bisect for the crossing time inside (seg_elapsed, trial].
        double lo = seg_elapsed, hi = trial;
        while (hi - lo > jump_tol) {
          double mid = 0.5 * (lo + hi);
          double n2 = prop.from_eigenbasis(prop.evolve_eigen(w, mid)).squaredNorm();
          if (n2 <= threshold)
            hi = mid;
          else
            lo = mid;
        }
        seg_elapsed = hi;
        crossed = true;
        break;
      }
      seg_elapsed = trial;
      if (probe_step) {
        emit_probe(probe_times[next_probe], w, seg_elapsed);
        ++next_probe;
      }
    }

    if (!crossed) {
      t += seg_elapsed;
      break;  // reached duration without a jump
    }

    // Jump: normalize the pre-jump state, sample a direction, project.
    t += seg_elapsed;
    Eigen::Vector4cd pre = prop.from_eigenbasis(prop.evolve_eigen(w, seg_elapsed));
    pre.normalize();
    TwoAtomState pre_state = to_state(pre);
    double delta = sample_emission(pre_state, rng);
    DetectionResult det = apply_detection(pre_state, delta);
    if (det.weight <= 0.0)
      throw std::runtime_error("detection jump with zero weight");
    TwoAtomState post = det.state.normalized();

    // Strictly increasing record times even if two jumps bisect to the same
    // floating point instant.
    if (t <= last_time) t = std::nextafter(last_time, duration + 1.0);
    last_time = t;
    sink(EmissionRecord{t, delta, post});
    psi = to_vec(post);
  }
}

std::vector<EmissionRecord> run_trajectory(const DriveParams& p,
                                           double duration, Rng& rng) {
  std::vector<EmissionRecord> out;
  run_trajectory(p, duration, rng, [&](const EmissionRecord& r) { out.push_back(r); });
  return out;
}

}  // namespace twoion
