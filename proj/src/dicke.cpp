#include "twoion/dicke.hpp"

#include <cmath>
#include <stdexcept>

namespace twoion {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}  // namespace

double TwoAtomState::norm2() const {
  double n = 0.0;
  for (const auto& z : c) n += std::norm(z);
  return n;
}

TwoAtomState TwoAtomState::normalized() const {
  double n = std::sqrt(norm2());
  if (n <= 0.0) throw std::domain_error("cannot normalize zero state");
  TwoAtomState out;
  for (int i = 0; i < 4; ++i) out.c[i] = c[i] / n;
  return out;
}

double TwoAtomState::excitation_number() const {
  return std::norm(c[S]) + std::norm(c[A]) + 2.0 * std::norm(c[EE]);
}

TwoAtomState dicke_from_product(complexd c_gg, complexd c_eg, complexd c_ge,
                                complexd c_ee) {
  TwoAtomState st;
  st.c[TwoAtomState::GG] = c_gg;
  st.c[TwoAtomState::S] = (c_eg + c_ge) * kInvSqrt2;
  st.c[TwoAtomState::A] = (c_eg - c_ge) * kInvSqrt2;
  st.c[TwoAtomState::EE] = c_ee;
  return st.normalized();
}

std::array<complexd, 4> product_from_dicke(const TwoAtomState& st) {
  return {st.c[TwoAtomState::GG],
          (st.c[TwoAtomState::S] + st.c[TwoAtomState::A]) * kInvSqrt2,
          (st.c[TwoAtomState::S] - st.c[TwoAtomState::A]) * kInvSqrt2,
          st.c[TwoAtomState::EE]};
}

DetectionResult apply_detection(const TwoAtomState& st, double delta) {
  // In the Dicke basis, with e = e^{i delta}:
  //   D|s>   = (1+e)/sqrt2 |g,g>
  //   D|a>   = (1-e)/sqrt2 |g,g>
  //   D|e,e> = (1+e)/sqrt2 |s> + (e-1)/sqrt2 |a>
  //   D|g,g> = 0
  complexd e(std::cos(delta), std::sin(delta));
  complexd one_plus = (1.0 + e) * kInvSqrt2;
  complexd one_minus = (1.0 - e) * kInvSqrt2;

  DetectionResult r;
  r.state.c[TwoAtomState::GG] =
      st.c[TwoAtomState::S] * one_plus + st.c[TwoAtomState::A] * one_minus;
  r.state.c[TwoAtomState::S] = st.c[TwoAtomState::EE] * one_plus;
  r.state.c[TwoAtomState::A] = -st.c[TwoAtomState::EE] * one_minus;
  r.state.c[TwoAtomState::EE] = 0.0;
  r.weight = r.state.norm2();
  return r;
}

DirectionDensity direction_density(const TwoAtomState& st) {
  const complexd cs = st.c[TwoAtomState::S];
  const complexd ca = st.c[TwoAtomState::A];
  const double pee = std::norm(st.c[TwoAtomState::EE]);
  DirectionDensity d;
  d.a = std::norm(cs) + std::norm(ca) + 2.0 * pee;
  d.b = std::norm(cs) - std::norm(ca);
  d.c = -2.0 * std::imag(std::conj(ca) * cs);
  return d;
}

double DirectionDensity::weight(double delta) const {
  return a + b * std::cos(delta) + c * std::sin(delta);
}

double DirectionDensity::cdf(double delta) const {
  return (a * delta + b * std::sin(delta) + c * (1.0 - std::cos(delta))) /
         (kTwoPi * a);
}

double DirectionDensity::sample(double u) const {
  if (a <= 0.0) throw std::domain_error("direction density has zero weight");
  // Newton iteration on F(delta) = u with bisection safeguard; F is monotone
  // since the integrand w(delta) >= 0.
  double lo = 0.0, hi = kTwoPi;
  double x = kTwoPi * u;  // exact for the uniform case
  for (int it = 0; it < 100; ++it) {
    double f = cdf(x) - u;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    double w = weight(x) / (kTwoPi * a);
    double step = (w > 1e-14) ? f / w : 0.0;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-12) {
      x = xn;
      break;
    }
    x = xn;
  }
  if (x < 0.0) x = 0.0;
  if (x >= kTwoPi) x = std::nextafter(kTwoPi, 0.0);
  return x;
}

}  // namespace twoion
