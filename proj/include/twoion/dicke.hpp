#pragma once

#include <array>
#include <complex>

namespace twoion {

using complexd = std::complex<double>;

// Pure state of the two-ion system in the Dicke basis
// {|g,g>, |s>, |a>, |e,e>} with |s> = (|e,g>+|g,e>)/sqrt2 and
// |a> = (|e,g>-|g,e>)/sqrt2.
struct TwoAtomState {
  enum Index { GG = 0, S = 1, A = 2, EE = 3 };

  std::array<complexd, 4> c{};

  double norm2() const;
  TwoAtomState normalized() const;  // throws std::domain_error on zero norm

  // Population of the one- and two-excitation manifolds: <N> with
  // N = sigma1^dag sigma1 + sigma2^dag sigma2.
  double excitation_number() const;

  static TwoAtomState ground() {
    TwoAtomState st;
    st.c[GG] = 1.0;
    return st;
  }
};

// Basis change product -> Dicke, normalizing the result.
// Product amplitudes ordered (c_gg, c_eg, c_ge, c_ee), first letter = ion 1.
TwoAtomState dicke_from_product(complexd c_gg, complexd c_eg, complexd c_ge,
                                complexd c_ee);

// Inverse basis change (no normalization; input assumed normalized).
std::array<complexd, 4> product_from_dicke(const TwoAtomState& st);

// Apply the far-field detection operator D(delta) = sigma1 + e^{i delta} sigma2.
// Returns the (unnormalized) post-jump state and weight = <psi|D^dag D|psi>,
// the relative detection probability density at direction phase delta.
struct DetectionResult {
  TwoAtomState state;  // unnormalized
  double weight;
};
DetectionResult apply_detection(const TwoAtomState& st, double delta);

// Coefficients of the emission direction density
//   w(delta) = <D^dag(delta) D(delta)> = a + b cos(delta) + c sin(delta),
// normalized density p(delta) = w(delta) / (2 pi a).
struct DirectionDensity {
  double a, b, c;

  double weight(double delta) const;
  // CDF of p on [0, 2pi).
  double cdf(double delta) const;
  // Inverse CDF; u in [0,1).
  double sample(double u) const;
};
DirectionDensity direction_density(const TwoAtomState& st);

}  // namespace twoion
