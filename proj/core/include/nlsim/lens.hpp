#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nlsim/dynamics.hpp"
#include "nlsim/spectral_basis.hpp"

namespace nlsim {

// t = arctan(2s)/2 and its inverse s = tan(2t)/2.
double time_map(double s);
double time_map_inv(double t);

struct TimePair {
  double s = 0.0;
  double t = 0.0;
  static TimePair from_s(double s) { return {s, time_map(s)}; }
  static TimePair from_t(double t) { return {time_map_inv(t), t}; }
};

using RadialFunction = std::function<ScaledValue(double r)>;
RadialFunction radial_function(const SpectralField& field);

// Output of a lens operation sampled on a (possibly dilated) quadrature grid.
// With scale a, nodes are a*r_i and `field` holds coefficients in the
// dilated orthonormal basis a^{-d/2} e_n(r/a); a = 1 is the ordinary basis.
struct LensResult {
  double s = 0.0;
  double t = 0.0;
  double scale = 1.0;
  CVector weighted;        // sqrt(omega w_i a^d) * value(a r_i)
  SpectralField field;
  double truncation_loss = 0.0;  // L^2 fraction not captured by modes 0..N

  double l2_norm() const { return weighted.norm(); }
  // Physical value at node i (may underflow to 0 far out).
  cplx value(const SpectralBasis& basis, int i) const;
};

// v(t,x) = cos(2t)^{-d/2} U(x / cos 2t) exp(-i |x|^2 tan(2t)/2), t = t(s).
LensResult lens_forward(const RadialFunction& U, double s, int d, const SpectralBasis& target,
                        double scale = 1.0);
LensResult lens_forward(const SpectralField& U, double s, const SpectralBasis& target,
                        double scale = 1.0);

// U(s,y) = (1+4s^2)^{-d/4} v(t, y / sqrt(1+4s^2)) exp(i |y|^2 s / (1+4s^2)), s = s(t).
LensResult lens_inverse(const RadialFunction& v, double t, int d, const SpectralBasis& target,
                        double scale = 1.0);
LensResult lens_inverse(const SpectralField& v, double t, const SpectralBasis& target,
                        double scale = 1.0);

// e^{is Delta} u0 via the lens inverse of e^{-it(s)H} u0.
LensResult free_propagate(const SpectralField& u0, double s, const SpectralBasis& target,
                          double scale = 1.0);

// Natural dilation for free-space data at time s: sqrt(1 + 4 s^2).
double lens_scale(double s);

// NLS solution u(s) from an HNLS trajectory; each requested t(s) is reached
// by one integrator step from the nearest stored state.
std::vector<LensResult> nls_solution(const Trajectory& trajectory, std::span<const double> s_list,
                                     const Flow& flow, const SpectralBasis& target,
                                     bool dilate = true, int threads = 1);

}  // namespace nlsim
