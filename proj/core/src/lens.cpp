#include "nlsim/lens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsim/parallel.hpp"

namespace nlsim {

namespace {

// weighted_i = sqrt(omega w_i a^d) * A * f(a r_i / b) * exp(i phase_coeff (a r_i)^2)
LensResult sample(const RadialFunction& f, int d, const SpectralBasis& target, double scale,
                  double log_amp, double inner, double phase_coeff) {
  require(target.d() == d, "lens: dimension mismatch");
  require(scale > 0.0, "lens: scale must be > 0");
  const int M = target.M();
  LensResult out;
  out.scale = scale;
  out.weighted.resize(M);
  const double log_dil = 0.5 * d * std::log(scale);
  for (int i = 0; i < M; ++i) {
    const double r = scale * target.grid().nodes[i];
    const ScaledValue sv = f(r * inner);
    const double m = std::abs(sv.mantissa);
    if (m == 0.0) {
      out.weighted(i) = 0.0;
      continue;
    }
    const double lg = std::log(m) + sv.log_scale + log_amp - target.log_rho()(i) + log_dil;
    if (lg > 700.0)
      throw NumericalError("lens: sampled function grows too fast for the target grid at r=" +
                           std::to_string(r));
    out.weighted(i) = sv.mantissa / m * std::exp(lg) * std::polar(1.0, phase_coeff * r * r);
  }
  out.field.d = d;
  target.from_weighted(out.weighted, out.field.coeffs, target.N() + 1);
  const double total = out.weighted.squaredNorm();
  out.truncation_loss = total > 0.0 ? std::max(0.0, 1.0 - out.field.coeffs.squaredNorm() / total) : 0.0;
  return out;
}

}  // namespace

double time_map(double s) { return 0.5 * std::atan(2.0 * s); }

double time_map_inv(double t) {
  require(std::abs(t) < std::numbers::pi / 4, "time_map_inv: |t| must be < pi/4");
  return 0.5 * std::tan(2.0 * t);
}

double lens_scale(double s) { return std::sqrt(1.0 + 4.0 * s * s); }

RadialFunction radial_function(const SpectralField& field) {
  return [c = field.coeffs, d = field.d](double r) { return eval_field_scaled(c, d, r); };
}

cplx LensResult::value(const SpectralBasis& basis, int i) const {
  const double m = std::abs(weighted(i));
  if (m == 0.0) return 0.0;
  const double lg = std::log(m) + basis.log_rho()(i) - 0.5 * basis.d() * std::log(scale);
  return weighted(i) / m * std::exp(lg);
}

LensResult lens_forward(const RadialFunction& U, double s, int d, const SpectralBasis& target,
                        double scale) {
  const double t = time_map(s);
  const double c = std::cos(2.0 * t);
  LensResult r = sample(U, d, target, scale, -0.5 * d * std::log(c), 1.0 / c, -s);
  r.s = s;
  r.t = t;
  return r;
}

LensResult lens_forward(const SpectralField& U, double s, const SpectralBasis& target, double scale) {
  return lens_forward(radial_function(U), s, U.d, target, scale);
}

LensResult lens_inverse(const RadialFunction& v, double t, int d, const SpectralBasis& target,
                        double scale) {
  const double s = time_map_inv(t);
  const double g = 1.0 + 4.0 * s * s;
  LensResult r = sample(v, d, target, scale, -0.25 * d * std::log(g), 1.0 / std::sqrt(g), s / g);
  r.s = s;
  r.t = t;
  return r;
}

LensResult lens_inverse(const SpectralField& v, double t, const SpectralBasis& target, double scale) {
  return lens_inverse(radial_function(v), t, v.d, target, scale);
}

LensResult free_propagate(const SpectralField& u0, double s, const SpectralBasis& target, double scale) {
  const double t = time_map(s);
  return lens_inverse(linear_propagate(u0, t), t, target, scale);
}

std::vector<LensResult> nls_solution(const Trajectory& tr, std::span<const double> s_list,
                                     const Flow& flow, const SpectralBasis& target, bool dilate,
                                     int threads) {
  require(!tr.times.empty(), "nls_solution: empty trajectory");
  const auto [lo, hi] = std::minmax_element(tr.times.begin(), tr.times.end());
  std::vector<LensResult> out(s_list.size());
  for (double s : s_list) {
    const double t = time_map(s);
    if (t < *lo - 1e-14 || t > *hi + 1e-14)
      throw ValidationError("nls_solution: s=" + std::to_string(s) + " beyond trajectory horizon");
  }
  parallel_for(s_list.size(), threads, [&](std::size_t k) {
    const double s = s_list[k];
    const double t = time_map(s);
    std::size_t best = 0;
    for (std::size_t j = 1; j < tr.times.size(); ++j)
      if (std::abs(tr.times[j] - t) < std::abs(tr.times[best] - t)) best = j;
    const double gap = t - tr.times[best];
    const SpectralField v = std::abs(gap) <= 1e-15 ? tr.states[best] : flow.step(tr.states[best], tr.times[best], gap);
    out[k] = lens_inverse(v, t, target, dilate ? lens_scale(s) : 1.0);
  });
  return out;
}

}  // namespace nlsim
