#include "nlsim/theory_params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlsim/errors.hpp"

namespace nlsim {

namespace {

bool close(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

}  // namespace

double alpha(double p, int d) { return 2.0 - 0.5 * d * (p - 1.0); }

double sigma_max(double p, int d) {
  if (d <= 2) return 0.5;
  if (p <= 1.0 + 3.0 / (d - 2)) return 0.5;
  return 2.0 - 0.5 * (d - 2) * (p - 1.0);
}

double poly_P(int d, double x) { return (((d - 2.0) * x + (d - 4.0)) * x - 6.0) * x - 2.0 * d - 4.0; }

double poly_Q(int d, double p) { return ((2.0 * p + d) * p + (d - 6.0)) * p - 2.0 * d - 4.0; }

double poly_R(int d, double p) { return (p + 0.5 * d) * p - 0.5 * d - 3.0; }

double poly_R_root(int d) { return -0.25 * d + 0.25 * std::sqrt(d * d + 8.0 * d + 48.0); }

double pd_comparison_point(int d) { return (-d + 4.0 + std::sqrt(d * d + 32.0)) / 4.0; }

double inferred_threshold(int d) {
  require(d >= 3, "inferred_threshold: needs d >= 3");
  return (-d + 4.0 + std::sqrt(9.0 * d * d - 16.0 * d)) / (2.0 * (d - 2));
}

double p_max(int d) {
  require(d >= 2, "p_max: needs d >= 2");
  if (d <= 7) return (5.0 - d + std::sqrt(9.0 * d * d - 2.0 * d + 9.0)) / (2.0 * (d - 1));

  // Sign scan on (0, 8] then bisection.
  const double step = 1e-3;
  double lo = 0.0, hi = 0.0;
  bool found = false;
  double prev = poly_P(d, step);
  for (int k = 2; k <= 8000; ++k) {
    const double x = k * step;
    const double cur = poly_P(d, x);
    if ((prev < 0.0) != (cur < 0.0)) {
      lo = x - step;
      hi = x;
      found = true;
      break;
    }
    prev = cur;
  }
  if (!found) throw NumericalError("p_max: no sign change of P_d on (0,8] for d=" + std::to_string(d));
  double flo = poly_P(d, lo);
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = poly_P(d, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DeltaExponents delta_exponents(double p, int d, double gamma) {
  require(gamma >= 1.0, "delta_exponents: gamma must be >= 1");
  const double a = alpha(p, d);
  const double g = inv(gamma);
  return {-(p + 2.0) * a / 2.0 + g, -(p + 3.0) * a / 2.0 + g};
}

bool admissible(double q, double r, int d) {
  if (q < 2.0 || r < 2.0) return false;
  if (q == 2.0 && std::isinf(r) && d == 2) return false;
  return close(2.0 * inv(q) + d * inv(r), 0.5 * d);
}

bool sigma_admissible(double q, double r, int d, double sigma) {
  if (q < 2.0 || r < 1.0) return false;
  return close(2.0 * inv(q) + d * inv(r), 0.5 * d - sigma);
}

double regularity_threshold(double r, int d) {
  require(r > 2.0, "regularity_threshold: needs r > 2");
  const double knee = 2.0 * d / (d - 1.0);
  if (r <= knee) return d * (0.5 - 1.0 / r);
  require(d == 2 || r <= 2.0 * d / (d - 2.0), "regularity_threshold: r beyond 2d/(d-2)");
  return 1.0 - d * (0.5 - 1.0 / r);
}

XSigmaPairs xsigma_pairs(double p, int d, double sigma) {
  require(d >= 2 && p > 1.0, "xsigma_pairs: needs d >= 2, p > 1");
  const double smax = sigma_max(p, d);
  const double slack = 1.0 - (0.25 * d - 0.5 * sigma) * (p - 1.0);
  if (!(sigma > 0.0 && sigma < smax))
    throw ValidationError("xsigma_pairs: infeasible sigma=" + std::to_string(sigma) +
                          " (sigma_max=" + std::to_string(smax) + ")");
  XSigmaPairs out{};
  out.contraction_ok = slack > 0.0;
  out.case_one = d <= 2 || p <= 1.0 + 3.0 / (d - 2);
  if (out.case_one) {
    out.q2 = 4.0;
    out.r2 = 2.0 * d / (d - 1.0);
  } else {
    const double e = (d - 2.0) * (p - 1.0);
    out.q2 = 4.0 / (e - 2.0);
    out.r2 = 2.0 * d / (d + 2.0 - e);
  }
  if (d == 2) {
    out.a = out.b = 4.0 / (1.0 - sigma);
  } else {
    out.b = 2.0 * d / (d - 2.0);
    out.a = 2.0 / (1.0 - sigma);
  }
  return out;
}

double lwp_time(double lambda, double t0, double K, double L, double c) {
  require(lambda > 0.0, "lwp_time: lambda must be > 0");
  require(std::abs(t0) < std::numbers::pi / 4, "lwp_time: |t0| must be < pi/4");
  return c * std::pow(lambda, -L) * std::pow(std::numbers::pi / 4 - std::abs(t0), K);
}

double horizon(int j) {
  require(j >= 0, "horizon: j must be >= 0");
  return std::numbers::pi / 4 * -std::expm1(-static_cast<double>(j));
}

ModelParams ModelParams::make(int d, double p) {
  require(d >= 2, "params: d must be >= 2");
  require(p > 1.0, "params: p must be > 1");
  ModelParams m;
  m.d = d;
  m.p = p;
  m.alpha = nlsim::alpha(p, d);
  m.sigma_max = nlsim::sigma_max(p, d);
  m.p_max = nlsim::p_max(d);
  m.case_one = d <= 2 || p <= 1.0 + 3.0 / (d - 2);
  return m;
}

bool ModelParams::mass_subcritical() const { return p > 1.0 && p <= 1.0 + 4.0 / d + 1e-14; }

bool ModelParams::scattering_expected() const { return p > 1.0 + 2.0 / d + 1e-14; }

double ModelParams::default_scatter_sigma() const { return d * (0.5 - 1.0 / (p + 1.0)); }

}  // namespace nlsim
