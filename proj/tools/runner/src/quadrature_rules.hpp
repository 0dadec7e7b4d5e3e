#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace nlsim::runner {

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre on [lo, hi] by Newton iteration on P_n.
inline Rule gauss_legendre(int n, double lo, double hi) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = mid - half * z;
    r.x[n - 1 - i] = mid + half * z;
    r.w[i] = r.w[n - 1 - i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

inline Rule composite_gauss_legendre(int per_panel, int panels, double lo, double hi) {
  Rule out;
  const double width = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const Rule r = gauss_legendre(per_panel, lo + k * width, lo + (k + 1) * width);
    out.x.insert(out.x.end(), r.x.begin(), r.x.end());
    out.w.insert(out.w.end(), r.w.begin(), r.w.end());
  }
  return out;
}

// J_nu(z)/z^nu with nu = d/2 - 1, the radial Fourier kernel up to constants.
inline double radial_fourier_kernel(int d, double z) {
  const double nu = 0.5 * d - 1.0;
  if (z < 1e-6) return 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
  return std::cyl_bessel_j(nu, z) / std::pow(z, nu);
}

// e^{is Delta} u0 for radial u0 by direct Hankel quadrature in r and k.
// Independent of the spectral machinery; used as a reference.
class HankelFreeEvolution {
 public:
  using cplx = std::complex<double>;

  HankelFreeEvolution(const std::function<cplx(double)>& u0, int d, double s, double r_max = 14.0,
                      double k_max = 14.0)
      : d_(d), k_(composite_gauss_legendre(24, 40, 0.0, k_max)) {
    const Rule rr = composite_gauss_legendre(24, 40, 0.0, r_max);
    std::vector<cplx> u0v(rr.x.size());
    for (std::size_t i = 0; i < rr.x.size(); ++i) u0v[i] = u0(rr.x[i]) * rr.w[i] * std::pow(rr.x[i], d - 1);
    g_.resize(k_.x.size());
    for (std::size_t j = 0; j < k_.x.size(); ++j) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < rr.x.size(); ++i) acc += u0v[i] * radial_fourier_kernel(d, k_.x[j] * rr.x[i]);
      const double k = k_.x[j];
      g_[j] = k_.w[j] * std::polar(1.0, -s * k * k) * acc * std::pow(k, d - 1);
    }
  }

  cplx operator()(double y) const {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < g_.size(); ++j) acc += g_[j] * radial_fourier_kernel(d_, k_.x[j] * y);
    return acc;
  }

 private:
  int d_;
  Rule k_;
  std::vector<cplx> g_;
};

}  // namespace nlsim::runner
