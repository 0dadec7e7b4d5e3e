#pragma once

#include <limits>

namespace nlsim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double alpha(double p, int d);
double sigma_max(double p, int d);

// Smallest positive root of P_d for d >= 8, closed form below.
double p_max(int d);

double poly_P(int d, double x);  // (d-2)x^3 + (d-4)x^2 - 6x - 2d - 4
double poly_Q(int d, double p);  // 2p^3 + d p^2 + (d-6)p - 2d - 4
double poly_R(int d, double p);  // p^2 + (d/2)p - d/2 - 3
double poly_R_root(int d);       // -d/4 + sqrt(d^2+8d+48)/4
double pd_comparison_point(int d);  // (-d+4+sqrt(d^2+32))/4

// (-d+4+sqrt(9d^2-16d))/(2(d-2)); reconstructed from a garbled source
// expression, reported with an "inferred" label.
double inferred_threshold(int d);

struct DeltaExponents {
  double delta;
  double delta_tilde;
};
DeltaExponents delta_exponents(double p, int d, double gamma);

bool admissible(double q, double r, int d);
bool sigma_admissible(double q, double r, int d, double sigma);

// Threshold regularity s_r for W^{sigma,r} tails, r in (2, 2d/(d-2)].
double regularity_threshold(double r, int d);

struct XSigmaPairs {
  bool case_one;  // p <= 1 + 3/(d-2)
  double q2, r2;  // admissible pair
  double a, b;    // sigma-admissible pair (a(p-1), b(p-1))
  bool contraction_ok;  // 1 - (d/4 - sigma/2)(p-1) > 0
};
XSigmaPairs xsigma_pairs(double p, int d, double sigma);

double lwp_time(double lambda, double t0, double K, double L, double c = 1.0);
double horizon(int j);

struct ModelParams {
  int d = 2;
  double p = 2.0;
  double alpha = 0.0;
  double sigma_max = 0.5;
  double p_max = 0.0;
  bool case_one = true;

  static ModelParams make(int d, double p);
  bool mass_subcritical() const;        // 1 < p <= 1 + 4/d
  bool scattering_expected() const;     // p > 1 + 2/d
  double default_scatter_sigma() const; // d(1/2 - 1/(p+1))
};

}  // namespace nlsim
