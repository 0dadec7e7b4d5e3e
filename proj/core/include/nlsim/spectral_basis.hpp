#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nlsim/errors.hpp"

namespace nlsim {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Surface measure of the unit sphere S^{d-1}.
double surface_area(int d);

// lambda_n^2 = 4n + d.
double eigenvalue_sq(int n, int d);

struct BasisSpec {
  int d = 2;
  int N = 16;  // modes 0..N
  int M = 0;   // quadrature nodes

  static BasisSpec oversampled(int d, int N, int factor = 4);
  void validate() const;
};

// Forward three-term recurrence for the orthonormal Laguerre functions
// psi_k(u) = l_k(u) e^{-u/2}, carried as mantissa * exp(log_scale).
class LaguerreRecurrence {
 public:
  LaguerreRecurrence(double a, double u);

  int index() const { return k_; }
  double mantissa() const { return y_; }
  double previous_mantissa() const { return y_prev_; }
  double log_scale() const { return log_scale_; }
  double value() const;

  // Advances to k+1. Returns the log of the rescaling factor applied to the
  // stored mantissas (0 when no rescale happened).
  double next();

 private:
  double a_, u_;
  int k_ = 0;
  double y_prev_ = 0.0, y_ = 0.0, log_scale_ = 0.0;
};

// e_n(r), normalized in L^2(R^d), positive at r = 0.
double eval_eigenfunction(int n, int d, double r);

// e_0(r) .. e_nmax(r).
std::vector<double> eval_eigenfunctions(int nmax, int d, double r);

struct RadialGrid {
  int d = 2;
  std::vector<double> nodes;        // r_i, strictly increasing
  std::vector<double> u;            // r_i^2
  std::vector<double> log_weights;  // sum_i w_i g(r_i) ~ int_0^inf g(r) r^{d-1} dr
  std::vector<double> log_christoffel;  // log sum_{k<M} psi_k(u_i)^2

  int size() const { return static_cast<int>(nodes.size()); }
  double integrate(const std::function<double(double)>& g) const;
  // int h(r) e^{-r^2} r^{d-1} dr without forming the large weights.
  double integrate_gaussian(const std::function<double(double)>& h) const;
};

RadialGrid build_grid(const BasisSpec& spec);

struct SpectralField {
  int d = 2;
  CVector coeffs;

  int N() const { return static_cast<int>(coeffs.size()) - 1; }
  double l2_norm() const { return coeffs.norm(); }

  static SpectralField zero(int d, int N);
  static SpectralField mode(int d, int N, int n);
};

// Quadrature grid plus the weighted transform table
//   B(n, i) = sqrt(omega w_i) e_n(r_i)
// which is bounded by 1 in magnitude. Weighted node values are
// vt_i = sqrt(omega w_i) v(r_i); physical values are rho_i * vt_i.
class SpectralBasis {
 public:
  explicit SpectralBasis(BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  const RadialGrid& grid() const { return grid_; }
  int d() const { return spec_.d; }
  int N() const { return spec_.N; }
  int M() const { return spec_.M; }
  double omega() const { return omega_; }

  const Eigen::MatrixXd& table() const { return table_; }
  const RVector& rho() const { return rho_; }
  const RVector& log_rho() const { return log_rho_; }

  // vt = sum_n c_n B(n, .); accepts up to N+1 coefficients.
  void to_weighted(const CVector& c, CVector& vt) const;
  // c_n = sum_i B(n, i) vt_i for n = 0..n_out-1.
  void from_weighted(const CVector& vt, CVector& c, int n_out) const;

  CVector physical_from_weighted(const CVector& vt) const;
  CVector weighted_from_physical(const CVector& v) const;

  // (sum_i |v(r_i)|^q omega w_i)^{1/q}; q = inf gives the node maximum.
  double weighted_lp_norm(const CVector& vt, double q) const;

 private:
  BasisSpec spec_;
  RadialGrid grid_;
  double omega_;
  Eigen::MatrixXd table_;
  RVector rho_, log_rho_;
};

CVector synthesize(const SpectralField& field, const SpectralBasis& basis);
SpectralField analyze(const CVector& values, const SpectralBasis& basis, int N);

// v(r) = sum c_n e_n(r) at an arbitrary radius, as mantissa * exp(log_scale).
struct ScaledValue {
  cplx mantissa;
  double log_scale;
  cplx value() const;
};
ScaledValue eval_field_scaled(const CVector& coeffs, int d, double r);
cplx eval_field(const SpectralField& field, double r);

double lp_norm(const SpectralField& field, const SpectralBasis& basis, double q);
double sobolev_norm(const SpectralField& field, double sigma);
double wsp_norm(const SpectralField& field, const SpectralBasis& basis, double sigma, double q);

// Multiplies c_n by (4n+d)^{s/2}.
SpectralField apply_h_power(const SpectralField& field, double s);

enum class Projector { sharp, smooth };

// 1 on [0,1], exp(1 - 1/(1-(x-1)^2)) on (1,2), 0 from 2 on.
double smooth_cutoff(double x);

RVector projector_multipliers(int d, int N, int K, Projector kind);
SpectralField project_sharp(const SpectralField& field, int K);
SpectralField project_smooth(const SpectralField& field, int K);
SpectralField project(const SpectralField& field, int K, Projector kind);

const char* to_string(Projector kind);
Projector projector_from_string(const std::string& s);

}  // namespace nlsim
