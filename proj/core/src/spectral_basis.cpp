#include "nlsim/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlsim {

double surface_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double eigenvalue_sq(int n, int d) { return 4.0 * n + d; }

BasisSpec BasisSpec::oversampled(int d, int N, int factor) {
  return BasisSpec{d, N, factor * (N + 1)};
}

void BasisSpec::validate() const {
  require(d >= 2, "basis: dimension d must be >= 2");
  require(N >= 0, "basis: truncation N must be >= 0");
  require(M >= N + 1, "basis: quadrature size M must be >= N+1");
}

std::vector<double> eval_eigenfunctions(int nmax, int d, double r) {
  require(r >= 0.0, "eigenfunction: radius must be >= 0");
  std::vector<double> out(nmax + 1);
  const double norm = std::sqrt(2.0 / surface_area(d));
  LaguerreRecurrence rec(0.5 * d - 1.0, r * r);
  for (int n = 0; n <= nmax; ++n) {
    out[n] = norm * rec.value();
    if (!std::isfinite(out[n])) throw NumericalError("eigenfunction: non-finite value");
    if (n < nmax) rec.next();
  }
  return out;
}

double eval_eigenfunction(int n, int d, double r) { return eval_eigenfunctions(n, d, r)[n]; }

SpectralField SpectralField::zero(int d, int N) {
  return SpectralField{d, CVector::Zero(N + 1)};
}

SpectralField SpectralField::mode(int d, int N, int n) {
  SpectralField f = zero(d, N);
  f.coeffs(n) = 1.0;
  return f;
}

SpectralBasis::SpectralBasis(BasisSpec spec)
    : spec_(spec), grid_(build_grid(spec)), omega_(surface_area(spec.d)) {
  const int M = spec_.M;
  const int n_rows = spec_.N + 1;
  const double a = 0.5 * spec_.d - 1.0;
  table_.resize(n_rows, M);
  rho_.resize(M);
  log_rho_.resize(M);
  for (int i = 0; i < M; ++i) {
    const double half_log_s = 0.5 * grid_.log_christoffel[i];
    LaguerreRecurrence rec(a, grid_.u[i]);
    for (int n = 0; n < n_rows; ++n) {
      const double y = rec.mantissa();
      table_(n, i) =
          y == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(y)) + rec.log_scale() - half_log_s), y);
      if (n + 1 < n_rows) rec.next();
    }
    log_rho_(i) = -0.5 * (std::log(omega_) + grid_.log_weights[i]);
    rho_(i) = std::exp(log_rho_(i));
  }
}

void SpectralBasis::to_weighted(const CVector& c, CVector& vt) const {
  const int n = static_cast<int>(c.size());
  require(n <= spec_.N + 1, "transform: field has more modes than the basis");
  const int M = spec_.M;
  vt.resize(M);
  Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> C(
      reinterpret_cast<const double*>(c.data()), 2, n);
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> V(reinterpret_cast<double*>(vt.data()), 2,
                                                          M);
  V.noalias() = C * table_.topRows(n);
}

void SpectralBasis::from_weighted(const CVector& vt, CVector& c, int n_out) const {
  require(n_out <= spec_.N + 1, "transform: requested more modes than the basis");
  require(vt.size() == spec_.M, "transform: node vector has wrong length");
  c.resize(n_out);
  Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> V(
      reinterpret_cast<const double*>(vt.data()), 2, spec_.M);
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> C(reinterpret_cast<double*>(c.data()), 2,
                                                          n_out);
  C.noalias() = V * table_.topRows(n_out).transpose();
}

CVector SpectralBasis::physical_from_weighted(const CVector& vt) const {
  return (vt.array() * rho_.array().cast<cplx>()).matrix();
}

CVector SpectralBasis::weighted_from_physical(const CVector& v) const {
  require(v.size() == spec_.M, "transform: node vector has wrong length");
  CVector vt(spec_.M);
  for (int i = 0; i < spec_.M; ++i) {
    if (v(i) == cplx(0.0)) {
      vt(i) = 0.0;
      continue;
    }
    const double half = std::exp(-0.5 * log_rho_(i));
    vt(i) = (v(i) * half) * half;
  }
  return vt;
}

double SpectralBasis::weighted_lp_norm(const CVector& vt, double q) const {
  require(q >= 1.0, "lp_norm: exponent must be >= 1");
  if (q == 2.0) return vt.norm();
  if (std::isinf(q)) {
    double best = 0.0;
    for (int i = 0; i < vt.size(); ++i) {
      const double m = std::abs(vt(i));
      if (m > 0.0) best = std::max(best, std::exp(std::log(m) + log_rho_(i)));
    }
    return best;
  }
  // |vt_i|^2 |v_i|^{q-2} = exp(q log|vt_i| + (q-2) log rho_i), summed in log space.
  std::vector<double> logs;
  logs.reserve(vt.size());
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < vt.size(); ++i) {
    const double m = std::abs(vt(i));
    if (m == 0.0) continue;
    const double l = q * std::log(m) + (q - 2.0) * log_rho_(i);
    logs.push_back(l);
    top = std::max(top, l);
  }
  if (logs.empty()) return 0.0;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return std::exp((top + std::log(acc)) / q);
}

CVector synthesize(const SpectralField& field, const SpectralBasis& basis) {
  require(field.d == basis.d(), "synthesize: dimension mismatch");
  CVector vt;
  basis.to_weighted(field.coeffs, vt);
  return basis.physical_from_weighted(vt);
}

SpectralField analyze(const CVector& values, const SpectralBasis& basis, int N) {
  SpectralField out{basis.d(), CVector()};
  basis.from_weighted(basis.weighted_from_physical(values), out.coeffs, N + 1);
  return out;
}

cplx ScaledValue::value() const {
  const double m = std::abs(mantissa);
  if (m == 0.0) return 0.0;
  return mantissa / m * std::exp(std::log(m) + log_scale);
}

ScaledValue eval_field_scaled(const CVector& coeffs, int d, double r) {
  require(r >= 0.0, "eval_field: radius must be >= 0");
  const int n_modes = static_cast<int>(coeffs.size());
  LaguerreRecurrence rec(0.5 * d - 1.0, r * r);
  cplx acc = 0.0;
  for (int n = 0; n < n_modes; ++n) {
    acc += coeffs(n) * rec.mantissa();
    if (n + 1 < n_modes) {
      const double f = rec.next();
      if (f != 0.0) acc *= std::exp(f);
    }
  }
  return ScaledValue{acc * std::sqrt(2.0 / surface_area(d)), rec.log_scale()};
}

cplx eval_field(const SpectralField& field, double r) {
  return eval_field_scaled(field.coeffs, field.d, r).value();
}

double lp_norm(const SpectralField& field, const SpectralBasis& basis, double q) {
  require(field.d == basis.d(), "lp_norm: dimension mismatch");
  CVector vt;
  basis.to_weighted(field.coeffs, vt);
  return basis.weighted_lp_norm(vt, q);
}

double sobolev_norm(const SpectralField& field, double sigma) {
  double acc = 0.0;
  for (int n = 0; n <= field.N(); ++n)
    acc += std::pow(eigenvalue_sq(n, field.d), sigma) * std::norm(field.coeffs(n));
  return std::sqrt(acc);
}

SpectralField apply_h_power(const SpectralField& field, double s) {
  SpectralField out = field;
  for (int n = 0; n <= field.N(); ++n) out.coeffs(n) *= std::pow(eigenvalue_sq(n, field.d), 0.5 * s);
  return out;
}

double wsp_norm(const SpectralField& field, const SpectralBasis& basis, double sigma, double q) {
  return lp_norm(apply_h_power(field, sigma), basis, q);
}

double smooth_cutoff(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double y = x - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

RVector projector_multipliers(int d, int N, int K, Projector kind) {
  require(K >= 0 && K <= N, "projector: need 0 <= K <= N");
  RVector m(N + 1);
  const double lk = eigenvalue_sq(K, d);
  for (int n = 0; n <= N; ++n) {
    if (kind == Projector::sharp)
      m(n) = n <= K ? 1.0 : 0.0;
    else
      m(n) = smooth_cutoff(eigenvalue_sq(n, d) / lk);
  }
  return m;
}

SpectralField project(const SpectralField& field, int K, Projector kind) {
  SpectralField out = field;
  out.coeffs.array() *= projector_multipliers(field.d, field.N(), K, kind).array().cast<cplx>();
  return out;
}

SpectralField project_sharp(const SpectralField& field, int K) {
  return project(field, K, Projector::sharp);
}

SpectralField project_smooth(const SpectralField& field, int K) {
  return project(field, K, Projector::smooth);
}

const char* to_string(Projector kind) { return kind == Projector::sharp ? "sharp" : "smooth"; }

Projector projector_from_string(const std::string& s) {
  if (s == "sharp") return Projector::sharp;
  if (s == "smooth") return Projector::smooth;
  throw ValidationError("unknown projector '" + s + "' (expected sharp|smooth)");
}

}  // namespace nlsim
