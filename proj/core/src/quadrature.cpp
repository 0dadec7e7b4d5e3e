#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "nlsim/spectral_basis.hpp"

namespace nlsim {

namespace {

constexpr double kRescaleThreshold = 1e150;
const double kLogRescale = std::log(1e-150);

}  // namespace

LaguerreRecurrence::LaguerreRecurrence(double a, double u)
    : a_(a), u_(u), y_(std::exp(-0.5 * std::lgamma(a + 1.0))), log_scale_(-0.5 * u) {}

double LaguerreRecurrence::next() {
  const int n = k_ + 1;
  const double nd = n;
  double y_new = (2.0 * nd - 1.0 + a_ - u_) * y_;
  if (n > 1) y_new -= std::sqrt((nd - 1.0) * (nd - 1.0 + a_)) * y_prev_;
  y_new /= std::sqrt(nd * (nd + a_));
  y_prev_ = y_;
  y_ = y_new;
  k_ = n;
  if (std::abs(y_) > kRescaleThreshold) {
    y_ *= 1e-150;
    y_prev_ *= 1e-150;
    log_scale_ -= kLogRescale;
    return kLogRescale;
  }
  return 0.0;
}

double LaguerreRecurrence::value() const {
  if (y_ == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(y_)) + log_scale_), y_);
}

RadialGrid build_grid(const BasisSpec& spec) {
  spec.validate();
  const int M = spec.M;
  const double a = 0.5 * spec.d - 1.0;

  Eigen::VectorXd diag(M), sub(M > 1 ? M - 1 : 0);
  for (int k = 0; k < M; ++k) diag(k) = 2.0 * k + 1.0 + a;
  for (int k = 0; k + 1 < M; ++k) sub(k) = std::sqrt((k + 1.0) * (k + 1.0 + a));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("quadrature: tridiagonal eigensolver did not converge for M=" +
                         std::to_string(M));
  const Eigen::VectorXd& eig = solver.eigenvalues();

  RadialGrid grid;
  grid.d = spec.d;
  grid.nodes.resize(M);
  grid.u.resize(M);
  grid.log_weights.resize(M);
  grid.log_christoffel.resize(M);

  const double Md = M;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < M; ++i) {
    double x = eig(i);
    bool converged = false;
    double last_delta = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 8; ++iter) {
      LaguerreRecurrence rec(a, x);
      for (int k = 0; k < M; ++k) rec.next();
      const double pm = rec.mantissa();
      const double pm1 = rec.previous_mantissa();
      const double denom = Md * pm - std::sqrt(Md * (Md + a)) * pm1;
      const double delta = x * pm / denom;
      if (!std::isfinite(delta)) break;
      x -= delta;
      last_delta = std::abs(delta);
      if (last_delta <= 64.0 * eps * x) {
        converged = true;
        break;
      }
    }
    if (!converged && last_delta <= 1e-10 * x) converged = true;
    if (!converged || !(x > 0.0))
      throw NumericalError("quadrature: node polish failed at index " + std::to_string(i) +
                           " (M=" + std::to_string(M) + ")");
    // Weights from the polished node: recompute the Christoffel sum at x.
    LaguerreRecurrence rec(a, x);
    double s = 0.0;
    for (int k = 0; k < M; ++k) {
      s += rec.mantissa() * rec.mantissa();
      const double f = rec.next();
      if (f != 0.0) s *= std::exp(2.0 * f);
    }
    const double log_s = std::log(s) + 2.0 * rec.log_scale();

    grid.u[i] = x;
    grid.nodes[i] = std::sqrt(x);
    grid.log_christoffel[i] = log_s;
    grid.log_weights[i] = std::log(0.5) - log_s;
  }
  for (int i = 1; i < M; ++i) {
    if (!(grid.nodes[i] > grid.nodes[i - 1]))
      throw NumericalError("quadrature: nodes not strictly increasing (M=" + std::to_string(M) +
                           ")");
  }
  return grid;
}

double RadialGrid::integrate(const std::function<double(double)>& g) const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double gi = g(nodes[i]);
    if (gi == 0.0) continue;
    acc += std::copysign(std::exp(log_weights[i] + std::log(std::abs(gi))), gi);
  }
  return acc;
}

double RadialGrid::integrate_gaussian(const std::function<double(double)>& h) const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += std::exp(log_weights[i] - u[i]) * h(nodes[i]);
  return acc;
}

}  // namespace nlsim
