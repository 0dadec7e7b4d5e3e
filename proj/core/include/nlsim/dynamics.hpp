#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlsim/measures.hpp"
#include "nlsim/spectral_basis.hpp"
#include "nlsim/theory_params.hpp"

namespace nlsim {

enum class Integrator { strang, rk4 };
const char* to_string(Integrator kind);
Integrator integrator_from_string(const std::string& s);

// Fixed dt, or adaptive dt = min(dt, c (pi/4 - |t|)^K).
struct DtPolicy {
  bool adaptive = false;
  double dt = 1e-3;
  double c = 0.05;
  double K = 1.0;

  double step_at(double t) const;
  void validate() const;
};

struct FlowConfig {
  ModelParams params = ModelParams::make(2, 2.0);
  int N = 16;
  int oversample = 4;
  Projector projector = Projector::sharp;
  Integrator integrator = Integrator::strang;
  DtPolicy dt_policy;
  double coupling = 1.0;     // 0 switches the nonlinearity off
  double tolerance = 0.0;    // step-doubling local error target; 0 disables
  double mass_guard = 1e-6;  // relative mass drift that aborts a run
  double norm_ceiling = 1e12;
  int stride = 1;            // keep every stride-th state
  double diag_sigma = 1.0;   // regularity of the H^sigma diagnostic

  // Highest mode touched by the projected nonlinearity.
  int state_modes() const;
  void validate() const;
};

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double lpp1 = 0.0;
  double sobolev = 0.0;
  long steps = 0;
  double aliasing = 0.0;
};

struct Trajectory {
  std::vector<double> times;  // monotone in the integration direction
  std::vector<SpectralField> states;
  std::vector<Diagnostics> diagnostics;
  long total_steps = 0;

  // Index of the stored state whose time equals t to 1e-13, or -1.
  int find_time(double t) const;
};

SpectralField linear_propagate(const SpectralField& field, double dt);

class Flow {
 public:
  explicit Flow(FlowConfig config);

  const FlowConfig& config() const { return cfg_; }
  const SpectralBasis& basis() const { return basis_; }
  const RVector& multipliers() const { return mult_; }

  // cos(2t)^{-alpha} S analyze(|S v|^{p-1} S v) on modes 0..state_modes().
  CVector nonlinear_term(const CVector& c, double t) const;
  // Full coefficient derivative -i (H c + nonlinear_term).
  CVector rhs(const CVector& c, double t) const;

  // One step of size dt (negative dt integrates backwards). Modes above
  // state_modes() rotate with the exact linear phase.
  SpectralField step(const SpectralField& u, double t, double dt) const;

  // Integrates t0 -> t1 (either direction), stopping exactly at every
  // checkpoint strictly between them.
  Trajectory evolve(const SpectralField& u0, double t0, double t1,
                    std::span<const double> checkpoints = {}) const;

  // States at each of `times` (monotone, same direction from t0); no
  // diagnostics are computed along the way.
  std::vector<SpectralField> advance(const SpectralField& u0, double t0,
                                     std::span<const double> times) const;

  double energy(const SpectralField& u, double t) const;
  double lpp1_norm(const SpectralField& u) const;  // |S u|_{L^{p+1}}
  double aliasing_residual(const SpectralField& u, double t) const;
  Diagnostics diagnose(const SpectralField& u, double t, long steps) const;

  // Closed-form E_N'(t) = (4-d(p-1))/(p+1) tan(2t) cos(2t)^{-alpha} |S v|^{p+1}.
  double energy_rate(const SpectralField& u, double t) const;

 private:
  template <class OnStep>
  void integrate(SpectralField& u, double t0, double t1, std::span<const double> checkpoints,
                 OnStep&& on_step) const;
  SpectralField controlled_step(const SpectralField& u, double t, double dt, int depth) const;
  SpectralField step_once(const SpectralField& u, double t, double dt) const;
  void guard(const SpectralField& u, double mass0, double t) const;
  CVector strang(const CVector& c, double t, double dt) const;
  CVector rk4(const CVector& c, double t, double dt) const;

  FlowConfig cfg_;
  SpectralBasis basis_;
  RVector mult_;
  RVector lambda_sq_;
};

SpectralField nonlinear_rhs(const SpectralField& field, double t, const Flow& flow);
double energy(const SpectralField& field, double t, const Flow& flow);

struct EnergyResidual {
  double max_relative = 0.0;  // max |FD - formula| / max |formula|
  double max_absolute = 0.0;
  double scale = 0.0;
  double drift = 0.0;         // max |E(t_k) - E(t_0)| / |E(t_0)|
};
EnergyResidual energy_derivative_residual(const Trajectory& trajectory, const Flow& flow);

// Propagates every sample to each time in `times` (sorted in the
// integration direction). result[k][i] is sample i at times[k].
std::vector<std::vector<SpectralField>> propagate_ensemble(const std::vector<SpectralField>& samples,
                                                           double t0, std::span<const double> times,
                                                           const Flow& flow, int threads = 1);

struct NamedFunctional {
  std::string name;
  FieldFunctional f;
};

struct LiouvilleStat {
  std::string name;
  double statistic = 0.0;    // |mean(F(phi u) W - F(u))| / std error
  double mean_diff = 0.0;
  double std_error = 0.0;
  double unweighted = 0.0;   // |mean(F(phi u) - F(u))| / std error
};

// W = exp(-|phi u|_{H1}^2/2 + |u|_{H1}^2/2) turns the Lebesgue invariance
// of the flow into an identity under mu_N.
std::vector<LiouvilleStat> liouville_test(const Ensemble& ensemble,
                                          const std::vector<SpectralField>& propagated,
                                          const std::vector<NamedFunctional>& functionals);
std::vector<LiouvilleStat> liouville_test(const Ensemble& ensemble, double t,
                                          const std::vector<NamedFunctional>& functionals,
                                          const Flow& flow, int threads = 1);

struct QuasiInvariance {
  double t = 0.0;
  double exponent = 1.0;   // cos(2t)^alpha
  WeightedEstimate lhs;    // nu_t(phi_t A)
  WeightedEstimate nu0;    // nu_0(A)
  WeightedEstimate naive;  // E_mu[1_A gibbs(phi_t u, t)], no Jacobian
  double margin_ii = 0.0, se_ii = 0.0;    // nu0^c - lhs
  double margin_iii = 0.0, se_iii = 0.0;  // lhs^c - nu0
  bool holds(double k) const;
};

QuasiInvariance quasi_invariance_check(const Ensemble& ensemble,
                                       const std::vector<SpectralField>& propagated,
                                       const FieldPredicate& predicate, double t, const Flow& flow);
QuasiInvariance quasi_invariance_check(const Ensemble& ensemble, const FieldPredicate& predicate,
                                       double t, const Flow& flow, int threads = 1);

struct TailCheck {
  double lambda = 0.0;
  WeightedEstimate estimate;  // nu_0({|phi_t u|_{L^{p+1}} > lambda})
  double bound = 0.0;         // exp(-lambda^{p+1}/(p+1))
  bool holds(double k) const { return estimate.value <= bound + k * estimate.std_error; }
};
TailCheck lpp1_tail_check(const Ensemble& ensemble, const std::vector<SpectralField>& propagated,
                          double lambda, const Flow& flow);
TailCheck lpp1_tail_check(const Ensemble& ensemble, double t, double lambda, const Flow& flow,
                          int threads = 1);

struct TruncationStudy {
  int N_ref = 0;
  double t = 0.0;
  double sigma = 0.0;
  std::vector<int> N_list;
  std::vector<double> lambda;  // sqrt(4N+d)
  std::vector<double> errors;  // |v_ref(t) - v_N(t)|_{H^sigma}
  double slope = 0.0;          // d log error / d log lambda
};

// u0_ref carries the reference resolution; base supplies everything but N.
TruncationStudy truncation_convergence(const SpectralField& u0_ref, const std::vector<int>& N_list,
                                       double t, const FlowConfig& base, double sigma,
                                       int threads = 1);

double loglog_slope(std::span<const double> x, std::span<const double> y);

// X^sigma norm: time quadrature (uniform, periodic) of the linear evolution
// over [-pi, pi] in L^{q2} W^{sigma, r2} plus L^{a} L^{b}.
struct XSigmaNorm {
  double first = 0.0;
  double second = 0.0;
  double total() const { return first + second; }
};
XSigmaNorm xsigma_norm(const SpectralField& field, const SpectralBasis& basis, const XSigmaPairs& pairs,
                       double sigma, int time_nodes = 64);

}  // namespace nlsim
