#include "nlsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsim/parallel.hpp"

namespace nlsim {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;
const cplx kI(0.0, 1.0);

// Pads or keeps a coefficient vector so it has at least n entries.
CVector padded(const CVector& c, int n) {
  if (c.size() >= n) return c;
  CVector out = CVector::Zero(n);
  out.head(c.size()) = c;
  return out;
}

WeightedEstimate paired_margin(std::span<const double> z, double margin) {
  WeightedEstimate e = mean_estimate(z);
  e.value = margin;
  return e;
}

}  // namespace

const char* to_string(Integrator kind) { return kind == Integrator::strang ? "strang" : "rk4"; }

Integrator integrator_from_string(const std::string& s) {
  if (s == "strang") return Integrator::strang;
  if (s == "rk4") return Integrator::rk4;
  throw ValidationError("unknown integrator '" + s + "' (expected strang|rk4)");
}

double DtPolicy::step_at(double t) const {
  if (!adaptive) return dt;
  return std::min(dt, c * std::pow(kQuarterPi - std::abs(t), K));
}

void DtPolicy::validate() const {
  require(dt > 0.0, "dt_policy: dt must be > 0");
  if (adaptive) {
    require(c > 0.0 && c < 1.0, "dt_policy: adaptive constant c must lie in (0,1)");
    require(K >= 1.0, "dt_policy: adaptive exponent K must be >= 1");
  }
}

int FlowConfig::state_modes() const {
  if (projector == Projector::sharp) return N;
  const int d = params.d;
  return static_cast<int>(std::ceil((8.0 * N + d) / 4.0)) - 1;
}

void FlowConfig::validate() const {
  require(N >= 0, "flow: N must be >= 0");
  require(oversample >= 1, "flow: oversample must be >= 1");
  require(stride >= 1, "flow: stride must be >= 1");
  require(tolerance >= 0.0, "flow: tolerance must be >= 0");
  require(params.p > 1.0, "flow: p must be > 1");
  dt_policy.validate();
}

int Trajectory::find_time(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-13) return static_cast<int>(k);
  return -1;
}

SpectralField linear_propagate(const SpectralField& field, double dt) {
  SpectralField out = field;
  for (int n = 0; n <= field.N(); ++n) out.coeffs(n) *= std::polar(1.0, -eigenvalue_sq(n, field.d) * dt);
  return out;
}

Flow::Flow(FlowConfig config)
    : cfg_((config.validate(), config)),
      basis_(BasisSpec{cfg_.params.d, cfg_.state_modes(), cfg_.oversample * (cfg_.state_modes() + 1)}) {
  const int n = cfg_.state_modes();
  mult_ = projector_multipliers(cfg_.params.d, n, cfg_.N, cfg_.projector);
  lambda_sq_.resize(n + 1);
  for (int k = 0; k <= n; ++k) lambda_sq_(k) = eigenvalue_sq(k, cfg_.params.d);
}

CVector Flow::nonlinear_term(const CVector& c, double t) const {
  const int n = static_cast<int>(mult_.size());
  CVector out = CVector::Zero(n);
  if (cfg_.coupling == 0.0) return out;
  const CVector s = (c.head(n).array() * mult_.array().cast<cplx>()).matrix();
  CVector vt;
  basis_.to_weighted(s, vt);
  const double pm1 = cfg_.params.p - 1.0;
  const RVector& rho = basis_.rho();
  for (int i = 0; i < vt.size(); ++i) {
    const double mag = rho(i) * std::abs(vt(i));
    vt(i) *= pm1 == 1.0 ? mag : std::pow(mag, pm1);
  }
  basis_.from_weighted(vt, out, n);
  const double factor = cfg_.coupling * std::pow(std::cos(2.0 * t), -cfg_.params.alpha);
  out.array() *= (factor * mult_.array()).cast<cplx>();
  return out;
}

CVector Flow::rhs(const CVector& c, double t) const {
  const int n = static_cast<int>(mult_.size());
  CVector lin = (c.head(n).array() * lambda_sq_.array().cast<cplx>()).matrix();
  return -kI * (lin + nonlinear_term(c, t));
}

CVector Flow::strang(const CVector& c, double t, double dt) const {
  const int n = static_cast<int>(mult_.size());
  CVector half(n);
  for (int k = 0; k < n; ++k) half(k) = std::polar(1.0, -0.5 * lambda_sq_(k) * dt);
  CVector x = c.cwiseProduct(half);
  const CVector k1 = -kI * nonlinear_term(x, t);
  const CVector k2 = -kI * nonlinear_term(x + 0.5 * dt * k1, t + 0.5 * dt);
  const CVector k3 = -kI * nonlinear_term(x + 0.5 * dt * k2, t + 0.5 * dt);
  const CVector k4 = -kI * nonlinear_term(x + dt * k3, t + dt);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return x.cwiseProduct(half);
}

CVector Flow::rk4(const CVector& c, double t, double dt) const {
  const CVector k1 = rhs(c, t);
  const CVector k2 = rhs(c + 0.5 * dt * k1, t + 0.5 * dt);
  const CVector k3 = rhs(c + 0.5 * dt * k2, t + 0.5 * dt);
  const CVector k4 = rhs(c + dt * k3, t + dt);
  return c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SpectralField Flow::step_once(const SpectralField& u, double t, double dt) const {
  require(u.d == cfg_.params.d, "step: dimension mismatch");
  require(std::abs(t) < kQuarterPi && std::abs(t + dt) < kQuarterPi,
          "step: interval must stay inside (-pi/4, pi/4)");
  const int n = static_cast<int>(mult_.size());
  SpectralField out{u.d, padded(u.coeffs, n)};
  const CVector low = out.coeffs.head(n);
  out.coeffs.head(n) = cfg_.integrator == Integrator::strang ? strang(low, t, dt) : rk4(low, t, dt);
  for (int k = n; k < out.coeffs.size(); ++k) out.coeffs(k) *= std::polar(1.0, -eigenvalue_sq(k, u.d) * dt);
  return out;
}

SpectralField Flow::controlled_step(const SpectralField& u, double t, double dt, int depth) const {
  if (depth > 40) throw NumericalError("step: error control could not meet tolerance at t=" + std::to_string(t));
  const SpectralField full = step_once(u, t, dt);
  const SpectralField halves = step_once(step_once(u, t, 0.5 * dt), t + 0.5 * dt, 0.5 * dt);
  const double err = (full.coeffs - halves.coeffs).norm() / std::max(halves.coeffs.norm(), 1e-300);
  if (err <= cfg_.tolerance) return halves;
  return controlled_step(controlled_step(u, t, 0.5 * dt, depth + 1), t + 0.5 * dt, 0.5 * dt, depth + 1);
}

SpectralField Flow::step(const SpectralField& u, double t, double dt) const {
  if (cfg_.tolerance > 0.0) return controlled_step(u, t, dt, 0);
  return step_once(u, t, dt);
}

void Flow::guard(const SpectralField& u, double mass0, double t) const {
  const double mass = u.coeffs.squaredNorm();
  if (!std::isfinite(mass))
    throw NumericalError("blow-up guard: non-finite state at t=" + std::to_string(t));
  if (mass0 > 0.0 && std::abs(mass - mass0) > cfg_.mass_guard * mass0)
    throw NumericalError("blow-up guard: relative mass drift " + std::to_string(std::abs(mass - mass0) / mass0) +
                         " exceeds " + std::to_string(cfg_.mass_guard) + " at t=" + std::to_string(t));
  if (sobolev_norm(u, 1.0) > cfg_.norm_ceiling)
    throw NumericalError("blow-up guard: H^1 norm above ceiling at t=" + std::to_string(t));
}

template <class OnStep>
void Flow::integrate(SpectralField& u, double t0, double t1, std::span<const double> checkpoints,
                     OnStep&& on_step) const {
  require(std::abs(t0) < kQuarterPi && std::abs(t1) < kQuarterPi, "evolve: times must lie in (-pi/4, pi/4)");
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> stops;
  for (double c : checkpoints)
    if (dir * (c - t0) > 0.0 && dir * (t1 - c) > 0.0) stops.push_back(c);
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return dir * a < dir * b; });
  stops.push_back(t1);

  const double mass0 = u.coeffs.squaredNorm();
  double t = t0;
  long steps = 0;
  for (double stop : stops) {
    while (dir * (stop - t) > 0.0) {
      double dt = cfg_.dt_policy.step_at(t);
      const double remaining = std::abs(stop - t);
      const bool landing = remaining <= dt * (1.0 + 1e-9);
      if (landing) dt = remaining;
      u = step(u, t, dir * dt);
      t = landing ? stop : t + dir * dt;
      ++steps;
      guard(u, mass0, t);
      on_step(u, t, steps, landing);
    }
  }
}

Trajectory Flow::evolve(const SpectralField& u0, double t0, double t1,
                        std::span<const double> checkpoints) const {
  Trajectory traj;
  auto record = [&](const SpectralField& u, double t, long steps) {
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.diagnostics.push_back(diagnose(u, t, steps));
  };
  SpectralField u = u0;
  record(u, t0, 0);
  integrate(u, t0, t1, checkpoints, [&](const SpectralField& v, double t, long steps, bool landed) {
    traj.total_steps = steps;
    if (landed || steps % cfg_.stride == 0) record(v, t, steps);
  });
  return traj;
}

std::vector<SpectralField> Flow::advance(const SpectralField& u0, double t0,
                                         std::span<const double> times) const {
  std::vector<SpectralField> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  SpectralField u = u0;
  std::size_t next = 0;
  while (next < times.size() && times[next] == t0) {
    out.push_back(u);
    ++next;
  }
  if (next == times.size()) return out;
  integrate(u, t0, times.back(), times, [&](const SpectralField& v, double t, long, bool landed) {
    if (landed && next < times.size() && std::abs(t - times[next]) <= 1e-15) {
      out.push_back(v);
      ++next;
    }
  });
  if (out.size() != times.size()) throw ValidationError("advance: requested times are not monotone");
  return out;
}

double Flow::lpp1_norm(const SpectralField& u) const {
  const int n = static_cast<int>(mult_.size());
  const CVector c = padded(u.coeffs, n).head(n);
  const CVector s = (c.array() * mult_.array().cast<cplx>()).matrix();
  CVector vt;
  basis_.to_weighted(s, vt);
  return basis_.weighted_lp_norm(vt, cfg_.params.p + 1.0);
}

double Flow::energy(const SpectralField& u, double t) const {
  double kinetic = 0.0;
  for (int k = 0; k <= u.N(); ++k) kinetic += eigenvalue_sq(k, u.d) * std::norm(u.coeffs(k));
  const double q = cfg_.params.p + 1.0;
  const double pot = cfg_.coupling * std::pow(std::cos(2.0 * t), -cfg_.params.alpha) / q *
                     std::pow(lpp1_norm(u), q);
  return 0.5 * kinetic + pot;
}

double Flow::energy_rate(const SpectralField& u, double t) const {
  const int d = cfg_.params.d;
  const double p = cfg_.params.p;
  return cfg_.coupling * (4.0 - d * (p - 1.0)) / (p + 1.0) * std::tan(2.0 * t) *
         std::pow(std::cos(2.0 * t), -cfg_.params.alpha) * std::pow(lpp1_norm(u), p + 1.0);
}

double Flow::aliasing_residual(const SpectralField& u, double t) const {
  const int n = static_cast<int>(mult_.size());
  const CVector c = padded(u.coeffs, n).head(n);
  const CVector s = (c.array() * mult_.array().cast<cplx>()).matrix();
  CVector vt;
  basis_.to_weighted(s, vt);
  const double pm1 = cfg_.params.p - 1.0;
  for (int i = 0; i < vt.size(); ++i) vt(i) *= std::pow(basis_.rho()(i) * std::abs(vt(i)), pm1);
  const double total = vt.squaredNorm();
  if (total == 0.0) return 0.0;
  CVector captured;
  basis_.from_weighted(vt, captured, n);
  (void)t;
  return std::max(0.0, (total - captured.squaredNorm()) / total);
}

Diagnostics Flow::diagnose(const SpectralField& u, double t, long steps) const {
  Diagnostics dg;
  dg.t = t;
  dg.mass = u.coeffs.squaredNorm();
  dg.energy = energy(u, t);
  dg.lpp1 = lpp1_norm(u);
  dg.sobolev = sobolev_norm(u, cfg_.diag_sigma);
  dg.steps = steps;
  dg.aliasing = aliasing_residual(u, t);
  return dg;
}

SpectralField nonlinear_rhs(const SpectralField& field, double t, const Flow& flow) {
  const int n = static_cast<int>(flow.multipliers().size());
  return SpectralField{field.d, flow.rhs(padded(field.coeffs, n), t)};
}

double energy(const SpectralField& field, double t, const Flow& flow) { return flow.energy(field, t); }

EnergyResidual energy_derivative_residual(const Trajectory& tr, const Flow& flow) {
  require(tr.states.size() >= 3, "energy_derivative_residual: need >= 3 stored states");
  const std::size_t n = tr.states.size();
  std::vector<double> e(n);
  for (std::size_t k = 0; k < n; ++k) e[k] = flow.energy(tr.states[k], tr.times[k]);
  EnergyResidual r;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double fd = (e[k + 1] - e[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
    const double formula = flow.energy_rate(tr.states[k], tr.times[k]);
    r.max_absolute = std::max(r.max_absolute, std::abs(fd - formula));
    r.scale = std::max(r.scale, std::abs(formula));
  }
  for (std::size_t k = 0; k < n; ++k)
    r.drift = std::max(r.drift, std::abs(e[k] - e[0]) / std::max(std::abs(e[0]), 1e-300));
  r.max_relative = r.scale > 0.0 ? r.max_absolute / r.scale : r.max_absolute;
  return r;
}

std::vector<std::vector<SpectralField>> propagate_ensemble(const std::vector<SpectralField>& samples,
                                                           double t0, std::span<const double> times,
                                                           const Flow& flow, int threads) {
  std::vector<std::vector<SpectralField>> out(times.size(), std::vector<SpectralField>(samples.size()));
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    auto states = flow.advance(samples[i], t0, times);
    for (std::size_t k = 0; k < times.size(); ++k) out[k][i] = std::move(states[k]);
  });
  return out;
}

std::vector<LiouvilleStat> liouville_test(const Ensemble& ensemble,
                                          const std::vector<SpectralField>& propagated,
                                          const std::vector<NamedFunctional>& functionals) {
  require(propagated.size() == ensemble.size(), "liouville_test: propagated ensemble size mismatch");
  const std::size_t n = ensemble.size();
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h0 = sobolev_norm(ensemble.samples[i], 1.0);
    const double h1 = sobolev_norm(propagated[i], 1.0);
    weight[i] = std::exp(-0.5 * (h1 * h1 - h0 * h0));
  }
  auto stat_of = [](const WeightedEstimate& e) {
    if (e.std_error > 0.0) return std::abs(e.value) / e.std_error;
    return e.value == 0.0 ? 0.0 : kInf;
  };
  std::vector<LiouvilleStat> out;
  for (const auto& fn : functionals) {
    std::vector<double> dw(n), du(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f0 = fn.f(ensemble.samples[i]);
      const double f1 = fn.f(propagated[i]);
      dw[i] = f1 * weight[i] - f0;
      du[i] = f1 - f0;
    }
    const WeightedEstimate ew = mean_estimate(dw), eu = mean_estimate(du);
    out.push_back({fn.name, stat_of(ew), ew.value, ew.std_error, stat_of(eu)});
  }
  return out;
}

std::vector<LiouvilleStat> liouville_test(const Ensemble& ensemble, double t,
                                          const std::vector<NamedFunctional>& functionals,
                                          const Flow& flow, int threads) {
  const double times[] = {t};
  auto prop = propagate_ensemble(ensemble.samples, 0.0, times, flow, threads);
  return liouville_test(ensemble, prop[0], functionals);
}

bool QuasiInvariance::holds(double k) const {
  return margin_ii >= -k * se_ii && margin_iii >= -k * se_iii;
}

QuasiInvariance quasi_invariance_check(const Ensemble& ensemble,
                                       const std::vector<SpectralField>& propagated,
                                       const FieldPredicate& predicate, double t, const Flow& flow) {
  require(propagated.size() == ensemble.size(), "quasi_invariance_check: size mismatch");
  const auto& prm = flow.config().params;
  const double q = prm.p + 1.0;
  const std::size_t n = ensemble.size();
  std::vector<double> x(n, 0.0), y(n, 0.0), naive(n, 0.0);
  const double ct = std::pow(std::cos(2.0 * t), -prm.alpha);
  for (std::size_t i = 0; i < n; ++i) {
    const SpectralField& u = ensemble.samples[i];
    if (!predicate(u)) continue;
    const SpectralField& v = propagated[i];
    const double v0 = std::pow(flow.lpp1_norm(u), q) / q;
    const double vt = ct * std::pow(flow.lpp1_norm(v), q) / q;
    const double h0 = sobolev_norm(u, 1.0), h1 = sobolev_norm(v, 1.0);
    y[i] = std::exp(-v0);
    x[i] = std::exp(-vt - 0.5 * (h1 * h1 - h0 * h0));
    naive[i] = std::exp(-vt);
  }
  QuasiInvariance r;
  r.t = t;
  r.exponent = std::pow(std::cos(2.0 * t), prm.alpha);
  r.lhs = mean_estimate(x);
  r.nu0 = mean_estimate(y);
  r.naive = mean_estimate(naive);
  const double c = r.exponent;
  const double X = r.lhs.value, Y = r.nu0.value;
  const double gy = Y > 0.0 ? c * std::pow(Y, c - 1.0) : 0.0;
  const double gx = X > 0.0 ? c * std::pow(X, c - 1.0) : 0.0;
  std::vector<double> z2(n), z3(n);
  for (std::size_t i = 0; i < n; ++i) {
    z2[i] = gy * y[i] - x[i];
    z3[i] = gx * x[i] - y[i];
  }
  r.margin_ii = std::pow(Y, c) - X;
  r.se_ii = paired_margin(z2, r.margin_ii).std_error;
  r.margin_iii = std::pow(X, c) - Y;
  r.se_iii = paired_margin(z3, r.margin_iii).std_error;
  return r;
}

QuasiInvariance quasi_invariance_check(const Ensemble& ensemble, const FieldPredicate& predicate,
                                       double t, const Flow& flow, int threads) {
  const double times[] = {t};
  auto prop = propagate_ensemble(ensemble.samples, 0.0, times, flow, threads);
  return quasi_invariance_check(ensemble, prop[0], predicate, t, flow);
}

TailCheck lpp1_tail_check(const Ensemble& ensemble, const std::vector<SpectralField>& propagated,
                          double lambda, const Flow& flow) {
  require(propagated.size() == ensemble.size(), "lpp1_tail_check: size mismatch");
  require(lambda >= 0.0, "lpp1_tail_check: lambda must be >= 0");
  const double q = flow.config().params.p + 1.0;
  std::vector<double> x(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const bool in_set = flow.lpp1_norm(propagated[i]) > lambda;
    x[i] = in_set ? std::exp(-std::pow(flow.lpp1_norm(ensemble.samples[i]), q) / q) : 0.0;
  }
  TailCheck r;
  r.lambda = lambda;
  r.estimate = mean_estimate(x);
  r.bound = std::exp(-std::pow(lambda, q) / q);
  return r;
}

TailCheck lpp1_tail_check(const Ensemble& ensemble, double t, double lambda, const Flow& flow,
                          int threads) {
  const double times[] = {t};
  auto prop = propagate_ensemble(ensemble.samples, 0.0, times, flow, threads);
  return lpp1_tail_check(ensemble, prop[0], lambda, flow);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx, b = std::log(y[i]) - my;
    sxy += a * b;
    sxx += a * a;
  }
  return sxy / sxx;
}

TruncationStudy truncation_convergence(const SpectralField& u0_ref, const std::vector<int>& N_list,
                                       double t, const FlowConfig& base, double sigma, int threads) {
  require(!N_list.empty(), "truncation_convergence: empty N list");
  const int n_ref = u0_ref.N();
  const int n_max = *std::max_element(N_list.begin(), N_list.end());
  require(n_ref >= 4 * n_max, "truncation_convergence: need N_ref >= 4 max(N_list)");

  TruncationStudy st;
  st.N_ref = n_ref;
  st.t = t;
  st.sigma = sigma;
  st.N_list = N_list;
  const double times[] = {t};

  FlowConfig ref_cfg = base;
  ref_cfg.N = n_ref;
  const Flow ref_flow(ref_cfg);
  const SpectralField v_ref = ref_flow.advance(u0_ref, 0.0, times)[0];

  st.errors.resize(N_list.size());
  st.lambda.resize(N_list.size());
  parallel_for(N_list.size(), threads, [&](std::size_t k) {
    FlowConfig cfg = base;
    cfg.N = N_list[k];
    const Flow flow(cfg);
    const SpectralField u0{u0_ref.d, u0_ref.coeffs.head(N_list[k] + 1)};
    const SpectralField v = flow.advance(u0, 0.0, times)[0];
    const int len = static_cast<int>(std::max(v_ref.coeffs.size(), v.coeffs.size()));
    const SpectralField diff{u0_ref.d, padded(v_ref.coeffs, len) - padded(v.coeffs, len)};
    st.errors[k] = sobolev_norm(diff, sigma);
    st.lambda[k] = std::sqrt(eigenvalue_sq(N_list[k], u0_ref.d));
  });
  st.slope = loglog_slope(st.lambda, st.errors);
  return st;
}

XSigmaNorm xsigma_norm(const SpectralField& field, const SpectralBasis& basis, const XSigmaPairs& pairs,
                       double sigma, int time_nodes) {
  require(time_nodes >= 1, "xsigma_norm: need >= 1 time node");
  const double h = 2.0 * std::numbers::pi / time_nodes;
  std::vector<double> f1(time_nodes), f2(time_nodes);
  for (int k = 0; k < time_nodes; ++k) {
    const double s = -std::numbers::pi + k * h;
    const SpectralField g = linear_propagate(field, s);
    f1[k] = std::pow(wsp_norm(g, basis, sigma, pairs.r2), pairs.q2) * h;
    f2[k] = std::pow(lp_norm(g, basis, pairs.b), pairs.a) * h;
  }
  XSigmaNorm out;
  out.first = std::pow(pairwise_sum(f1), 1.0 / pairs.q2);
  out.second = std::pow(pairwise_sum(f2), 1.0 / pairs.a);
  return out;
}

}  // namespace nlsim
