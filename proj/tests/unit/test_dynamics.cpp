#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nlsim/dynamics.hpp"
#include "nlsim/errors.hpp"
#include "nlsim/measures.hpp"
#include "oracles.hpp"

using namespace nlsim;

namespace {

const cplx kI(0.0, 1.0);

// int (1-u)^m e^{-2u} du / pi, the quartic overlap of the d=2 modes e0, e1
// with m factors of e1.
double quartic_overlap(int m) {
  double acc = 0.0, binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    acc += (k % 2 ? -1.0 : 1.0) * binom * std::tgamma(k + 1.0) / std::pow(2.0, k + 1);
    binom = binom * (m - k) / (k + 1);
  }
  return acc / std::numbers::pi;
}

// Galerkin system for d=2, N=1, p=3 written out by hand.
Eigen::Vector2cd two_mode_rhs(const Eigen::Vector2cd& c) {
  Eigen::Vector2cd out;
  for (int k = 0; k < 2; ++k) {
    cplx nl = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int e = 0; e < 2; ++e) nl += c(a) * std::conj(c(b)) * c(e) * quartic_overlap(a + b + e + k);
    out(k) = -kI * ((4.0 * k + 2.0) * c(k) + nl);
  }
  return out;
}

Eigen::Vector2cd two_mode_solve(Eigen::Vector2cd c, double t, int steps) {
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = two_mode_rhs(c);
    const auto k2 = two_mode_rhs(c + 0.5 * h * k1);
    const auto k3 = two_mode_rhs(c + 0.5 * h * k2);
    const auto k4 = two_mode_rhs(c + h * k3);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return c;
}

FlowConfig config(int d, double p, int N, Integrator integ, double dt) {
  FlowConfig cfg;
  cfg.params = ModelParams::make(d, p);
  cfg.N = N;
  cfg.integrator = integ;
  cfg.dt_policy.dt = dt;
  return cfg;
}

SpectralField random_field(oracle::Gen& gen, int d, int N, double decay, double scale = 1.0) {
  SpectralField f{d, gen.coeffs(N, d, decay)};
  f.coeffs *= scale;
  return f;
}

double distance(const SpectralField& a, const SpectralField& b) { return (a.coeffs - b.coeffs).norm(); }

}  // namespace

TEST_CASE("linear propagation") {
  oracle::Gen gen(3);
  const auto u = random_field(gen, 3, 20, 2.0);
  CHECK(distance(linear_propagate(u, 0.0), u) == 0.0);
  // Spectrum 4n+d: period pi/2 up to the global phase e^{-i d t}.
  const auto v = linear_propagate(u, std::numbers::pi / 2);
  CHECK((v.coeffs - std::polar(1.0, -3.0 * std::numbers::pi / 2) * u.coeffs).norm() < 1e-13);
  const auto w = linear_propagate(u, 0.37);
  for (int n = 0; n <= u.N(); ++n) CHECK(std::abs(w.coeffs(n)) == doctest::Approx(std::abs(u.coeffs(n))));
  CHECK(distance(linear_propagate(linear_propagate(u, 0.2), 0.15), linear_propagate(u, 0.35)) < 1e-14);
}

TEST_CASE("two-mode cubic Galerkin system") {
  CHECK(quartic_overlap(0) == doctest::Approx(0.5 / std::numbers::pi));
  CHECK(quartic_overlap(3) == doctest::Approx(0.125 / std::numbers::pi));
  CHECK(quartic_overlap(4) == doctest::Approx(0.25 / std::numbers::pi));

  // The overlaps carry an extra e^{-u}; 32 nodes resolve it to rounding.
  auto cfg = config(2, 3.0, 1, Integrator::rk4, 1e-3);
  cfg.oversample = 16;
  const Flow flow(cfg);
  const cplx c0(0.8, -0.3), c1(-0.4, 0.9);
  const SpectralField u0{2, (CVector(2) << c0, c1).finished()};

  // Nonlinear term alone against the hand-expanded overlaps.
  const CVector nl = flow.nonlinear_term(u0.coeffs, 0.0);
  const Eigen::Vector2cd ref = two_mode_rhs(Eigen::Vector2cd(c0, c1));
  for (int k = 0; k < 2; ++k) {
    const cplx expected = kI * ref(k) - (4.0 * k + 2.0) * u0.coeffs(k);
    CHECK(std::abs(nl(k) - expected) < 1e-12);
  }

  const double times[] = {0.3, 0.6};
  const auto states = flow.advance(u0, 0.0, times);
  for (int j = 0; j < 2; ++j) {
    const auto c = two_mode_solve(Eigen::Vector2cd(c0, c1), times[j], 20000);
    CHECK(std::abs(states[j].coeffs(0) - c(0)) < 1e-10);
    CHECK(std::abs(states[j].coeffs(1) - c(1)) < 1e-10);
  }
}

TEST_CASE("zero coupling reduces to the linear flow") {
  oracle::Gen gen(5);
  const double dt = 1e-3;
  const int steps = 500;
  for (auto integ : {Integrator::strang, Integrator::rk4}) {
    auto cfg = config(2, 2.0, 24, integ, dt);
    cfg.coupling = 0.0;
    cfg.mass_guard = 1.0;
    const Flow flow(cfg);
    const auto u = random_field(gen, 2, 24, 1.5);
    const double times[] = {steps * dt};
    const auto v = flow.advance(u, 0.0, times)[0];
    if (integ == Integrator::strang) {
      CHECK(distance(v, linear_propagate(u, steps * dt)) < 1e-12);
      continue;
    }
    // RK4 applies its stability polynomial to each linear mode.
    SpectralField expected = u;
    for (int n = 0; n <= u.N(); ++n) {
      const cplx z = -kI * eigenvalue_sq(n, 2) * dt;
      expected.coeffs(n) *= std::pow(1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0, steps);
    }
    CHECK(distance(v, expected) < 1e-11);
  }
}

TEST_CASE("gauge covariance") {
  oracle::Gen gen(9);
  const Flow flow(config(3, 1.8, 16, Integrator::strang, 2e-3));
  for (int rep = 0; rep < 5; ++rep) {
    const auto u = random_field(gen, 3, 16, 1.5);
    const double theta = gen.uniform(0.0, 2.0 * std::numbers::pi);
    SpectralField ur = u;
    ur.coeffs *= std::polar(1.0, theta);
    const double times[] = {0.3};
    const auto a = flow.advance(u, 0.0, times)[0];
    const auto b = flow.advance(ur, 0.0, times)[0];
    CHECK((b.coeffs - std::polar(1.0, theta) * a.coeffs).norm() < 1e-12 * a.coeffs.norm());
  }
}

TEST_CASE("mass conservation") {
  oracle::Gen gen(11);
  for (auto proj : {Projector::sharp, Projector::smooth}) {
    auto cfg = config(2, 2.0, 32, Integrator::strang, 1e-3);
    cfg.projector = proj;
    const Flow flow(cfg);
    const auto u = random_field(gen, 2, 32, 2.0);
    const auto tr = flow.evolve(u, 0.0, 0.5);
    const double m0 = tr.diagnostics.front().mass;
    double drift = 0.0;
    for (const auto& dg : tr.diagnostics) drift = std::max(drift, std::abs(dg.mass - m0) / m0);
    CHECK(drift < 1e-8);
  }
}

TEST_CASE("integrator orders") {
  oracle::Gen gen(13);
  const auto u = random_field(gen, 2, 16, 2.0);
  const double times[] = {0.4};
  const auto ref = Flow(config(2, 2.0, 16, Integrator::rk4, 1.25e-4)).advance(u, 0.0, times)[0];
  for (auto [integ, order] : {std::pair{Integrator::strang, 2.0}, std::pair{Integrator::rk4, 4.0}}) {
    std::vector<double> dts{8e-3, 4e-3, 2e-3}, errs;
    for (double dt : dts) {
      auto cfg = config(2, 2.0, 16, integ, dt);
      cfg.mass_guard = 1.0;
      errs.push_back(distance(Flow(cfg).advance(u, 0.0, times)[0], ref));
    }
    const double slope = loglog_slope(dts, errs);
    CAPTURE(to_string(integ));
    CAPTURE(slope);
    CHECK(slope == doctest::Approx(order).epsilon(0.15));
  }
}

TEST_CASE("semigroup and reversibility") {
  oracle::Gen gen(17);
  const Flow flow(config(2, 2.0, 16, Integrator::rk4, 2.5e-4));
  const auto u = random_field(gen, 2, 16, 2.0);
  const double mid[] = {0.2}, end[] = {0.45};
  const auto direct = flow.advance(u, 0.0, end)[0];
  const auto split = flow.advance(flow.advance(u, 0.0, mid)[0], 0.2, end)[0];
  CHECK(distance(direct, split) < 1e-12);
  const double origin[] = {0.0};
  const auto back = flow.advance(direct, 0.45, origin)[0];
  CHECK(distance(back, u) < 1e-9);
  CHECK_THROWS_AS(flow.advance(u, 0.0, std::vector<double>{0.3, 0.1}), ValidationError);
}

TEST_CASE("checkpoints are hit exactly") {
  const Flow flow(config(2, 2.0, 8, Integrator::strang, 3e-3));
  const double cps[] = {0.1, 0.25};
  const auto tr = flow.evolve(SpectralField::mode(2, 8, 0), 0.0, 0.4, cps);
  CHECK(tr.find_time(0.1) >= 0);
  CHECK(tr.find_time(0.25) >= 0);
  CHECK(tr.times.back() == 0.4);
  CHECK(tr.find_time(0.33333) == -1);
  const auto bw = flow.evolve(SpectralField::mode(2, 8, 0), 0.0, -0.3, cps);
  CHECK(bw.times.back() == -0.3);
  CHECK(bw.find_time(0.1) == -1);
}

TEST_CASE("energy examples") {
  const Flow flow(config(2, 2.0, 8, Integrator::strang, 1e-3));
  CHECK(flow.energy(SpectralField::zero(2, 8), 0.3) == 0.0);
  auto cfg = config(4, 1.5, 8, Integrator::strang, 1e-3);
  cfg.coupling = 0.0;
  CHECK(Flow(cfg).energy(SpectralField::mode(4, 8, 0), 0.2) == doctest::Approx(2.0));
  // |e0|_{L^3}^3 = (2/3) pi^{-1/2} in d=2.
  const double l3 = std::pow(2.0 * std::numbers::pi / 3.0, 1.0 / 3.0) / std::sqrt(std::numbers::pi);
  CHECK(flow.lpp1_norm(SpectralField::mode(2, 8, 0)) == doctest::Approx(l3).epsilon(1e-12));
  const double t = 0.3;
  const double expected = 1.0 + std::pow(std::cos(2 * t), -1.0) / 3.0 * std::pow(l3, 3.0);
  CHECK(flow.energy(SpectralField::mode(2, 8, 0), t) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("energy identity along the truncated flow") {
  const auto cfg = config(2, 2.0, 32, Integrator::strang, 1e-3);
  const Flow flow(cfg);
  const auto u = sample_field(32, 2, 101);
  const auto tr = flow.evolve(u, 0.0, 0.5);
  const auto res = energy_derivative_residual(tr, flow);
  CAPTURE(res.max_relative);
  CHECK(res.max_relative < 1e-3);
  CHECK(res.drift > 1e-3);  // E_N is genuinely time dependent when alpha != 0

  // The opposite sign of the rate is far from the finite differences.
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < tr.states.size(); k += 25) {
    const double fd = (flow.energy(tr.states[k + 1], tr.times[k + 1]) - flow.energy(tr.states[k - 1], tr.times[k - 1])) /
                      (tr.times[k + 1] - tr.times[k - 1]);
    const double flipped = -flow.energy_rate(tr.states[k], tr.times[k]);
    worst = std::max(worst, std::abs(fd - flipped) / std::max(res.scale, 1e-300));
  }
  CHECK(worst > 0.5);
}

TEST_CASE("energy is conserved at alpha = 0") {
  // Strang keeps E_N to O(dt^2); 6.25e-5 brings the drift over [0, T_2] under 1e-8.
  const Flow flow(config(2, 3.0, 32, Integrator::strang, 6.25e-5));
  const auto tr = flow.evolve(sample_field(32, 2, 7), 0.0, horizon(2));
  const auto res = energy_derivative_residual(tr, flow);
  CAPTURE(res.drift);
  CHECK(res.drift < 1e-8);
  CHECK(flow.energy_rate(tr.states.back(), horizon(2)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("energy identity at a fine step") {
  const Flow flow(config(2, 2.0, 32, Integrator::strang, 1e-4));
  const auto u = sample_field(32, 2, 101);
  const auto tr = flow.evolve(u, 0.0, 0.5);
  const auto res = energy_derivative_residual(tr, flow);
  CAPTURE(res.max_relative);
  CHECK(res.max_relative < 1e-4);
  // tan(0) = 0: the centered difference around t = 0 vanishes to O(dt^2).
  const auto sym = flow.evolve(flow.advance(u, 0.0, std::vector<double>{-1e-4})[0], -1e-4, 1e-4);
  const double fd = (flow.energy(sym.states.back(), 1e-4) - flow.energy(sym.states.front(), -1e-4)) / 2e-4;
  CHECK(std::abs(fd) < 1e-5 * flow.energy(u, 0.0));
}

TEST_CASE("adaptive step policy") {
  DtPolicy pol;
  pol.adaptive = true;
  pol.dt = 1e-2;
  pol.c = 0.1;
  pol.K = 2.0;
  CHECK(pol.step_at(0.0) == 1e-2);
  const double gap = 0.05;
  CHECK(pol.step_at(std::numbers::pi / 4 - gap) == doctest::Approx(0.1 * gap * gap));
  CHECK(pol.step_at(-(std::numbers::pi / 4 - gap)) == doctest::Approx(0.1 * gap * gap));
  pol.c = 1.5;
  CHECK_THROWS_AS(pol.validate(), ValidationError);
  CHECK_THROWS_AS(integrator_from_string("euler"), ValidationError);
  CHECK(integrator_from_string("rk4") == Integrator::rk4);
}

TEST_CASE("step refuses to cross the singular time") {
  const Flow flow(config(2, 2.0, 8, Integrator::strang, 1e-3));
  const auto u = SpectralField::mode(2, 8, 0);
  CHECK_THROWS_AS(flow.step(u, 0.78, 0.01), ValidationError);
  CHECK_THROWS_AS(flow.evolve(u, 0.0, 0.8), ValidationError);
}

TEST_CASE("blow-up guard") {
  auto cfg = config(2, 2.0, 8, Integrator::strang, 1e-3);
  cfg.mass_guard = 1e-6;
  cfg.dt_policy.dt = 0.2;  // unstable explicit substep on large data
  const Flow flow(cfg);
  SpectralField u = SpectralField::mode(2, 8, 0);
  u.coeffs *= 200.0;
  CHECK_THROWS_AS(flow.evolve(u, 0.0, 0.6), NumericalError);
}

TEST_CASE("step doubling error control") {
  oracle::Gen gen(19);
  const auto u = random_field(gen, 2, 16, 2.0, 2.0);
  const double times[] = {0.4};
  const auto ref = Flow(config(2, 2.0, 16, Integrator::rk4, 1e-4)).advance(u, 0.0, times)[0];
  auto loose = config(2, 2.0, 16, Integrator::strang, 0.05);
  const double err_loose = distance(Flow(loose).advance(u, 0.0, times)[0], ref);
  loose.tolerance = 1e-9;
  const double err_tight = distance(Flow(loose).advance(u, 0.0, times)[0], ref);
  CHECK(err_tight < 1e-6);
  CHECK(err_tight < 0.01 * err_loose);
}

TEST_CASE("aliasing residual") {
  const Flow flow(config(2, 3.0, 8, Integrator::strang, 1e-3));
  CHECK(flow.aliasing_residual(SpectralField::zero(2, 8), 0.0) == 0.0);
  // |e0|^2 e0 has components on every mode, so a sharp cut loses some of it.
  const double a = flow.aliasing_residual(SpectralField::mode(2, 8, 0), 0.0);
  CHECK(a > 0.0);
  CHECK(a < 1.0);
}

TEST_CASE("xsigma norm") {
  const auto pairs = xsigma_pairs(2.0, 2, 0.2);
  const SpectralBasis basis(BasisSpec::oversampled(2, 24));
  for (int n : {0, 3, 10}) {
    const auto e = SpectralField::mode(2, 24, n);
    const auto x = xsigma_norm(e, basis, pairs, 0.2, 32);
    const double two_pi = 2.0 * std::numbers::pi;
    CHECK(x.first == doctest::Approx(std::pow(two_pi, 1.0 / pairs.q2) * wsp_norm(e, basis, 0.2, pairs.r2)));
    CHECK(x.second == doctest::Approx(std::pow(two_pi, 1.0 / pairs.a) * lp_norm(e, basis, pairs.b)));
  }
  oracle::Gen gen(23);
  const auto u = random_field(gen, 2, 24, 2.0);
  const int nodes = 48;
  const auto x0 = xsigma_norm(u, basis, pairs, 0.2, nodes);
  const auto x1 = xsigma_norm(linear_propagate(u, 5 * 2.0 * std::numbers::pi / nodes), basis, pairs, 0.2, nodes);
  CHECK(x1.first == doctest::Approx(x0.first).epsilon(1e-12));
  CHECK(x1.second == doctest::Approx(x0.second).epsilon(1e-12));
  SpectralField u2 = u;
  u2.coeffs *= 3.0;
  CHECK(xsigma_norm(u2, basis, pairs, 0.2, nodes).total() == doctest::Approx(3.0 * x0.total()).epsilon(1e-12));
}

TEST_CASE("statistical checks are exact at t = 0") {
  const auto ens = sample_mu(8, 2, 500, 31);
  const Flow flow(config(2, 2.0, 8, Integrator::strang, 1e-3));
  const std::vector<NamedFunctional> fns{
      {"mass", [](const SpectralField& u) { return u.coeffs.squaredNorm(); }},
      {"c0", [](const SpectralField& u) { return std::norm(u.coeffs(0)); }}};
  for (const auto& s : liouville_test(ens, ens.samples, fns)) {
    CHECK(s.statistic == 0.0);
    CHECK(s.mean_diff == 0.0);
  }
  const auto all = [](const SpectralField&) { return true; };
  const auto q = quasi_invariance_check(ens, ens.samples, all, 0.0, flow);
  CHECK(q.exponent == 1.0);
  CHECK(q.lhs.value == doctest::Approx(q.nu0.value).epsilon(1e-15));
  CHECK(q.holds(0.0));

  const auto t0 = lpp1_tail_check(ens, ens.samples, 0.0, flow);
  CHECK(t0.bound == 1.0);
  CHECK(t0.estimate.value == doctest::Approx(q.nu0.value).epsilon(1e-15));
  CHECK(t0.holds(0.0));
  const auto big = lpp1_tail_check(ens, ens.samples, 1e3, flow);
  CHECK(big.estimate.value == 0.0);
  CHECK(big.holds(0.0));
  CHECK_THROWS_AS(lpp1_tail_check(ens, ens.samples, -1.0, flow), ValidationError);
}

TEST_CASE("liouville identity under the flow") {
  // Small ensemble, short time: the reweighted statistic stays O(1).
  const auto ens = sample_mu(8, 2, 2000, 37);
  const Flow flow(config(2, 2.0, 4, Integrator::strang, 5e-3));
  const std::vector<NamedFunctional> fns{
      {"c0", [](const SpectralField& u) { return std::norm(u.coeffs(0)); }},
      {"h-1", [](const SpectralField& u) { return sobolev_norm(u, -1.0); }},
      // Modes above the truncation only rotate.
      {"high", [](const SpectralField& u) { return std::norm(u.coeffs(6)); }}};
  const auto stats = liouville_test(ens, 0.2, fns, flow);
  for (const auto& s : stats) {
    CAPTURE(s.name);
    CHECK(s.statistic < 3.0);
  }
}

TEST_CASE("truncation convergence of the linear flow") {
  auto base = config(2, 2.0, 8, Integrator::strang, 1e-3);
  base.coupling = 0.0;
  const auto u = sample_field(64, 2, 43);
  const std::vector<int> Ns{4, 8, 16};
  const auto st = truncation_convergence(u, Ns, 0.3, base, 0.0);
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    SpectralField tail = u;
    tail.coeffs.head(Ns[k] + 1).setZero();
    CHECK(st.errors[k] == doctest::Approx(sobolev_norm(tail, 0.0)).epsilon(1e-10));
    CHECK(st.lambda[k] == doctest::Approx(std::sqrt(4.0 * Ns[k] + 2.0)));
  }
  CHECK(std::isfinite(st.slope));
  CHECK_THROWS_AS(truncation_convergence(u, {32}, 0.3, base, 0.0), ValidationError);
}

TEST_CASE("loglog slope") {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 12, 48, 192};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0, -1.0}, std::vector<double>{1.0, 2.0}), ValidationError);
}
