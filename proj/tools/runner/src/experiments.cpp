#include "nlsim/runner/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlsim/dynamics.hpp"
#include "nlsim/errors.hpp"
#include "nlsim/lens.hpp"
#include "nlsim/measures.hpp"
#include "nlsim/parallel.hpp"
#include "nlsim/rng.hpp"
#include "nlsim/scattering.hpp"
#include "nlsim/theory_params.hpp"
#include "quadrature_rules.hpp"

namespace nlsim::runner {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json coeffs_json(const SpectralField& f) {
  json a = json::array();
  for (int n = 0; n <= f.N(); ++n) a.push_back({f.coeffs(n).real(), f.coeffs(n).imag()});
  return a;
}

// Ensembles written by the CLI must not embed wall-clock time.
std::string reproducible_timestamp() {
  return std::getenv("SOURCE_DATE_EPOCH") ? creation_timestamp() : "1970-01-01T00:00:00Z";
}

Ensemble ensemble_for(const ExperimentConfig& cfg, int threads) {
  if (!cfg.ensemble.empty()) {
    Ensemble e = read_ensemble(cfg.ensemble);
    require(e.d == cfg.d && e.N == cfg.N, "ensemble file does not match d and N of the config");
    return e;
  }
  Ensemble e = sample_mu(cfg.N, cfg.d, cfg.count, *cfg.seed, threads);
  e.created = reproducible_timestamp();
  return e;
}

SpectralField initial_field(const ExperimentConfig& cfg, std::uint64_t seed) {
  SpectralField u = sample_field(cfg.N, cfg.d, seed);
  u.coeffs *= cfg.amplitude;
  return u;
}

std::vector<double> horizon_times(int last) {
  std::vector<double> ts;
  for (int j = 1; j <= last; ++j) ts.push_back(horizon(j));
  return ts;
}

std::string fmt(double x) { return format_double(x); }

RunOutcome finish(const ExperimentConfig& cfg, std::vector<Check> checks, json results,
                  std::vector<std::filesystem::path> files, bool write = true) {
  RunOutcome out;
  out.artifact = make_artifact(cfg, checks, std::move(results));
  if (write) {
    const auto path = cfg.output(cfg.kind + ".json");
    write_json(path, out.artifact);
    files.insert(files.begin(), path);
  }
  out.files = std::move(files);
  std::ostringstream s;
  s << cfg.kind << " config_hash=" << cfg.hash() << "\n";
  for (const auto& c : checks)
    s << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << fmt(c.value) << " (" << c.relation << " "
      << fmt(c.tolerance) << ")\n";
  for (const auto& f : out.files) s << "  wrote " << f.string() << "\n";
  out.summary = s.str();
  if (!all_pass(checks)) {
    std::string names;
    for (const auto& c : checks)
      if (!c.pass) names += (names.empty() ? "" : ", ") + c.name;
    out.failure = cfg.kind + ": failed checks: " + names;
  }
  return out;
}

RunOutcome run_params(const ExperimentConfig& cfg) {
  const auto m = cfg.model();
  const double sigma = cfg.sigma.value_or(0.5 * m.sigma_max);
  const auto xp = xsigma_pairs(m.p, m.d, sigma);
  json r;
  r["d"] = m.d;
  r["p"] = m.p;
  r["alpha"] = m.alpha;
  r["sigma_max"] = m.sigma_max;
  r["p_max"] = m.p_max;
  r["case_one"] = m.case_one;
  r["mass_subcritical"] = m.mass_subcritical();
  r["scattering_expected"] = m.scattering_expected();
  r["default_scatter_sigma"] = m.default_scatter_sigma();
  r["sigma"] = sigma;
  r["xsigma_pairs"] = {{"case_one", xp.case_one}, {"q2", xp.q2},   {"r2", xp.r2},
                       {"a", xp.a},               {"b", xp.b},     {"contraction_ok", xp.contraction_ok}};
  r["inferred_threshold"] = {{"value", m.d > 2 ? inferred_threshold(m.d) : kInf}, {"label", "inferred"}};
  r["lwp_constants"] = {{"K", 1.0}, {"L", 2.0 * (m.p - 1.0)}, {"label", "heuristic"}};
  r["regularity_threshold_r_p_plus_1"] = regularity_threshold(m.p + 1.0, m.d);
  json hz = json::array();
  for (int j = 1; j <= cfg.j_max; ++j) hz.push_back({{"j", j}, {"T", horizon(j)}});
  r["horizons"] = hz;
  if (m.d >= 8) r["P_at_p_max"] = poly_P(m.d, m.p_max);
  for (auto& [k, v] : r.items())
    if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
  for (auto& v : r["inferred_threshold"])
    if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
  auto out = finish(cfg, {}, r, {}, cfg.out_dir.has_value());
  out.summary = out.artifact.dump(2) + "\n";
  return out;
}

RunOutcome run_sample(const ExperimentConfig& cfg, int threads) {
  const Ensemble e = ensemble_for(cfg, threads);
  const auto path = cfg.output("ensemble.bin");
  write_ensemble(path.string(), e);
  std::vector<double> mass(e.size());
  parallel_for(e.size(), threads, [&](std::size_t i) { mass[i] = e.samples[i].coeffs.squaredNorm(); });
  const auto est = mean_estimate(mass);
  double expected = 0.0;
  for (int n = 0; n <= cfg.N; ++n) expected += 2.0 / eigenvalue_sq(n, cfg.d);
  const double z = std::abs(est.value - expected) / est.std_error;
  json r{{"count", e.size()},
         {"ensemble", path.filename().string()},
         {"created", e.created},
         {"mean_mass", est.value},
         {"mean_mass_std_error", est.std_error},
         {"expected_mass", expected}};
  return finish(cfg, {check_le("mean_mass_z", z, cfg.k_sigma)}, r, {path});
}

RunOutcome run_evolve(const ExperimentConfig& cfg) {
  const Flow flow(cfg.flow());
  const auto u0 = initial_field(cfg, *cfg.seed);
  const auto tr = flow.evolve(u0, 0.0, cfg.t);
  CsvWriter csv(cfg.output("diagnostics.csv"), cfg,
                {"t", "mass", "E_N", "lpp1_norm", "H_sigma_norm", "steps", "aliasing"});
  double mass_drift = 0.0;
  const double m0 = tr.diagnostics.front().mass;
  for (const auto& dg : tr.diagnostics) {
    csv.row({dg.t, dg.mass, dg.energy, dg.lpp1, dg.sobolev, static_cast<double>(dg.steps), dg.aliasing});
    mass_drift = std::max(mass_drift, std::abs(dg.mass - m0) / std::max(m0, 1e-300));
  }
  csv.write();
  const double rate = std::abs(cfg.t) > 0 ? mass_drift / std::abs(cfg.t) : 0.0;
  json r{{"t_final", tr.times.back()},
         {"total_steps", tr.total_steps},
         {"mass_drift", mass_drift},
         {"u_final", coeffs_json(tr.states.back())}};
  if (tr.states.size() >= 3 && m0 > 0.0) {
    const auto er = energy_derivative_residual(tr, flow);
    r["energy_identity"] = {{"max_relative", er.max_relative}, {"drift", er.drift}};
  }
  return finish(cfg, {check_le("mass_drift_per_unit_time", rate, 1e-8)}, r,
                {cfg.output("diagnostics.csv")});
}

std::vector<NamedFunctional> liouville_functionals() {
  return {{"re_c0", [](const SpectralField& u) { return u.coeffs(0).real(); }},
          {"h_minus1_norm_sq",
           [](const SpectralField& u) {
             double acc = 0.0;
             for (int n = 0; n <= u.N(); ++n) acc += std::norm(u.coeffs(n)) / eigenvalue_sq(n, u.d);
             return acc;
           }},
          {"exp_neg_mass", [](const SpectralField& u) { return std::exp(-u.coeffs.squaredNorm()); }}};
}

RunOutcome run_invariance(const ExperimentConfig& cfg, int threads) {
  const Flow flow(cfg.flow());
  const Ensemble e = ensemble_for(cfg, threads);
  const auto stats = liouville_test(e, cfg.t, liouville_functionals(), flow, threads);
  std::vector<Check> checks;
  json rows = json::array();
  for (const auto& s : stats) {
    checks.push_back(check_le("liouville_" + s.name, s.statistic, cfg.liouville_max));
    rows.push_back({{"name", s.name},
                    {"statistic", s.statistic},
                    {"mean_diff", s.mean_diff},
                    {"std_error", s.std_error},
                    {"unweighted", s.unweighted}});
  }
  return finish(cfg, checks, {{"count", e.size()}, {"functionals", rows}}, {});
}

json estimate_json(const WeightedEstimate& w) {
  return {{"value", w.value}, {"std_error", w.std_error}, {"count", w.count}, {"degenerate", w.degenerate}};
}

RunOutcome run_quasi(const ExperimentConfig& cfg, int threads) {
  const Flow flow(cfg.flow());
  const Ensemble e = ensemble_for(cfg, threads);
  const double q = cfg.p + 1.0, ball = cfg.ball;
  const SpectralBasis& basis = flow.basis();
  const FieldPredicate in_ball = [&](const SpectralField& u) {
    const SpectralField head{u.d, u.coeffs.head(std::min(u.N(), basis.N()) + 1)};
    return lp_norm(head, basis, q) <= ball;
  };
  const auto qi = quasi_invariance_check(e, in_ball, cfg.t, flow, threads);
  const auto q0 = quasi_invariance_check(e, in_ball, 0.0, flow, threads);
  std::vector<Check> checks{
      check_ge("margin_ii", qi.margin_ii + cfg.k_sigma * qi.se_ii, 0.0),
      check_ge("margin_iii", qi.margin_iii + cfg.k_sigma * qi.se_iii, 0.0),
      check_le("t0_equality", std::abs(q0.lhs.value - q0.nu0.value), 0.0)};
  json r{{"count", e.size()},
         {"exponent", qi.exponent},
         {"lhs", estimate_json(qi.lhs)},
         {"nu0", estimate_json(qi.nu0)},
         {"naive", estimate_json(qi.naive)},
         {"margin_ii", qi.margin_ii},
         {"se_ii", qi.se_ii},
         {"margin_iii", qi.margin_iii},
         {"se_iii", qi.se_iii}};
  return finish(cfg, checks, r, {});
}

RunOutcome run_tails(const ExperimentConfig& cfg, int threads) {
  const Flow flow(cfg.flow());
  const Ensemble e = ensemble_for(cfg, threads);
  const double r = cfg.p + 1.0;
  const double s_r = regularity_threshold(r, cfg.d);
  const double sigma = cfg.sigma.value_or(0.5 * s_r);
  require(sigma < s_r, "tails: sigma must lie below the regularity threshold " + fmt(s_r));
  const SpectralBasis basis(BasisSpec::oversampled(cfg.d, cfg.N, 8));
  const auto fit = tail_fit(e, [&](const SpectralField& u) { return wsp_norm(u, basis, sigma, r); }, threads);
  const auto tail = lpp1_tail_check(e, cfg.t, cfg.lambda, flow, threads);
  std::vector<Check> checks{
      check_ge("wsr_tail_c_positive", fit.c, std::numeric_limits<double>::min()),
      check_le("lpp1_tail_excess", tail.estimate.value - tail.bound - cfg.k_sigma * tail.estimate.std_error, 0.0)};
  json rr{{"count", e.size()},
          {"wsr", {{"sigma", sigma}, {"r", r}, {"threshold", s_r}, {"C", fit.C}, {"c", fit.c}, {"points", fit.points}}},
          {"lpp1", {{"lambda", tail.lambda}, {"estimate", estimate_json(tail.estimate)}, {"bound", tail.bound}}}};
  return finish(cfg, checks, rr, {});
}

RunOutcome run_lens_check(const ExperimentConfig& cfg) {
  const int d = cfg.d, N = cfg.N;
  std::vector<Check> checks;
  json r;
  json warnings = json::array();
  double guarded_loss = 0.0;

  double rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = -0.78 + 1.56 * i / 999.0;
    rt = std::max(rt, std::abs(time_map(time_map_inv(t)) - t));
  }
  checks.push_back(check_le("time_map_round_trip", rt, 1e-14));

  // e^{is Delta} of the ground state against its closed form.
  const SpectralBasis gbasis(BasisSpec::oversampled(d, 8));
  const auto e0 = SpectralField::mode(d, 8, 0);
  const double c0 = std::pow(kPi, -0.25 * d);
  double gauss = 0.0, unitary = 0.0;
  for (double s : cfg.s_list) {
    const double g = 1.0 + 4.0 * s * s;
    const auto fp = free_propagate(e0, s, gbasis, lens_scale(s));
    for (int i = 0; i < gbasis.M(); ++i) {
      const double y = fp.scale * gbasis.grid().nodes[i];
      const double expected = std::pow(g, -0.25 * d) * c0 * std::exp(-y * y / (2.0 * g));
      gauss = std::max(gauss, std::abs(std::abs(fp.value(gbasis, i)) - expected));
    }
    unitary = std::max(unitary, std::abs(fp.l2_norm() - 1.0));
  }
  checks.push_back(check_le("free_gaussian_closed_form", gauss, 1e-8));

  // Deterministic test field: c_n = 1/lambda_n on modes 0..N/2.
  SpectralField u0 = SpectralField::zero(d, N);
  for (int n = 0; n <= N / 2; ++n) u0.coeffs(n) = 1.0 / std::sqrt(eigenvalue_sq(n, d));
  const double norm0 = u0.l2_norm();
  const auto u0_fn = radial_function(u0);

  const SpectralBasis target(BasisSpec::oversampled(d, N));
  // The forward chirp needs more modes as s grows; double until it is resolved.
  constexpr int kMaxRoundTripModes = 640;
  constexpr double kRoundTripTol = 1e-8;
  std::vector<SpectralBasis> wide;
  wide.emplace_back(BasisSpec::oversampled(d, std::max(160, 4 * N)));
  double intertwining = 0.0, round_trip = 0.0;
  json per_s = json::array();
  for (double s : cfg.s_list) {
    const HankelFreeEvolution free([&](double x) { return u0_fn(x).value(); }, d, s);
    const auto v = lens_forward([&](double y) { return ScaledValue{free(y), 0.0}; }, s, d, target);
    const auto expected = linear_propagate(u0, time_map(s));
    const double res = (v.field.coeffs - expected.coeffs).norm();
    intertwining = std::max(intertwining, res);

    // Loss is a squared-norm fraction and bottoms out at rounding, so the
    // amplitude error of the round trip itself decides when to stop.
    std::size_t w = 0;
    LensResult fwd, back;
    double err = 0.0;
    CVector padded;
    for (;;) {
      fwd = lens_forward(u0, s, wide[w]);
      back = lens_inverse(fwd.field, fwd.t, wide[w]);
      padded = CVector::Zero(wide[w].N() + 1);
      padded.head(N + 1) = u0.coeffs;
      err = (back.field.coeffs - padded).norm() / norm0;
      if ((fwd.truncation_loss <= cfg.loss_threshold && err <= 0.1 * kRoundTripTol) ||
          2 * wide[w].N() > kMaxRoundTripModes)
        break;
      if (++w == wide.size()) wide.emplace_back(BasisSpec::oversampled(d, 2 * wide[w - 1].N()));
    }
    const int big = wide[w].N();
    round_trip = std::max(round_trip, err);
    unitary = std::max(unitary, std::abs(fwd.l2_norm() - norm0) / norm0);

    const double loss = std::max({v.truncation_loss, fwd.truncation_loss, back.truncation_loss});
    guarded_loss = std::max(guarded_loss, loss);
    if (loss > cfg.loss_threshold)
      warnings.push_back("truncation loss " + fmt(loss) + " above threshold at s=" + fmt(s));
    per_s.push_back({{"s", s},
                     {"t", time_map(s)},
                     {"intertwining", res},
                     {"round_trip", err},
                     {"round_trip_modes", big},
                     {"loss_intertwining", v.truncation_loss},
                     {"loss_forward", fwd.truncation_loss},
                     {"loss_inverse", back.truncation_loss}});
  }
  if (guarded_loss > cfg.loss_threshold && !cfg.override_loss_guard)
    throw NumericalError("lens-check: truncation loss " + fmt(guarded_loss) + " exceeds " + fmt(cfg.loss_threshold) +
                         "; raise N or pass --override-loss-guard");
  checks.push_back(check_le("intertwining", intertwining, 1e-7));
  checks.push_back(check_le("round_trip", round_trip, kRoundTripTol));
  checks.push_back(check_le("l2_unitarity", unitary, 1e-9));
  r["per_s"] = per_s;
  r["max_truncation_loss"] = guarded_loss;
  r["loss_threshold"] = cfg.loss_threshold;
  r["loss_guard_overridden"] = cfg.override_loss_guard && guarded_loss > cfg.loss_threshold;
  r["warnings"] = warnings;
  return finish(cfg, checks, r, {});
}

RunOutcome run_scatter(const ExperimentConfig& cfg, int threads) {
  const auto m = cfg.model();
  const Flow flow(cfg.flow());
  const double sigma = cfg.sigma.value_or(m.default_scatter_sigma());
  std::vector<int> js;
  for (int j = cfg.j_min; j <= cfg.j_max; ++j) js.push_back(j);
  const auto ts = horizon_times(cfg.j_max);
  std::vector<double> s_list{0.0};
  for (int j = cfg.j_min; j < cfg.j_max; ++j) s_list.push_back(0.5 * std::tan(2.0 * horizon(j)));

  const Ensemble e = ensemble_for(cfg, threads);
  std::vector<ScatterReport> reps(e.size());
  std::vector<DecayTable> decays(e.size());
  parallel_for(e.size(), threads, [&](std::size_t i) {
    SpectralField u0 = e.samples[i];
    u0.coeffs *= cfg.amplitude;
    const auto tr = flow.evolve(u0, 0.0, ts.back(), ts);
    reps[i] = extract_u_plus(tr, u0, m, js, sigma, cfg.override_scattering_guard);
    decays[i] = nls_scattering_residual(tr, u0, reps[i].u_plus, s_list, flow, sigma);
  });

  // Dual formulation on a short uniform Strang run of the first sample.
  FlowConfig dcfg = cfg.flow();
  dcfg.integrator = Integrator::strang;
  dcfg.dt_policy = DtPolicy{};
  dcfg.dt_policy.dt = 1e-3;
  dcfg.tolerance = 0.0;
  dcfg.stride = 1;
  const Flow dflow(dcfg);
  SpectralField d0 = e.samples.front();
  d0.coeffs *= cfg.amplitude;
  const auto dtr = dflow.evolve(d0, 0.0, 0.2);
  const std::size_t k = dtr.states.size() - 1;
  const double duhamel = (duhamel_profile(dtr, k, dflow).coeffs - profile(dtr, d0)[k].coeffs).norm();

  CsvWriter csv(cfg.output("scatter_residuals.csv"), cfg, {"sample", "j", "t", "residual", "cauchy"});
  json samples = json::array();
  std::size_t decreasing = 0, positive = 0, consistent = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& rp = reps[i];
    for (std::size_t q = 0; q < rp.horizons.size(); ++q)
      csv.row({static_cast<double>(i), static_cast<double>(rp.horizons[q]), rp.times[q], rp.residuals[q],
               q < rp.cauchy.size() ? rp.cauchy[q] : std::nan("")});
    decreasing += rp.cauchy_decreasing;
    positive += rp.delta_fit > 0.0;
    const double gap = std::abs(decays[i].kappa_fit - rp.delta_fit);
    consistent += gap < 0.15;
    worst_gap = std::max(worst_gap, gap);
    samples.push_back({{"index", i},
                       {"seed", e.seeds.empty() ? 0 : e.seeds[i]},
                       {"delta_fit", rp.delta_fit},
                       {"kappa_fit", decays[i].kappa_fit},
                       {"cauchy_decreasing", rp.cauchy_decreasing},
                       {"cauchy", rp.cauchy},
                       {"residuals", rp.residuals},
                       {"decay_s", decays[i].s},
                       {"decay_residuals", decays[i].residuals},
                       {"decay_monotone", decays[i].monotone},
                       {"u_plus_norm", rp.u_plus.l2_norm()},
                       {"u_plus", coeffs_json(rp.u_plus)}});
  }
  csv.write();
  const double n = static_cast<double>(reps.size());
  std::vector<Check> checks{check_ge("cauchy_decreasing_fraction", decreasing / n, 1.0),
                            check_ge("delta_positive_fraction", positive / n, 1.0),
                            check_le("duhamel_agreement", duhamel, 1e-5),
                            check_le("kappa_delta_gap_max", worst_gap, 0.15)};
  json r{{"sigma", sigma},
         {"horizons", js},
         {"s_list", s_list},
         {"guard_overridden", cfg.override_scattering_guard && !m.scattering_expected()},
         {"norms", reps.front().norms},
         {"duhamel_residual", duhamel},
         {"counts", {{"samples", reps.size()}, {"cauchy_decreasing", decreasing}, {"delta_positive", positive},
                     {"kappa_consistent", consistent}}},
         {"samples", samples}};
  return finish(cfg, checks, r, {cfg.output("scatter_residuals.csv")});
}

RunOutcome run_growth(const ExperimentConfig& cfg, int threads) {
  const auto m = cfg.model();
  const Flow flow(cfg.flow());
  const double sigma = cfg.sigma.value_or(0.5 * m.sigma_max);
  std::vector<int> js;
  for (int j = 1; j <= cfg.j_max; ++j) js.push_back(j);
  const auto ts = horizon_times(cfg.j_max);
  const Ensemble e = ensemble_for(cfg, threads);
  std::vector<GrowthTable> tabs(e.size());
  parallel_for(e.size(), threads, [&](std::size_t i) {
    SpectralField u0 = e.samples[i];
    u0.coeffs *= cfg.amplitude;
    const auto tr = flow.evolve(u0, 0.0, ts.back(), ts);
    tabs[i] = growth_track(tr, u0, flow, js, sigma);
  });
  CsvWriter csv(cfg.output("growth.csv"), cfg, {"sample", "j", "t", "xsigma", "ratio_x", "lpp1_w", "ratio_w"});
  std::size_t passing = 0;
  json rows = json::array();
  for (std::size_t i = 0; i < tabs.size(); ++i) {
    for (const auto& g : tabs[i].rows)
      csv.row({static_cast<double>(i), static_cast<double>(g.j), g.t, g.xsigma, g.ratio_x, g.lpp1_w, g.ratio_w});
    passing += tabs[i].pass();
    rows.push_back({{"index", i}, {"bounded_x", tabs[i].bounded_x}, {"bounded_w", tabs[i].bounded_w}});
  }
  csv.write();
  json r{{"sigma", sigma}, {"scattering_expected", m.scattering_expected()}, {"samples", rows}};
  return finish(cfg, {check_ge("bounded_fraction", passing / static_cast<double>(tabs.size()), 1.0)}, r,
                {cfg.output("growth.csv")});
}

RunOutcome run_truncation(const ExperimentConfig& cfg, int threads) {
  const double sigma = cfg.diag_sigma();
  const CounterRng rng(*cfg.seed);
  SpectralField u{cfg.d, CVector(cfg.N_ref + 1)};
  const double decay = -0.5 * (cfg.sigma_prime + 1.0 + cfg.decay_excess);
  for (int n = 0; n <= cfg.N_ref; ++n)
    u.coeffs(n) = rng.complex_gaussian(0, static_cast<std::uint64_t>(n)) * std::pow(eigenvalue_sq(n, cfg.d), decay);
  u.coeffs *= cfg.amplitude;
  const auto st = truncation_convergence(u, cfg.N_list, cfg.t, cfg.flow(), sigma, threads);
  CsvWriter csv(cfg.output("truncation.csv"), cfg, {"N", "lambda", "error"});
  for (std::size_t k = 0; k < st.N_list.size(); ++k)
    csv.row({static_cast<double>(st.N_list[k]), st.lambda[k], st.errors[k]});
  csv.write();
  const double bound = -(cfg.sigma_prime - sigma) + 0.2;
  json r{{"sigma", sigma}, {"sigma_prime", cfg.sigma_prime}, {"N_ref", st.N_ref}, {"N_list", st.N_list},
         {"errors", st.errors}, {"slope", st.slope}, {"slope_bound", bound}};
  return finish(cfg, {check_le("truncation_slope", st.slope, bound)}, r, {cfg.output("truncation.csv")});
}

}  // namespace

int criterion_for(const std::string& kind) {
  if (kind == "params") return 8;
  if (kind == "evolve") return 3;
  if (kind == "invariance") return 4;
  if (kind == "quasi") return 5;
  if (kind == "tails") return 6;
  if (kind == "lens-check") return 7;
  if (kind == "scatter" || kind == "growth") return 9;
  if (kind == "truncation") return 10;
  return 0;
}

RunOutcome run(const ExperimentConfig& cfg) {
  cfg.validate();
  const int threads = resolve_threads(cfg.threads);
  const std::string& k = cfg.kind;
  if (k == "params") return run_params(cfg);
  if (k == "sample") return run_sample(cfg, threads);
  if (k == "evolve") return run_evolve(cfg);
  if (k == "invariance") return run_invariance(cfg, threads);
  if (k == "quasi") return run_quasi(cfg, threads);
  if (k == "tails") return run_tails(cfg, threads);
  if (k == "lens-check") return run_lens_check(cfg);
  if (k == "scatter") return run_scatter(cfg, threads);
  if (k == "growth") return run_growth(cfg, threads);
  if (k == "truncation") return run_truncation(cfg, threads);
  if (k == "report") return report(cfg);
  throw ValidationError("unknown kind '" + k + "'");
}

json error_report(const std::string& error_kind, int exit_code, const std::string& message,
                  const std::string& config_hash) {
  return {{"format_version", kFormatVersion},
          {"error", error_kind},
          {"exit_code", exit_code},
          {"message", message},
          {"config_hash", config_hash.empty() ? json(nullptr) : json(config_hash)}};
}

}  // namespace nlsim::runner
