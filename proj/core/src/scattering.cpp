#include "nlsim/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsim/lens.hpp"

namespace nlsim {

namespace {

const cplx kI(0.0, 1.0);

SpectralField difference(const SpectralField& a, const SpectralField& b) {
  const int n = static_cast<int>(std::max(a.coeffs.size(), b.coeffs.size()));
  SpectralField out = SpectralField::zero(a.d, n - 1);
  out.coeffs.head(a.coeffs.size()) += a.coeffs;
  out.coeffs.head(b.coeffs.size()) -= b.coeffs;
  return out;
}

// -i e^{isH} G(v, s), with G the projected nonlinear term of the flow.
SpectralField duhamel_integrand(const SpectralField& v, double s, double elapsed, const Flow& flow) {
  const int n = static_cast<int>(flow.multipliers().size());
  CVector c = CVector::Zero(std::max<Eigen::Index>(n, v.coeffs.size()));
  c.head(v.coeffs.size()) = v.coeffs;
  SpectralField g{v.d, CVector::Zero(c.size())};
  g.coeffs.head(n) = -kI * flow.nonlinear_term(c.head(n), s);
  return linear_propagate(g, -elapsed);
}

// Composite Simpson over f[0..k] with uniform step h (3/8 rule on the tail when k is odd).
CVector simpson(const std::vector<CVector>& f, double h) {
  const std::size_t k = f.size() - 1;
  CVector acc = CVector::Zero(f[0].size());
  if (k == 0) return acc;
  if (k == 1) return 0.5 * h * (f[0] + f[1]);
  const std::size_t even_end = (k % 2 == 0) ? k : k - 3;
  for (std::size_t j = 0; j + 2 <= even_end; j += 2) acc += (h / 3.0) * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
  if (even_end != k) {
    const std::size_t j = even_end;
    acc += (3.0 * h / 8.0) * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
  }
  return acc;
}

SpectralField state_at(const Trajectory& tr, double t, const Flow& flow) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < tr.times.size(); ++j)
    if (std::abs(tr.times[j] - t) < std::abs(tr.times[best] - t)) best = j;
  const double gap = t - tr.times[best];
  if (std::abs(gap) <= 1e-15) return tr.states[best];
  return flow.step(tr.states[best], tr.times[best], gap);
}

}  // namespace

std::vector<SpectralField> interaction_part(const Trajectory& tr, const SpectralField& u0) {
  require(!tr.times.empty(), "interaction_part: empty trajectory");
  std::vector<SpectralField> w;
  w.reserve(tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k)
    w.push_back(difference(tr.states[k], linear_propagate(u0, tr.times[k] - tr.times[0])));
  return w;
}

std::vector<SpectralField> profile(const Trajectory& tr, const SpectralField& u0) {
  auto w = interaction_part(tr, u0);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = linear_propagate(w[k], -(tr.times[k] - tr.times[0]));
  return w;
}

SpectralField duhamel_profile(const Trajectory& tr, std::size_t k, const Flow& flow) {
  require(k < tr.states.size(), "duhamel_profile: index beyond trajectory");
  if (k == 0) return SpectralField::zero(tr.states[0].d, tr.states[0].N());
  const double h = tr.times[1] - tr.times[0];
  for (std::size_t j = 1; j <= k; ++j)
    require(std::abs((tr.times[j] - tr.times[j - 1]) - h) <= 1e-9 * std::abs(h),
            "duhamel_profile: stored states must be uniformly spaced");
  std::vector<CVector> f;
  f.reserve(k + 1);
  for (std::size_t j = 0; j <= k; ++j)
    f.push_back(duhamel_integrand(tr.states[j], tr.times[j], tr.times[j] - tr.times[0], flow).coeffs);
  return SpectralField{tr.states[0].d, simpson(f, h)};
}

SpectralField born_approximation(const SpectralField& u0, double t1, const Flow& flow, int intervals) {
  require(intervals >= 2 && intervals % 2 == 0, "born_approximation: intervals must be even and >= 2");
  const double h = t1 / intervals;
  std::vector<CVector> f;
  f.reserve(intervals + 1);
  for (int j = 0; j <= intervals; ++j) {
    const double s = j * h;
    f.push_back(duhamel_integrand(linear_propagate(u0, s), s, s, flow).coeffs);
  }
  return SpectralField{u0.d, simpson(f, h)};
}

ScatterReport extract_u_plus(const Trajectory& tr, const SpectralField& u0, const ModelParams& params,
                             std::span<const int> horizons, double sigma_fit, bool override_guard) {
  if (!params.scattering_expected() && !override_guard)
    throw ValidationError("extract_u_plus: no scattering is asserted for p <= 1 + 2/d (p=" +
                          std::to_string(params.p) + ", d=" + std::to_string(params.d) +
                          "); pass the override flag to run anyway");
  require(horizons.size() >= 4, "extract_u_plus: need at least four horizons");
  require(horizons.back() >= 4, "extract_u_plus: last horizon must satisfy j >= 4");
  const auto z = profile(tr, u0);

  ScatterReport rep;
  rep.sigma = sigma_fit;
  rep.norms = {"H^-" + std::to_string(sigma_fit)};
  std::vector<SpectralField> zj;
  for (int j : horizons) {
    const int k = tr.find_time(horizon(j));
    if (k < 0) throw ValidationError("extract_u_plus: trajectory lacks horizon T_" + std::to_string(j));
    rep.horizons.push_back(j);
    rep.times.push_back(tr.times[k]);
    zj.push_back(z[k]);
  }
  rep.u_plus = zj.back();
  for (const auto& x : zj) rep.residuals.push_back(sobolev_norm(difference(x, rep.u_plus), -sigma_fit));
  for (std::size_t k = 0; k + 1 < zj.size(); ++k)
    rep.cauchy.push_back(sobolev_norm(difference(zj[k + 1], zj[k]), -sigma_fit));
  rep.cauchy_decreasing = true;
  for (std::size_t k = 1; k < rep.cauchy.size(); ++k)
    if (!(rep.cauchy[k] < rep.cauchy[k - 1])) rep.cauchy_decreasing = false;

  // Slope over the last three horizons before the final one.
  const std::size_t m = zj.size();
  std::vector<double> x, y;
  for (std::size_t k = m - 4; k < m - 1; ++k) {
    x.push_back(std::numbers::pi / 4 - rep.times[k]);
    y.push_back(rep.residuals[k]);
  }
  const bool positive = std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
  rep.delta_fit = positive ? loglog_slope(x, y) : 0.0;
  return rep;
}

GrowthTable growth_track(const Trajectory& tr, const SpectralField& u0, const Flow& flow,
                         std::span<const int> horizons, double sigma, int time_nodes) {
  const auto& prm = flow.config().params;
  const XSigmaPairs pairs = xsigma_pairs(prm.p, prm.d, sigma);
  const auto w = interaction_part(tr, u0);
  GrowthTable table;
  for (int j : horizons) {
    require(j >= 1, "growth_track: horizons must satisfy j >= 1");
    const int k = tr.find_time(horizon(j));
    if (k < 0) throw ValidationError("growth_track: trajectory lacks horizon T_" + std::to_string(j));
    GrowthRow row;
    row.j = j;
    row.t = tr.times[k];
    const double gap = std::numbers::pi / 4 - std::abs(row.t);
    const double lg = std::sqrt(std::abs(std::log(gap)));
    row.xsigma = xsigma_norm(tr.states[k], flow.basis(), pairs, sigma, time_nodes).total();
    row.ratio_x = row.xsigma / (std::pow(gap, -0.5 * prm.alpha) * lg);
    row.lpp1_w = lp_norm(w[k], flow.basis(), prm.p + 1.0);
    row.ratio_w = row.lpp1_w / lg;
    table.rows.push_back(row);
  }
  auto bounded = [&](auto get) {
    if (table.rows.empty()) return true;
    std::vector<double> r;
    for (const auto& row : table.rows) r.push_back(get(row));
    const double last = r.back();
    std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
    double median = r[r.size() / 2];
    if (r.size() % 2 == 0) {
      const double lower = *std::max_element(r.begin(), r.begin() + r.size() / 2);
      median = 0.5 * (median + lower);
    }
    return last <= 2.0 * median;
  };
  table.bounded_x = bounded([](const GrowthRow& r) { return r.ratio_x; });
  table.bounded_w = bounded([](const GrowthRow& r) { return r.ratio_w; });
  return table;
}

DecayTable nls_scattering_residual(const Trajectory& tr, const SpectralField& u0, const SpectralField& u_plus,
                                   std::span<const double> s_list, const Flow& flow, double sigma) {
  require(!tr.times.empty(), "nls_scattering_residual: empty trajectory");
  DecayTable out;
  const double t_max = *std::max_element(tr.times.begin(), tr.times.end());
  for (double s : s_list) {
    const double t = time_map(s);
    if (t > t_max + 1e-14)
      throw ValidationError("nls_scattering_residual: s=" + std::to_string(s) + " beyond trajectory");
    // e^{-is Delta} u(s) = e^{it(s)H} L u(s) = e^{it(s)H} v(t(s)).
    const SpectralField v = state_at(tr, t, flow);
    const SpectralField back = linear_propagate(v, -(t - tr.times[0]));
    const SpectralField z = difference(back, u0);
    out.s.push_back(s);
    out.t.push_back(t);
    out.residuals.push_back(sobolev_norm(difference(z, u_plus), -sigma));
  }
  out.monotone = true;
  for (std::size_t k = 1; k < out.residuals.size(); ++k)
    if (out.residuals[k] > out.residuals[k - 1]) out.monotone = false;
  std::vector<double> x, y;
  for (std::size_t k = out.s.size() >= 3 ? out.s.size() - 3 : 0; k < out.s.size(); ++k) {
    if (out.s[k] > 0.0 && out.residuals[k] > 0.0) {
      x.push_back(out.s[k]);
      y.push_back(out.residuals[k]);
    }
  }
  out.kappa_fit = x.size() >= 2 ? -loglog_slope(x, y) : 0.0;
  return out;
}

}  // namespace nlsim
