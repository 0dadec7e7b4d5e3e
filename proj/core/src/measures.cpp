#include "nlsim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsim/parallel.hpp"
#include "nlsim/rng.hpp"

namespace nlsim {

SpectralField sample_field(int N, int d, std::uint64_t seed) {
  const CounterRng rng(seed);
  SpectralField f = SpectralField::zero(d, N);
  for (int n = 0; n <= N; ++n)
    f.coeffs(n) = rng.complex_gaussian(0, static_cast<std::uint64_t>(n)) /
                  std::sqrt(eigenvalue_sq(n, d));
  return f;
}

Ensemble sample_mu(int N, int d, std::size_t count, std::uint64_t seed, int threads) {
  require(count >= 1, "sample_mu: count must be >= 1");
  require(N >= 0 && d >= 2, "sample_mu: needs N >= 0, d >= 2");
  Ensemble e;
  e.d = d;
  e.N = N;
  e.seed = seed;
  e.created = creation_timestamp();
  e.seeds.resize(count);
  e.samples.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    e.seeds[i] = sample_seed(seed, i);
    e.samples[i] = sample_field(N, d, e.seeds[i]);
  });
  return e;
}

WeightedEstimate mean_estimate(std::span<const double> xs) {
  WeightedEstimate est;
  est.count = xs.size();
  if (xs.empty()) {
    est.degenerate = true;
    return est;
  }
  const double n = static_cast<double>(xs.size());
  est.value = pairwise_sum(xs) / n;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - est.value) * (xs[i] - est.value);
  const double var = xs.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  est.std_error = std::sqrt(var / n);
  est.degenerate = var == 0.0;
  return est;
}

double potential(const SpectralField& u, double t, const PotentialSpec& spec,
                 const SpectralBasis& basis) {
  require(std::abs(t) < std::numbers::pi / 4, "potential: |t| must be < pi/4");
  const int K = std::min(spec.K, u.N());
  SpectralField head{u.d, u.coeffs.head(std::min(u.N(), basis.N()) + 1)};
  const SpectralField s = project(head, std::min(K, head.N()), spec.projector);
  const double q = spec.params.p + 1.0;
  const double norm = lp_norm(s, basis, q);
  return std::pow(std::cos(2.0 * t), -spec.params.alpha) / q * std::pow(norm, q);
}

double gibbs_weight(const SpectralField& u, double t, const PotentialSpec& spec,
                    const SpectralBasis& basis) {
  return std::exp(-potential(u, t, spec, basis));
}

WeightedEstimate estimate_nu(const Ensemble& ensemble, const FieldPredicate& predicate, double t,
                             const PotentialSpec& spec, const SpectralBasis& basis, int threads) {
  std::vector<double> xs(ensemble.size());
  parallel_for(ensemble.size(), threads, [&](std::size_t i) {
    const auto& u = ensemble.samples[i];
    xs[i] = predicate(u) ? gibbs_weight(u, t, spec, basis) : 0.0;
  });
  return mean_estimate(xs);
}

TailFit tail_fit(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 1000)
    throw ValidationError("tail_fit: insufficient samples (" + std::to_string(n) + " < 1000)");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end(), std::greater<>());
  const std::size_t k_max = std::max<std::size_t>(10, n / 20);
  // Regress lambda^2 on log P: lambda^2 = a + b log P, so c = -1/b.
  std::vector<double> xs, ys;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double lam = v[k - 1];
    if (!(lam > 0.0) || !std::isfinite(lam)) continue;
    xs.push_back(std::log((k - 0.5) / static_cast<double>(n)));
    ys.push_back(lam * lam);
  }
  if (xs.size() < 10) throw ValidationError("tail_fit: insufficient tail mass");
  const double m = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0 || sxy == 0.0) throw ValidationError("tail_fit: degenerate tail");
  const double b = sxy / sxx;
  const double a = my - b * mx;
  TailFit fit;
  fit.c = -1.0 / b;
  fit.C = std::exp(a * fit.c);
  fit.points = xs.size();
  return fit;
}

TailFit tail_fit(const Ensemble& ensemble, const FieldFunctional& functional, int threads) {
  std::vector<double> xs(ensemble.size());
  parallel_for(ensemble.size(), threads,
               [&](std::size_t i) { xs[i] = functional(ensemble.samples[i]); });
  return tail_fit(xs);
}

double complex_gaussian_moment(double p) {
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * p + 1.0);
}

PzMoment pz_moment_check(const CVector& coeffs, double p0, std::size_t count, std::uint64_t seed) {
  require(p0 >= 2.0, "pz_moment_check: p0 must be >= 2");
  require(count >= 1, "pz_moment_check: count must be >= 1");
  const double cn = coeffs.norm();
  require(cn > 0.0, "pz_moment_check: zero coefficient vector");
  std::vector<double> xs(count);
  for (std::size_t s = 0; s < count; ++s) {
    const CounterRng rng(sample_seed(seed, s));
    cplx acc = 0.0;
    for (int n = 0; n < coeffs.size(); ++n)
      acc += coeffs(n) * rng.complex_gaussian(0, static_cast<std::uint64_t>(n));
    xs[s] = std::pow(std::abs(acc) / cn, p0);
  }
  PzMoment out;
  out.p0 = p0;
  out.ratio = std::pow(pairwise_sum(xs) / static_cast<double>(count), 1.0 / p0) / std::sqrt(p0);
  out.exact = std::pow(complex_gaussian_moment(p0), 1.0 / p0) / std::sqrt(p0);
  return out;
}

}  // namespace nlsim
