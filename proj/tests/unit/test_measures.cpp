#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "nlsim/errors.hpp"
#include "nlsim/measures.hpp"
#include "oracles.hpp"

using namespace nlsim;

namespace {

// |u|_{L^{p+1}}^{p+1} by a composite Gauss-Legendre rule and the series eigenfunctions.
double lq_power_oracle(const SpectralField& u, double q) {
  static const oracle::Rule rule = oracle::composite_gl(20, 30, 0.0, 10.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double r = rule.x[i];
    std::complex<double> v = 0.0;
    for (int n = 0; n <= u.N(); ++n) v += u.coeffs(n) * oracle::eigenfunction_series(n, u.d, r);
    acc += rule.w[i] * std::pow(std::abs(v), q) * std::pow(r, u.d - 1);
  }
  return oracle::sphere_area(u.d) * acc;
}

// nu_0({|u|_{L^3} <= lam}) for d = 2, p = 2, N = 1 by deterministic quadrature over
// (rho, theta, phi) with |c_0| = rho cos theta, |c_1| = rho sin theta and relative phase phi.
double nu0_ball_oracle(double lam) {
  const double l0 = 2.0, l1 = 6.0;  // lambda_n^2
  const oracle::Rule rr = oracle::composite_gl(20, 20, 0.0, 12.0);
  auto e0 = [](double r) { return std::exp(-0.5 * r * r) / std::sqrt(std::numbers::pi); };
  auto e1 = [](double r) { return (1.0 - r * r) * std::exp(-0.5 * r * r) / std::sqrt(std::numbers::pi); };
  const oracle::Rule th = oracle::gauss_legendre(48, 0.0, std::numbers::pi / 2);
  const int n_phi = 64;
  double total = 0.0;
  for (std::size_t a = 0; a < th.x.size(); ++a) {
    const double c = std::cos(th.x[a]), s = std::sin(th.x[a]);
    double phi_avg = 0.0;
    for (int b = 0; b < n_phi; ++b) {
      const double phi = 2.0 * std::numbers::pi * (b + 0.5) / n_phi;
      double F = 0.0;
      for (std::size_t i = 0; i < rr.x.size(); ++i) {
        const std::complex<double> z = c * e0(rr.x[i]) + s * std::polar(1.0, phi) * e1(rr.x[i]);
        F += rr.w[i] * std::pow(std::abs(z), 3) * rr.x[i];
      }
      F *= 2.0 * std::numbers::pi;
      const double rho_max = lam / std::cbrt(F);
      const oracle::Rule rho = oracle::gauss_legendre(64, 0.0, rho_max);
      double inner = 0.0;
      for (std::size_t k = 0; k < rho.x.size(); ++k) {
        const double p = rho.x[k];
        inner += rho.w[k] * p * (l0 * p * c) * (l1 * p * s) *
                 std::exp(-0.5 * p * p * (l0 * c * c + l1 * s * s)) * std::exp(-p * p * p * F / 3.0);
      }
      phi_avg += inner / n_phi;
    }
    total += th.w[a] * phi_avg;
  }
  return total;
}

}  // namespace

TEST_CASE("sampling statistics") {
  const int N = 8, d = 3;
  const std::size_t count = 100000;
  const Ensemble e = sample_mu(N, d, count, 2024, 2);
  REQUIRE(e.size() == count);
  for (int n = 0; n <= N; ++n) {
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) xs[i] = std::norm(e.samples[i].coeffs(n));
    const auto est = mean_estimate(xs);
    CHECK(std::abs(est.value - 2.0 / (4.0 * n + d)) < 3.0 * est.std_error);
  }
  const double sigma = 0.5;
  std::vector<double> h(count);
  for (std::size_t i = 0; i < count; ++i) h[i] = std::pow(sobolev_norm(e.samples[i], -sigma), 2);
  double exact = 0.0;
  for (int n = 0; n <= N; ++n) exact += 2.0 * std::pow(4.0 * n + d, -1.0 - sigma);
  const auto est = mean_estimate(h);
  CHECK(std::abs(est.value - exact) < 3.0 * est.std_error);
}

TEST_CASE("sampling is deterministic and schedule independent") {
  const Ensemble a = sample_mu(12, 2, 500, 99, 1);
  const Ensemble b = sample_mu(12, 2, 500, 99, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.seeds[i] == b.seeds[i]);
    CHECK((a.samples[i].coeffs - b.samples[i].coeffs).norm() == 0.0);
  }
  // Extending N keeps the lower modes.
  const Ensemble wide = sample_mu(20, 2, 10, 99, 1);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK((wide.samples[i].coeffs.head(13) - a.samples[i].coeffs).norm() == 0.0);
  CHECK(sample_mu(12, 2, 5, 100, 1).samples[0].coeffs != a.samples[0].coeffs);
}

TEST_CASE("gibbs weight") {
  const auto params = ModelParams::make(2, 2.0);
  const int N = 8;
  // |u|^3 is not polynomial in r^2, so Gauss-Laguerre converges only algebraically;
  // 48x oversampling brings the quadrature error to ~1e-6.
  SpectralBasis basis(BasisSpec::oversampled(2, N, 48));
  const PotentialSpec spec{params, N, Projector::sharp};
  CHECK(gibbs_weight(SpectralField::zero(2, N), 0.3, spec, basis) == 1.0);
  oracle::Gen gen(4);
  for (int rep = 0; rep < 10; ++rep) {
    const SpectralField u{2, gen.coeffs(N, 2, 1.0)};
    const double w = gibbs_weight(u, 0.0, spec, basis);
    CHECK(w <= 1.0);
    CHECK(w > 0.0);
    const double ref = std::exp(-lq_power_oracle(u, 3.0) / 3.0);
    CHECK(w == doctest::Approx(ref).epsilon(1e-5));
    CHECK(gibbs_weight(u, 0.5, spec, basis) <= w);
  }
}

TEST_CASE("estimate_nu") {
  const auto params = ModelParams::make(2, 2.0);
  const int N = 6;
  SpectralBasis basis(BasisSpec::oversampled(2, N, 8));
  const PotentialSpec spec{params, N, Projector::sharp};
  const Ensemble e = sample_mu(N, 2, 20000, 5, 2);

  const auto none = estimate_nu(e, [](const SpectralField&) { return false; }, 0.2, spec, basis);
  CHECK(none.value == 0.0);
  CHECK(none.std_error == 0.0);
  CHECK(none.degenerate);

  auto ball = [&](double r) {
    return [&basis, r](const SpectralField& u) { return lp_norm(u, basis, 3.0) <= r; };
  };
  for (double t : {0.0, 0.3, 0.6}) {
    double prev = 0.0;
    for (double r : {0.5, 0.8, 1.2, 2.0}) {
      const auto nu = estimate_nu(e, ball(r), t, spec, basis);
      CHECK(nu.value >= prev);  // nested sets, same samples
      prev = nu.value;
      // nu_t(A) <= mu(A): paired difference over the same samples.
      std::vector<double> diff(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        const bool in = ball(r)(e.samples[i]);
        diff[i] = in ? gibbs_weight(e.samples[i], t, spec, basis) - 1.0 : 0.0;
      }
      const auto d = mean_estimate(diff);
      CHECK(d.value <= 2.0 * d.std_error);
    }
  }
}

TEST_CASE("nu_0 of an L^3 ball against deterministic quadrature (N = 1, d = 2)") {
  const auto params = ModelParams::make(2, 2.0);
  SpectralBasis basis(BasisSpec{2, 1, 48});
  const PotentialSpec spec{params, 1, Projector::sharp};
  const Ensemble e = sample_mu(1, 2, 100000, 17, 2);
  for (double lam : {0.5, 0.8, 1.2}) {
    const auto est = estimate_nu(
        e, [&](const SpectralField& u) { return lp_norm(u, basis, 3.0) <= lam; }, 0.0, spec, basis, 2);
    const double ref = nu0_ball_oracle(lam);
    CHECK(std::abs(est.value - ref) < 3.0 * est.std_error);
  }
}

TEST_CASE("tail fits") {
  const int d = 3;
  const Ensemble e = sample_mu(4, d, 100000, 77, 2);
  // |c_0| has P(|c_0| > lam) = exp(-d lam^2 / 2).
  const auto modulus = tail_fit(e, [](const SpectralField& u) { return std::abs(u.coeffs(0)); });
  CHECK(modulus.c == doctest::Approx(0.5 * d).epsilon(0.15));
  const auto scaled = tail_fit(e, [](const SpectralField& u) { return std::abs(u.coeffs(0)) * std::sqrt(1.5); });
  CHECK(scaled.c == doctest::Approx(1.0).epsilon(0.15));
  const auto doubled = tail_fit(e, [](const SpectralField& u) { return 2.0 * std::abs(u.coeffs(0)); });
  CHECK(doubled.c / modulus.c == doctest::Approx(0.25).epsilon(0.2));

  SpectralBasis basis(BasisSpec::oversampled(d, 4, 8));
  const double r = 4.0, s = 0.5 * regularity_threshold(r, d);
  const auto wsp = tail_fit(e, [&](const SpectralField& u) { return wsp_norm(u, basis, s, r); });
  CHECK(wsp.c > 0.0);

  std::vector<double> few(999, 1.0);
  CHECK_THROWS_AS(tail_fit(few), ValidationError);
}

TEST_CASE("Kolmogorov-Paley-Zygmund moments") {
  CVector unit = CVector::Zero(6);
  unit(0) = 1.0;
  const auto m2 = pz_moment_check(unit, 2.0, 200000, 3);
  CHECK(m2.exact == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m2.ratio == doctest::Approx(1.0).epsilon(0.01));

  oracle::Gen gen(12);
  const CVector c = gen.coeffs(10, 2, 1.0);
  double prev = 1e300;
  for (int p0 = 2; p0 <= 16; p0 += 2) {
    const auto a = pz_moment_check(c, p0, 50000, 9);
    const auto b = pz_moment_check(2.0 * c, p0, 50000, 9);
    CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(1e-12));
    CHECK(a.ratio <= 2.0);
    CHECK(a.ratio <= 2.0 * a.exact);
    CHECK(a.ratio >= 0.5 * a.exact);
    CHECK(a.exact <= prev * (1.0 + 1e-12));  // (E|g|^p)^{1/p} / sqrt(p) decreases
    prev = a.exact;
  }
}

TEST_CASE("ensemble file round trip") {
  ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
  Ensemble e = sample_mu(5, 4, 7, 31);
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(e.created == "1970-01-02T00:00:00Z");
  e.params = ModelParams::make(4, 1.5);
  const auto path = (std::filesystem::temp_directory_path() / "nlsim_ensemble_test.bin").string();
  write_ensemble(path, e);
  const Ensemble back = read_ensemble(path);
  CHECK(back.N == 5);
  CHECK(back.d == 4);
  CHECK(back.seed == 31);
  CHECK(back.seeds == e.seeds);
  CHECK(back.created == e.created);
  REQUIRE(back.params.has_value());
  CHECK(back.params->p == 1.5);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK((back.samples[i].coeffs - e.samples[i].coeffs).norm() == 0.0);

  // Corrupt the version field.
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f != nullptr);
    std::uint64_t len = 0;
    REQUIRE(std::fread(&len, sizeof len, 1, f) == 1);
    std::string text(len, '\0');
    REQUIRE(std::fread(text.data(), 1, len, f) == len);
    const auto pos = text.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    std::fseek(f, static_cast<long>(sizeof len + pos + 17), SEEK_SET);
    std::fputc('9', f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_ensemble(path), ValidationError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_ensemble(path), ValidationError);
}
