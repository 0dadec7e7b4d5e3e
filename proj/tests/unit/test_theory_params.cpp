#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "nlsim/errors.hpp"
#include "nlsim/theory_params.hpp"
#include "oracles.hpp"

using namespace nlsim;

namespace {

// Smallest positive real root of a cubic through its companion matrix.
double smallest_positive_root(double c3, double c2, double c1, double c0) {
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(0, 0) = -c2 / c3;
  comp(0, 1) = -c1 / c3;
  comp(0, 2) = -c0 / c3;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  const Eigen::Vector3cd ev = comp.eigenvalues();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    if (std::abs(ev(i).imag()) < 1e-9 && ev(i).real() > 0.0) best = std::min(best, ev(i).real());
  return best;
}

}  // namespace

TEST_CASE("alpha") {
  for (int d = 2; d <= 10; ++d) {
    CHECK(alpha(1.0 + 4.0 / d, d) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(alpha(1.0 + 2.0 / d, d) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(alpha(1.0, d) == 2.0);
  }
}

TEST_CASE("sigma_max") {
  CHECK(sigma_max(3.0, 2) == 0.5);
  for (double p : {1.1, 2.0, 3.0}) CHECK(sigma_max(p, 2) == 0.5);
  CHECK(sigma_max(1.6, 8) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(sigma_max(1.5, 8) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sigma_max(1.5 + 1e-12, 8) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("p_max") {
  CHECK(std::abs(p_max(2) - (3.0 + std::sqrt(41.0)) / 2.0) < 1e-12);
  CHECK(p_max(2) == doctest::Approx(4.701562).epsilon(1e-6));
  const double p8 = p_max(8);
  CHECK(p8 > 1.0);
  CHECK(p8 < 2.0);
  CHECK(p8 == doctest::Approx(smallest_positive_root(6, 4, -6, -20)).epsilon(1e-12));
  CHECK(p8 == doctest::Approx(1.495).epsilon(1e-3));
  for (int d = 8; d <= 25; ++d) {
    CHECK(std::abs(poly_P(d, p_max(d))) < 1e-10);
    CHECK(p_max(d) == doctest::Approx(smallest_positive_root(d - 2.0, d - 4.0, -6.0, -2.0 * d - 4.0)).epsilon(1e-12));
  }
  for (int d = 2; d <= 7; ++d) CHECK(p_max(d) >= 1.0 + 4.0 / d);
  for (int d = 3; d <= 7; ++d) CHECK(p_max(d) < 1.0 + 3.0 / (d - 2));
  CHECK_THROWS_AS(p_max(1), ValidationError);
}

TEST_CASE("polynomials") {
  for (int d = 2; d <= 12; ++d) CHECK(poly_Q(d, 1.0) == doctest::Approx(-8.0).epsilon(1e-15));
  const double p = 1.4;
  const double terms = 2 * p * p * p + 10 * p * p + (10 - 6) * p - 2 * 10 - 4;
  CHECK(std::abs(poly_Q(10, p) - terms) < 1e-12);
  for (int d = 2; d <= 12; ++d) CHECK(std::abs(poly_R(d, poly_R_root(d))) < 1e-12);
  for (int d = 8; d <= 10; ++d) CHECK(poly_P(d, pd_comparison_point(d)) < 0.0);
  CHECK(inferred_threshold(4) == doctest::Approx((0.0 + std::sqrt(144.0 - 64.0)) / 4.0).epsilon(1e-14));
}

TEST_CASE("delta exponents") {
  oracle::Gen gen(21);
  for (int d = 2; d <= 10; ++d) {
    const auto e = delta_exponents(1.0 + 4.0 / d, d, 3.0);
    CHECK(e.delta == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }
  const auto lim = delta_exponents(2.0, 2, 1e300);
  CHECK(lim.delta == doctest::Approx(-(2.0 + 2.0) * alpha(2.0, 2) / 2.0).epsilon(1e-12));
  for (int k = 0; k < 100; ++k) {
    const int d = gen.integer(2, 10);
    const double p = gen.uniform(1.0, 1.0 + 4.0 / d);
    const double g = gen.uniform(1.0, 50.0);
    const auto e = delta_exponents(p, d, g);
    CHECK(e.delta_tilde - e.delta == doctest::Approx(-alpha(p, d) / 2.0).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(delta_exponents(2.0, 2, 0.5), ValidationError);
}

TEST_CASE("admissibility") {
  for (int d = 2; d <= 10; ++d) {
    CHECK(admissible(kInf, 2.0, d));
    CHECK(admissible(4.0, 2.0 * d / (d - 1.0), d));
  }
  CHECK_FALSE(admissible(2.0, kInf, 2));
  CHECK(admissible(2.0, 6.0, 3));
  CHECK_FALSE(admissible(1.5, 2.0, 3));
  CHECK_FALSE(admissible(4.0, 3.0, 2));
  CHECK(sigma_admissible(4.0 / 0.7, 4.0 / 0.7, 2, 0.3));
  CHECK_FALSE(sigma_admissible(1.5, 8.0, 2, 0.1));
}

TEST_CASE("xsigma pairs") {
  CHECK(xsigma_pairs(2.0, 2, 0.2).q2 == 4.0);
  CHECK(xsigma_pairs(2.0, 2, 0.2).r2 == doctest::Approx(4.0).epsilon(1e-15));
  const auto c2 = xsigma_pairs(1.6, 8, 0.1);
  CHECK_FALSE(c2.case_one);
  CHECK(c2.q2 == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(c2.r2 == doctest::Approx(2.5).epsilon(1e-13));
  CHECK_FALSE(c2.contraction_ok);
  CHECK(xsigma_pairs(2.0, 2, 0.2).contraction_ok);
  CHECK_THROWS_AS(xsigma_pairs(1.6, 8, 0.25), ValidationError);
  CHECK_THROWS_AS(xsigma_pairs(2.0, 2, 0.5), ValidationError);

  oracle::Gen gen(7);
  int checked = 0;
  while (checked < 100) {
    const int d = gen.integer(2, 10);
    const double p = gen.uniform(1.01, 1.0 + 4.0 / d);
    const double s = gen.uniform(0.0, sigma_max(p, d));
    if (s <= 0.0) continue;
    const double slack = 1.0 - (0.25 * d - 0.5 * s) * (p - 1.0);
    const auto pr = xsigma_pairs(p, d, s);
    CHECK(pr.contraction_ok == (slack > 0.0));
    CHECK(admissible(pr.q2, pr.r2, d));
    CHECK(sigma_admissible(pr.a, pr.b, d, s));
    if (d > 2) CHECK(pr.b <= 2.0 * d / (d - 2.0) + 1e-12);
    ++checked;
  }
}

TEST_CASE("regularity threshold") {
  CHECK(regularity_threshold(4.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(regularity_threshold(3.0, 2) == doctest::Approx(2.0 * (0.5 - 1.0 / 3.0)).epsilon(1e-15));
  CHECK(regularity_threshold(8.0, 2) == doctest::Approx(1.0 - 2.0 * (0.5 - 0.125)).epsilon(1e-15));
}

TEST_CASE("lwp time and horizons") {
  CHECK(lwp_time(1.0, 0.0, 1.0, 2.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK(lwp_time(2.0, 0.3, 1.5, 2.0) / lwp_time(1.0, 0.3, 1.5, 2.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lwp_time(1.0, std::numbers::pi / 4 - 1e-9, 1.0, 2.0) < 1e-8);
  CHECK(horizon(0) == 0.0);
  CHECK(horizon(1) == doctest::Approx(0.4965).epsilon(1e-4));
  CHECK(horizon(1) == doctest::Approx(std::numbers::pi / 4 * (1.0 - std::exp(-1.0))).epsilon(1e-15));
  CHECK(horizon(30) < std::numbers::pi / 4);
  CHECK(horizon(60) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  for (int j = 0; j < 20; ++j) CHECK(horizon(j + 1) > horizon(j));
}

TEST_CASE("model params") {
  const auto m = ModelParams::make(2, 3.0);
  CHECK(m.alpha == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(m.sigma_max == 0.5);
  CHECK(m.mass_subcritical());
  CHECK(m.scattering_expected());
  CHECK_FALSE(ModelParams::make(2, 2.0).scattering_expected());
  CHECK(ModelParams::make(2, 2.0).default_scatter_sigma() == doctest::Approx(2.0 * (0.5 - 1.0 / 3.0)));
  CHECK_THROWS_AS(ModelParams::make(2, 1.0), ValidationError);
  CHECK_THROWS_AS(ModelParams::make(1, 2.0), ValidationError);
}
