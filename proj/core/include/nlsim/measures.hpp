#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlsim/spectral_basis.hpp"
#include "nlsim/theory_params.hpp"

namespace nlsim {

struct Ensemble {
  int d = 2;
  int N = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<SpectralField> samples;
  std::optional<ModelParams> params;
  std::string created;  // ISO-8601, from SOURCE_DATE_EPOCH when set

  std::size_t size() const { return samples.size(); }
};

// c_n = g_n / sqrt(4n+d), g_n = a_n + i b_n with a_n, b_n ~ N(0,1).
SpectralField sample_field(int N, int d, std::uint64_t seed);
Ensemble sample_mu(int N, int d, std::size_t count, std::uint64_t seed, int threads = 1);

struct WeightedEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  bool degenerate = false;  // zero sample variance
};

WeightedEstimate mean_estimate(std::span<const double> xs);

// cos(2t)^{-alpha} / (p+1) * |S_K u|_{L^{p+1}}^{p+1}
struct PotentialSpec {
  ModelParams params;
  int K = 0;
  Projector projector = Projector::sharp;
};
double potential(const SpectralField& u, double t, const PotentialSpec& spec,
                 const SpectralBasis& basis);
double gibbs_weight(const SpectralField& u, double t, const PotentialSpec& spec,
                    const SpectralBasis& basis);

using FieldPredicate = std::function<bool(const SpectralField&)>;
using FieldFunctional = std::function<double(const SpectralField&)>;

// E_mu[1_A(u) * gibbs_weight(u, t)].
WeightedEstimate estimate_nu(const Ensemble& ensemble, const FieldPredicate& predicate, double t,
                             const PotentialSpec& spec, const SpectralBasis& basis,
                             int threads = 1);

struct TailFit {
  double C = 0.0;
  double c = 0.0;
  std::size_t points = 0;
};

// Fits log P(X > lambda) ~ log C - c lambda^2 on the top 5% of samples.
TailFit tail_fit(std::span<const double> values);
TailFit tail_fit(const Ensemble& ensemble, const FieldFunctional& functional, int threads = 1);

struct PzMoment {
  double p0 = 2.0;
  double ratio = 0.0;   // |sum c_n g_n|_{L^{p0}} / (sqrt(p0) |c|_2)
  double exact = 0.0;   // same ratio from the Gaussian closed form
};
PzMoment pz_moment_check(const CVector& coeffs, double p0, std::size_t count, std::uint64_t seed);

// 2^{p/2} Gamma(p/2+1): E|g|^p for g = a + i b.
double complex_gaussian_moment(double p);

// Ensemble files: u64 little-endian header length, JSON header, then
// little-endian float64 (re, im) pairs, sample-major.
inline constexpr int kEnsembleFormatVersion = 1;
void write_ensemble(const std::string& path, const Ensemble& ensemble);
Ensemble read_ensemble(const std::string& path);
std::string creation_timestamp();

}  // namespace nlsim
