#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlsim/dynamics.hpp"

namespace nlsim {

// w(t) = v(t) - e^{-i(t-t0)H} u0 at every stored time.
std::vector<SpectralField> interaction_part(const Trajectory& trajectory, const SpectralField& u0);

// e^{i(t-t0)H} w(t) at every stored time.
std::vector<SpectralField> profile(const Trajectory& trajectory, const SpectralField& u0);

// Profile at stored index k from composite Simpson quadrature of
// -i int e^{isH} G(v(s), s) ds over the stored states 0..k (uniform spacing).
SpectralField duhamel_profile(const Trajectory& trajectory, std::size_t k, const Flow& flow);

// First Born term -i int_0^{t1} e^{isH} G(e^{-isH} u0, s) ds (Simpson, `intervals` even).
SpectralField born_approximation(const SpectralField& u0, double t1, const Flow& flow, int intervals);

struct ScatterReport {
  SpectralField u_plus;
  double sigma = 0.0;  // residuals are measured in H^{-sigma}
  std::vector<int> horizons;
  std::vector<double> times;
  std::vector<double> residuals;  // |profile(T_j) - u_plus|
  std::vector<double> cauchy;     // |profile(T_{j+1}) - profile(T_j)|
  double delta_fit = 0.0;
  bool cauchy_decreasing = false;
  std::vector<std::string> norms;
};

// Requires the trajectory to contain the horizon times T_j for the given
// (increasing, >= 4 at the end) j. Refuses p <= 1 + 2/d unless overridden.
ScatterReport extract_u_plus(const Trajectory& trajectory, const SpectralField& u0, const ModelParams& params,
                             std::span<const int> horizons, double sigma_fit, bool override_guard = false);

struct GrowthRow {
  int j = 0;
  double t = 0.0;
  double xsigma = 0.0;
  double ratio_x = 0.0;  // |v|_{X^sigma} / ((pi/4-t)^{-alpha/2} |log(pi/4-t)|^{1/2})
  double lpp1_w = 0.0;
  double ratio_w = 0.0;  // |w|_{L^{p+1}} / |log(pi/4-t)|^{1/2}
};

struct GrowthTable {
  std::vector<GrowthRow> rows;
  bool bounded_x = false;  // last ratio <= 2 * median
  bool bounded_w = false;
  bool pass() const { return bounded_x && bounded_w; }
};

GrowthTable growth_track(const Trajectory& trajectory, const SpectralField& u0, const Flow& flow,
                         std::span<const int> horizons, double sigma, int time_nodes = 64);

struct DecayTable {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<double> residuals;  // |e^{-is Delta} u(s) - (u0 + u_plus)|_{H^{-sigma}}
  double kappa_fit = 0.0;         // minus the log-log slope over the last three s
  bool monotone = false;
};

DecayTable nls_scattering_residual(const Trajectory& trajectory, const SpectralField& u0,
                                   const SpectralField& u_plus, std::span<const double> s_list,
                                   const Flow& flow, double sigma);

}  // namespace nlsim
