#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsim/dynamics.hpp"

namespace nlsim::runner {

inline constexpr int kFormatVersion = 1;

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kStatistical = 4 };

// Every knob an experiment reads. Keys absent from the JSON keep these defaults.
struct ExperimentConfig {
  std::string kind;

  int d = 2;
  double p = 2.0;
  std::optional<double> sigma;
  int N = 16;
  int M = 0;  // quadrature nodes; 0 derives them from oversample
  int oversample = 4;
  Projector projector = Projector::sharp;
  Integrator integrator = Integrator::strang;
  DtPolicy dt_policy;
  double tolerance = 0.0;
  double coupling = 1.0;
  int stride = 1;

  std::size_t count = 1000;
  std::optional<std::uint64_t> seed;

  double t = 0.3;
  double amplitude = 1.0;
  int j_min = 4;
  int j_max = 8;
  double lambda = 2.0;
  double ball = 1.0;
  double k_sigma = 2.0;
  double liouville_max = 3.0;
  std::vector<double> s_list{0.1, 0.5, 2.0};
  std::vector<int> N_list{16, 32, 64, 128};
  int N_ref = 512;
  double sigma_prime = 1.0;
  double decay_excess = 0.1;
  double loss_threshold = 1e-6;
  bool override_loss_guard = false;
  bool override_scattering_guard = false;
  std::string ensemble;
  std::vector<std::string> artifacts;

  // Execution only; excluded from the hash because outputs do not depend on them.
  int threads = 0;
  std::optional<std::string> out_dir;  // "." for experiments; params/report write only when set

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string hash() const;
  void validate() const;

  ModelParams model() const { return ModelParams::make(d, p); }
  FlowConfig flow() const;
  double diag_sigma() const;
  std::filesystem::path output(const std::string& name) const;
};

// Canonical kind name ("quasi-invariance" and "quasi" are the same kind).
std::string canonical_kind(const std::string& kind);
const std::vector<std::string>& known_kinds();
bool is_stochastic(const std::string& kind);

// FNV-1a 64-bit, lowercase hex.
std::string fnv1a_hex(const std::string& bytes);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace nlsim::runner
