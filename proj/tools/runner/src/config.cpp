#include "nlsim/runner/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "nlsim/errors.hpp"

namespace nlsim::runner {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out, std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& known_kinds() {
  static const std::vector<std::string> kinds{"params", "sample", "evolve", "invariance",
                                              "quasi", "tails", "lens-check", "scatter",
                                              "growth", "truncation", "report"};
  return kinds;
}

std::string canonical_kind(const std::string& kind) {
  if (kind == "quasi-invariance") return "quasi";
  return kind;
}

bool is_stochastic(const std::string& kind) {
  static const std::set<std::string> s{"sample", "evolve", "invariance", "quasi",
                                       "tails", "scatter", "growth", "truncation"};
  return s.count(kind) > 0;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  ExperimentConfig c;
  std::set<std::string> seen;
  take(j, "kind", c.kind, seen);
  c.kind = canonical_kind(c.kind);
  take(j, "d", c.d, seen);
  take(j, "p", c.p, seen);
  seen.insert("sigma");
  if (j.contains("sigma") && !j["sigma"].is_null()) c.sigma = j["sigma"].get<double>();
  take(j, "N", c.N, seen);
  take(j, "M", c.M, seen);
  take(j, "oversample", c.oversample, seen);
  std::string projector = to_string(c.projector), integrator = to_string(c.integrator);
  take(j, "projector", projector, seen);
  take(j, "integrator", integrator, seen);
  c.projector = projector_from_string(projector);
  c.integrator = integrator_from_string(integrator);
  seen.insert("dt_policy");
  if (j.contains("dt_policy")) {
    const json& dp = j["dt_policy"];
    std::set<std::string> inner;
    take(dp, "adaptive", c.dt_policy.adaptive, inner);
    take(dp, "dt", c.dt_policy.dt, inner);
    take(dp, "c", c.dt_policy.c, inner);
    take(dp, "K", c.dt_policy.K, inner);
    for (const auto& [k, v] : dp.items())
      if (!inner.count(k)) throw ValidationError("config: unknown dt_policy key '" + k + "'");
  }
  take(j, "tolerance", c.tolerance, seen);
  take(j, "coupling", c.coupling, seen);
  take(j, "stride", c.stride, seen);
  take(j, "count", c.count, seen);
  seen.insert("seed");
  if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
  take(j, "t", c.t, seen);
  take(j, "amplitude", c.amplitude, seen);
  take(j, "j_min", c.j_min, seen);
  take(j, "j_max", c.j_max, seen);
  take(j, "lambda", c.lambda, seen);
  take(j, "ball", c.ball, seen);
  take(j, "k_sigma", c.k_sigma, seen);
  take(j, "liouville_max", c.liouville_max, seen);
  take(j, "s_list", c.s_list, seen);
  take(j, "N_list", c.N_list, seen);
  take(j, "N_ref", c.N_ref, seen);
  take(j, "sigma_prime", c.sigma_prime, seen);
  take(j, "decay_excess", c.decay_excess, seen);
  take(j, "loss_threshold", c.loss_threshold, seen);
  take(j, "override_loss_guard", c.override_loss_guard, seen);
  take(j, "override_scattering_guard", c.override_scattering_guard, seen);
  take(j, "ensemble", c.ensemble, seen);
  take(j, "artifacts", c.artifacts, seen);
  take(j, "threads", c.threads, seen);
  seen.insert("out_dir");
  if (j.contains("out_dir") && !j["out_dir"].is_null()) c.out_dir = j["out_dir"].get<std::string>();
  for (const auto& [k, v] : j.items())
    if (!seen.count(k)) throw ValidationError("config: unknown key '" + k + "'");
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = kind;
  j["d"] = d;
  j["p"] = p;
  j["sigma"] = sigma ? json(*sigma) : json(nullptr);
  j["N"] = N;
  j["M"] = M;
  j["oversample"] = oversample;
  j["projector"] = to_string(projector);
  j["integrator"] = to_string(integrator);
  j["dt_policy"] = {{"adaptive", dt_policy.adaptive}, {"dt", dt_policy.dt}, {"c", dt_policy.c}, {"K", dt_policy.K}};
  j["tolerance"] = tolerance;
  j["coupling"] = coupling;
  j["stride"] = stride;
  j["count"] = count;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["t"] = t;
  j["amplitude"] = amplitude;
  j["j_min"] = j_min;
  j["j_max"] = j_max;
  j["lambda"] = lambda;
  j["ball"] = ball;
  j["k_sigma"] = k_sigma;
  j["liouville_max"] = liouville_max;
  j["s_list"] = s_list;
  j["N_list"] = N_list;
  j["N_ref"] = N_ref;
  j["sigma_prime"] = sigma_prime;
  j["decay_excess"] = decay_excess;
  j["loss_threshold"] = loss_threshold;
  j["override_loss_guard"] = override_loss_guard;
  j["override_scattering_guard"] = override_scattering_guard;
  j["ensemble"] = ensemble;
  j["artifacts"] = artifacts;
  return j;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

void ExperimentConfig::validate() const {
  const auto& kinds = known_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw ValidationError("config: unknown kind '" + kind + "'");
  if (kind == "report") return;
  require(d >= 2, "config: d must be >= 2");
  require(p > 1.0, "config: p must be > 1");
  require(N >= 0, "config: N must be >= 0");
  require(M == 0 || M >= N + 1, "config: M must be 0 or >= N+1");
  require(count >= 1, "config: count must be >= 1");
  require(stride >= 1, "config: stride must be >= 1");
  require(std::abs(t) < std::numbers::pi / 4, "config: |t| must be < pi/4");
  require(j_min >= 1 && j_max >= j_min, "config: need 1 <= j_min <= j_max");
  require(k_sigma >= 0.0, "config: k_sigma must be >= 0");
  require(loss_threshold >= 0.0, "config: loss_threshold must be >= 0");
  if (is_stochastic(kind) && !seed) throw ValidationError("config: kind '" + kind + "' requires a seed");
  if (kind == "scatter") require(j_max - j_min >= 3, "config: scatter needs at least four horizons");
  if (kind == "truncation") {
    require(!N_list.empty(), "config: N_list must not be empty");
    require(N_ref >= 4 * *std::max_element(N_list.begin(), N_list.end()), "config: N_ref must be >= 4 max(N_list)");
    require(sigma_prime > diag_sigma(), "config: sigma_prime must exceed sigma");
  }
  flow().validate();
}

FlowConfig ExperimentConfig::flow() const {
  FlowConfig f;
  f.params = model();
  f.N = N;
  f.projector = projector;
  f.integrator = integrator;
  f.dt_policy = dt_policy;
  f.coupling = coupling;
  f.tolerance = tolerance;
  f.stride = stride;
  f.diag_sigma = diag_sigma();
  f.oversample = oversample;
  if (M > 0) f.oversample = std::max(1, (M + f.state_modes()) / (f.state_modes() + 1));
  return f;
}

double ExperimentConfig::diag_sigma() const { return sigma.value_or(kind == "truncation" ? 0.0 : 1.0); }

std::filesystem::path ExperimentConfig::output(const std::string& name) const {
  const std::filesystem::path dir = out_dir.value_or(".");
  std::filesystem::create_directories(dir);
  return dir / name;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace nlsim::runner
