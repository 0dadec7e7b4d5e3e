#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlsim/errors.hpp"
#include "nlsim/runner/experiments.hpp"

namespace {

using nlohmann::json;
namespace rn = nlsim::runner;

struct Overrides {
  std::optional<int> d, N, M, j_min, j_max, oversample;
  std::optional<double> p, sigma, t, dt, coupling, amplitude, lambda;
  std::optional<std::size_t> count;
  std::optional<std::string> integrator, projector, ensemble;
  std::vector<double> s_list;
  std::vector<int> N_list;
  bool override_scattering_guard = false;
  std::vector<std::string> artifacts;
};

void add_model_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--d", o.d, "Spatial dimension");
  sub->add_option("--p", o.p, "Nonlinearity exponent");
  sub->add_option("--sigma", o.sigma, "Regularity index");
  sub->add_option("--N", o.N, "Highest spectral mode");
  sub->add_option("--M", o.M, "Quadrature nodes");
  sub->add_option("--oversample", o.oversample, "Quadrature oversampling factor");
  sub->add_option("--count", o.count, "Ensemble size");
  sub->add_option("--t", o.t, "Target time");
  sub->add_option("--dt", o.dt, "Time step");
  sub->add_option("--integrator", o.integrator, "strang or rk4");
  sub->add_option("--projector", o.projector, "sharp or smooth");
  sub->add_option("--coupling", o.coupling, "Nonlinear coupling (0 disables)");
  sub->add_option("--amplitude", o.amplitude, "Initial data scale factor");
  sub->add_option("--lambda", o.lambda, "Tail threshold");
  sub->add_option("--j-min", o.j_min, "First horizon index");
  sub->add_option("--j-max", o.j_max, "Last horizon index");
  sub->add_option("--s", o.s_list, "Free-evolution times")->delimiter(',');
  sub->add_option("--N-list", o.N_list, "Truncation levels")->delimiter(',');
  sub->add_option("--ensemble", o.ensemble, "Ensemble file to reuse");
  sub->add_flag("--override-scattering-guard", o.override_scattering_guard,
                "Run u_plus extraction where scattering is not expected");
}

template <class T>
void patch(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

int fail(const std::string& kind, int code, const std::string& message, const std::string& hash,
         const std::optional<std::string>& out_dir) {
  const json err = rn::error_report(kind, code, message, hash);
  std::cerr << err.dump(2) << "\n";
  if (out_dir) {
    try {
      std::filesystem::create_directories(*out_dir);
      std::ofstream(std::filesystem::path(*out_dir) / "error.json") << err.dump(2) << "\n";
    } catch (const std::exception&) {
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial harmonic-oscillator NLS experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool override_loss = false;
  app.add_option("--config", config_path, "Experiment configuration (JSON)");
  app.add_option("--seed", seed, "Base seed");
  app.add_option("--threads", threads, "Worker threads (default: NLSIM_THREADS, then hardware)");
  app.add_option("--out-dir", out_dir, "Directory for artifacts");
  app.add_flag("--override-loss-guard", override_loss, "Accept lens truncation loss above threshold");

  Overrides o;
  for (const auto& kind : rn::known_kinds()) {
    auto* sub = app.add_subcommand(kind, "Run the " + kind + " experiment");
    if (kind == "quasi") sub->alias("quasi-invariance");
    if (kind == "report")
      sub->add_option("artifacts", o.artifacts, "Artifact JSON files");
    else
      add_model_options(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("validation", rn::kValidation, e.what(), "", std::nullopt);
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  std::string hash;
  try {
    json j = json::object();
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) throw nlsim::ValidationError("cannot open config " + *config_path);
      j = json::parse(in);
      if (!j.is_object()) throw nlsim::ValidationError("config: top level must be a JSON object");
    }
    if (j.contains("kind") && rn::canonical_kind(j["kind"].get<std::string>()) != kind)
      throw nlsim::ValidationError("config kind '" + j["kind"].get<std::string>() + "' does not match subcommand '" +
                                   kind + "'");
    j["kind"] = kind;
    patch(j, "seed", seed);
    patch(j, "threads", threads);
    patch(j, "out_dir", out_dir);
    if (override_loss) j["override_loss_guard"] = true;
    if (o.override_scattering_guard) j["override_scattering_guard"] = true;
    patch(j, "d", o.d);
    patch(j, "p", o.p);
    patch(j, "sigma", o.sigma);
    patch(j, "N", o.N);
    patch(j, "M", o.M);
    patch(j, "oversample", o.oversample);
    patch(j, "count", o.count);
    patch(j, "t", o.t);
    patch(j, "integrator", o.integrator);
    patch(j, "projector", o.projector);
    patch(j, "coupling", o.coupling);
    patch(j, "amplitude", o.amplitude);
    patch(j, "lambda", o.lambda);
    patch(j, "j_min", o.j_min);
    patch(j, "j_max", o.j_max);
    patch(j, "ensemble", o.ensemble);
    if (o.dt) j["dt_policy"]["dt"] = *o.dt;
    if (!o.s_list.empty()) j["s_list"] = o.s_list;
    if (!o.N_list.empty()) j["N_list"] = o.N_list;
    if (!o.artifacts.empty()) j["artifacts"] = o.artifacts;

    const auto cfg = rn::ExperimentConfig::from_json(j);
    out_dir = cfg.out_dir;
    hash = cfg.hash();
    const auto outcome = rn::run(cfg);
    std::cout << outcome.summary;
    if (!outcome.failure.empty()) return fail("statistical", rn::kStatistical, outcome.failure, hash, out_dir);
    return rn::kOk;
  } catch (const nlsim::ValidationError& e) {
    return fail("validation", rn::kValidation, e.what(), hash, out_dir);
  } catch (const nlsim::NumericalError& e) {
    return fail("numerical", rn::kNumerical, e.what(), hash, out_dir);
  } catch (const nlsim::StatisticalError& e) {
    return fail("statistical", rn::kStatistical, e.what(), hash, out_dir);
  } catch (const json::exception& e) {
    return fail("validation", rn::kValidation, e.what(), hash, out_dir);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("validation", rn::kValidation, e.what(), hash, out_dir);
  }
}
