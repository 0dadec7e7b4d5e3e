#include "nlsim/runner/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nlsim/errors.hpp"

namespace nlsim::runner {

using nlohmann::json;

Check check_le(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, "<=", std::isfinite(value) && value <= tolerance};
}

Check check_ge(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, ">=", std::isfinite(value) && value >= tolerance};
}

Check check_flag(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok}; }

json to_json(const Check& c) {
  return {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
          {"relation", c.relation}, {"pass", c.pass}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const ExperimentConfig& cfg,
                     const std::vector<std::string>& columns)
    : path_(path), width_(columns.size()) {
  text_ = "# format_version=" + std::to_string(kFormatVersion) + " config_hash=" + cfg.hash() +
          " kind=" + cfg.kind + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
  text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  require(values.size() == width_, "csv: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_double(values[i]);
  text_ += "\n";
}

void CsvWriter::write() const {
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path_.string());
  out << text_;
}

json make_artifact(const ExperimentConfig& cfg, const std::vector<Check>& checks, json results) {
  json j;
  j["format_version"] = kFormatVersion;
  j["config_hash"] = cfg.hash();
  j["kind"] = cfg.kind;
  j["config"] = cfg.to_json();
  j["integrator"] = {{"scheme", to_string(cfg.integrator)},
                     {"dt", cfg.dt_policy.dt},
                     {"adaptive", cfg.dt_policy.adaptive},
                     {"c", cfg.dt_policy.c},
                     {"K", cfg.dt_policy.K},
                     {"tolerance", cfg.tolerance}};
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back(to_json(c));
  j["results"] = std::move(results);
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + " is not valid JSON: " + e.what());
  }
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace nlsim::runner
