#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsim/runner/config.hpp"

namespace nlsim::runner {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  // value relation tolerance
  bool pass = false;
};

Check check_le(std::string name, double value, double tolerance);
Check check_ge(std::string name, double value, double tolerance);
Check check_flag(std::string name, bool ok);

nlohmann::json to_json(const Check& c);

// Numeric formatting that round-trips and never depends on locale.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const ExperimentConfig& cfg,
            const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void write() const;

 private:
  std::filesystem::path path_;
  std::string text_;
  std::size_t width_;
};

// {format_version, config_hash, kind, config, integrator, checks, results}
nlohmann::json make_artifact(const ExperimentConfig& cfg, const std::vector<Check>& checks,
                             nlohmann::json results);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

bool all_pass(const std::vector<Check>& checks);

}  // namespace nlsim::runner
