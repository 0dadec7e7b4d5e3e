#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsim/runner/artifacts.hpp"
#include "nlsim/runner/config.hpp"

namespace nlsim::runner {

struct RunOutcome {
  nlohmann::json artifact;                    // also written as <kind>.json
  std::vector<std::filesystem::path> files;   // every file written
  std::string summary;                        // human-readable text for stdout
  std::string failure;                        // non-empty when a check failed (exit 4)
};

// Validates, runs the experiment named by cfg.kind and writes its artifacts.
// Throws ValidationError / NumericalError. Failing checks still write every
// artifact and are reported through RunOutcome::failure.
RunOutcome run(const ExperimentConfig& cfg);

// Acceptance criterion number attached to an experiment kind (0 if none).
int criterion_for(const std::string& kind);

// Aggregates artifacts into a pass/fail summary naming failing criteria.
// Throws ValidationError on a missing file or version mismatch.
RunOutcome report(const ExperimentConfig& cfg);

// Machine-readable error record for a failed run.
nlohmann::json error_report(const std::string& error_kind, int exit_code, const std::string& message,
                            const std::string& config_hash);

}  // namespace nlsim::runner
