#include <map>
#include <sstream>

#include "nlsim/errors.hpp"
#include "nlsim/runner/experiments.hpp"

namespace nlsim::runner {

using nlohmann::json;

namespace {

bool dynamical(const std::string& kind) {
  return kind != "params" && kind != "sample" && kind != "lens-check" && kind != "report";
}

std::string integrator_line(const json& in) {
  std::ostringstream s;
  s << "integrator " << in.value("scheme", "?") << " dt=" << format_double(in.value("dt", 0.0));
  if (in.value("adaptive", false))
    s << " adaptive(c=" << format_double(in.value("c", 0.0)) << ", K=" << format_double(in.value("K", 0.0)) << ")";
  s << " tolerance=" << format_double(in.value("tolerance", 0.0));
  return s.str();
}

}  // namespace

RunOutcome report(const ExperimentConfig& cfg) {
  std::ostringstream s;
  json entries = json::array();
  std::map<int, bool> criteria;
  std::vector<std::string> failures;

  for (const auto& path : cfg.artifacts) {
    const json a = read_json(path);
    if (!a.contains("format_version") || a["format_version"] != kFormatVersion)
      throw ValidationError("report: format version mismatch in " + path + " (expected " +
                            std::to_string(kFormatVersion) + ")");
    const std::string kind = a.value("kind", "");
    const int crit = criterion_for(kind);
    s << path << ": " << kind;
    if (crit) s << " [criterion " << crit << "]";
    s << " config_hash=" << a.value("config_hash", "") << "\n";
    if (dynamical(kind) && a.contains("integrator")) s << "  " << integrator_line(a["integrator"]) << "\n";
    bool ok = true;
    for (const auto& c : a.value("checks", json::array())) {
      const bool pass = c.value("pass", false);
      ok = ok && pass;
      s << "  " << (pass ? "PASS " : "FAIL ") << c.value("name", "") << " = "
        << format_double(c.value("value", 0.0)) << " (" << c.value("relation", "<=") << " "
        << format_double(c.value("tolerance", 0.0)) << ")\n";
      if (!pass)
        failures.push_back((crit ? "criterion " + std::to_string(crit) + " " : std::string()) + kind + ": " +
                           c.value("name", ""));
    }
    if (a.contains("results") && a["results"].contains("warnings"))
      for (const auto& w : a["results"]["warnings"]) s << "  WARNING " << w.get<std::string>() << "\n";
    if (crit) criteria[crit] = criteria.count(crit) ? criteria[crit] && ok : ok;
    entries.push_back({{"path", path}, {"kind", kind}, {"criterion", crit}, {"pass", ok},
                       {"config_hash", a.value("config_hash", "")}, {"integrator", a.value("integrator", json())},
                       {"checks", a.value("checks", json::array())}});
  }
  if (cfg.artifacts.empty()) s << "no artifacts\n";
  for (const auto& [c, ok] : criteria) s << "criterion " << c << ": " << (ok ? "PASS" : "FAIL") << "\n";

  RunOutcome out;
  out.artifact = {{"format_version", kFormatVersion}, {"kind", "report"}, {"artifacts", entries}};
  json crit_json = json::object();
  for (const auto& [c, ok] : criteria) crit_json[std::to_string(c)] = ok;
  out.artifact["criteria"] = crit_json;
  out.artifact["failures"] = failures;
  if (cfg.out_dir) {
    const auto path = cfg.output("report.json");
    write_json(path, out.artifact);
    out.files.push_back(path);
  }
  out.summary = s.str();
  if (!failures.empty()) {
    std::string msg = "report: failing checks: ";
    for (std::size_t i = 0; i < failures.size(); ++i) msg += (i ? "; " : "") + failures[i];
    out.failure = msg;
  }
  return out;
}

}  // namespace nlsim::runner
