#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plapwave/config.hpp"
#include "plapwave/solver.hpp"

namespace plapwave {

// One named check with a pinned tolerance. The anchor names the mathematical
// fact the check exercises.
struct AuditResult {
  std::string name;
  std::string anchor;
  double tolerance = 0.0;
  double value = 0.0;
  bool pass = false;
};

nlohmann::ordered_json to_json(const AuditResult& a);

struct RunReport {
  RunConfig config;
  ValidationReport validation;
  std::vector<AuditResult> audits;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  nlohmann::ordered_json tables = nlohmann::ordered_json::object();
  // named trajectories for CSV emission; not part of the JSON report
  std::vector<std::pair<std::string, Trajectory>> trajectories;
  bool all_pass = false;

  // deterministic: identical configs produce byte-identical dumps
  nlohmann::ordered_json to_json() const;
};

RunReport run_experiment(const RunConfig& cfg, ValidationPolicy policy);

// writes report.json plus one CSV and one sidecar per trajectory; returns the
// file names written (report.json first)
std::vector<std::string> emit_report(const RunReport& rep, const std::string& out_dir);

}  // namespace plapwave
