#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "plapwave/experiments.hpp"

using namespace plapwave;

namespace {
RunConfig quick_single() {
  RunConfig cfg;
  cfg.label = "t_single";
  cfg.experiment = ExperimentKind::Single;
  cfg.n_elements = 8;
  cfg.u0.kind = "sine";
  cfg.u0.amplitude = 0.4;
  cfg.source_kind = "power";
  cfg.source_a = 0.5;
  cfg.source_r = 1.5;
  cfg.T = 0.1;
  cfg.dt = 0.002;
  return cfg;
}

const AuditResult* find_audit(const RunReport& rep, const std::string& name) {
  for (const AuditResult& a : rep.audits)
    if (a.name == name) return &a;
  return nullptr;
}
}  // namespace

TEST_CASE("a single run produces anchored audits and passes") {
  const RunReport rep = run_experiment(quick_single(), ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  CHECK(rep.validation.passed);
  REQUIRE_FALSE(rep.audits.empty());
  for (const AuditResult& a : rep.audits) {
    CHECK_FALSE(a.name.empty());
    CHECK_FALSE(a.anchor.empty());
    CHECK(a.pass);
  }
  CHECK(find_audit(rep, "balance_residual_small") != nullptr);
  CHECK(rep.metrics.contains("script_E_final"));
  REQUIRE(rep.trajectories.size() == 1);
  CHECK(rep.trajectories[0].second.termination == Termination::Completed);
}

TEST_CASE("without a source the single run also audits energy decay") {
  RunConfig cfg = quick_single();
  cfg.source_kind = "zero";
  cfg.source_a = 0.0;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  const AuditResult* decay = find_audit(rep, "energy_nonincreasing");
  REQUIRE(decay != nullptr);
  CHECK(decay->pass);
}

TEST_CASE("identical configs produce byte-identical reports") {
  const RunReport a = run_experiment(quick_single(), ValidationPolicy::Strict);
  const RunReport b = run_experiment(quick_single(), ValidationPolicy::Strict);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("the report json carries the schema version and no clock output") {
  const RunReport rep = run_experiment(quick_single(), ValidationPolicy::Strict);
  const nlohmann::ordered_json j = rep.to_json();
  CHECK(j.at("schema_version") == "1");
  CHECK(j.contains("config"));
  CHECK(j.contains("validation"));
  CHECK(j.contains("audits"));
  CHECK_FALSE(j.contains("generated_at"));
  CHECK(j.at("all_pass") == true);
}

TEST_CASE("emitting a report writes the manifest it returns") {
  const RunReport rep = run_experiment(quick_single(), ValidationPolicy::Strict);
  const auto dir = std::filesystem::temp_directory_path() / "plapwave_experiments_test";
  std::filesystem::remove_all(dir);
  const std::vector<std::string> files = emit_report(rep, dir.string());
  REQUIRE_FALSE(files.empty());
  CHECK(files[0] == "report.json");
  for (const std::string& f : files) CHECK(std::filesystem::exists(dir / f));

  nlohmann::json j;
  std::ifstream in(dir / "report.json");
  in >> j;
  // the written report gains a timestamp and the file manifest
  CHECK(j.contains("generated_at"));
  CHECK(j.at("files").get<std::vector<std::string>>() == files);
  // one CSV and one sidecar per trajectory
  CHECK(files.size() == 1 + 2 * rep.trajectories.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("a rejected config short-circuits before any integration") {
  RunConfig cfg = quick_single();
  cfg.p = 3.5;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK_FALSE(rep.all_pass);
  CHECK_FALSE(rep.validation.passed);
  CHECK(rep.audits.empty());
  CHECK(rep.trajectories.empty());
}

TEST_CASE("the property suite passes on its documented defaults") {
  RunConfig cfg;
  cfg.label = "t_suite";
  cfg.experiment = ExperimentKind::PropertySuite;
  cfg.n_elements = 16;
  cfg.seed = 42;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  CHECK(rep.audits.size() >= 10);
  for (const char* name :
       {"duality_identity", "monotonicity", "dual_norm_bound", "homogeneity", "hemicontinuity",
        "linear_limit", "source_growth", "cutoff_shape", "radial_identity_in_ball",
        "rng_reproducible"}) {
    const AuditResult* a = find_audit(rep, name);
    REQUIRE_MESSAGE(a != nullptr, name);
    CHECK_MESSAGE(a->pass, name);
  }
}

TEST_CASE("dormant truncations reproduce the untruncated run exactly") {
  RunConfig cfg = quick_single();
  cfg.label = "t_trunc";
  cfg.experiment = ExperimentKind::TruncationCompare;
  cfg.cutoff_levels = {1, 2};
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  const AuditResult* a = find_audit(rep, "dormant_truncation_identity");
  REQUIRE(a != nullptr);
  CHECK(a->value == 0.0);
  CHECK(rep.tables.contains("variants"));
}

TEST_CASE("mesh refinement drives successive distances down") {
  RunConfig cfg = quick_single();
  cfg.label = "t_nref";
  cfg.experiment = ExperimentKind::NRefinement;
  cfg.refinement_elements = {4, 8, 16};
  cfg.dt = 0.001;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  const AuditResult* a = find_audit(rep, "refinement_distances_decrease");
  REQUIRE(a != nullptr);
  CHECK(a->pass);
  const auto& rows = rep.tables.at("levels");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].at("distance_to_finest").get<double>() <
        rows[0].at("distance_to_finest").get<double>());
}

TEST_CASE("step refinement recovers the midpoint order") {
  RunConfig cfg = quick_single();
  cfg.label = "t_dtref";
  cfg.experiment = ExperimentKind::DtRefinement;
  cfg.n_elements = 16;
  cfg.T = 0.25;
  cfg.dt = 0.005;
  cfg.dt_levels = 4;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  const AuditResult* a = find_audit(rep, "dt_convergence_order");
  REQUIRE(a != nullptr);
  CHECK(a->value > 1.8);
  CHECK(a->value < 2.2);
}

TEST_CASE("the horizon check certifies containment on the predicted interval") {
  RunConfig cfg;
  cfg.label = "t_horizon";
  cfg.experiment = ExperimentKind::HorizonCheck;
  cfg.n_elements = 8;
  cfg.u0.kind = "sine";
  cfg.u0.amplitude = 0.3;
  cfg.source_kind = "power";
  cfg.source_a = 1.0;
  cfg.source_r = 1.5;
  cfg.T = 0.5;
  cfg.dt = 0.002;
  cfg.seed = 42;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  CHECK(rep.metrics.at("K").get<double>() >= 2.0);
  CHECK(rep.metrics.at("T0").get<double>() > 0.0);
  CHECK(find_audit(rep, "solution_inside_horizon_ball") != nullptr);
  CHECK(find_audit(rep, "radial_truncation_dormant") != nullptr);
}

TEST_CASE("the subcritical regime stays under the growth envelope") {
  RunConfig cfg;
  cfg.label = "t_global";
  cfg.experiment = ExperimentKind::GlobalRegime;
  cfg.n_elements = 8;
  cfg.u0.kind = "sine";
  cfg.u0.amplitude = 0.4;
  cfg.source_kind = "power";
  cfg.source_a = 1.0;
  cfg.source_r = 1.25;
  cfg.T = 0.5;
  cfg.dt = 0.004;
  const RunReport rep = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK(rep.all_pass);
  const AuditResult* a = find_audit(rep, "energy_under_envelope");
  REQUIRE(a != nullptr);
  CHECK(a->pass);
  CHECK(rep.metrics.at("gronwall_constant").get<double>() == doctest::Approx(4.0));
}

TEST_CASE("permissive policy lets a soft violation run to completion") {
  RunConfig cfg = quick_single();
  cfg.p = 2.0;
  const RunReport strict = run_experiment(cfg, ValidationPolicy::Strict);
  CHECK_FALSE(strict.all_pass);
  CHECK(strict.trajectories.empty());
  const RunReport perm = run_experiment(cfg, ValidationPolicy::Permissive);
  CHECK(perm.validation.passed);
  CHECK_FALSE(perm.validation.violations.empty());
  CHECK(perm.all_pass);
  CHECK_FALSE(perm.trajectories.empty());
}
