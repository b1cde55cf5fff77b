#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plapwave/solver.hpp"

namespace plapwave {

// closed-form initial profiles; derivatives are analytic so projections can
// use them without finite differencing
struct InitialSpec {
  std::string kind = "zero";  // zero | constant | linear | sine | cosine | bump
  double amplitude = 0.0;
  double frequency = 1.0;  // sine/cosine: argument is frequency*pi*x
  double center = 0.5;     // bump
  double width = 0.1;      // bump

  double eval(double x) const;
  double eval_prime(double x) const;
  nlohmann::ordered_json to_json() const;
  static InitialSpec from_json(const nlohmann::json& j);
};

enum class ExperimentKind {
  Single,
  NRefinement,
  DtRefinement,
  TruncationCompare,
  HorizonCheck,
  GlobalRegime,
  PropertySuite,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

enum class ValidationPolicy { Strict, Permissive };

std::string to_string(ValidationPolicy v);

struct RunConfig {
  std::string label = "run";
  ExperimentKind experiment = ExperimentKind::Single;
  std::string output_dir = "out";
  ValidationPolicy validation = ValidationPolicy::Strict;

  double p = 2.5;
  std::string basis = "fem_hat";  // fem_hat | robin_eigen
  int n_elements = 32;
  int modes = 8;  // robin_eigen dimension
  int quad_order = 4;

  std::string source_kind = "zero";  // zero | power | power_plus_linear
  double source_a = 0.0;
  double source_r = 1.0;
  double source_b = 0.0;
  TruncationSpec truncation = TruncationSpec::none();

  InitialSpec u0;
  InitialSpec u1;

  double T = 1.0;
  double dt = 0.01;
  Scheme scheme = Scheme::ImplicitMidpoint;
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  double blowup_threshold = 1e12;
  unsigned long long seed = 1234;

  std::vector<int> refinement_elements = {8, 16, 32, 64};  // N_REFINEMENT
  int dt_levels = 4;                                       // DT_REFINEMENT halvings
  std::vector<int> cutoff_levels = {1, 2, 4, 8};           // TRUNCATION_COMPARE

  nlohmann::ordered_json to_json() const;
};

RunConfig parse_config_json(const nlohmann::json& j);
RunConfig parse_config(const std::string& path);

struct ValidationReport {
  ValidationPolicy policy = ValidationPolicy::Strict;
  std::vector<std::string> violations;
  bool passed = true;
  nlohmann::ordered_json to_json() const;
};

// parameter-window check; structural errors (bad sizes, bad dt) throw from
// parse_config_json instead of landing here
ValidationReport validate_config(const RunConfig& cfg, ValidationPolicy policy);

SourceSpec make_source(const RunConfig& cfg);
ProblemSpec build_problem(const RunConfig& cfg);

}  // namespace plapwave
