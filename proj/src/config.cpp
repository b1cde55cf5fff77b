#include "plapwave/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace plapwave {
namespace {

constexpr double kPi = 3.14159265358979323846;

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

}  // namespace

double InitialSpec::eval(double x) const {
  if (kind == "zero") return 0.0;
  if (kind == "constant") return amplitude;
  if (kind == "linear") return amplitude * x;
  if (kind == "sine") return amplitude * std::sin(frequency * kPi * x);
  if (kind == "cosine") return amplitude * std::cos(frequency * kPi * x);
  if (kind == "bump") {
    const double z = (x - center) / width;
    return amplitude * std::exp(-z * z);
  }
  throw std::invalid_argument("InitialSpec: unknown kind '" + kind + "'");
}

double InitialSpec::eval_prime(double x) const {
  if (kind == "zero" || kind == "constant") return 0.0;
  if (kind == "linear") return amplitude;
  if (kind == "sine") return amplitude * frequency * kPi * std::cos(frequency * kPi * x);
  if (kind == "cosine") return -amplitude * frequency * kPi * std::sin(frequency * kPi * x);
  if (kind == "bump") {
    const double z = (x - center) / width;
    return amplitude * std::exp(-z * z) * (-2.0 * z / width);
  }
  throw std::invalid_argument("InitialSpec: unknown kind '" + kind + "'");
}

nlohmann::ordered_json InitialSpec::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["amplitude"] = amplitude;
  if (kind == "sine" || kind == "cosine") j["frequency"] = frequency;
  if (kind == "bump") {
    j["center"] = center;
    j["width"] = width;
  }
  return j;
}

InitialSpec InitialSpec::from_json(const nlohmann::json& j) {
  require_keys(j, {"kind", "amplitude", "frequency", "center", "width"}, "initial profile");
  InitialSpec s;
  s.kind = j.value("kind", std::string("zero"));
  s.amplitude = j.value("amplitude", 0.0);
  s.frequency = j.value("frequency", 1.0);
  s.center = j.value("center", 0.5);
  s.width = j.value("width", 0.1);
  if (s.kind == "bump" && s.width <= 0.0)
    throw std::invalid_argument("InitialSpec: bump width must be positive");
  s.eval(0.0);  // rejects unknown kinds
  return s;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Single: return "SINGLE";
    case ExperimentKind::NRefinement: return "N_REFINEMENT";
    case ExperimentKind::DtRefinement: return "DT_REFINEMENT";
    case ExperimentKind::TruncationCompare: return "TRUNCATION_COMPARE";
    case ExperimentKind::HorizonCheck: return "HORIZON_CHECK";
    case ExperimentKind::GlobalRegime: return "GLOBAL_REGIME";
    case ExperimentKind::PropertySuite: return "PROPERTY_SUITE";
  }
  return "SINGLE";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "SINGLE") return ExperimentKind::Single;
  if (s == "N_REFINEMENT") return ExperimentKind::NRefinement;
  if (s == "DT_REFINEMENT") return ExperimentKind::DtRefinement;
  if (s == "TRUNCATION_COMPARE") return ExperimentKind::TruncationCompare;
  if (s == "HORIZON_CHECK") return ExperimentKind::HorizonCheck;
  if (s == "GLOBAL_REGIME") return ExperimentKind::GlobalRegime;
  if (s == "PROPERTY_SUITE") return ExperimentKind::PropertySuite;
  throw std::invalid_argument("config: unknown experiment kind '" + s + "'");
}

std::string to_string(ValidationPolicy v) {
  return v == ValidationPolicy::Strict ? "strict" : "permissive";
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["experiment"] = plapwave::to_string(experiment);
  j["output_dir"] = output_dir;
  j["validation"] = plapwave::to_string(validation);
  j["p"] = p;
  j["basis"] = basis;
  j["n_elements"] = n_elements;
  j["modes"] = modes;
  j["quad_order"] = quad_order;
  j["source"] = {{"kind", source_kind}, {"a", source_a}, {"r", source_r}, {"b", source_b}};
  j["truncation"] = truncation.to_json();
  j["u0"] = u0.to_json();
  j["u1"] = u1.to_json();
  j["T"] = T;
  j["dt"] = dt;
  j["scheme"] = plapwave::to_string(scheme);
  j["newton_tol"] = newton_tol;
  j["newton_max_iter"] = newton_max_iter;
  j["blowup_threshold"] = blowup_threshold;
  j["seed"] = seed;
  j["refinement_elements"] = refinement_elements;
  j["dt_levels"] = dt_levels;
  j["cutoff_levels"] = cutoff_levels;
  return j;
}

RunConfig parse_config_json(const nlohmann::json& j) {
  require_keys(j,
               {"label", "experiment", "output_dir", "validation", "p", "basis", "n_elements",
                "modes", "quad_order", "source", "truncation", "u0", "u1", "T", "dt", "scheme",
                "newton_tol", "newton_max_iter", "blowup_threshold", "seed",
                "refinement_elements", "dt_levels", "cutoff_levels"},
               "top level");
  RunConfig cfg;
  cfg.label = j.value("label", cfg.label);
  if (j.contains("experiment"))
    cfg.experiment = experiment_kind_from_string(j.at("experiment").get<std::string>());
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  if (j.contains("validation")) {
    const std::string v = j.at("validation").get<std::string>();
    if (v == "strict")
      cfg.validation = ValidationPolicy::Strict;
    else if (v == "permissive")
      cfg.validation = ValidationPolicy::Permissive;
    else
      throw std::invalid_argument("config: unknown validation policy '" + v + "'");
  }
  cfg.p = j.value("p", cfg.p);
  cfg.basis = j.value("basis", cfg.basis);
  if (cfg.basis != "fem_hat" && cfg.basis != "robin_eigen")
    throw std::invalid_argument("config: unknown basis '" + cfg.basis + "'");
  cfg.n_elements = j.value("n_elements", cfg.n_elements);
  cfg.modes = j.value("modes", cfg.modes);
  cfg.quad_order = j.value("quad_order", cfg.quad_order);
  if (cfg.n_elements < 1) throw std::invalid_argument("config: n_elements must be positive");
  if (cfg.modes < 1) throw std::invalid_argument("config: modes must be positive");

  if (j.contains("source")) {
    const auto& s = j.at("source");
    require_keys(s, {"kind", "a", "r", "b"}, "source");
    cfg.source_kind = s.value("kind", std::string("zero"));
    cfg.source_a = s.value("a", 0.0);
    cfg.source_r = s.value("r", 1.0);
    cfg.source_b = s.value("b", 0.0);
    if (cfg.source_kind != "zero" && cfg.source_kind != "power" &&
        cfg.source_kind != "power_plus_linear")
      throw std::invalid_argument("config: unknown source kind '" + cfg.source_kind + "'");
  }
  if (j.contains("truncation")) cfg.truncation = TruncationSpec::from_json(j.at("truncation"));
  if (j.contains("u0")) cfg.u0 = InitialSpec::from_json(j.at("u0"));
  if (j.contains("u1")) cfg.u1 = InitialSpec::from_json(j.at("u1"));

  cfg.T = j.value("T", cfg.T);
  cfg.dt = j.value("dt", cfg.dt);
  if (j.contains("scheme")) {
    const std::string s = j.at("scheme").get<std::string>();
    if (s == "implicit_midpoint")
      cfg.scheme = Scheme::ImplicitMidpoint;
    else if (s == "explicit_rk4")
      cfg.scheme = Scheme::ExplicitRk4;
    else
      throw std::invalid_argument("config: unknown scheme '" + s + "'");
  }
  cfg.newton_tol = j.value("newton_tol", cfg.newton_tol);
  cfg.newton_max_iter = j.value("newton_max_iter", cfg.newton_max_iter);
  cfg.blowup_threshold = j.value("blowup_threshold", cfg.blowup_threshold);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("refinement_elements"))
    cfg.refinement_elements = j.at("refinement_elements").get<std::vector<int>>();
  cfg.dt_levels = j.value("dt_levels", cfg.dt_levels);
  if (j.contains("cutoff_levels"))
    cfg.cutoff_levels = j.at("cutoff_levels").get<std::vector<int>>();

  if (cfg.dt <= 0.0) throw std::invalid_argument("config: dt must be positive");
  if (cfg.T < cfg.dt) throw std::invalid_argument("config: T must be at least dt");
  if (cfg.dt_levels < 2) throw std::invalid_argument("config: dt_levels must be at least 2");
  if (cfg.refinement_elements.size() < 2)
    throw std::invalid_argument("config: refinement_elements needs at least two levels");
  for (std::size_t i = 1; i < cfg.refinement_elements.size(); ++i)
    if (cfg.refinement_elements[i] <= cfg.refinement_elements[i - 1])
      throw std::invalid_argument("config: refinement_elements must increase");
  for (int n : cfg.cutoff_levels)
    if (n < 1) throw std::invalid_argument("config: cutoff_levels entries must be positive");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_config_json(j);
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["policy"] = plapwave::to_string(policy);
  j["violations"] = violations;
  j["passed"] = passed;
  return j;
}

ValidationReport validate_config(const RunConfig& cfg, ValidationPolicy policy) {
  ValidationReport rep;
  rep.policy = policy;
  const bool active_source = cfg.source_kind != "zero" && (cfg.source_a != 0.0 || cfg.source_b != 0.0);
  const RegimeReport regime = classify_regime(cfg.p, cfg.source_r);

  std::vector<std::string> hard;
  if (!regime.p_in_range)
    rep.violations.push_back("p=" + std::to_string(cfg.p) + " outside the open interval (2,3)");
  if (cfg.p < 2.0) hard.push_back("p below 2 leaves every supported regime");
  if (active_source) {
    if (cfg.source_r < 1.0) hard.push_back("source exponent r must be at least 1");
    if (!regime.r_admissible)
      rep.violations.push_back("source exponent r=" + std::to_string(cfg.source_r) +
                               " outside [1, 4p/(3(3-p)))");
    if (cfg.experiment == ExperimentKind::GlobalRegime && !regime.global_regime)
      rep.violations.push_back("GLOBAL_REGIME requires r <= p/2");
  }
  for (const std::string& h : hard) rep.violations.push_back(h);

  rep.passed = policy == ValidationPolicy::Strict ? rep.violations.empty() : hard.empty();
  return rep;
}

SourceSpec make_source(const RunConfig& cfg) {
  if (cfg.source_kind == "zero") return SourceSpec::zero();
  if (cfg.source_kind == "power") return SourceSpec::power(cfg.source_a, cfg.source_r);
  return SourceSpec::power_plus_linear(cfg.source_a, cfg.source_b, cfg.source_r);
}

ProblemSpec build_problem(const RunConfig& cfg) {
  auto mesh = std::make_shared<const Mesh>(cfg.n_elements, cfg.quad_order);
  std::shared_ptr<const BasisSet> basis = cfg.basis == "fem_hat"
                                              ? BasisSet::fem_hat(mesh)
                                              : BasisSet::robin_eigen(mesh, cfg.modes);
  ProblemSpec prob;
  prob.p = cfg.p;
  prob.basis = basis;
  prob.source = make_source(cfg);
  prob.truncation = cfg.truncation;
  auto u0_fn = [&](double x) { return cfg.u0.eval(x); };
  auto u0_prime = [&](double x) { return cfg.u0.eval_prime(x); };
  prob.u0 = basis->kind() == BasisKind::FemHat ? interpolate(basis, u0_fn)
                                               : project_W(basis, u0_fn, u0_prime);
  prob.u1 = project_L2(basis, [&](double x) { return cfg.u1.eval(x); });
  prob.T = cfg.T;
  prob.dt = cfg.dt;
  prob.scheme = cfg.scheme;
  prob.newton_tol = cfg.newton_tol;
  prob.newton_max_iter = cfg.newton_max_iter;
  prob.blowup_threshold = cfg.blowup_threshold;
  prob.validate();
  return prob;
}

}  // namespace plapwave
