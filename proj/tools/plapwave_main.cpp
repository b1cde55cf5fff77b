#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "plapwave/experiments.hpp"

namespace {

int finish(const plapwave::RunReport& rep, const std::string& out_dir) {
  plapwave::emit_report(rep, out_dir);
  for (const plapwave::AuditResult& a : rep.audits)
    std::printf("%-34s %s  (value %.6g, tolerance %.6g)\n", a.name.c_str(),
                a.pass ? "PASS" : "FAIL", a.value, a.tolerance);
  if (!rep.validation.passed) {
    for (const std::string& v : rep.validation.violations)
      std::printf("validation: %s\n", v.c_str());
    std::printf("validation FAILED (%s)\n", plapwave::to_string(rep.validation.policy).c_str());
  }
  std::printf("%s: %s -> %s\n", plapwave::to_string(rep.config.experiment).c_str(),
              rep.all_pass ? "ALL PASS" : "FAILURES", out_dir.c_str());
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin simulator for the damped p-Laplacian wave equation"};
  app.require_subcommand(1);

  std::string config_path, out_override, validation_override;
  unsigned long long seed_override = 0;
  bool have_seed = false;

  CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_override, "output directory (overrides the config)");
  run->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_option("--validation", validation_override, "strict|permissive")
      ->check(CLI::IsMember({"strict", "permissive"}));

  std::string suite_out = "out/suite";
  unsigned long long suite_seed = 42;
  CLI::App* suite = app.add_subcommand("suite", "run the property suite with defaults");
  suite->add_option("--out", suite_out, "output directory");
  suite->add_option("--seed", suite_seed, "suite seed");

  double cp_p = 0.0, cp_r = 0.0;
  CLI::App* check = app.add_subcommand("check-params", "classify an exponent pair");
  check->add_option("--p", cp_p, "interior exponent")->required();
  check->add_option("--r", cp_r, "source exponent")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0, any usage error exits 2
  }

  try {
    if (run->parsed()) {
      plapwave::RunConfig cfg = plapwave::parse_config(config_path);
      if (have_seed) cfg.seed = seed_override;
      if (!out_override.empty()) cfg.output_dir = out_override;
      if (validation_override == "strict") cfg.validation = plapwave::ValidationPolicy::Strict;
      if (validation_override == "permissive")
        cfg.validation = plapwave::ValidationPolicy::Permissive;
      const plapwave::RunReport rep = plapwave::run_experiment(cfg, cfg.validation);
      return finish(rep, cfg.output_dir);
    }
    if (suite->parsed()) {
      plapwave::RunConfig cfg;
      cfg.label = "suite";
      cfg.experiment = plapwave::ExperimentKind::PropertySuite;
      cfg.seed = suite_seed;
      cfg.output_dir = suite_out;
      const plapwave::RunReport rep = plapwave::run_experiment(cfg, cfg.validation);
      return finish(rep, cfg.output_dir);
    }
    const plapwave::RegimeReport regime = plapwave::classify_regime(cp_p, cp_r);
    std::printf("%s\n", plapwave::to_json(regime).dump(2).c_str());
    return regime.p_in_range && regime.r_admissible ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
