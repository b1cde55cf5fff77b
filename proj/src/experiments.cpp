#include "plapwave/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <stdexcept>

#include "plapwave/operators.hpp"
#include "plapwave/rng.hpp"

namespace plapwave {
namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kAlgebraRelTol = 1e-10;
constexpr double kLinearLimitRelTol = 1e-12;
constexpr double kDualSlack = 1e-9;
constexpr double kEnvelopeRelSlack = 1e-9;

AuditResult make_audit(std::string name, std::string anchor, double tolerance, double value,
                       bool pass) {
  return AuditResult{std::move(name), std::move(anchor), tolerance, value, pass};
}

Field random_field_in_ball(const std::shared_ptr<const BasisSet>& basis, double radius, double p,
                           CounterRng& rng) {
  Field f = make_field(basis, rng.normal_vector(basis->size()));
  const double nrm = norm_w1p(f, p);
  if (nrm < 1e-14) {
    f.coeffs.setZero();
    return f;
  }
  f.coeffs *= rng.uniform() * radius / nrm;
  return f;
}

double max_record_norm(const Trajectory& traj, double p) {
  double m = 0.0;
  for (const State& s : traj.states) m = std::max(m, norm_w1p(s.u, p));
  return m;
}

double max_trace(const Trajectory& traj) {
  double m = 0.0;
  for (const State& s : traj.states) {
    const Eigen::VectorXd nodal = s.u.basis->to_nodal(s.u.coeffs);
    m = std::max({m, std::abs(nodal[0]), std::abs(nodal[nodal.size() - 1])});
  }
  return m;
}

double max_state_difference(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.states.size(), b.states.size());
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    m = std::max(m, (a.states[k].u.coeffs - b.states[k].u.coeffs).cwiseAbs().maxCoeff());
    m = std::max(m, (a.states[k].v.coeffs - b.states[k].v.coeffs).cwiseAbs().maxCoeff());
  }
  return m;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void audit_completed(std::vector<AuditResult>& audits, const std::string& name,
                     const std::vector<Termination>& terms) {
  double bad = 0.0;
  for (Termination t : terms)
    if (t != Termination::Completed) bad += 1.0;
  audits.push_back(make_audit(name, "time stepping completed the horizon", 0.0, bad, bad == 0.0));
}

nlohmann::ordered_json energy_row(const EnergyRecord& r) {
  return {{"t", r.t},
          {"script_E", r.script_E},
          {"E", r.E},
          {"balance_residual", r.balance_residual}};
}

void run_single(const RunConfig& cfg, RunReport& rep) {
  ProblemSpec prob = build_problem(cfg);
  Trajectory traj = integrate(prob);
  const double e0 = traj.records.front().script_E;

  audit_completed(rep.audits, "termination_completed", {traj.termination});

  double worst_balance = 0.0;
  for (const EnergyRecord& r : traj.records)
    worst_balance = std::max(worst_balance, std::abs(r.balance_residual));
  // the trapezoid error of the stiff dissipation startup layer scales like
  // dt^2 / h, so the mesh factor belongs in the tolerance
  const double balance_tol = 10.0 * prob.dt * prob.dt * prob.basis->mesh().n_elements() *
                             std::max(1.0, e0) * std::max(1.0, prob.T);
  rep.audits.push_back(make_audit("balance_residual_small",
                                  "discrete energy balance closes at second order in the step",
                                  balance_tol, worst_balance, worst_balance <= balance_tol));

  if (prob.source.is_zero() && prob.scheme == Scheme::ImplicitMidpoint) {
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < traj.records.size(); ++k)
      worst_rise =
          std::max(worst_rise, traj.records[k].script_E - traj.records[k - 1].script_E);
    const double slack = 1e-12 * std::max(1.0, e0);
    rep.audits.push_back(make_audit("energy_nonincreasing",
                                    "total energy does not increase without boundary forcing",
                                    slack, worst_rise, worst_rise <= slack));
  }

  rep.metrics["script_E_initial"] = e0;
  rep.metrics["script_E_final"] = traj.records.back().script_E;
  rep.metrics["max_balance_residual"] = worst_balance;
  rep.metrics["n_steps"] = traj.records.size() - 1;
  auto rows = nlohmann::ordered_json::array();
  rows.push_back(energy_row(traj.records.front()));
  rows.push_back(energy_row(traj.records.back()));
  rep.tables["energy_endpoints"] = rows;
  rep.trajectories.emplace_back("trajectory", std::move(traj));
}

void run_n_refinement(const RunConfig& cfg, RunReport& rep) {
  std::vector<std::future<Trajectory>> futs;
  for (int n : cfg.refinement_elements) {
    RunConfig level = cfg;
    level.n_elements = n;
    futs.push_back(std::async(std::launch::async,
                              [level] { return integrate(build_problem(level)); }));
  }
  std::vector<Trajectory> trajs;
  std::vector<Termination> terms;
  for (auto& f : futs) {
    trajs.push_back(f.get());
    terms.push_back(trajs.back().termination);
  }
  audit_completed(rep.audits, "all_levels_completed", terms);

  const Field& finest = trajs.back().states.back().u;
  std::vector<double> dists;
  for (std::size_t i = 0; i + 1 < trajs.size(); ++i)
    dists.push_back(w1p_distance(trajs[i].states.back().u, finest, cfg.p));

  double worst_ratio = 0.0;
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < dists.size(); ++i) {
    const double ratio = dists[i] > 0.0 ? dists[i + 1] / dists[i]
                                        : std::numeric_limits<double>::infinity();
    worst_ratio = std::max(worst_ratio, ratio);
    decreasing = decreasing && dists[i + 1] < dists[i];
  }
  rep.audits.push_back(make_audit("refinement_distances_decrease",
                                  "terminal states converge under mesh refinement", 1.0,
                                  worst_ratio, decreasing));

  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    nlohmann::ordered_json row;
    row["n_elements"] = cfg.refinement_elements[i];
    row["distance_to_finest"] = i + 1 < trajs.size() ? dists[i] : 0.0;
    row["script_E_final"] = trajs[i].records.back().script_E;
    rows.push_back(row);
  }
  rep.tables["levels"] = rows;
  for (std::size_t i = 0; i < trajs.size(); ++i)
    rep.trajectories.emplace_back("n" + std::to_string(cfg.refinement_elements[i]),
                                  std::move(trajs[i]));
}

void run_dt_refinement(const RunConfig& cfg, RunReport& rep) {
  ProblemSpec base = build_problem(cfg);
  const long n0 = std::max(1L, std::lround(base.T / base.dt));
  base.T = static_cast<double>(n0) * base.dt;

  // reference two halvings past the finest level; one halving leaves the
  // finest measured error visibly contaminated by the reference's own error
  std::vector<std::future<Trajectory>> futs;
  for (int k = 0; k <= cfg.dt_levels; ++k) {
    ProblemSpec level = base;
    level.dt = base.dt / std::ldexp(1.0, k < cfg.dt_levels ? k : k + 1);
    futs.push_back(std::async(std::launch::async, [level] { return integrate(level); }));
  }
  std::vector<Trajectory> trajs;
  std::vector<Termination> terms;
  for (auto& f : futs) {
    trajs.push_back(f.get());
    terms.push_back(trajs.back().termination);
  }
  audit_completed(rep.audits, "all_levels_completed", terms);

  const Trajectory& ref = trajs.back();
  std::vector<double> lx, ly;
  auto rows = nlohmann::ordered_json::array();
  for (int k = 0; k < cfg.dt_levels; ++k) {
    const double dtk = base.dt / std::ldexp(1.0, k);
    const double err = w1p_distance(trajs[k].states.back().u, ref.states.back().u, cfg.p) +
                       norm_l2(make_field(base.basis, trajs[k].states.back().v.coeffs -
                                                          ref.states.back().v.coeffs));
    rows.push_back({{"dt", dtk}, {"terminal_error", err}});
    if (err > 0.0) {
      lx.push_back(std::log(dtk));
      ly.push_back(std::log(err));
    }
  }
  const double expected = cfg.scheme == Scheme::ImplicitMidpoint ? 2.0 : 4.0;
  const double lo = cfg.scheme == Scheme::ImplicitMidpoint ? 1.8 : 3.5;
  const double hi = cfg.scheme == Scheme::ImplicitMidpoint ? 2.2 : 4.5;
  const double slope = lx.size() >= 2 ? lsq_slope(lx, ly) : expected;
  rep.audits.push_back(make_audit("dt_convergence_order",
                                  "terminal error shrinks at the scheme's order", hi - expected,
                                  slope, slope >= lo && slope <= hi));
  rep.metrics["observed_order"] = slope;
  rep.metrics["expected_order"] = expected;
  rep.tables["levels"] = rows;
  rep.trajectories.emplace_back("dt_coarsest", std::move(trajs.front()));
}

void run_truncation_compare(const RunConfig& cfg, RunReport& rep) {
  RunConfig plain = cfg;
  plain.truncation = TruncationSpec::none();
  ProblemSpec base_prob = build_problem(plain);
  Trajectory baseline = integrate(base_prob);

  const double max_norm = max_record_norm(baseline, cfg.p);
  const double max_tr = max_trace(baseline);
  const double radial_K =
      cfg.truncation.mode == TruncationMode::RadialK ? cfg.truncation.K : std::ceil(max_norm) + 1.0;

  struct Variant {
    std::string name;
    TruncationSpec trunc;
    bool dormant;
  };
  std::vector<Variant> variants;
  variants.push_back({"radial", TruncationSpec::radial(radial_K), max_norm <= radial_K});
  for (int n : cfg.cutoff_levels)
    variants.push_back({"cutoff" + std::to_string(n), TruncationSpec::cutoff(n),
                        max_tr <= static_cast<double>(n)});

  std::vector<std::future<Trajectory>> futs;
  for (const Variant& v : variants) {
    ProblemSpec prob = base_prob;
    prob.truncation = v.trunc;
    futs.push_back(std::async(std::launch::async, [prob] { return integrate(prob); }));
  }

  std::vector<Termination> terms = {baseline.termination};
  double dormant_diff = 0.0;
  auto rows = nlohmann::ordered_json::array();
  std::vector<Trajectory> trajs;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    trajs.push_back(futs[i].get());
    terms.push_back(trajs.back().termination);
    const double diff = max_state_difference(baseline, trajs.back());
    if (variants[i].dormant) dormant_diff = std::max(dormant_diff, diff);
    rows.push_back({{"variant", variants[i].name},
                    {"dormant", variants[i].dormant},
                    {"max_state_difference", diff}});
  }
  audit_completed(rep.audits, "all_variants_completed", terms);
  rep.audits.push_back(make_audit("dormant_truncation_identity",
                                  "dormant truncation leaves the trajectory unchanged",
                                  kIdentityTol, dormant_diff, dormant_diff <= kIdentityTol));
  rep.metrics["max_norm"] = max_norm;
  rep.metrics["max_trace"] = max_tr;
  rep.metrics["radial_K"] = radial_K;
  rep.tables["variants"] = rows;
  rep.trajectories.emplace_back("baseline", std::move(baseline));
  for (std::size_t i = 0; i < variants.size(); ++i)
    rep.trajectories.emplace_back(variants[i].name, std::move(trajs[i]));
}

void run_horizon_check(const RunConfig& cfg, RunReport& rep) {
  RunConfig plain = cfg;
  plain.truncation = TruncationSpec::none();
  ProblemSpec prob = build_problem(plain);
  GalerkinSystem sys(prob);
  const double e0 = sys.instantaneous_record({0.0, prob.u0, prob.u1}).script_E;

  const double K = horizon_radius(prob.p, e0);
  CounterRng rng(cfg.seed, 7);
  const LipschitzProbeResult probe = lipschitz_probe(
      prob.source, TruncationSpec::none(), prob.basis, K, 400, prob.p, 4.0 / 3.0, rng);
  const double c_k = std::max(probe.constant, 1e-6);
  const HorizonEstimate est = local_horizon_estimate(prob.p, e0, c_k);

  const double t_run = std::min(est.T0, cfg.T);
  const long n_steps = std::max(4L, std::lround(t_run / cfg.dt));
  prob.T = t_run;
  prob.dt = t_run / static_cast<double>(n_steps);

  ProblemSpec truncated = prob;
  truncated.truncation = TruncationSpec::radial(est.K);
  auto fut = std::async(std::launch::async, [truncated] { return integrate(truncated); });
  Trajectory plain_traj = integrate(prob);
  Trajectory trunc_traj = fut.get();

  audit_completed(rep.audits, "both_runs_completed",
                  {plain_traj.termination, trunc_traj.termination});
  const double max_norm = max_record_norm(plain_traj, prob.p);
  rep.audits.push_back(make_audit("solution_inside_horizon_ball",
                                  "solution remains in the horizon ball", kDualSlack,
                                  max_norm - est.K, max_norm <= est.K + kDualSlack));
  const double diff = max_state_difference(plain_traj, trunc_traj);
  rep.audits.push_back(make_audit("radial_truncation_dormant",
                                  "dormant truncation leaves the trajectory unchanged",
                                  kIdentityTol, diff, diff <= kIdentityTol));

  rep.metrics["script_E_initial"] = e0;
  rep.metrics["K"] = est.K;
  rep.metrics["C_K"] = c_k;
  rep.metrics["C_K_probe"] = probe.constant;
  rep.metrics["T0"] = est.T0;
  rep.metrics["T_run"] = t_run;
  rep.metrics["max_norm"] = max_norm;
  rep.trajectories.emplace_back("untruncated", std::move(plain_traj));
  rep.trajectories.emplace_back("radial", std::move(trunc_traj));
}

void run_global_regime(const RunConfig& cfg, RunReport& rep) {
  ProblemSpec prob = build_problem(cfg);
  const double c = gronwall_source_constant(prob.source, prob.p);
  Trajectory traj = integrate(prob);
  audit_completed(rep.audits, "termination_completed", {traj.termination});

  const double e0 = traj.records.front().script_E;
  double worst = 0.0;
  for (const EnergyRecord& r : traj.records) {
    const double env = gronwall_envelope(e0, c, r.t);
    worst = std::max(worst, r.script_E - env * (1.0 + kEnvelopeRelSlack));
  }
  rep.audits.push_back(make_audit("energy_under_envelope",
                                  "energy stays under the growth envelope", kEnvelopeRelSlack,
                                  worst, worst <= 0.0));
  rep.metrics["gronwall_constant"] = c;
  rep.metrics["script_E_initial"] = e0;
  rep.metrics["script_E_final"] = traj.records.back().script_E;
  rep.metrics["envelope_final"] = gronwall_envelope(e0, c, traj.records.back().t);
  rep.trajectories.emplace_back("trajectory", std::move(traj));
}

void run_property_suite(const RunConfig& cfg, RunReport& rep) {
  auto mesh = std::make_shared<const Mesh>(cfg.n_elements, cfg.quad_order);
  std::shared_ptr<const BasisSet> basis = cfg.basis == "fem_hat"
                                              ? BasisSet::fem_hat(mesh)
                                              : BasisSet::robin_eigen(mesh, cfg.modes);
  const double p = cfg.p;
  const PLaplacianForm plap(basis, p);
  const DampingForm damp(basis);
  const int trials = 200;

  {
    CounterRng rng(cfg.seed, 11);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      const double lhs = plap.apply(u).dot(u.coeffs);
      const double rhs = std::pow(norm_w1p(u, p), p);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
    }
    rep.audits.push_back(make_audit("duality_identity",
                                    "duality identity of the weak p-Laplacian", kAlgebraRelTol,
                                    worst, worst <= kAlgebraRelTol));
  }
  {
    CounterRng rng(cfg.seed, 12);
    double worst_margin = 0.0;
    bool pass = true;
    for (int t = 0; t < trials; ++t) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      const Field v = random_field_in_ball(basis, 3.0, p, rng);
      const double pairing = monotonicity_check(plap, u, v);
      const double slack =
          kAlgebraRelTol * (1.0 + std::pow(norm_w1p(u, p), p) + std::pow(norm_w1p(v, p), p));
      worst_margin = std::min(worst_margin, pairing + slack);
      pass = pass && pairing >= -slack;
    }
    rep.audits.push_back(make_audit("monotonicity", "monotonicity of the weak p-Laplacian",
                                    kAlgebraRelTol, worst_margin, pass));
  }
  {
    CounterRng rng(cfg.seed, 13);
    double worst_gap = -1e300;
    bool pass = true;
    for (int t = 0; t < 50; ++t) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      const DualBoundReport rep_b = dual_norm_bound_check(plap, u, 64, rng);
      worst_gap = std::max(worst_gap, rep_b.lhs_estimate - rep_b.rhs);
      pass = pass && rep_b.pass;
    }
    rep.audits.push_back(make_audit("dual_norm_bound", "dual norm bound of the weak p-Laplacian",
                                    kDualSlack, worst_gap, pass));
  }
  {
    CounterRng rng(cfg.seed, 14);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      for (double lambda : {0.3, 2.0}) {
        const Eigen::VectorXd lhs = plap.apply(make_field(basis, lambda * u.coeffs));
        const Eigen::VectorXd rhs = std::pow(lambda, p - 1.0) * plap.apply(u);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() /
                                    (1.0 + rhs.cwiseAbs().maxCoeff()));
      }
    }
    rep.audits.push_back(make_audit("homogeneity", "degree p-1 homogeneity of the weak p-Laplacian",
                                    kAlgebraRelTol, worst, worst <= kAlgebraRelTol));
  }
  {
    CounterRng rng(cfg.seed, 15);
    bool pass = true;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Field u = random_field_in_ball(basis, 2.0, p, rng);
      const Field v = random_field_in_ball(basis, 2.0, p, rng);
      const Field phi = random_field_in_ball(basis, 2.0, p, rng);
      const double g0 = plap.pairing(u, phi);
      const double lam_hi = std::ldexp(1.0, -4), lam_lo = std::ldexp(1.0, -14);
      const double d_hi = std::abs(plap.pairing(make_field(basis, u.coeffs + lam_hi * v.coeffs), phi) - g0);
      const double d_lo = std::abs(plap.pairing(make_field(basis, u.coeffs + lam_lo * v.coeffs), phi) - g0);
      // the directional map is locally Lipschitz for p > 2, so the gap at
      // lam_lo sits near the linear extrapolation from lam_hi
      const double bound = std::max(4.0 * d_hi * lam_lo / lam_hi, 1e-12);
      worst = std::max(worst, d_lo - bound);
      pass = pass && d_lo <= bound;
    }
    rep.audits.push_back(make_audit("hemicontinuity",
                                    "continuity of the weak p-Laplacian along line segments",
                                    1e-12, worst, pass));
  }
  {
    CounterRng rng(cfg.seed, 16);
    const PLaplacianForm linear(basis, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const Field u = random_field_in_ball(basis, 3.0, 2.0, rng);
      const Eigen::VectorXd lhs = linear.apply(u);
      const Eigen::VectorXd rhs = damp.matrix() * u.coeffs;
      worst = std::max(worst,
                       (lhs - rhs).cwiseAbs().maxCoeff() / (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
    rep.audits.push_back(make_audit("linear_limit", "quadratic case agrees with the damping form",
                                    kLinearLimitRelTol, worst, worst <= kLinearLimitRelTol));
  }
  {
    const SourceSpec src =
        cfg.source_kind != "zero" ? make_source(cfg) : SourceSpec::power(1.5, 1.5);
    double worst = 0.0;
    const double cf = src.growth_constant_f(), cfp = src.growth_constant_fprime();
    for (int i = 0; i <= 1000; ++i) {
      const double s = -10.0 + 0.02 * i;
      worst = std::max(worst, std::abs(src.f(s)) -
                                  cf * (std::pow(std::abs(s), src.r()) + 1.0) * (1.0 + 1e-12));
      worst = std::max(worst,
                       std::abs(src.f_prime(s)) -
                           cfp * (std::pow(std::abs(s), src.r() - 1.0) + 1.0) * (1.0 + 1e-12));
    }
    rep.audits.push_back(make_audit("source_growth", "growth bounds of the boundary source", 0.0,
                                    worst, worst <= 0.0));
  }
  {
    double worst = 0.0;
    for (int n : {1, 2, 4, 8}) {
      const double slope_cap = 1.875 / n + 1e-12;
      for (int i = 0; i <= 4000; ++i) {
        const double s = 2.5 * n * i / 4000.0;
        const double eta = cutoff_eta(n, s);
        if (std::abs(s) <= n) worst = std::max(worst, std::abs(eta - 1.0));
        if (std::abs(s) >= 2.0 * n) worst = std::max(worst, std::abs(eta));
        worst = std::max(worst, std::abs(cutoff_eta_prime(n, s)) - slope_cap);
      }
    }
    rep.audits.push_back(make_audit("cutoff_shape", "cutoff plateau, support, and slope bound",
                                    1e-12, worst, worst <= 1e-12));
  }
  {
    CounterRng rng(cfg.seed, 17);
    const SourceSpec src = SourceSpec::power(1.0, 1.5);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Field u = random_field_in_ball(basis, 2.0, p, rng);
      const BoundaryPair a = boundary_source_values(src, TruncationSpec::radial(2.0), u, p);
      const BoundaryPair b = boundary_source_values(src, TruncationSpec::none(), u, p);
      worst = std::max({worst, std::abs(a.left - b.left), std::abs(a.right - b.right)});
    }
    rep.audits.push_back(make_audit("radial_identity_in_ball",
                                    "radial truncation is the identity inside its ball",
                                    kIdentityTol, worst, worst <= kIdentityTol));
  }
  {
    CounterRng a(cfg.seed, 5), b(cfg.seed, 5), c(cfg.seed, 6);
    bool same = true, distinct = false;
    for (int i = 0; i < 100; ++i) {
      const std::uint64_t x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
      same = same && x == y;
      distinct = distinct || x != z;
    }
    rep.audits.push_back(make_audit("rng_reproducible", "seeded randomness reproduces", 0.0,
                                    same && distinct ? 0.0 : 1.0, same && distinct));
  }
  rep.metrics["trials"] = trials;
  rep.metrics["basis_size"] = basis->size();
}

}  // namespace

nlohmann::ordered_json to_json(const AuditResult& a) {
  nlohmann::ordered_json j;
  j["name"] = a.name;
  j["anchor"] = a.anchor;
  j["tolerance"] = a.tolerance;
  j["value"] = a.value;
  j["pass"] = a.pass;
  return j;
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["label"] = config.label;
  j["experiment"] = plapwave::to_string(config.experiment);
  j["config"] = config.to_json();
  j["validation"] = validation.to_json();
  auto arr = nlohmann::ordered_json::array();
  for (const AuditResult& a : audits) arr.push_back(plapwave::to_json(a));
  j["audits"] = arr;
  j["metrics"] = metrics;
  j["tables"] = tables;
  j["all_pass"] = all_pass;
  return j;
}

RunReport run_experiment(const RunConfig& cfg, ValidationPolicy policy) {
  RunReport rep;
  rep.config = cfg;
  rep.validation = validate_config(cfg, policy);
  if (!rep.validation.passed) {
    rep.all_pass = false;
    return rep;
  }
  switch (cfg.experiment) {
    case ExperimentKind::Single: run_single(cfg, rep); break;
    case ExperimentKind::NRefinement: run_n_refinement(cfg, rep); break;
    case ExperimentKind::DtRefinement: run_dt_refinement(cfg, rep); break;
    case ExperimentKind::TruncationCompare: run_truncation_compare(cfg, rep); break;
    case ExperimentKind::HorizonCheck: run_horizon_check(cfg, rep); break;
    case ExperimentKind::GlobalRegime: run_global_regime(cfg, rep); break;
    case ExperimentKind::PropertySuite: run_property_suite(cfg, rep); break;
  }
  rep.all_pass = true;
  for (const AuditResult& a : rep.audits) rep.all_pass = rep.all_pass && a.pass;
  return rep;
}

std::vector<std::string> emit_report(const RunReport& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files = {"report.json"};
  for (const auto& [name, traj] : rep.trajectories) {
    (void)traj;
    files.push_back(rep.config.label + "_" + name + ".csv");
    files.push_back(rep.config.label + "_" + name + "_meta.json");
  }

  nlohmann::ordered_json j = rep.to_json();
  j["files"] = files;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  j["generated_at"] = stamp;

  const std::filesystem::path dir(out_dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw std::runtime_error("emit_report: cannot open report.json in " + out_dir);
    out << j.dump(2) << "\n";
  }
  for (const auto& [name, traj] : rep.trajectories) {
    const std::string stem = rep.config.label + "_" + name;
    write_trajectory_csv(traj, (dir / (stem + ".csv")).string());
    write_trajectory_sidecar(traj, (dir / (stem + "_meta.json")).string(),
                             rep.validation.to_json());
  }
  return files;
}

}  // namespace plapwave
