// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances are pinned here and nowhere else.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "plapwave/operators.hpp"
#include "plapwave/rng.hpp"
#include "plapwave/solver.hpp"
#include "plapwave/sources.hpp"

using namespace plapwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool report(int id, const std::string& label, bool pass, double value, double tol) {
  std::printf("%2d %-58s %s  value=%.6g tol=%.6g\n", id, label.c_str(), pass ? "PASS" : "FAIL",
              value, tol);
  std::fflush(stdout);
  return pass;
}

std::shared_ptr<const BasisSet> hat(int n_elements) {
  return BasisSet::fem_hat(std::make_shared<const Mesh>(n_elements, 4));
}

Field random_field_in_ball(const std::shared_ptr<const BasisSet>& basis, double radius, double p,
                           CounterRng& rng) {
  Field u = make_field(basis, rng.normal_vector(basis->size()));
  const double nu = norm_w1p(u, p);
  if (nu > 0.0) u.coeffs *= radius * rng.uniform() / nu;
  return u;
}

ProblemSpec base_problem(int n_elements, double p, double T, double dt, SourceSpec src,
                         double amplitude = 0.4) {
  ProblemSpec prob;
  prob.p = p;
  prob.basis = hat(n_elements);
  prob.source = src;
  prob.u0 = interpolate(prob.basis, [=](double x) { return amplitude * std::sin(kPi * x); });
  prob.u1 = project_L2(prob.basis, [](double) { return 0.0; });
  prob.T = T;
  prob.dt = dt;
  return prob;
}

double max_abs_balance(const Trajectory& traj) {
  double m = 0.0;
  for (const EnergyRecord& r : traj.records) m = std::max(m, std::abs(r.balance_residual));
  return m;
}

double lsq_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
  const int n = static_cast<int>(dts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. <A_p u, u> = ||u||_{1,p}^p to 1e-10 relative, 1000 fields per p.
bool criterion_duality() {
  const double tol = 1e-10;
  const auto basis = hat(16);
  double worst = 0.0;
  for (double p : {2.1, 2.5, 2.9}) {
    const PLaplacianForm form(basis, p);
    CounterRng rng(2024, static_cast<unsigned long long>(p * 10));
    for (int k = 0; k < 1000; ++k) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      const double lhs = form.apply(u).dot(u.coeffs);
      const double rhs = std::pow(norm_w1p(u, p), p);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
    }
  }
  return report(1, "duality pairing equals the norm power", worst <= tol, worst, tol);
}

// 2. <A_p u - A_p v, u - v> >= -1e-10 (1 + ||u||^p + ||v||^p), 1000 pairs per p.
bool criterion_monotonicity() {
  double worst = 0.0;  // most negative normalized pairing
  const auto basis = hat(16);
  for (double p : {2.1, 2.5, 2.9}) {
    const PLaplacianForm form(basis, p);
    CounterRng rng(2025, static_cast<unsigned long long>(p * 10));
    for (int k = 0; k < 1000; ++k) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      const Field v = random_field_in_ball(basis, 3.0, p, rng);
      const double scale = 1.0 + std::pow(norm_w1p(u, p), p) + std::pow(norm_w1p(v, p), p);
      worst = std::min(worst, monotonicity_check(form, u, v) / scale);
    }
  }
  return report(2, "monotone pairing stays nonnegative", worst >= -1e-10, worst, -1e-10);
}

// 3. probe-maximized dual action <= 2 ||u||^{p-1} + 1e-9, 100 u x 200 probes.
bool criterion_dual_bound() {
  const auto basis = hat(16);
  double worst = 0.0;  // max violation lhs - rhs
  for (double p : {2.1, 2.5, 2.9}) {
    const PLaplacianForm form(basis, p);
    CounterRng rng(2026, static_cast<unsigned long long>(p * 10));
    for (int k = 0; k < 100; ++k) {
      const Field u = random_field_in_ball(basis, 3.0, p, rng);
      const DualBoundReport rep = dual_norm_bound_check(form, u, 200, rng);
      worst = std::max(worst, rep.lhs_estimate - rep.rhs);
    }
  }
  return report(3, "dual action bounded by twice the norm power", worst <= 1e-9, worst, 1e-9);
}

// shared order fit for the balance residual under dt halving
double balance_slope(SourceSpec src, bool check_monotone, bool& monotone_ok) {
  std::vector<double> dts, errs;
  monotone_ok = true;
  for (int k = 0; k < 4; ++k) {
    const double dt = 0.004 / std::ldexp(1.0, k);
    const Trajectory traj = integrate(base_problem(16, 2.5, 0.25, dt, src));
    if (traj.termination != Termination::Completed) monotone_ok = false;
    if (check_monotone) {
      const double slack = 1e-12 * std::max(1.0, traj.records.front().script_E);
      for (std::size_t i = 1; i < traj.records.size(); ++i)
        monotone_ok =
            monotone_ok && traj.records[i].script_E <= traj.records[i - 1].script_E + slack;
    }
    dts.push_back(dt);
    errs.push_back(max_abs_balance(traj));
  }
  return lsq_slope(dts, errs);
}

// 4. f = 0: energy non-increasing at every step, balance residual order 2.
bool criterion_energy_law_free() {
  bool monotone = false;
  const double slope = balance_slope(SourceSpec::zero(), true, monotone);
  const bool pass = monotone && slope >= 1.8 && slope <= 2.2;
  return report(4, "sourceless energy decays, balance order 2", pass, slope, 2.0);
}

// 5. power source r=1.5, p=2.5: balance residual order 2.
bool criterion_energy_law_source() {
  bool completed = false;
  const double slope = balance_slope(SourceSpec::power(1.0, 1.5), false, completed);
  const bool pass = completed && slope >= 1.8 && slope <= 2.2;
  return report(5, "sourced energy balance order 2", pass, slope, 2.0);
}

// 6. p = 2, f = 0, 8 hat functions: trajectory matches the matrix exponential
//    to 1e-8 in L2 at t = 1.
bool criterion_linear_oracle() {
  ProblemSpec prob = base_problem(7, 2.0, 1.0, 2.5e-4, SourceSpec::zero());
  prob.scheme = Scheme::ExplicitRk4;
  const Trajectory traj = integrate(prob);
  if (traj.termination != Termination::Completed)
    return report(6, "quadratic case matches the matrix exponential", false, -1.0, 1e-8);

  const int n = prob.basis->size();
  const Eigen::MatrixXd minv_s =
      prob.basis->mass().ldlt().solve(prob.basis->stiffness() + prob.basis->boundary_mass());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -minv_s;
  a.bottomRightCorner(n, n) = -minv_s;
  Eigen::VectorXd z0(2 * n);
  z0 << prob.u0.coeffs, prob.u1.coeffs;
  const Eigen::VectorXd z1 = oracle::expm(a) * z0;

  const Eigen::VectorXd du = traj.states.back().u.coeffs - z1.head(n);
  const double err = std::sqrt(du.dot(prob.basis->mass() * du));
  return report(6, "quadratic case matches the matrix exponential", err <= 1e-8, err, 1e-8);
}

// 7. N in {8,16,32,64}: successive terminal W^{1,p} distances strictly decrease.
bool criterion_self_convergence() {
  std::vector<Field> terminals;
  for (int n : {8, 16, 32, 64}) {
    const Trajectory traj = integrate(base_problem(n, 2.5, 0.25, 0.001, SourceSpec::power(0.5, 1.5)));
    if (traj.termination != Termination::Completed)
      return report(7, "terminal states converge under mesh refinement", false, -1.0, 1.0);
    terminals.push_back(traj.states.back().u);
  }
  std::vector<double> dists;
  for (std::size_t i = 0; i + 1 < terminals.size(); ++i)
    dists.push_back(w1p_distance(terminals[i], terminals[i + 1], 2.5));
  double worst_ratio = 0.0;
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < dists.size(); ++i) {
    worst_ratio = std::max(worst_ratio, dists[i + 1] / dists[i]);
    decreasing = decreasing && dists[i + 1] < dists[i];
  }
  return report(7, "terminal states converge under mesh refinement", decreasing, worst_ratio, 1.0);
}

// 8. K, T0 from the horizon estimate: the solution stays in the K-ball up to
//    T0 and the radial truncation is exact to 1e-12 there.
bool criterion_horizon() {
  ProblemSpec prob = base_problem(16, 2.5, 1.0, 0.002, SourceSpec::power(1.0, 1.5), 0.3);
  GalerkinSystem sys(prob);
  const double e0 = sys.instantaneous_record({0.0, prob.u0, prob.u1}).script_E;
  const HorizonEstimate est = local_horizon_estimate(
      prob.p, e0, [&] {
        CounterRng rng(2028, 7);
        const LipschitzProbeResult probe =
            lipschitz_probe(prob.source, TruncationSpec::none(), prob.basis,
                            horizon_radius(prob.p, e0), 400, prob.p, 4.0 / 3.0, rng);
        return std::max(probe.constant, 1e-6);
      }());
  prob.T = est.T0;
  prob.dt = est.T0 / std::max(4.0, std::round(est.T0 / 0.002));

  ProblemSpec truncated = prob;
  truncated.truncation = TruncationSpec::radial(est.K);
  const Trajectory plain = integrate(prob);
  const Trajectory trunc = integrate(truncated);
  if (plain.termination != Termination::Completed || trunc.termination != Termination::Completed ||
      plain.states.size() != trunc.states.size())
    return report(8, "solution stays in the predicted horizon ball", false, -1.0, 0.0);

  double max_norm = 0.0, max_diff = 0.0;
  for (std::size_t k = 0; k < plain.states.size(); ++k) {
    max_norm = std::max(max_norm, norm_w1p(plain.states[k].u, prob.p));
    max_diff = std::max(
        max_diff, (plain.states[k].u.coeffs - trunc.states[k].u.coeffs).cwiseAbs().maxCoeff());
  }
  const bool contained = max_norm <= est.K;
  const bool identical = max_diff <= 1e-12;
  report(8, "solution stays in the predicted horizon ball", contained, max_norm, est.K);
  return report(8, "radial truncation is dormant inside the ball", identical, max_diff, 1e-12) &&
         contained;
}

// 9. r = p/2, p = 2.5, T = 2: script_E under the growth envelope throughout.
bool criterion_global_envelope() {
  const SourceSpec src = SourceSpec::power(1.0, 1.25);
  const Trajectory traj = integrate(base_problem(16, 2.5, 2.0, 0.004, src));
  if (traj.termination != Termination::Completed)
    return report(9, "subcritical energy stays under the growth envelope", false, -1.0, 0.0);
  const double c = gronwall_source_constant(src, 2.5);
  const double e0 = traj.records.front().script_E;
  double worst = -1e300;
  for (const EnergyRecord& r : traj.records)
    worst = std::max(worst, r.script_E - gronwall_envelope(e0, c, r.t));
  return report(9, "subcritical energy stays under the growth envelope", worst <= 0.0, worst, 0.0);
}

// 10. doubling bound for the radial truncation over 5000 pairs, and cutoff
//     family constants on a fixed ball within 5% of the untruncated value.
bool criterion_truncation_certificates() {
  const SourceSpec src = SourceSpec::power(1.0, 1.5);
  const auto basis = hat(16);
  CounterRng rng(2030, 1);
  const RadialLipschitzCertificate cert =
      certify_radial_doubling(src, 2.0, basis, 5000, 2.5, 4.0 / 3.0, rng);
  const bool doubling = report(10, "global truncated constant within twice the local", cert.pass,
                               cert.global_constant, 2.0 * cert.local_constant + 1e-9);

  const double ball = 1.0;
  auto probe_with = [&](const TruncationSpec& trunc) {
    CounterRng fresh(2031, 5);  // identical stream, identical sample pairs
    return lipschitz_probe(src, trunc, basis, ball, 400, 2.5, 4.0 / 3.0, fresh).constant;
  };
  const double untruncated = probe_with(TruncationSpec::none());
  double family_max = 0.0;
  for (int n : {1, 2, 4, 8, 16})
    family_max = std::max(family_max, probe_with(TruncationSpec::cutoff(n)));
  const bool uniform = family_max <= 1.05 * untruncated;
  return report(10, "cutoff family constants uniform on the ball", uniform,
                family_max / untruncated, 1.05) &&
         doubling;
}

// 11. weak-form residual order 2 for the zero, static, and solution test fields.
bool criterion_weak_residual() {
  std::vector<double> dts;
  std::vector<double> zero_res, static_res, solution_res;
  for (int k = 0; k < 4; ++k) {
    const double dt = 0.004 / std::ldexp(1.0, k);
    const Trajectory traj = integrate(base_problem(8, 2.5, 0.2, dt, SourceSpec::power(0.5, 1.5)));
    if (traj.termination != Termination::Completed)
      return report(11, "weak residual vanishes at second order", false, -1.0, 2.0);
    dts.push_back(dt);
    zero_res.push_back(std::abs(weak_form_residual(traj, test_field_zero(traj))));
    static_res.push_back(std::abs(weak_form_residual(
        traj, test_field_static(traj, Eigen::VectorXd::Unit(traj.problem.basis->size(), 0)))));
    solution_res.push_back(std::abs(weak_form_residual(traj, test_field_from_solution(traj))));
  }
  bool zero_floor = true;
  for (double r : zero_res) zero_floor = zero_floor && r < 1e-13;
  const double s_static = lsq_slope(dts, static_res);
  const double s_solution = lsq_slope(dts, solution_res);
  const double worst =
      std::abs(s_static - 2.0) > std::abs(s_solution - 2.0) ? s_static : s_solution;
  const bool pass = zero_floor && s_static >= 1.8 && s_static <= 2.2 && s_solution >= 1.8 &&
                    s_solution <= 2.2;
  return report(11, "weak residual vanishes at second order", pass, worst, 2.0);
}

// 12. cutoff plateau and support exact; max slope <= 1.875/n on a 1e5 grid.
bool criterion_cutoff_shape() {
  bool exact = true;
  double worst_scaled = 0.0;  // max |eta'| n / 1.875 across the family
  for (int n : {1, 2, 4, 8, 16}) {
    const int grid = 100000;
    double max_slope = 0.0;
    for (int i = 0; i <= grid; ++i) {
      const double s = -2.5 * n + 5.0 * n * i / grid;
      const double eta = cutoff_eta(n, s);
      if (std::abs(s) <= n && eta != 1.0) exact = false;
      if (std::abs(s) >= 2.0 * n && eta != 0.0) exact = false;
      max_slope = std::max(max_slope, std::abs(cutoff_eta_prime(n, s)));
    }
    worst_scaled = std::max(worst_scaled, max_slope * n / 1.875);
  }
  const bool pass = exact && worst_scaled <= 1.0 + 1e-12;
  return report(12, "cutoff plateau and support exact, slope bounded", pass, worst_scaled, 1.0);
}

}  // namespace

int main() {
  using Criterion = std::function<bool()>;
  const std::vector<Criterion> criteria = {
      criterion_duality,          criterion_monotonicity,
      criterion_dual_bound,       criterion_energy_law_free,
      criterion_energy_law_source, criterion_linear_oracle,
      criterion_self_convergence, criterion_horizon,
      criterion_global_envelope,  criterion_truncation_certificates,
      criterion_weak_residual,    criterion_cutoff_shape,
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      if (!criteria[i]()) ++failures;
    } catch (const std::exception& e) {
      std::printf("%2zu %-58s FAIL  exception: %s\n", i + 1, "criterion threw", e.what());
      ++failures;
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
