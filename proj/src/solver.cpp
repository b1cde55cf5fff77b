#include "plapwave/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plapwave {

std::string to_string(Scheme s) {
  return s == Scheme::ImplicitMidpoint ? "implicit_midpoint" : "explicit_rk4";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::BlowupDetected: return "blowup_detected";
    case Termination::NewtonFailure: return "newton_failure";
  }
  return "unknown";
}

void ProblemSpec::validate() const {
  if (!basis) throw std::invalid_argument("ProblemSpec: basis not set");
  if (p <= 1.0) throw std::invalid_argument("ProblemSpec: p must exceed 1");
  if (dt <= 0.0) throw std::invalid_argument("ProblemSpec: dt must be positive");
  if (T < dt) throw std::invalid_argument("ProblemSpec: horizon T must be at least dt");
  if (newton_tol <= 0.0) throw std::invalid_argument("ProblemSpec: newton_tol must be positive");
  if (newton_max_iter < 1)
    throw std::invalid_argument("ProblemSpec: newton_max_iter must be at least 1");
  if (blowup_threshold <= 0.0)
    throw std::invalid_argument("ProblemSpec: blowup_threshold must be positive");
  if (u0.basis.get() != basis.get() || u1.basis.get() != basis.get())
    throw std::invalid_argument("ProblemSpec: initial data must live on the problem basis");
  if (u0.coeffs.size() != basis->size() || u1.coeffs.size() != basis->size())
    throw std::invalid_argument("ProblemSpec: initial data length mismatch");
  const int needed = static_cast<int>(std::ceil((p + 2.0) / 2.0));
  if (basis->mesh().quad_order() < needed)
    throw std::invalid_argument("ProblemSpec: quad_order " +
                                std::to_string(basis->mesh().quad_order()) +
                                " too low for p (need at least " + std::to_string(needed) + ")");
}

nlohmann::ordered_json ProblemSpec::to_json() const {
  nlohmann::ordered_json j;
  j["p"] = p;
  j["basis"] = {{"kind", basis->kind() == BasisKind::FemHat ? "fem_hat" : "robin_eigen"},
                {"size", basis->size()},
                {"n_elements", basis->mesh().n_elements()},
                {"quad_order", basis->mesh().quad_order()}};
  j["source"] = source.to_json();
  j["truncation"] = truncation.to_json();
  j["u0_coeffs"] = std::vector<double>(u0.coeffs.data(), u0.coeffs.data() + u0.coeffs.size());
  j["u1_coeffs"] = std::vector<double>(u1.coeffs.data(), u1.coeffs.data() + u1.coeffs.size());
  j["T"] = T;
  j["dt"] = dt;
  j["scheme"] = to_string(scheme);
  j["newton_tol"] = newton_tol;
  j["newton_max_iter"] = newton_max_iter;
  j["blowup_threshold"] = blowup_threshold;
  return j;
}

GalerkinSystem::GalerkinSystem(const ProblemSpec& prob)
    : prob_(prob), plap_(prob.basis, prob.p), damp_(prob.basis) {
  prob_.validate();
  mass_llt_.compute(prob_.basis->mass());
  if (mass_llt_.info() != Eigen::Success)
    throw std::runtime_error("GalerkinSystem: mass matrix factorization failed");
}

Eigen::VectorXd GalerkinSystem::source_vector(const Eigen::VectorXd& u) const {
  if (prob_.source.is_zero()) return Eigen::VectorXd::Zero(prob_.basis->size());
  return boundary_source_vector(prob_.basis, prob_.source, prob_.truncation,
                                make_field(prob_.basis, u), prob_.p);
}

Eigen::MatrixXd GalerkinSystem::source_tangent(const Eigen::VectorXd& u) const {
  const int nn = prob_.basis->mesh().n_nodes();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nn, nn);
  if (prob_.source.is_zero()) return prob_.basis->from_nodal_form(t);
  const Eigen::VectorXd nodal = prob_.basis->to_nodal(u);
  const double left = nodal[0], right = nodal[nn - 1];
  double dl = 0.0, dr = 0.0;
  switch (prob_.truncation.mode) {
    case TruncationMode::None:
      dl = prob_.source.f_prime(left);
      dr = prob_.source.f_prime(right);
      break;
    case TruncationMode::RadialK: {
      // trace derivative at frozen norm; the norm coupling is dropped from the
      // tangent while the Newton residual keeps the exact truncated source
      const double nu = norm_w1p(make_field(prob_.basis, u), prob_.p);
      const double scale = nu <= prob_.truncation.K ? 1.0 : prob_.truncation.K / nu;
      dl = prob_.source.f_prime(scale * left) * scale;
      dr = prob_.source.f_prime(scale * right) * scale;
      break;
    }
    case TruncationMode::CutoffN: {
      const int n = prob_.truncation.n;
      dl = prob_.source.f_prime(left) * cutoff_eta(n, left) +
           prob_.source.f(left) * cutoff_eta_prime(n, left);
      dr = prob_.source.f_prime(right) * cutoff_eta(n, right) +
           prob_.source.f(right) * cutoff_eta_prime(n, right);
      break;
    }
  }
  t(0, 0) = dl;
  t(nn - 1, nn - 1) = dr;
  return prob_.basis->from_nodal_form(t);
}

Eigen::VectorXd GalerkinSystem::accel(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  const Eigen::VectorXd rhs =
      -plap_.apply(make_field(prob_.basis, u)) - damp_.apply(v) + source_vector(u);
  return mass_llt_.solve(rhs);
}

// Midpoint system in the velocity unknown w = v(t+dt):
//   u(t+dt) = u + dt (v + w)/2,  um = u + dt (v + w)/4,  vm = (v + w)/2
//   R(w) = M (w - v) + dt [ P(um) + D vm - S(um) ] = 0
std::optional<State> GalerkinSystem::step_midpoint(const State& s) const {
  const double dt = prob_.dt;
  const Eigen::MatrixXd& m = prob_.basis->mass();
  const Eigen::VectorXd &un = s.u.coeffs, &vn = s.v.coeffs;

  Eigen::VectorXd w = vn + dt * accel(un, vn);
  bool converged = false;
  for (int iter = 0; iter < prob_.newton_max_iter; ++iter) {
    const Eigen::VectorXd um = un + 0.25 * dt * (vn + w);
    const Eigen::VectorXd vm = 0.5 * (vn + w);
    const Field um_f = make_field(prob_.basis, um);
    const Eigen::VectorXd residual =
        m * (w - vn) + dt * (plap_.apply(um_f) + damp_.apply(vm) - source_vector(um));
    if (!residual.allFinite()) return std::nullopt;
    if (residual.norm() < prob_.newton_tol) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd jac = m + 0.5 * dt * damp_.matrix() +
                                0.25 * dt * dt * (plap_.tangent(um_f) - source_tangent(um));
    w -= jac.partialPivLu().solve(residual);
    if (!w.allFinite()) return std::nullopt;
  }
  if (!converged) return std::nullopt;
  State out;
  out.t = s.t + dt;
  out.u = make_field(prob_.basis, un + 0.5 * dt * (vn + w));
  out.v = make_field(prob_.basis, w);
  return out;
}

State GalerkinSystem::step_rk4(const State& s) const {
  const double dt = prob_.dt;
  const Eigen::VectorXd &u = s.u.coeffs, &v = s.v.coeffs;
  const Eigen::VectorXd k1u = v, k1v = accel(u, v);
  const Eigen::VectorXd k2u = v + 0.5 * dt * k1v,
                        k2v = accel(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
  const Eigen::VectorXd k3u = v + 0.5 * dt * k2v,
                        k3v = accel(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
  const Eigen::VectorXd k4u = v + dt * k3v, k4v = accel(u + dt * k3u, v + dt * k3v);
  State out;
  out.t = s.t + dt;
  out.u = make_field(prob_.basis, u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u));
  out.v = make_field(prob_.basis, v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v));
  return out;
}

EnergyRecord GalerkinSystem::instantaneous_record(const State& s) const {
  EnergyRecord rec;
  rec.t = s.t;
  rec.kinetic = 0.5 * s.v.coeffs.dot(prob_.basis->mass() * s.v.coeffs);
  rec.potential = std::pow(norm_w1p(s.u, prob_.p), prob_.p) / prob_.p;
  rec.script_E = rec.kinetic + rec.potential;
  const Eigen::VectorXd nodal = prob_.basis->to_nodal(s.u.coeffs);
  rec.F_boundary =
      prob_.source.primitive(nodal[0]) + prob_.source.primitive(nodal[nodal.size() - 1]);
  rec.E = rec.script_E - rec.F_boundary;
  return rec;
}

double GalerkinSystem::dissipation_integrand(const State& s) const {
  return s.v.coeffs.dot(damp_.matrix() * s.v.coeffs);
}

double GalerkinSystem::work_integrand(const State& s) const {
  if (prob_.source.is_zero()) return 0.0;
  const BoundaryPair g = boundary_source_values(prob_.source, prob_.truncation, s.u, prob_.p);
  const Eigen::VectorXd vn = prob_.basis->to_nodal(s.v.coeffs);
  return g.left * vn[0] + g.right * vn[vn.size() - 1];
}

Eigen::VectorXd rhs(const ProblemSpec& prob, const State& s) {
  return GalerkinSystem(prob).accel(s.u.coeffs, s.v.coeffs);
}

State step_implicit_midpoint(const ProblemSpec& prob, const State& s) {
  auto out = GalerkinSystem(prob).step_midpoint(s);
  if (!out)
    throw std::runtime_error("step_implicit_midpoint: Newton did not converge within " +
                             std::to_string(prob.newton_max_iter) + " iterations");
  return *out;
}

State step_rk4(const ProblemSpec& prob, const State& s) { return GalerkinSystem(prob).step_rk4(s); }

Trajectory integrate(const ProblemSpec& prob) {
  GalerkinSystem sys(prob);
  Trajectory traj;
  traj.problem = prob;

  State state{0.0, prob.u0, prob.u1};
  EnergyRecord rec = sys.instantaneous_record(state);
  const double e0 = rec.script_E;
  double diss_prev = sys.dissipation_integrand(state);
  double work_prev = sys.work_integrand(state);
  traj.states.push_back(state);
  traj.records.push_back(rec);
  if (!(rec.script_E <= prob.blowup_threshold)) {
    traj.termination = Termination::BlowupDetected;
    return traj;
  }

  const long n_steps = std::max(1L, std::lround(prob.T / prob.dt));
  for (long k = 1; k <= n_steps; ++k) {
    State next;
    if (prob.scheme == Scheme::ImplicitMidpoint) {
      auto stepped = sys.step_midpoint(state);
      if (!stepped) {
        traj.termination = Termination::NewtonFailure;
        return traj;
      }
      next = *stepped;
    } else {
      next = sys.step_rk4(state);
    }
    next.t = k * prob.dt;
    if (!next.u.coeffs.allFinite() || !next.v.coeffs.allFinite()) {
      traj.termination = Termination::BlowupDetected;
      return traj;
    }

    EnergyRecord r = sys.instantaneous_record(next);
    const double diss_here = sys.dissipation_integrand(next);
    const double work_here = sys.work_integrand(next);
    r.dissipation_cum = rec.dissipation_cum + 0.5 * prob.dt * (diss_prev + diss_here);
    r.work_cum = rec.work_cum + 0.5 * prob.dt * (work_prev + work_here);
    r.balance_residual = r.script_E + r.dissipation_cum - e0 - r.work_cum;

    traj.states.push_back(next);
    traj.records.push_back(r);
    state = next;
    rec = r;
    diss_prev = diss_here;
    work_prev = work_here;
    if (!(r.script_E + r.dissipation_cum <= prob.blowup_threshold) ||
        !std::isfinite(r.script_E)) {
      traj.termination = Termination::BlowupDetected;
      return traj;
    }
  }
  traj.termination = Termination::Completed;
  return traj;
}

TestField test_field_zero(const Trajectory& traj) {
  TestField tf;
  const int n = traj.problem.basis->size();
  tf.phi.assign(traj.states.size(), Eigen::VectorXd::Zero(n));
  tf.phi_t.assign(traj.states.size(), Eigen::VectorXd::Zero(n));
  return tf;
}

TestField test_field_static(const Trajectory& traj, const Eigen::VectorXd& coeffs) {
  TestField tf;
  tf.phi.assign(traj.states.size(), coeffs);
  tf.phi_t.assign(traj.states.size(), Eigen::VectorXd::Zero(coeffs.size()));
  return tf;
}

TestField test_field_from_solution(const Trajectory& traj) {
  TestField tf;
  tf.phi.reserve(traj.states.size());
  tf.phi_t.reserve(traj.states.size());
  for (const State& s : traj.states) {
    tf.phi.push_back(s.u.coeffs);
    tf.phi_t.push_back(s.v.coeffs);
  }
  return tf;
}

double weak_form_residual(const Trajectory& traj, const TestField& tf) {
  const std::size_t n = traj.states.size();
  if (n < 1) throw std::invalid_argument("weak_form_residual: empty trajectory");
  if (tf.phi.size() != n || tf.phi_t.size() != n)
    throw std::invalid_argument("weak_form_residual: test field not aligned with the time grid");
  const ProblemSpec& prob = traj.problem;
  const int dim = prob.basis->size();
  for (std::size_t k = 0; k < n; ++k)
    if (tf.phi[k].size() != dim || tf.phi_t[k].size() != dim)
      throw std::invalid_argument("weak_form_residual: test field length mismatch");

  const PLaplacianForm plap(prob.basis, prob.p);
  const DampingForm damp(prob.basis);
  const Eigen::MatrixXd& m = prob.basis->mass();
  double lhs = traj.states.back().v.coeffs.dot(m * tf.phi.back()) -
               prob.u1.coeffs.dot(m * tf.phi.front());
  double rhs_work = 0.0;
  const double dt = prob.dt;
  for (std::size_t k = 0; k < n && n > 1; ++k) {
    const double w = dt * ((k == 0 || k + 1 == n) ? 0.5 : 1.0);
    const State& s = traj.states[k];
    lhs -= w * s.v.coeffs.dot(m * tf.phi_t[k]);
    lhs += w * plap.apply(s.u).dot(tf.phi[k]);
    lhs += w * (damp.matrix() * s.v.coeffs).dot(tf.phi[k]);
    const BoundaryPair g = boundary_source_values(prob.source, prob.truncation, s.u, prob.p);
    const Eigen::VectorXd phin = prob.basis->to_nodal(tf.phi[k]);
    rhs_work += w * (g.left * phin[0] + g.right * phin[phin.size() - 1]);
  }
  return lhs - rhs_work;
}

double horizon_radius(double p, double script_E0) {
  if (p <= 1.0) throw std::invalid_argument("horizon_radius: p must exceed 1");
  if (script_E0 < 0.0) throw std::invalid_argument("horizon_radius: energy must be nonnegative");
  for (int m = 0; m <= 1024; ++m) {
    const double k = std::ldexp(1.0, m);
    if (!std::isfinite(std::pow(k, p))) break;
    if (std::pow(k, p) > 2.0 * p && std::pow(k, 0.5 * p) > std::sqrt(2.0 * p) * script_E0)
      return k;
  }
  throw std::runtime_error("horizon_radius: no representable dyadic radius");
}

HorizonEstimate local_horizon_estimate(double p, double script_E0, double C_K) {
  if (C_K <= 0.0) throw std::invalid_argument("local_horizon_estimate: C_K must be positive");
  const double k = horizon_radius(p, script_E0);
  const double s2p = std::sqrt(2.0 * p);
  const double t1 = (std::pow(k, 0.5 * p) - s2p * script_E0) / (s2p * C_K);
  const double t2 = (p * std::log(k) - std::log(2.0 * p)) / (2.0 * p * C_K);
  return {k, std::min(t1, t2)};
}

double gronwall_envelope(double script_E0, double C, double t) {
  if (C < 0.0) throw std::invalid_argument("gronwall_envelope: C must be nonnegative");
  if (t < 0.0) throw std::invalid_argument("gronwall_envelope: t must be nonnegative");
  return (script_E0 + C * t) * std::exp(C * t);
}

double gronwall_source_constant(const SourceSpec& src, double p) {
  const double cf = src.growth_constant_f();
  return cf * cf * std::max(p, 4.0);
}

BlowupFlag blowup_monitor(const Trajectory& traj, double threshold) {
  if (threshold <= 0.0) throw std::invalid_argument("blowup_monitor: threshold must be positive");
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const double level = traj.records[k].script_E + traj.records[k].dissipation_cum;
    if (!std::isfinite(level) || level > threshold)
      return {true, traj.records[k].t, static_cast<int>(k)};
  }
  return {};
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  out << "t,kinetic,potential,script_E,E,dissipation_cum,work_cum,balance_residual\n";
  char buf[64];
  auto put = [&](double x, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << sep;
  };
  for (const EnergyRecord& r : traj.records) {
    put(r.t, ',');
    put(r.kinetic, ',');
    put(r.potential, ',');
    put(r.script_E, ',');
    put(r.E, ',');
    put(r.dissipation_cum, ',');
    put(r.work_cum, ',');
    put(r.balance_residual, '\n');
  }
}

void write_trajectory_sidecar(const Trajectory& traj, const std::string& path,
                              const nlohmann::ordered_json& validation) {
  nlohmann::ordered_json j;
  j["problem"] = traj.problem.to_json();
  j["validation"] = validation;
  j["termination"] = to_string(traj.termination);
  j["n_records"] = traj.records.size();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectory_sidecar: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace plapwave
