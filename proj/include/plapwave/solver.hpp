#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "plapwave/basis.hpp"
#include "plapwave/operators.hpp"
#include "plapwave/sources.hpp"

namespace plapwave {

enum class Scheme { ImplicitMidpoint, ExplicitRk4 };
enum class Termination { Completed, BlowupDetected, NewtonFailure };

std::string to_string(Scheme s);
std::string to_string(Termination t);

struct ProblemSpec {
  double p = 2.5;
  std::shared_ptr<const BasisSet> basis;
  SourceSpec source = SourceSpec::zero();
  TruncationSpec truncation = TruncationSpec::none();
  Field u0, u1;
  double T = 1.0;
  double dt = 0.01;
  Scheme scheme = Scheme::ImplicitMidpoint;
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  double blowup_threshold = 1e12;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct State {
  double t = 0.0;
  Field u, v;
};

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;          // (1/2) v' mass v
  double potential = 0.0;        // (1/p) ||u||_{1,p}^p
  double script_E = 0.0;         // kinetic + potential
  double F_boundary = 0.0;       // F(u(0)) + F(u(1))
  double E = 0.0;                // script_E - F_boundary
  double dissipation_cum = 0.0;  // integral of ||v||_{1,2}^2
  double work_cum = 0.0;         // integral of the boundary work g(u) . v
  double balance_residual = 0.0; // script_E + dissipation_cum - script_E(0) - work_cum
};

struct Trajectory {
  ProblemSpec problem;
  std::vector<State> states;
  std::vector<EnergyRecord> records;
  Termination termination = Termination::Completed;
};

// Matrices, factorizations, and forms shared by every step of one problem.
class GalerkinSystem {
public:
  explicit GalerkinSystem(const ProblemSpec& prob);

  const ProblemSpec& problem() const { return prob_; }

  // acceleration from mass a = -P(u) - D v + S(u)
  Eigen::VectorXd accel(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

  std::optional<State> step_midpoint(const State& s) const;
  State step_rk4(const State& s) const;

  EnergyRecord instantaneous_record(const State& s) const;
  // integrands of the cumulative terms at a state
  double dissipation_integrand(const State& s) const;
  double work_integrand(const State& s) const;

private:
  Eigen::VectorXd source_vector(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd source_tangent(const Eigen::VectorXd& u) const;

  ProblemSpec prob_;
  PLaplacianForm plap_;
  DampingForm damp_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
};

// one-shot step entry points; integrate() reuses one GalerkinSystem instead
Eigen::VectorXd rhs(const ProblemSpec& prob, const State& s);
State step_implicit_midpoint(const ProblemSpec& prob, const State& s);
State step_rk4(const ProblemSpec& prob, const State& s);

Trajectory integrate(const ProblemSpec& prob);

// time-dependent test field phi sampled on the trajectory's time grid,
// with its time derivative
struct TestField {
  std::vector<Eigen::VectorXd> phi, phi_t;
};

TestField test_field_zero(const Trajectory& traj);
TestField test_field_static(const Trajectory& traj, const Eigen::VectorXd& coeffs);
TestField test_field_from_solution(const Trajectory& traj);

// both sides of the weak-solution identity at the final time, by trapezoidal
// quadrature over the trajectory; returns lhs - rhs
double weak_form_residual(const Trajectory& traj, const TestField& phi);

struct HorizonEstimate {
  double K = 0.0;
  double T0 = 0.0;
};

// smallest K = 2^m with K^{p/2} > sqrt(2p) E0 and K^p > 2p
double horizon_radius(double p, double script_E0);
HorizonEstimate local_horizon_estimate(double p, double script_E0, double C_K);

double gronwall_envelope(double script_E0, double C, double t);
// constant C with script_E(t) <= (script_E(0) + C t) exp(C t) in the global
// regime 2r <= p, from the growth constant of f and the interval trace bound
double gronwall_source_constant(const SourceSpec& src, double p);

struct BlowupFlag {
  bool flagged = false;
  double t_flag = 0.0;
  int index = -1;
};

BlowupFlag blowup_monitor(const Trajectory& traj, double threshold);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_trajectory_sidecar(const Trajectory& traj, const std::string& path,
                              const nlohmann::ordered_json& validation);

}  // namespace plapwave
