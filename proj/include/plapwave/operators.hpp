#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "plapwave/basis.hpp"
#include "plapwave/rng.hpp"

namespace plapwave {

// |s|^(q-1) s, with the removable singularity at s=0 evaluated as 0 for q>0
inline double signed_pow(double s, double q) {
  if (s == 0.0) return 0.0;
  return s > 0.0 ? std::pow(s, q) : -std::pow(-s, q);
}

// Weak p-Laplacian with its Robin boundary part:
//   F_j = <A_p u, w_j> = integral |u'|^{p-2} u' w_j' dx
//         + |u(0)|^{p-2} u(0) w_j(0) + |u(1)|^{p-2} u(1) w_j(1)
// For piecewise-linear fields the volume integrand is constant per element,
// so assembly is exact.
class PLaplacianForm {
public:
  PLaplacianForm(std::shared_ptr<const BasisSet> basis, double p);

  double p() const { return p_; }
  const BasisSet& basis() const { return *basis_; }

  Eigen::VectorXd apply(const Field& u) const;
  // dF/dcoeffs; the element linearization is (p-1)|u'|^{p-2} per slope
  Eigen::MatrixXd tangent(const Field& u) const;
  double pairing(const Field& u, const Field& phi) const;

private:
  void check(const Field& u) const;

  std::shared_ptr<const BasisSet> basis_;
  double p_;
};

// Kelvin-Voigt damping form, D = stiffness + boundary_mass; this is the p = 2
// instance of the form above and v' D v = ||v||_{1,2}^2.
class DampingForm {
public:
  explicit DampingForm(std::shared_ptr<const BasisSet> basis);

  const Eigen::MatrixXd& matrix() const { return d_; }
  Eigen::VectorXd apply(const Field& v) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return d_ * v; }

private:
  std::shared_ptr<const BasisSet> basis_;
  Eigen::MatrixXd d_;
};

struct DualBoundReport {
  double lhs_estimate;  // max over unit-norm probes of |<A_p u, phi>|
  double rhs;           // 2 ||u||_{1,p}^{p-1}
  bool pass;
};

nlohmann::ordered_json to_json(const DualBoundReport& r);

DualBoundReport dual_norm_bound_check(const PLaplacianForm& form, const Field& u, int n_probes,
                                      CounterRng& rng);

// <A_p u - A_p v, u - v>; nonnegative up to roundoff
double monotonicity_check(const PLaplacianForm& form, const Field& u, const Field& v);

// pairings <A_p(u + lambda v), phi> along a line segment
std::vector<double> hemicontinuity_probe(const PLaplacianForm& form, const Field& u,
                                         const Field& v, const Field& phi,
                                         const std::vector<double>& lambdas);

}  // namespace plapwave
