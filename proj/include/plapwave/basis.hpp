#pragma once

#include <functional>
#include <memory>

#include <Eigen/Dense>
#include <json.hpp>

#include "plapwave/mesh.hpp"

namespace plapwave {

enum class BasisKind { FemHat, RobinEigen };

class BasisSet;

// Coefficient vector of u = sum_j c_j w_j in a fixed basis.
struct Field {
  std::shared_ptr<const BasisSet> basis;
  Eigen::VectorXd coeffs;
};

// Galerkin basis over a mesh. FemHat is the piecewise-linear nodal basis.
// RobinEigen holds the lowest modes of the generalized symmetric eigenproblem
//   (stiffness + boundary_mass) w = lambda mass w
// on the hat space, mass-orthonormalized, so its members are still piecewise
// linear and every field reduces to nodal values on the underlying mesh.
class BasisSet {
public:
  static std::shared_ptr<const BasisSet> fem_hat(std::shared_ptr<const Mesh> mesh);
  static std::shared_ptr<const BasisSet> robin_eigen(std::shared_ptr<const Mesh> mesh, int count);

  BasisKind kind() const { return kind_; }
  int size() const { return static_cast<int>(mass_.rows()); }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  const Eigen::MatrixXd& mass() const { return mass_; }
  const Eigen::MatrixXd& stiffness() const { return stiffness_; }
  const Eigen::MatrixXd& boundary_mass() const { return boundary_mass_; }
  const Eigen::VectorXd& eigenvalues() const;

  // nodal values of the field on the mesh (identity for FemHat)
  Eigen::VectorXd to_nodal(const Eigen::VectorXd& coeffs) const;
  // pull a dual vector assembled against mesh hats back to this basis
  Eigen::VectorXd from_nodal_dual(const Eigen::VectorXd& dual) const;
  // congruence transform of a bilinear form assembled against mesh hats
  Eigen::MatrixXd from_nodal_form(const Eigen::MatrixXd& form) const;

  nlohmann::ordered_json to_json() const;
  static std::shared_ptr<const BasisSet> from_json(const nlohmann::json& j);

private:
  BasisSet() = default;

  BasisKind kind_ = BasisKind::FemHat;
  std::shared_ptr<const Mesh> mesh_;
  Eigen::MatrixXd mass_, stiffness_, boundary_mass_;
  Eigen::MatrixXd modes_;  // RobinEigen: nodal values per column
  Eigen::VectorXd eigvals_;
};

inline Field make_field(std::shared_ptr<const BasisSet> basis, Eigen::VectorXd coeffs) {
  return Field{std::move(basis), std::move(coeffs)};
}

Field project_L2(const std::shared_ptr<const BasisSet>& basis,
                 const std::function<double(double)>& g);
// nodal interpolation; FemHat only
Field interpolate(const std::shared_ptr<const BasisSet>& basis,
                  const std::function<double(double)>& g);
// projection in the Robin H1 inner product (stiffness + boundary_mass)
Field project_W(const std::shared_ptr<const BasisSet>& basis,
                const std::function<double(double)>& g,
                const std::function<double(double)>& g_prime);

double eval(const Field& u, double x);
double eval_grad(const Field& u, double x);

// ( integral |u'|^p + |u(0)|^p + |u(1)|^p )^(1/p); exact for piecewise-linear fields
double norm_w1p(const Field& u, double p);
double norm_l2(const Field& u);
double boundary_lq(const Field& u, double q);

// W^{1,p} distance, valid across bases and across nested or unrelated meshes
double w1p_distance(const Field& a, const Field& b, double p);

}  // namespace plapwave
