#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace plapwave {

// Gauss-Legendre rule on [-1,1]; n points integrate degree 2n-1 exactly.
struct QuadRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

QuadRule gauss_legendre(int n);

// Partition of [0,1]. The boundary is the pair of endpoints, so boundary
// integrals are point evaluations; the element rule covers the volume terms.
class Mesh {
public:
  Mesh(int n_elements, int quad_order);

  int n_elements() const { return static_cast<int>(nodes_.size()) - 1; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int quad_order() const { return quad_order_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int i) const { return nodes_[i]; }
  double element_size(int e) const { return nodes_[e + 1] - nodes_[e]; }

  // global coordinate and weight of quadrature point q inside element e
  double quad_point(int e, int q) const;
  double quad_weight(int e, int q) const;

  double integrate(const std::function<double(double)>& g) const;

  // index of the element containing x; nodes belong to the element on their right
  int locate(double x) const;

  nlohmann::ordered_json to_json() const;
  static Mesh from_json(const nlohmann::json& j);

private:
  Mesh(std::vector<double> nodes, int quad_order);

  std::vector<double> nodes_;
  int quad_order_;
  QuadRule rule_;
};

}  // namespace plapwave
