#include "plapwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plapwave {

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: point count must be positive");
  QuadRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton on the Legendre polynomial from the Chebyshev-angle initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

Mesh::Mesh(int n_elements, int quad_order) : quad_order_(quad_order) {
  if (n_elements < 1) throw std::invalid_argument("Mesh: n_elements must be positive");
  if (quad_order < 1) throw std::invalid_argument("Mesh: quad_order must be positive");
  nodes_.resize(n_elements + 1);
  for (int i = 0; i <= n_elements; ++i) nodes_[i] = static_cast<double>(i) / n_elements;
  nodes_.front() = 0.0;
  nodes_.back() = 1.0;
  rule_ = gauss_legendre(quad_order);
}

Mesh::Mesh(std::vector<double> nodes, int quad_order)
    : nodes_(std::move(nodes)), quad_order_(quad_order) {
  if (nodes_.size() < 2) throw std::invalid_argument("Mesh: need at least two nodes");
  if (quad_order_ < 1) throw std::invalid_argument("Mesh: quad_order must be positive");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw std::invalid_argument("Mesh: nodes must span [0,1]");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i] <= nodes_[i - 1])
      throw std::invalid_argument("Mesh: nodes must be strictly increasing");
  rule_ = gauss_legendre(quad_order_);
}

double Mesh::quad_point(int e, int q) const {
  const double h = element_size(e);
  return nodes_[e] + 0.5 * h * (rule_.points[q] + 1.0);
}

double Mesh::quad_weight(int e, int q) const {
  return 0.5 * element_size(e) * rule_.weights[q];
}

double Mesh::integrate(const std::function<double(double)>& g) const {
  double total = 0.0;
  for (int e = 0; e < n_elements(); ++e)
    for (int q = 0; q < quad_order_; ++q) total += quad_weight(e, q) * g(quad_point(e, q));
  return total;
}

int Mesh::locate(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("Mesh: coordinate outside [0,1]");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  int e = static_cast<int>(it - nodes_.begin()) - 1;
  return std::min(e, n_elements() - 1);
}

nlohmann::ordered_json Mesh::to_json() const {
  nlohmann::ordered_json j;
  j["node_coords"] = nodes_;
  j["quad_order"] = quad_order_;
  return j;
}

Mesh Mesh::from_json(const nlohmann::json& j) {
  return Mesh(j.at("node_coords").get<std::vector<double>>(), j.at("quad_order").get<int>());
}

}  // namespace plapwave
