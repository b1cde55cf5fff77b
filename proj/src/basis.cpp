#include "plapwave/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace plapwave {

namespace {

void assemble_fem(const Mesh& mesh, Eigen::MatrixXd& mass, Eigen::MatrixXd& stiffness,
                  Eigen::MatrixXd& boundary) {
  const int nn = mesh.n_nodes();
  mass = Eigen::MatrixXd::Zero(nn, nn);
  stiffness = Eigen::MatrixXd::Zero(nn, nn);
  boundary = Eigen::MatrixXd::Zero(nn, nn);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double h = mesh.element_size(e);
    mass(e, e) += h / 3.0;
    mass(e + 1, e + 1) += h / 3.0;
    mass(e, e + 1) += h / 6.0;
    mass(e + 1, e) += h / 6.0;
    stiffness(e, e) += 1.0 / h;
    stiffness(e + 1, e + 1) += 1.0 / h;
    stiffness(e, e + 1) -= 1.0 / h;
    stiffness(e + 1, e) -= 1.0 / h;
  }
  boundary(0, 0) = 1.0;
  boundary(nn - 1, nn - 1) = 1.0;
}

nlohmann::ordered_json matrix_triplets(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out.push_back({i, j, m(i, j)});
  return out;
}

Eigen::MatrixXd matrix_from_triplets(int rows, int cols, const nlohmann::json& triplets) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& t : triplets) m(t.at(0).get<int>(), t.at(1).get<int>()) = t.at(2).get<double>();
  return m;
}

}  // namespace

std::shared_ptr<const BasisSet> BasisSet::fem_hat(std::shared_ptr<const Mesh> mesh) {
  if (!mesh) throw std::invalid_argument("fem_hat: null mesh");
  auto b = std::shared_ptr<BasisSet>(new BasisSet());
  b->kind_ = BasisKind::FemHat;
  b->mesh_ = std::move(mesh);
  assemble_fem(*b->mesh_, b->mass_, b->stiffness_, b->boundary_mass_);
  return b;
}

std::shared_ptr<const BasisSet> BasisSet::robin_eigen(std::shared_ptr<const Mesh> mesh,
                                                      int count) {
  if (!mesh) throw std::invalid_argument("robin_eigen: null mesh");
  const int nn = mesh->n_nodes();
  if (count < 1) throw std::invalid_argument("robin_eigen: count must be positive");
  if (count > nn)
    throw std::invalid_argument("robin_eigen: count exceeds the nodal space dimension");

  Eigen::MatrixXd mass, stiffness, boundary;
  assemble_fem(*mesh, mass, stiffness, boundary);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(stiffness + boundary, mass);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("robin_eigen: generalized eigensolver did not converge (n = " +
                             std::to_string(nn) + ")");

  auto b = std::shared_ptr<BasisSet>(new BasisSet());
  b->kind_ = BasisKind::RobinEigen;
  b->mesh_ = std::move(mesh);
  b->modes_ = es.eigenvectors().leftCols(count);
  b->eigvals_ = es.eigenvalues().head(count);
  // canonical sign: largest component of each mode is positive
  for (int k = 0; k < count; ++k) {
    int imax = 0;
    b->modes_.col(k).cwiseAbs().maxCoeff(&imax);
    if (b->modes_(imax, k) < 0.0) b->modes_.col(k) *= -1.0;
  }
  if (b->eigvals_[0] <= 0.0)
    throw std::runtime_error("robin_eigen: nonpositive leading eigenvalue " +
                             std::to_string(b->eigvals_[0]));

  auto congruence = [&](const Eigen::MatrixXd& a) {
    Eigen::MatrixXd r = b->modes_.transpose() * a * b->modes_;
    return ((r + r.transpose()) / 2.0).eval();
  };
  b->mass_ = congruence(mass);
  b->stiffness_ = congruence(stiffness);
  b->boundary_mass_ = congruence(boundary);
  return b;
}

const Eigen::VectorXd& BasisSet::eigenvalues() const {
  if (kind_ != BasisKind::RobinEigen)
    throw std::invalid_argument("eigenvalues: available for the Robin eigenbasis only");
  return eigvals_;
}

Eigen::VectorXd BasisSet::to_nodal(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != size()) throw std::invalid_argument("to_nodal: coefficient length mismatch");
  if (kind_ == BasisKind::FemHat) return coeffs;
  return modes_ * coeffs;
}

Eigen::VectorXd BasisSet::from_nodal_dual(const Eigen::VectorXd& dual) const {
  if (dual.size() != mesh_->n_nodes())
    throw std::invalid_argument("from_nodal_dual: length mismatch");
  if (kind_ == BasisKind::FemHat) return dual;
  return modes_.transpose() * dual;
}

Eigen::MatrixXd BasisSet::from_nodal_form(const Eigen::MatrixXd& form) const {
  if (kind_ == BasisKind::FemHat) return form;
  Eigen::MatrixXd r = modes_.transpose() * form * modes_;
  return (r + r.transpose()) / 2.0;
}

nlohmann::ordered_json BasisSet::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind_ == BasisKind::FemHat ? "fem_hat" : "robin_eigen";
  j["size"] = size();
  j["mesh"] = mesh_->to_json();
  j["mass"] = matrix_triplets(mass_);
  j["stiffness"] = matrix_triplets(stiffness_);
  j["boundary_mass"] = matrix_triplets(boundary_mass_);
  if (kind_ == BasisKind::RobinEigen) {
    j["eigvals"] = std::vector<double>(eigvals_.data(), eigvals_.data() + eigvals_.size());
    j["modes"] = matrix_triplets(modes_);
  }
  return j;
}

std::shared_ptr<const BasisSet> BasisSet::from_json(const nlohmann::json& j) {
  auto mesh = std::make_shared<const Mesh>(Mesh::from_json(j.at("mesh")));
  const int n = j.at("size").get<int>();
  auto b = std::shared_ptr<BasisSet>(new BasisSet());
  b->mesh_ = mesh;
  b->kind_ = j.at("kind").get<std::string>() == "robin_eigen" ? BasisKind::RobinEigen
                                                              : BasisKind::FemHat;
  b->mass_ = matrix_from_triplets(n, n, j.at("mass"));
  b->stiffness_ = matrix_from_triplets(n, n, j.at("stiffness"));
  b->boundary_mass_ = matrix_from_triplets(n, n, j.at("boundary_mass"));
  if (b->kind_ == BasisKind::RobinEigen) {
    const auto ev = j.at("eigvals").get<std::vector<double>>();
    b->eigvals_ = Eigen::Map<const Eigen::VectorXd>(ev.data(), ev.size());
    b->modes_ = matrix_from_triplets(mesh->n_nodes(), n, j.at("modes"));
  }
  return b;
}

Field project_L2(const std::shared_ptr<const BasisSet>& basis,
                 const std::function<double(double)>& g) {
  const Mesh& mesh = basis->mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double x0 = mesh.node(e), h = mesh.element_size(e);
    for (int q = 0; q < mesh.quad_order(); ++q) {
      const double x = mesh.quad_point(e, q), w = mesh.quad_weight(e, q);
      const double t = (x - x0) / h;
      const double gv = g(x);
      load[e] += w * gv * (1.0 - t);
      load[e + 1] += w * gv * t;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(basis->mass());
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("project_L2: mass factorization failed");
  return make_field(basis, llt.solve(basis->from_nodal_dual(load)));
}

Field interpolate(const std::shared_ptr<const BasisSet>& basis,
                  const std::function<double(double)>& g) {
  if (basis->kind() != BasisKind::FemHat)
    throw std::invalid_argument("interpolate: nodal basis required (use project_L2 or project_W)");
  const Mesh& mesh = basis->mesh();
  Eigen::VectorXd c(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) c[i] = g(mesh.node(i));
  return make_field(basis, std::move(c));
}

Field project_W(const std::shared_ptr<const BasisSet>& basis,
                const std::function<double(double)>& g,
                const std::function<double(double)>& g_prime) {
  const Mesh& mesh = basis->mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double h = mesh.element_size(e);
    for (int q = 0; q < mesh.quad_order(); ++q) {
      const double gp = g_prime(mesh.quad_point(e, q)) * mesh.quad_weight(e, q);
      load[e] -= gp / h;
      load[e + 1] += gp / h;
    }
  }
  load[0] += g(0.0);
  load[mesh.n_nodes() - 1] += g(1.0);
  Eigen::LLT<Eigen::MatrixXd> llt(basis->stiffness() + basis->boundary_mass());
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("project_W: Robin form factorization failed");
  return make_field(basis, llt.solve(basis->from_nodal_dual(load)));
}

double eval(const Field& u, double x) {
  const Mesh& mesh = u.basis->mesh();
  const int e = mesh.locate(x);
  const Eigen::VectorXd nodal = u.basis->to_nodal(u.coeffs);
  const double t = (x - mesh.node(e)) / mesh.element_size(e);
  return (1.0 - t) * nodal[e] + t * nodal[e + 1];
}

double eval_grad(const Field& u, double x) {
  const Mesh& mesh = u.basis->mesh();
  const int e = mesh.locate(x);
  const Eigen::VectorXd nodal = u.basis->to_nodal(u.coeffs);
  return (nodal[e + 1] - nodal[e]) / mesh.element_size(e);
}

double norm_w1p(const Field& u, double p) {
  if (p < 1.0) throw std::invalid_argument("norm_w1p: p must be at least 1");
  const Mesh& mesh = u.basis->mesh();
  const Eigen::VectorXd nodal = u.basis->to_nodal(u.coeffs);
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double h = mesh.element_size(e);
    const double slope = (nodal[e + 1] - nodal[e]) / h;
    acc += h * std::pow(std::abs(slope), p);
  }
  acc += std::pow(std::abs(nodal[0]), p) + std::pow(std::abs(nodal[nodal.size() - 1]), p);
  return std::pow(acc, 1.0 / p);
}

double norm_l2(const Field& u) {
  const double q = u.coeffs.dot(u.basis->mass() * u.coeffs);
  return std::sqrt(std::max(q, 0.0));
}

double boundary_lq(const Field& u, double q) {
  if (q < 1.0) throw std::invalid_argument("boundary_lq: q must be at least 1");
  const Eigen::VectorXd nodal = u.basis->to_nodal(u.coeffs);
  const double acc =
      std::pow(std::abs(nodal[0]), q) + std::pow(std::abs(nodal[nodal.size() - 1]), q);
  return std::pow(acc, 1.0 / q);
}

double w1p_distance(const Field& a, const Field& b, double p) {
  if (p < 1.0) throw std::invalid_argument("w1p_distance: p must be at least 1");
  if (a.basis.get() == b.basis.get()) {
    return norm_w1p(make_field(a.basis, a.coeffs - b.coeffs), p);
  }
  // both fields are piecewise linear; on the merged breakpoints the slope
  // difference is constant per interval, so the integral below is exact
  const auto& na = a.basis->mesh().nodes();
  const auto& nb = b.basis->mesh().nodes();
  std::vector<double> pts;
  pts.reserve(na.size() + nb.size());
  std::merge(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = pts[i + 1] - pts[i];
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    acc += len * std::pow(std::abs(eval_grad(a, mid) - eval_grad(b, mid)), p);
  }
  acc += std::pow(std::abs(eval(a, 0.0) - eval(b, 0.0)), p) +
         std::pow(std::abs(eval(a, 1.0) - eval(b, 1.0)), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace plapwave
