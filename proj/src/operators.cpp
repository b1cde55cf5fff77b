#include "plapwave/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace plapwave {

PLaplacianForm::PLaplacianForm(std::shared_ptr<const BasisSet> basis, double p)
    : basis_(std::move(basis)), p_(p) {
  if (!basis_) throw std::invalid_argument("PLaplacianForm: null basis");
  if (p <= 1.0) throw std::invalid_argument("PLaplacianForm: p must exceed 1");
}

void PLaplacianForm::check(const Field& u) const {
  if (u.basis.get() != basis_.get())
    throw std::invalid_argument("PLaplacianForm: field from a different basis");
  if (u.coeffs.size() != basis_->size())
    throw std::invalid_argument("PLaplacianForm: coefficient length mismatch");
}

Eigen::VectorXd PLaplacianForm::apply(const Field& u) const {
  check(u);
  const Mesh& mesh = basis_->mesh();
  const Eigen::VectorXd nodal = basis_->to_nodal(u.coeffs);
  const int nn = mesh.n_nodes();
  Eigen::VectorXd dual = Eigen::VectorXd::Zero(nn);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double slope = (nodal[e + 1] - nodal[e]) / mesh.element_size(e);
    const double flux = signed_pow(slope, p_ - 1.0);
    dual[e] -= flux;
    dual[e + 1] += flux;
  }
  dual[0] += signed_pow(nodal[0], p_ - 1.0);
  dual[nn - 1] += signed_pow(nodal[nn - 1], p_ - 1.0);
  return basis_->from_nodal_dual(dual);
}

Eigen::MatrixXd PLaplacianForm::tangent(const Field& u) const {
  check(u);
  const Mesh& mesh = basis_->mesh();
  const Eigen::VectorXd nodal = basis_->to_nodal(u.coeffs);
  const int nn = mesh.n_nodes();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nn, nn);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double h = mesh.element_size(e);
    const double slope = (nodal[e + 1] - nodal[e]) / h;
    const double w = (p_ - 1.0) * std::pow(std::abs(slope), p_ - 2.0) / h;
    t(e, e) += w;
    t(e + 1, e + 1) += w;
    t(e, e + 1) -= w;
    t(e + 1, e) -= w;
  }
  t(0, 0) += (p_ - 1.0) * std::pow(std::abs(nodal[0]), p_ - 2.0);
  t(nn - 1, nn - 1) += (p_ - 1.0) * std::pow(std::abs(nodal[nn - 1]), p_ - 2.0);
  return basis_->from_nodal_form(t);
}

double PLaplacianForm::pairing(const Field& u, const Field& phi) const {
  check(phi);
  return apply(u).dot(phi.coeffs);
}

DampingForm::DampingForm(std::shared_ptr<const BasisSet> basis) : basis_(std::move(basis)) {
  if (!basis_) throw std::invalid_argument("DampingForm: null basis");
  d_ = basis_->stiffness() + basis_->boundary_mass();
}

Eigen::VectorXd DampingForm::apply(const Field& v) const {
  if (v.basis.get() != basis_.get())
    throw std::invalid_argument("DampingForm: field from a different basis");
  return d_ * v.coeffs;
}

nlohmann::ordered_json to_json(const DualBoundReport& r) {
  nlohmann::ordered_json j;
  j["lhs_estimate"] = r.lhs_estimate;
  j["rhs"] = r.rhs;
  j["pass"] = r.pass;
  return j;
}

DualBoundReport dual_norm_bound_check(const PLaplacianForm& form, const Field& u, int n_probes,
                                      CounterRng& rng) {
  if (n_probes < 1) throw std::invalid_argument("dual_norm_bound_check: probes must be positive");
  const Eigen::VectorXd dual = form.apply(u);
  auto basis = u.basis;
  double lhs = 0.0;
  for (int k = 0; k < n_probes; ++k) {
    Eigen::VectorXd c = rng.normal_vector(basis->size());
    const double nrm = norm_w1p(make_field(basis, c), form.p());
    if (nrm == 0.0) continue;
    lhs = std::max(lhs, std::abs(dual.dot(c) / nrm));
  }
  const double rhs = 2.0 * std::pow(norm_w1p(u, form.p()), form.p() - 1.0);
  return DualBoundReport{lhs, rhs, lhs <= rhs + 1e-9};
}

double monotonicity_check(const PLaplacianForm& form, const Field& u, const Field& v) {
  const Eigen::VectorXd diff = u.coeffs - v.coeffs;
  return (form.apply(u) - form.apply(v)).dot(diff);
}

std::vector<double> hemicontinuity_probe(const PLaplacianForm& form, const Field& u,
                                         const Field& v, const Field& phi,
                                         const std::vector<double>& lambdas) {
  for (double l : lambdas)
    if (l <= 0.0 || l > 1.0)
      throw std::invalid_argument("hemicontinuity_probe: lambdas must lie in (0,1]");
  std::vector<double> out;
  out.reserve(lambdas.size());
  for (double l : lambdas)
    out.push_back(form.pairing(make_field(u.basis, u.coeffs + l * v.coeffs), phi));
  return out;
}

}  // namespace plapwave
