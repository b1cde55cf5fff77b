#include <doctest.h>

#include <cmath>
#include <memory>

#include "plapwave/operators.hpp"

using namespace plapwave;

namespace {
std::shared_ptr<const BasisSet> hat(int n_elements) {
  return BasisSet::fem_hat(std::make_shared<const Mesh>(n_elements, 4));
}

Field random_field(const std::shared_ptr<const BasisSet>& b, CounterRng& rng, double scale = 1.0) {
  return make_field(b, scale * rng.normal_vector(b->size()));
}
}  // namespace

TEST_CASE("signed power preserves sign and handles zero") {
  CHECK(signed_pow(0.0, 0.5) == 0.0);
  CHECK(signed_pow(-2.0, 2.0) == doctest::Approx(-4.0));
  CHECK(signed_pow(3.0, 1.0) == doctest::Approx(3.0));
  CHECK(signed_pow(-8.0, 1.0 / 3.0) == doctest::Approx(-2.0));
}

TEST_CASE("duality pairing of the linear profile has the closed-form value") {
  for (double p : {2.1, 2.5, 2.9}) {
    const auto b = hat(4);
    const PLaplacianForm form(b, p);
    const Field u = interpolate(b, [](double x) { return x; });
    // <A_p u, u> = ||u||^p and the linear profile has ||u||^p = 2
    CHECK(form.apply(u).dot(u.coeffs) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(form.pairing(u, u) == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("duality identity holds on random fields") {
  CounterRng rng(91, 1);
  for (const auto& b :
       {hat(8), BasisSet::robin_eigen(std::make_shared<const Mesh>(16, 4), 5)}) {
    for (double p : {2.1, 2.5, 2.9}) {
      const PLaplacianForm form(b, p);
      for (int t = 0; t < 50; ++t) {
        const Field u = random_field(b, rng);
        const double lhs = form.apply(u).dot(u.coeffs);
        const double rhs = std::pow(norm_w1p(u, p), p);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, rhs));
      }
    }
  }
}

TEST_CASE("quadratic exponent reduces the form to the damping matrix") {
  CounterRng rng(92, 1);
  for (const auto& b :
       {hat(8), BasisSet::robin_eigen(std::make_shared<const Mesh>(16, 4), 5)}) {
    const PLaplacianForm form(b, 2.0);
    const DampingForm damp(b);
    for (int t = 0; t < 25; ++t) {
      const Field u = random_field(b, rng);
      const Eigen::VectorXd lhs = form.apply(u);
      const Eigen::VectorXd rhs = damp.apply(u.coeffs);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("the damping form matches stiffness plus boundary mass on the eigenbasis") {
  const auto b = BasisSet::robin_eigen(std::make_shared<const Mesh>(32, 4), 6);
  const DampingForm damp(b);
  const Eigen::MatrixXd want = Eigen::MatrixXd(b->eigenvalues().asDiagonal());
  CHECK((damp.matrix() - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tangent matches a central finite difference of the form") {
  CounterRng rng(93, 1);
  const auto b = hat(6);
  const PLaplacianForm form(b, 2.5);
  for (int t = 0; t < 10; ++t) {
    const Field u = random_field(b, rng);
    const Eigen::VectorXd w = rng.normal_vector(b->size());
    const Eigen::MatrixXd jac = form.tangent(u);
    CHECK((jac - jac.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const double h = 1e-6;
    const Eigen::VectorXd fd = (form.apply(make_field(b, u.coeffs + h * w)) -
                                form.apply(make_field(b, u.coeffs - h * w))) /
                               (2.0 * h);
    const Eigen::VectorXd an = jac * w;
    CHECK((fd - an).cwiseAbs().maxCoeff() <= 2e-5 * (1.0 + an.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("the form is homogeneous of degree p-1") {
  CounterRng rng(94, 1);
  const auto b = hat(8);
  const PLaplacianForm form(b, 2.5);
  const Field u = random_field(b, rng);
  for (double lambda : {0.25, 3.0}) {
    const Eigen::VectorXd lhs = form.apply(make_field(b, lambda * u.coeffs));
    const Eigen::VectorXd rhs = std::pow(lambda, 1.5) * form.apply(u);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("dual action of the linear profile stays under twice the norm power") {
  const auto b = hat(4);
  const PLaplacianForm form(b, 2.5);
  const Field u = interpolate(b, [](double x) { return x; });
  CounterRng rng(95, 1);
  const DualBoundReport rep = dual_norm_bound_check(form, u, 200, rng);
  CHECK(rep.rhs == doctest::Approx(std::pow(2.0, 1.6)).epsilon(1e-13));
  CHECK(rep.pass);
  CHECK(rep.lhs_estimate <= rep.rhs + 1e-9);
  CHECK(rep.lhs_estimate > 0.0);
}

TEST_CASE("monotonicity pairings are nonnegative up to roundoff") {
  CounterRng rng(96, 1);
  const auto b = hat(8);
  for (double p : {2.1, 2.5, 2.9}) {
    const PLaplacianForm form(b, p);
    for (int t = 0; t < 100; ++t) {
      const Field u = random_field(b, rng);
      const Field v = random_field(b, rng);
      const double m = monotonicity_check(form, u, v);
      const double slack =
          1e-10 * (1.0 + std::pow(norm_w1p(u, p), p) + std::pow(norm_w1p(v, p), p));
      CHECK(m >= -slack);
    }
  }
}

TEST_CASE("pairings converge along a segment as the parameter vanishes") {
  CounterRng rng(97, 1);
  const auto b = hat(6);
  const PLaplacianForm form(b, 2.5);
  const Field u = random_field(b, rng);
  const Field v = random_field(b, rng);
  const Field phi = random_field(b, rng);
  const std::vector<double> lambdas = {1.0, 0.1, 0.01, 0.001, 0.0001};
  const std::vector<double> vals = hemicontinuity_probe(form, u, v, phi, lambdas);
  REQUIRE(vals.size() == lambdas.size());
  const double limit = form.pairing(u, phi);
  double prev = std::abs(vals[0] - limit);
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double gap = std::abs(vals[i] - limit);
    CHECK(gap < prev + 1e-12);
    prev = gap;
  }
  CHECK(prev <= 1e-3 * (1.0 + std::abs(limit)));
}

TEST_CASE("segment probe rejects parameters outside (0, 1]") {
  const auto b = hat(4);
  const PLaplacianForm form(b, 2.5);
  const Field u = interpolate(b, [](double x) { return x; });
  CHECK_THROWS_AS(hemicontinuity_probe(form, u, u, u, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(hemicontinuity_probe(form, u, u, u, {1.5}), std::invalid_argument);
}

TEST_CASE("the form rejects fields from another basis") {
  const auto a = hat(4);
  const auto b = hat(8);
  const PLaplacianForm form(a, 2.5);
  const Field u = interpolate(b, [](double x) { return x; });
  CHECK_THROWS_AS(form.apply(u), std::invalid_argument);
  CHECK_THROWS_AS(PLaplacianForm(a, 1.0), std::invalid_argument);
}
