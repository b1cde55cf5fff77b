#include "plapwave/sources.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "plapwave/operators.hpp"

namespace plapwave {

SourceSpec SourceSpec::zero() { return power(0.0, 1.0); }

SourceSpec SourceSpec::power(double a, double r) {
  if (r < 1.0) throw std::invalid_argument("SourceSpec: growth exponent r must be at least 1");
  SourceSpec s;
  s.kind_ = SourceKind::Power;
  s.a_ = a;
  s.r_ = r;
  return s;
}

SourceSpec SourceSpec::power_plus_linear(double a, double b, double r) {
  SourceSpec s = power(a, r);
  s.kind_ = SourceKind::PowerPlusLinear;
  s.b_ = b;
  return s;
}

SourceSpec SourceSpec::custom(std::function<double(double)> f,
                              std::function<double(double)> f_prime,
                              std::function<double(double)> primitive, double r, double growth_c) {
  if (!f || !f_prime || !primitive)
    throw std::invalid_argument("SourceSpec: custom source needs f, f', and the primitive");
  if (r < 1.0) throw std::invalid_argument("SourceSpec: growth exponent r must be at least 1");
  SourceSpec s;
  s.kind_ = SourceKind::Custom;
  s.r_ = r;
  s.custom_growth_ = growth_c;
  s.cf_ = std::move(f);
  s.cfp_ = std::move(f_prime);
  s.cF_ = std::move(primitive);
  return s;
}

double SourceSpec::f(double s) const {
  if (kind_ == SourceKind::Custom) return cf_(s);
  return a_ * signed_pow(s, r_) + b_ * s;
}

double SourceSpec::f_prime(double s) const {
  if (kind_ == SourceKind::Custom) return cfp_(s);
  return a_ * r_ * std::pow(std::abs(s), r_ - 1.0) + b_;
}

double SourceSpec::primitive(double s) const {
  if (kind_ == SourceKind::Custom) return cF_(s);
  return a_ / (r_ + 1.0) * std::pow(std::abs(s), r_ + 1.0) + 0.5 * b_ * s * s;
}

double SourceSpec::growth_constant_fprime() const {
  if (kind_ == SourceKind::Custom) return custom_growth_;
  return std::max(std::abs(a_) * r_, std::abs(b_));
}

double SourceSpec::growth_constant_f() const {
  if (kind_ == SourceKind::Custom) return custom_growth_;
  // |f(s)| <= |a||s|^r + |b||s| and |s| <= |s|^r + 1 for r >= 1
  return std::abs(a_) + std::abs(b_);
}

nlohmann::ordered_json SourceSpec::to_json() const {
  if (kind_ == SourceKind::Custom)
    throw std::invalid_argument("SourceSpec: custom sources do not serialize");
  nlohmann::ordered_json j;
  j["kind"] = kind_ == SourceKind::Power ? "power" : "power_plus_linear";
  j["a"] = a_;
  if (kind_ == SourceKind::PowerPlusLinear) j["b"] = b_;
  j["r"] = r_;
  return j;
}

SourceSpec SourceSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") return power(j.at("a").get<double>(), j.at("r").get<double>());
  if (kind == "power_plus_linear")
    return power_plus_linear(j.at("a").get<double>(), j.value("b", 0.0), j.at("r").get<double>());
  throw std::invalid_argument("SourceSpec: unknown kind '" + kind + "'");
}

TruncationSpec TruncationSpec::radial(double K) {
  if (K <= 0.0) throw std::invalid_argument("TruncationSpec: radius K must be positive");
  TruncationSpec t;
  t.mode = TruncationMode::RadialK;
  t.K = K;
  return t;
}

TruncationSpec TruncationSpec::cutoff(int n) {
  if (n < 1) throw std::invalid_argument("TruncationSpec: cutoff level n must be at least 1");
  TruncationSpec t;
  t.mode = TruncationMode::CutoffN;
  t.n = n;
  return t;
}

nlohmann::ordered_json TruncationSpec::to_json() const {
  nlohmann::ordered_json j;
  switch (mode) {
    case TruncationMode::None: j["mode"] = "none"; break;
    case TruncationMode::RadialK:
      j["mode"] = "radial_k";
      j["K"] = K;
      break;
    case TruncationMode::CutoffN:
      j["mode"] = "cutoff_n";
      j["n"] = n;
      break;
  }
  return j;
}

TruncationSpec TruncationSpec::from_json(const nlohmann::json& j) {
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "none") return none();
  if (mode == "radial_k") return radial(j.at("K").get<double>());
  if (mode == "cutoff_n") return cutoff(j.at("n").get<int>());
  throw std::invalid_argument("TruncationSpec: unknown mode '" + mode + "'");
}

double cutoff_eta(int n, double s) {
  if (n < 1) throw std::invalid_argument("cutoff_eta: level n must be at least 1");
  const double a = std::abs(s);
  if (a <= n) return 1.0;
  if (a >= 2.0 * n) return 0.0;
  const double t = (a - n) / n;
  return 1.0 - t * t * t * (10.0 + t * (6.0 * t - 15.0));
}

double cutoff_eta_prime(int n, double s) {
  if (n < 1) throw std::invalid_argument("cutoff_eta_prime: level n must be at least 1");
  const double a = std::abs(s);
  if (a <= n || a >= 2.0 * n) return 0.0;
  const double t = (a - n) / n;
  const double d = -30.0 * t * t * (1.0 - t) * (1.0 - t) / n;
  return s > 0.0 ? d : -d;
}

double f_n_eval(const SourceSpec& src, int n, double s) { return src.f(s) * cutoff_eta(n, s); }

Field radial_retraction(const Field& u, double K, double p) {
  if (K <= 0.0) throw std::invalid_argument("radial_retraction: radius K must be positive");
  const double nu = norm_w1p(u, p);
  if (nu <= K) return u;
  return make_field(u.basis, (K / nu) * u.coeffs);
}

BoundaryPair truncate_radial(const SourceSpec& src, double K, const Field& u, double p) {
  if (K <= 0.0) throw std::invalid_argument("truncate_radial: radius K must be positive");
  const Eigen::VectorXd nodal = u.basis->to_nodal(u.coeffs);
  const double nu = norm_w1p(u, p);
  const double scale = nu <= K ? 1.0 : K / nu;
  return {src.f(scale * nodal[0]), src.f(scale * nodal[nodal.size() - 1])};
}

BoundaryPair boundary_source_values(const SourceSpec& src, const TruncationSpec& trunc,
                                    const Field& u, double p) {
  const Eigen::VectorXd nodal = u.basis->to_nodal(u.coeffs);
  const double left = nodal[0], right = nodal[nodal.size() - 1];
  switch (trunc.mode) {
    case TruncationMode::None: return {src.f(left), src.f(right)};
    case TruncationMode::RadialK: return truncate_radial(src, trunc.K, u, p);
    case TruncationMode::CutoffN:
      return {f_n_eval(src, trunc.n, left), f_n_eval(src, trunc.n, right)};
  }
  throw std::logic_error("boundary_source_values: unreachable");
}

Eigen::VectorXd boundary_source_vector(const std::shared_ptr<const BasisSet>& basis,
                                       const SourceSpec& src, const TruncationSpec& trunc,
                                       const Field& u, double p) {
  if (u.basis.get() != basis.get())
    throw std::invalid_argument("boundary_source_vector: field from a different basis");
  const BoundaryPair g = boundary_source_values(src, trunc, u, p);
  Eigen::VectorXd dual = Eigen::VectorXd::Zero(basis->mesh().n_nodes());
  dual[0] = g.left;
  dual[dual.size() - 1] = g.right;
  return basis->from_nodal_dual(dual);
}

namespace {

double boundary_q_gap(const BoundaryPair& x, const BoundaryPair& y, double q) {
  return std::pow(std::pow(std::abs(x.left - y.left), q) + std::pow(std::abs(x.right - y.right), q),
                  1.0 / q);
}

Field random_field_in_ball(const std::shared_ptr<const BasisSet>& basis, double radius, double p,
                           CounterRng& rng) {
  for (;;) {
    Eigen::VectorXd c = rng.normal_vector(basis->size());
    Field u = make_field(basis, std::move(c));
    const double nu = norm_w1p(u, p);
    if (nu == 0.0) continue;
    u.coeffs *= rng.uniform() * radius / nu;
    return u;
  }
}

}  // namespace

LipschitzProbeResult lipschitz_probe(const SourceSpec& src, const TruncationSpec& trunc,
                                     const std::shared_ptr<const BasisSet>& basis,
                                     double region_radius, int samples, double p, double q_target,
                                     CounterRng& rng) {
  if (region_radius <= 0.0) throw std::invalid_argument("lipschitz_probe: radius must be positive");
  if (samples < 2) throw std::invalid_argument("lipschitz_probe: need at least two samples");
  const double sample_radius =
      trunc.mode == TruncationMode::RadialK ? 2.0 * region_radius : region_radius;
  LipschitzProbeResult result{0.0, make_field(basis, Eigen::VectorXd::Zero(basis->size())),
                              make_field(basis, Eigen::VectorXd::Zero(basis->size()))};
  for (int k = 0; k < samples; ++k) {
    Field u = random_field_in_ball(basis, sample_radius, p, rng);
    Field v = random_field_in_ball(basis, sample_radius, p, rng);
    const double denom = norm_w1p(make_field(basis, u.coeffs - v.coeffs), p);
    if (denom < 1e-14) continue;
    const double gap = boundary_q_gap(boundary_source_values(src, trunc, u, p),
                                      boundary_source_values(src, trunc, v, p), q_target);
    const double ratio = gap / denom;
    if (ratio > result.constant) {
      result.constant = ratio;
      result.u_max = u;
      result.v_max = v;
    }
  }
  return result;
}

RadialLipschitzCertificate certify_radial_doubling(const SourceSpec& src, double K,
                                                   const std::shared_ptr<const BasisSet>& basis,
                                                   int samples, double p, double q_target,
                                                   CounterRng& rng) {
  if (K <= 0.0) throw std::invalid_argument("certify_radial_doubling: K must be positive");
  const TruncationSpec radial = TruncationSpec::radial(K);
  const TruncationSpec plain = TruncationSpec::none();
  double global_c = 0.0, local_c = 0.0;

  auto local_ratio = [&](const Field& u, const Field& v) {
    const double denom = norm_w1p(make_field(basis, u.coeffs - v.coeffs), p);
    if (denom < 1e-14) return;
    const double gap = boundary_q_gap(boundary_source_values(src, plain, u, p),
                                      boundary_source_values(src, plain, v, p), q_target);
    local_c = std::max(local_c, gap / denom);
  };

  for (int k = 0; k < samples; ++k) {
    Field u = random_field_in_ball(basis, 2.0 * K, p, rng);
    Field v = random_field_in_ball(basis, 2.0 * K, p, rng);
    const double denom = norm_w1p(make_field(basis, u.coeffs - v.coeffs), p);
    if (denom >= 1e-14) {
      const double gap = boundary_q_gap(boundary_source_values(src, radial, u, p),
                                        boundary_source_values(src, radial, v, p), q_target);
      global_c = std::max(global_c, gap / denom);
    }
    local_ratio(radial_retraction(u, K, p), radial_retraction(v, K, p));
    // dedicated in-ball pair so the local sample is not only retraction images
    local_ratio(random_field_in_ball(basis, K, p, rng), random_field_in_ball(basis, K, p, rng));
  }
  return {global_c, local_c, global_c <= 2.0 * local_c + 1e-9};
}

nlohmann::ordered_json to_json(const RegimeReport& r) {
  nlohmann::ordered_json j;
  j["p"] = r.p;
  j["r"] = r.r;
  j["r_bound"] = r.r_bound;
  j["p_in_range"] = r.p_in_range;
  j["r_admissible"] = r.r_admissible;
  j["global_regime"] = r.global_regime;
  return j;
}

RegimeReport classify_regime(double p, double r) {
  RegimeReport rep;
  rep.p = p;
  rep.r = r;
  rep.p_in_range = p > 2.0 && p < 3.0;
  rep.r_bound = p < 3.0 ? 4.0 * p / (3.0 * (3.0 - p)) : std::numeric_limits<double>::infinity();
  rep.r_admissible = r >= 1.0 && r < rep.r_bound;
  rep.global_regime = r <= 0.5 * p;
  return rep;
}

}  // namespace plapwave
