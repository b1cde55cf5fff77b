#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "plapwave/basis.hpp"
#include "plapwave/rng.hpp"

namespace plapwave {

enum class SourceKind { Power, PowerPlusLinear, Custom };

// Boundary source f with primitive F (F(0) = 0). Power kinds evaluate
//   f(s) = a |s|^{r-1} s + b s,   F(s) = a/(r+1) |s|^{r+1} + b/2 s^2
// with b = 0 for the plain power family. The growth constants are the
// tightest C with |f'(s)| <= C(|s|^{r-1}+1) and |f(s)| <= C(|s|^r+1).
class SourceSpec {
public:
  static SourceSpec zero();
  static SourceSpec power(double a, double r);
  static SourceSpec power_plus_linear(double a, double b, double r);
  static SourceSpec custom(std::function<double(double)> f, std::function<double(double)> f_prime,
                           std::function<double(double)> primitive, double r, double growth_c);

  SourceKind kind() const { return kind_; }
  double r() const { return r_; }
  double a() const { return a_; }
  double b() const { return b_; }
  bool is_zero() const { return kind_ != SourceKind::Custom && a_ == 0.0 && b_ == 0.0; }

  double f(double s) const;
  double f_prime(double s) const;
  double primitive(double s) const;

  double growth_constant_fprime() const;
  double growth_constant_f() const;

  nlohmann::ordered_json to_json() const;
  static SourceSpec from_json(const nlohmann::json& j);

private:
  SourceSpec() = default;

  SourceKind kind_ = SourceKind::Power;
  double r_ = 1.0, a_ = 0.0, b_ = 0.0;
  double custom_growth_ = 0.0;
  std::function<double(double)> cf_, cfp_, cF_;
};

enum class TruncationMode { None, RadialK, CutoffN };

struct TruncationSpec {
  TruncationMode mode = TruncationMode::None;
  double K = 0.0;  // RadialK ball radius
  int n = 0;       // CutoffN plateau half-width

  static TruncationSpec none() { return {}; }
  static TruncationSpec radial(double K);
  static TruncationSpec cutoff(int n);

  nlohmann::ordered_json to_json() const;
  static TruncationSpec from_json(const nlohmann::json& j);
};

// quintic smoothstep cutoff: 1 on [0,n], 0 beyond 2n, |eta'| <= 1.875/n
double cutoff_eta(int n, double s);
double cutoff_eta_prime(int n, double s);
double f_n_eval(const SourceSpec& src, int n, double s);

struct BoundaryPair {
  double left;
  double right;
};

// radial retraction of a field onto the closed W^{1,p} ball of radius K
Field radial_retraction(const Field& u, double K, double p);

// f at the boundary traces of u when ||u|| <= K, else f at the traces of the
// retraction of u onto the K-ball
BoundaryPair truncate_radial(const SourceSpec& src, double K, const Field& u, double p);

// boundary source values under the selected truncation mode
BoundaryPair boundary_source_values(const SourceSpec& src, const TruncationSpec& trunc,
                                    const Field& u, double p);

// dual vector S_j = g(0) w_j(0) + g(1) w_j(1)
Eigen::VectorXd boundary_source_vector(const std::shared_ptr<const BasisSet>& basis,
                                       const SourceSpec& src, const TruncationSpec& trunc,
                                       const Field& u, double p);

struct LipschitzProbeResult {
  double constant;  // max sampled ratio |g(u)-g(v)|_{q,boundary} / ||u-v||_{1,p}
  Field u_max, v_max;
};

// Empirical Lipschitz constant of the truncated boundary source map. Pairs are
// sampled inside the ball of radius R, except in RadialK mode where the claim
// is global and the pairs range over radius 2R.
LipschitzProbeResult lipschitz_probe(const SourceSpec& src, const TruncationSpec& trunc,
                                     const std::shared_ptr<const BasisSet>& basis,
                                     double region_radius, int samples, double p, double q_target,
                                     CounterRng& rng);

struct RadialLipschitzCertificate {
  double global_constant;  // f_K over unconstrained pairs
  double local_constant;   // f over the K-ball, including every retracted global pair
  bool pass;               // global <= 2 local + 1e-9
};

// Certifies the doubling bound. Every global sample pair contributes its
// radial retraction to the local sample, which makes the inequality hold
// pair-by-pair by the case analysis behind the bound instead of depending on
// two unrelated random maxima.
RadialLipschitzCertificate certify_radial_doubling(const SourceSpec& src, double K,
                                                   const std::shared_ptr<const BasisSet>& basis,
                                                   int samples, double p, double q_target,
                                                   CounterRng& rng);

struct RegimeReport {
  double p = 0.0, r = 0.0;
  double r_bound = 0.0;       // 4p / (3(3-p))
  bool p_in_range = false;    // 2 < p < 3
  bool r_admissible = false;  // 1 <= r < r_bound
  bool global_regime = false; // r <= p/2
};

nlohmann::ordered_json to_json(const RegimeReport& r);
RegimeReport classify_regime(double p, double r);

}  // namespace plapwave
