#pragma once

// Admissible nonlinearities f: R^k -> R^k with
//   f(u).u >= -C,   sym f'(u) >= -K,   |f(u)| <= C_g (1 + |u|^p),
// sampled certification of those constants, and the regularised sequence
// f_n (cut-off plus eps * grad Psi) used to build approximate solutions.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "monodiss/spectral.hpp"

namespace monodiss {

/// out = F(u); both spans have the component count of the map (or k*k for
/// Jacobians, row-major).
using PointMap = std::function<void(std::span<const double> u, std::span<double> out)>;

struct ConvexityCertificate {
  std::string psi_name;
  std::function<double(std::span<const double>)> psi;  ///< convex R^k -> R
  double c1 = 0.0;  ///< |f|^2 <= c1 (Psi + |u|^2 + 1)
  double c2 = 0.0;  ///< c2 (Psi - 1 - |u|^2) <= |f|^2
};

struct NonlinearSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  int k = 1;
  PointMap eval;
  PointMap jac;
  double C = 0.0;         ///< f(u).u >= -C
  double K = 0.0;         ///< sym f'(u) >= -K
  double p = 1.0;         ///< growth exponent
  double C_growth = 1.0;  ///< |f(u)| <= C_growth (1 + |u|^p)
  std::optional<double> fprime_cert;  ///< |f'(u)| <= C_fp (1 + |f(u)| + |u|)
  std::optional<ConvexityCertificate> convexity;
  bool identically_zero = false;

  void operator()(std::span<const double> u, std::span<double> out) const { eval(u, out); }
};

/// Built-in admissible nonlinearities:
///   zero {k}                         f = 0
///   linear {matrix}                  f(u) = A u
///   cubic_scalar {lambda}            f(u) = u^3 - lambda u
///   ginzburg_landau {}               f(u) = (|u|^2 - 1) u on R^2
///   polynomial_odd {p}               f(u) = |u|^{p-1} u
///   supercritical_monotone {p, d}    f(u) = |u|^{p-1} u - u, p > 1 + 4/d
NonlinearSpec builtin(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

/// Selection record used by experiment configs: {"name", "params", "p1"?}.
NonlinearSpec nonlinearity_from_json(const nlohmann::json& j);

struct CertificateMargin {
  std::string name;
  double min_margin = 0.0;
  double tolerance = 0.0;
  std::vector<double> witness;
  bool pass = true;
};

struct CertificationReport {
  std::vector<CertificateMargin> margins;
  bool pass = true;
  double radius = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  /// max over samples of |f(u)| / (1 + |u|^p): smallest admissible C_growth.
  double fitted_growth = 0.0;

  const CertificateMargin* find(const std::string& name) const;
};

/// Low-discrepancy sample set used for certification: a seeded
/// Cranley–Patterson-rotated Halton sequence on the ball |u| <= radius,
/// points on every coordinate axis, and the origin.
std::vector<std::vector<double>> certification_samples(int k, double radius, int samples,
                                                       std::uint64_t seed);

CertificationReport verify_constants(const NonlinearSpec& spec, double radius, int samples,
                                     std::uint64_t seed);

struct ApproxOptions {
  int samples = 4096;
  std::uint64_t seed = 1;
  double R_max = 1e12;
};

struct ApproxSpec {
  NonlinearSpec base;
  int n = 1;
  double eps = 1.0;
  double p1 = 1.0;
  double R = 1.0;
  /// f_n(u) = eps * sigma * u for |u|^2 >= 3R.
  double sigma = 0.0;
  int doublings = 0;
  NonlinearSpec approx;  ///< f_n, carrying the base (C, K) and growth p1
  CertificationReport certification;

  /// sup over the sampled ball |u| <= radius of |f_n(u) - f(u)|.
  double sup_deviation(double radius, int samples = 2001) const;
};

/// Cut-off theta_R(z): 1 for z <= R, 0 for z >= 2R, cosine ramp between.
double cutoff(double z, double R);
double cutoff_derivative(double z, double R);

/// Builds f_n with eps = 1/n and Psi(z) = z^{(p1+1)/2}; R is found by
/// doubling from max(1, n) until f_n certifies (C, K) on |u| <= 4 sqrt(R).
/// p1 defaults to p + 1/2. Throws SolverFailure when R exceeds R_max.
ApproxSpec approximate(const NonlinearSpec& spec, int n, std::optional<double> p1 = std::nullopt,
                       const ApproxOptions& options = {});

// ---- field-level evaluation (all on the 2x dealiasing grid) ----

/// Pointwise f on a grid function.
GridFunction apply_pointwise(const NonlinearSpec& f, const GridFunction& u);

/// Projection of f(u) onto the modes of u's grid.
SpectralField eval_on_field(const NonlinearSpec& f, const SpectralField& u);

/// ||f(u)||_{L^2} by trapezoid quadrature on the closed dealiasing grid.
double nonlinear_l2_norm(const NonlinearSpec& f, const SpectralField& u);

/// (f'(u) v, v).
double jac_quadratic_form(const NonlinearSpec& f, const SpectralField& u, const SpectralField& v);

struct GradientForm {
  double signed_value = 0.0;    ///< (f'(u) grad u, grad u)
  double absolute_value = 0.0;  ///< int |f'(u) grad u . grad u|
};

GradientForm gradient_form(const NonlinearSpec& f, const SpectralField& u);

/// max over dealiasing-grid points of the spectral norm of f'(u(x)).
double max_jacobian_norm(const NonlinearSpec& f, const SpectralField& u);

}  // namespace monodiss
