#pragma once

// Dirichlet sine-spectral representation of k-component fields on (0, L)^d.
//
// Basis: phi_m(x) = (2/L)^{d/2} prod_i sin(pi m_i x_i / L), m_i = 1..N, which
// is orthonormal in L^2, so Parseval holds with unit constant. Modes are
// flattened row-major (axis 0 slowest); coefficients are stored
// component-major: coeffs[c * N^d + mode].

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace monodiss {

struct NonlinearSpec;

struct Grid {
  int d = 1;
  double L = 1.0;
  int N = 2;
  int k = 1;

  std::size_t modes() const;
  std::size_t size() const { return static_cast<std::size_t>(k) * modes(); }
  std::array<int, 3> multi_index(std::size_t mode) const;
  std::size_t flat_index(const std::array<int, 3>& m) const;
  /// Eigenvalue of -Laplace for the flattened mode: sum_i (pi m_i / L)^2.
  double eigenvalue(std::size_t mode) const;
  double max_eigenvalue() const;
  /// Number of interior collocation points per axis of the dealiasing grid
  /// (2N+1, so that its spacing is exactly half of the N-grid's).
  int dealias_points() const { return 2 * N + 1; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Validating constructor; throws ConfigError naming the offending field.
Grid make_grid(int d, double L, int N, int k);

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& grid);
  SpectralField(const Grid& grid, std::vector<double> coeffs);

  const Grid& grid() const { return grid_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> component(int c) const;
  std::span<double> component(int c);

  double& at(int component, std::size_t mode) { return coeffs_[component * grid_.modes() + mode]; }
  double at(int component, std::size_t mode) const {
    return coeffs_[component * grid_.modes() + mode];
  }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * x
  SpectralField& axpy(double s, const SpectralField& x);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  Grid grid_{};
  std::vector<double> coeffs_;
};

/// Inner product in L^2 (Parseval).
double dot(const SpectralField& a, const SpectralField& b);

enum class Nodes {
  interior,  ///< x_j = jL/(M+1), j = 1..M
  closed,    ///< j = 0..M+1, including the boundary (trapezoid quadrature)
};

/// Pointwise values of a k-component function on a tensor grid; values are
/// stored component-major, each component row-major over the nodes.
struct GridFunction {
  int d = 1;
  int M = 0;  ///< interior points per axis
  Nodes nodes = Nodes::interior;
  int k = 1;
  double L = 1.0;
  std::vector<double> values;

  int per_axis() const { return nodes == Nodes::closed ? M + 2 : M; }
  std::size_t points() const;
  std::span<const double> component(int c) const;
  std::span<double> component(int c);
};

/// Evaluate the field (or a partial derivative of it, `deriv[i]` = order
/// along axis i, 0..2) on the tensor grid with M interior points per axis.
GridFunction evaluate(const SpectralField& field, int M, Nodes nodes,
                      const std::array<int, 3>& deriv = {0, 0, 0});

/// L^2 projection of pointwise values onto the first N modes of `grid`,
/// computed with the collocation rule of the value grid.
SpectralField project(const GridFunction& values, const Grid& grid);

/// Values at the N-point interior collocation grid.
GridFunction to_physical(const SpectralField& field);
/// Inverse of to_physical; `values` must live on the N-point interior grid.
SpectralField from_physical(const GridFunction& values, const Grid& grid);

/// Collocation quadrature of a scalar function sampled on the grid layout
/// described by (d, M, nodes, L): rectangle rule on interior nodes,
/// trapezoid rule on closed nodes.
double integrate(std::span<const double> pointwise, int d, int M, Nodes nodes, double L);

/// c_m -> lambda_m^alpha c_m. Throws ConfigError for alpha <= 0.
SpectralField apply_fractional_laplacian(const SpectralField& field, double alpha);

/// sqrt(sum lambda_m^s |c_m|^2); s = 0 gives the L^2 norm, s = 1 the
/// gradient norm, s = 2 the norm of the Laplacian.
double hs_norm(const SpectralField& field, double s);
double l2_norm(const SpectralField& field);
/// (int |u|^p)^{1/p} by collocation on refine*(N+1)-1 interior points per
/// axis; any p > 0 (for p < 1 this is not a norm).
double lp_norm(const SpectralField& field, double p, int refine = 1);

struct NormRequest {
  std::vector<double> hs_orders;
  std::vector<double> lp_orders;
  int lp_refine = 1;
  const NonlinearSpec* f = nullptr;  ///< enables d_norm
};

struct NormReport {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  std::map<double, double> hs;
  std::map<double, double> lp;
  std::optional<double> d_norm;  ///< sqrt(||u||_{H^2}^2 + ||f(u)||_{L^2}^2)
};

NormReport norms(const SpectralField& field, const NormRequest& request = {});

void to_json(nlohmann::json& j, const Grid& g);
void from_json(const nlohmann::json& j, Grid& g);
void to_json(nlohmann::json& j, const SpectralField& f);
SpectralField field_from_json(const nlohmann::json& j);

}  // namespace monodiss
