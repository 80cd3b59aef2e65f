#include "monodiss/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "monodiss/error.hpp"
#include "monodiss/nonlinearity.hpp"

namespace monodiss {

namespace {

constexpr double pi = std::numbers::pi;

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

// Per-axis basis tables are reused heavily by the time integrators, so they
// are memoised per thread.
using BasisKey = std::tuple<double, int, int, int, int, bool>;

const Matrix& basis_matrix(double L, int n_modes, int M, Nodes nodes, int deriv, bool projection) {
  thread_local std::map<BasisKey, Matrix> cache;
  const BasisKey key{L, n_modes, M, static_cast<int>(nodes), deriv, projection};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int P = nodes == Nodes::closed ? M + 2 : M;
  const int offset = nodes == Nodes::closed ? 0 : 1;
  const double h = L / (M + 1);
  const double norm = std::sqrt(2.0 / L);
  Matrix mat;
  if (!projection) {
    mat.rows = P;
    mat.cols = n_modes;
  } else {
    mat.rows = n_modes;
    mat.cols = P;
  }
  mat.a.assign(static_cast<std::size_t>(mat.rows) * mat.cols, 0.0);
  for (int j = 0; j < P; ++j) {
    const int node = j + offset;
    for (int m = 1; m <= n_modes; ++m) {
      const double w = pi * m / L;
      const double arg = pi * static_cast<double>(m) * node / (M + 1);
      double v = 0.0;
      switch (deriv) {
        case 0: v = norm * std::sin(arg); break;
        case 1: v = norm * w * std::cos(arg); break;
        case 2: v = -norm * w * w * std::sin(arg); break;
        default: throw std::invalid_argument("derivative order must be 0, 1 or 2");
      }
      if (!projection) {
        mat.a[static_cast<std::size_t>(j) * n_modes + (m - 1)] = v;
      } else {
        mat.a[static_cast<std::size_t>(m - 1) * P + j] = h * v;
      }
    }
  }
  return cache.emplace(key, std::move(mat)).first->second;
}

// Applies `A` along `axis` of a row-major tensor with extents `shape`.
std::vector<double> apply_axis(std::span<const double> in, std::array<int, 3>& shape, int d,
                               int axis, const Matrix& A) {
  std::size_t pre = 1;
  std::size_t post = 1;
  for (int i = 0; i < axis; ++i) pre *= shape[i];
  for (int i = axis + 1; i < d; ++i) post *= shape[i];
  std::vector<double> out(pre * A.rows * post, 0.0);
  for (std::size_t p = 0; p < pre; ++p) {
    for (int i = 0; i < A.rows; ++i) {
      double* out_row = &out[(p * A.rows + i) * post];
      for (int j = 0; j < A.cols; ++j) {
        const double a = A(i, j);
        if (a == 0.0) continue;
        const double* in_row = &in[(p * A.cols + j) * post];
        for (std::size_t q = 0; q < post; ++q) out_row[q] += a * in_row[q];
      }
    }
  }
  shape[axis] = A.rows;
  return out;
}

}  // namespace

std::size_t Grid::modes() const { return ipow(N, d); }

std::array<int, 3> Grid::multi_index(std::size_t mode) const {
  std::array<int, 3> m{0, 0, 0};
  for (int i = d - 1; i >= 0; --i) {
    m[i] = static_cast<int>(mode % N) + 1;
    mode /= N;
  }
  return m;
}

std::size_t Grid::flat_index(const std::array<int, 3>& m) const {
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i) {
    if (m[i] < 1 || m[i] > N) throw DimensionError("mode index out of range");
    idx = idx * N + static_cast<std::size_t>(m[i] - 1);
  }
  return idx;
}

double Grid::eigenvalue(std::size_t mode) const {
  const auto m = multi_index(mode);
  double lambda = 0.0;
  for (int i = 0; i < d; ++i) {
    const double w = pi * m[i] / L;
    lambda += w * w;
  }
  return lambda;
}

double Grid::max_eigenvalue() const {
  const double w = pi * N / L;
  return d * w * w;
}

Grid make_grid(int d, double L, int N, int k) {
  if (d < 1 || d > 3) throw ConfigError("grid.d", "must be 1, 2 or 3 (got " + std::to_string(d) + ")");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid.L", "must be a positive finite length");
  if (N < 2) throw ConfigError("grid.N", "must be at least 2 (got " + std::to_string(N) + ")");
  if (k < 1) throw ConfigError("grid.k", "must be at least 1 (got " + std::to_string(k) + ")");
  return Grid{d, L, N, k};
}

SpectralField::SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size(), 0.0) {}

SpectralField::SpectralField(const Grid& grid, std::vector<double> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw DimensionError("coefficient array has " + std::to_string(coeffs_.size()) +
                         " entries, grid expects " + std::to_string(grid_.size()));
  }
}

std::span<const double> SpectralField::component(int c) const {
  return std::span<const double>(coeffs_).subspan(c * grid_.modes(), grid_.modes());
}

std::span<double> SpectralField::component(int c) {
  return std::span<double>(coeffs_).subspan(c * grid_.modes(), grid_.modes());
}

SpectralField& SpectralField::operator+=(const SpectralField& other) { return axpy(1.0, other); }

SpectralField& SpectralField::operator-=(const SpectralField& other) { return axpy(-1.0, other); }

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& x) {
  if (!(grid_ == x.grid_)) throw DimensionError("fields live on different grids");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * x.coeffs_[i];
  return *this;
}

double dot(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("fields live on different grids");
  double s = 0.0;
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  for (std::size_t i = 0; i < ca.size(); ++i) s += ca[i] * cb[i];
  return s;
}

std::size_t GridFunction::points() const { return ipow(per_axis(), d); }

std::span<const double> GridFunction::component(int c) const {
  return std::span<const double>(values).subspan(c * points(), points());
}

std::span<double> GridFunction::component(int c) {
  return std::span<double>(values).subspan(c * points(), points());
}

GridFunction evaluate(const SpectralField& field, int M, Nodes nodes, const std::array<int, 3>& deriv) {
  const Grid& g = field.grid();
  GridFunction out{g.d, M, nodes, g.k, g.L, {}};
  const std::size_t pts = out.points();
  out.values.resize(pts * g.k);
  for (int c = 0; c < g.k; ++c) {
    std::array<int, 3> shape{1, 1, 1};
    for (int i = 0; i < g.d; ++i) shape[i] = g.N;
    std::vector<double> data(field.component(c).begin(), field.component(c).end());
    for (int axis = 0; axis < g.d; ++axis) {
      data = apply_axis(data, shape, g.d, axis, basis_matrix(g.L, g.N, M, nodes, deriv[axis], false));
    }
    std::copy(data.begin(), data.end(), out.values.begin() + c * pts);
  }
  return out;
}

SpectralField project(const GridFunction& values, const Grid& grid) {
  if (values.d != grid.d || values.k != grid.k || values.L != grid.L) {
    throw DimensionError("grid function does not match the target grid");
  }
  SpectralField out(grid);
  const int P = values.per_axis();
  for (int c = 0; c < grid.k; ++c) {
    std::array<int, 3> shape{1, 1, 1};
    for (int i = 0; i < grid.d; ++i) shape[i] = P;
    std::vector<double> data(values.component(c).begin(), values.component(c).end());
    for (int axis = 0; axis < grid.d; ++axis) {
      data = apply_axis(data, shape, grid.d, axis,
                        basis_matrix(grid.L, grid.N, values.M, values.nodes, 0, true));
    }
    std::copy(data.begin(), data.end(), out.component(c).begin());
  }
  return out;
}

GridFunction to_physical(const SpectralField& field) {
  return evaluate(field, field.grid().N, Nodes::interior);
}

SpectralField from_physical(const GridFunction& values, const Grid& grid) {
  if (values.M != grid.N || values.nodes != Nodes::interior) {
    throw DimensionError("from_physical expects values on the N-point interior collocation grid");
  }
  if (values.values.size() != grid.size()) throw DimensionError("value array has the wrong size");
  return project(values, grid);
}

double integrate(std::span<const double> pointwise, int d, int M, Nodes nodes, double L) {
  const int P = nodes == Nodes::closed ? M + 2 : M;
  if (pointwise.size() != ipow(P, d)) throw DimensionError("quadrature input has the wrong size");
  const double h = L / (M + 1);
  std::vector<double> w(P, h);
  if (nodes == Nodes::closed) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  double sum = 0.0;
  std::size_t idx = 0;
  if (d == 1) {
    for (int i = 0; i < P; ++i) sum += w[i] * pointwise[idx++];
  } else if (d == 2) {
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j) sum += w[i] * w[j] * pointwise[idx++];
  } else {
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j)
        for (int l = 0; l < P; ++l) sum += w[i] * w[j] * w[l] * pointwise[idx++];
  }
  return sum;
}

SpectralField apply_fractional_laplacian(const SpectralField& field, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha", "fractional order must be positive");
  SpectralField out = field;
  const Grid& g = field.grid();
  for (std::size_t m = 0; m < g.modes(); ++m) {
    const double factor = std::pow(g.eigenvalue(m), alpha);
    for (int c = 0; c < g.k; ++c) out.at(c, m) *= factor;
  }
  return out;
}

double hs_norm(const SpectralField& field, double s) {
  const Grid& g = field.grid();
  double sum = 0.0;
  for (std::size_t m = 0; m < g.modes(); ++m) {
    const double w = s == 0.0 ? 1.0 : std::pow(g.eigenvalue(m), s);
    for (int c = 0; c < g.k; ++c) {
      const double v = field.at(c, m);
      sum += w * v * v;
    }
  }
  return std::sqrt(sum);
}

double l2_norm(const SpectralField& field) { return hs_norm(field, 0.0); }

double lp_norm(const SpectralField& field, double p, int refine) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: exponent p must be positive");
  if (refine < 1) throw std::invalid_argument("lp_norm: refine must be >= 1");
  const Grid& g = field.grid();
  const int M = refine * (g.N + 1) - 1;
  const GridFunction u = evaluate(field, M, Nodes::interior);
  const std::size_t pts = u.points();
  std::vector<double> integrand(pts);
  for (std::size_t i = 0; i < pts; ++i) {
    double sq = 0.0;
    for (int c = 0; c < g.k; ++c) sq += u.values[c * pts + i] * u.values[c * pts + i];
    integrand[i] = std::pow(sq, 0.5 * p);
  }
  return std::pow(integrate(integrand, g.d, M, Nodes::interior, g.L), 1.0 / p);
}

NormReport norms(const SpectralField& field, const NormRequest& request) {
  NormReport r;
  r.l2 = l2_norm(field);
  r.h1 = hs_norm(field, 1.0);
  r.h2 = hs_norm(field, 2.0);
  for (double s : request.hs_orders) r.hs[s] = hs_norm(field, s);
  for (double p : request.lp_orders) r.lp[p] = lp_norm(field, p, request.lp_refine);
  if (request.f != nullptr) {
    const double fl2 = nonlinear_l2_norm(*request.f, field);
    r.d_norm = std::sqrt(r.h2 * r.h2 + fl2 * fl2);
  }
  return r;
}

void to_json(nlohmann::json& j, const Grid& g) {
  j = nlohmann::json{{"d", g.d}, {"L", g.L}, {"N", g.N}, {"k", g.k}};
}

void from_json(const nlohmann::json& j, Grid& g) {
  g = make_grid(j.at("d").get<int>(), j.at("L").get<double>(), j.at("N").get<int>(),
                j.at("k").get<int>());
}

void to_json(nlohmann::json& j, const SpectralField& f) {
  j = nlohmann::json{{"grid", f.grid()},
                     {"coeffs", std::vector<double>(f.coeffs().begin(), f.coeffs().end())}};
}

SpectralField field_from_json(const nlohmann::json& j) {
  Grid g = j.at("grid").get<Grid>();
  return SpectralField(g, j.at("coeffs").get<std::vector<double>>());
}

}  // namespace monodiss
