#include "monodiss/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "monodiss/error.hpp"

namespace monodiss {

namespace {

// Per-mode k x k blocks B_m = lambda_m^alpha a + shift I and their inverses.
class ModalOperator {
 public:
  ModalOperator(const Grid& grid, const Eigen::MatrixXd& a, double shift, double alpha) : grid_(grid) {
    const int k = grid.k;
    const std::size_t nm = grid.modes();
    block_.resize(nm * k * k);
    inverse_.resize(nm * k * k);
    for (std::size_t m = 0; m < nm; ++m) {
      const double lam = std::pow(grid.eigenvalue(m), alpha);
      Eigen::MatrixXd B = lam * a + shift * Eigen::MatrixXd::Identity(k, k);
      Eigen::MatrixXd Binv = B.inverse();
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          block_[(m * k + i) * k + j] = B(i, j);
          inverse_[(m * k + i) * k + j] = Binv(i, j);
        }
    }
  }

  void apply(const SpectralField& x, SpectralField& out) const { apply_blocks(block_, x, out); }
  void solve(const SpectralField& x, SpectralField& out) const { apply_blocks(inverse_, x, out); }

 private:
  void apply_blocks(const std::vector<double>& blocks, const SpectralField& x, SpectralField& out) const {
    const int k = grid_.k;
    const std::size_t nm = grid_.modes();
    if (k == 1) {
      auto xs = x.coeffs();
      auto os = out.coeffs();
      for (std::size_t m = 0; m < nm; ++m) os[m] = blocks[m] * xs[m];
      return;
    }
    for (std::size_t m = 0; m < nm; ++m) {
      for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += blocks[(m * k + i) * k + j] * x.at(j, m);
        out.at(i, m) = s;
      }
    }
  }

  Grid grid_;
  std::vector<double> block_;
  std::vector<double> inverse_;
};

// v -> P[f'(u) v] with f'(u) frozen on the dealiasing grid.
class FrozenJacobian {
 public:
  FrozenJacobian(const NonlinearSpec& f, const SpectralField& u) : grid_(u.grid()), zero_(f.identically_zero) {
    if (zero_) return;
    M_ = grid_.dealias_points();
    const GridFunction uu = evaluate(u, M_, Nodes::interior);
    pts_ = uu.points();
    const int k = grid_.k;
    jac_.resize(pts_ * k * k);
    std::vector<double> buf(k);
    for (std::size_t i = 0; i < pts_; ++i) {
      for (int c = 0; c < k; ++c) buf[c] = uu.values[c * pts_ + i];
      f.jac(buf, std::span<double>(jac_).subspan(i * k * k, k * k));
    }
  }

  SpectralField apply(const SpectralField& v) const {
    if (zero_) return SpectralField(grid_);
    GridFunction vv = evaluate(v, M_, Nodes::interior);
    const int k = grid_.k;
    GridFunction out = vv;
    if (k == 1) {
      for (std::size_t i = 0; i < pts_; ++i) out.values[i] = jac_[i] * vv.values[i];
    } else {
      for (std::size_t i = 0; i < pts_; ++i)
        for (int a = 0; a < k; ++a) {
          double s = 0.0;
          for (int b = 0; b < k; ++b) s += jac_[(i * k + a) * k + b] * vv.values[b * pts_ + i];
          out.values[a * pts_ + i] = s;
        }
    }
    return project(out, grid_);
  }

 private:
  Grid grid_;
  bool zero_;
  int M_ = 0;
  std::size_t pts_ = 0;
  std::vector<double> jac_;
};

struct GmresResult {
  SpectralField x;
  int iterations = 0;
};

// Restarted GMRES for A x = b with right preconditioner Minv.
template <class ApplyA, class ApplyMinv>
GmresResult gmres(const SpectralField& b, ApplyA&& A, ApplyMinv&& Minv, double rtol, int restart, int max_iter) {
  const Grid& g = b.grid();
  GmresResult res{SpectralField(g), 0};
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) return res;
  const double target = rtol * bnorm;
  SpectralField r = b;
  double beta = bnorm;
  while (res.iterations < max_iter && beta > target) {
    std::vector<SpectralField> V;
    V.reserve(restart + 1);
    V.push_back((1.0 / beta) * r);
    std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart, 0.0), sn(restart, 0.0), rhs(restart + 1, 0.0);
    rhs[0] = beta;
    int j = 0;
    for (; j < restart && res.iterations < max_iter; ++j) {
      ++res.iterations;
      SpectralField w = A(Minv(V[j]));
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        w.axpy(-H[i][j], V[i]);
      }
      H[j + 1][j] = l2_norm(w);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double denom = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = denom == 0.0 ? 1.0 : H[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : H[j + 1][j] / denom;
      const double hjj = cs[j] * H[j][j] + sn[j] * H[j + 1][j];
      const double next_norm = H[j + 1][j];
      H[j][j] = hjj;
      H[j + 1][j] = 0.0;
      rhs[j + 1] = -sn[j] * rhs[j];
      rhs[j] = cs[j] * rhs[j];
      if (std::abs(rhs[j + 1]) <= target || next_norm == 0.0) {
        ++j;
        break;
      }
      V.push_back((1.0 / next_norm) * w);
    }
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = rhs[i];
      for (int l = i + 1; l < j; ++l) s -= H[i][l] * y[l];
      y[i] = s / H[i][i];
    }
    SpectralField update(g);
    for (int i = 0; i < j; ++i) update.axpy(y[i], V[i]);
    res.x += Minv(update);
    r = b - A(res.x);
    beta = l2_norm(r);
  }
  return res;
}

}  // namespace

double check_diffusion_matrix(const Eigen::MatrixXd& a, int k) {
  if (a.rows() != k || a.cols() != k) {
    throw ConfigError("a", "diffusion matrix must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (!a.allFinite()) throw ConfigError("a", "diffusion matrix has non-finite entries");
  const Eigen::MatrixXd S = 0.5 * (a + a.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (!(lmin > 0.0)) throw ConfigError("a", "a + a^T must be positive definite");
  return lmin;
}

EllipticProblem make_elliptic_problem(Eigen::MatrixXd a, NonlinearSpec f, double shift, SpectralField rhs,
                                      double alpha) {
  const Grid& g = rhs.grid();
  const double lmin = check_diffusion_matrix(a, g.k);
  if (f.k != g.k) throw DimensionError("nonlinearity and right-hand side have different component counts");
  if (!(shift >= 0.0)) throw ConfigError("shift", "must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("alpha", "must be positive");
  const double lambda1 = std::pow(g.eigenvalue(0), alpha);
  if (!(lambda1 * lmin + shift > f.K)) {
    throw ConfigError("shift", "operator is not strictly monotone: lambda_1^alpha * min eig(sym a) + shift <= K");
  }
  return EllipticProblem{std::move(a), std::move(f), shift, std::move(rhs), alpha};
}

SpectralField elliptic_residual(const EllipticProblem& problem, const SpectralField& v) {
  const ModalOperator linear(v.grid(), problem.a, problem.shift, problem.alpha);
  SpectralField out(v.grid());
  linear.apply(v, out);
  out += eval_on_field(problem.f, v);
  out += problem.rhs;
  out *= -1.0;
  return out;
}

SolveResult solve(const EllipticProblem& problem, const NewtonOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("newton.tol", "must be positive");
  const Grid& g = problem.rhs.grid();
  const ModalOperator linear(g, problem.a, problem.shift, problem.alpha);

  auto residual = [&](const SpectralField& v) {
    SpectralField out(g);
    linear.apply(v, out);
    out += eval_on_field(problem.f, v);
    out += problem.rhs;
    out *= -1.0;
    return out;
  };

  SolveResult result;
  SpectralField v = options.initial_guess.value_or(SpectralField(g));
  if (!(v.grid() == g)) throw DimensionError("initial guess lives on a different grid");
  SpectralField R = residual(v);
  double rnorm = l2_norm(R);
  result.residual_history.push_back(rnorm);

  for (int it = 0; it < options.max_iter && rnorm > options.tol; ++it) {
    const FrozenJacobian jac(problem.f, v);
    auto A = [&](const SpectralField& x) {
      SpectralField out(g);
      linear.apply(x, out);
      out += jac.apply(x);
      return out;
    };
    auto Minv = [&](const SpectralField& x) {
      SpectralField out(g);
      linear.solve(x, out);
      return out;
    };
    const GmresResult step = gmres(R, A, Minv, options.linear_rtol, options.gmres_restart, options.gmres_max_iter);
    result.linear_iterations += step.iterations;

    double t = 1.0;
    bool accepted = false;
    while (t >= 0x1.0p-20) {
      SpectralField trial = v;
      trial.axpy(t, step.x);
      SpectralField Rt = residual(trial);
      const double nt = l2_norm(Rt);
      if (nt <= (1.0 - 1e-4 * t) * rnorm) {
        v = std::move(trial);
        R = std::move(Rt);
        rnorm = nt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    result.residual_history.push_back(rnorm);
    result.iterations = it + 1;
    if (!accepted) {
      throw SolverFailure("elliptic solve: line search failed at residual " + std::to_string(rnorm),
                          result.residual_history);
    }
  }
  if (!(rnorm <= options.tol)) {
    throw SolverFailure("elliptic solve: no convergence within " + std::to_string(options.max_iter) +
                            " Newton iterations (residual " + std::to_string(rnorm) + ")",
                        result.residual_history);
  }
  result.solution = std::move(v);
  return result;
}

PreparedInitialData prepare_initial_data(const SpectralField& u0, const Eigen::MatrixXd& a, const NonlinearSpec& f,
                                         int n, std::optional<double> p1, double tol,
                                         const ApproxOptions& approx_options) {
  const Grid& g = u0.grid();
  PreparedInitialData out;
  out.approx = approximate(f, n, p1, approx_options);

  // G = a Delta u0 - f(u0) - K u0
  const ModalOperator laplace(g, a, 0.0, 1.0);
  SpectralField lap(g);
  laplace.apply(u0, lap);
  out.G = -1.0 * lap;
  out.G -= eval_on_field(f, u0);
  out.G.axpy(-f.K, u0);

  EllipticProblem problem = make_elliptic_problem(a, out.approx.approx, f.K, out.G);
  NewtonOptions opts;
  opts.tol = tol;
  opts.initial_guess = u0;
  out.solve = solve(problem, opts);
  out.u0n = out.solve.solution;
  return out;
}

RegularityReport regularity_report(const SpectralField& u, const SpectralField& g, const NonlinearSpec& f, double q,
                                   double kappa) {
  if (!(u.grid() == g.grid())) throw DimensionError("regularity_report: u and g live on different grids");
  const Grid& grid = u.grid();
  RegularityReport rep;
  rep.q = q;
  rep.kappa = kappa;
  rep.h2 = hs_norm(u, 2.0);
  rep.fl2 = nonlinear_l2_norm(f, u);
  rep.g_l2 = l2_norm(g);
  rep.ratio_2reg = (rep.h2 + rep.fl2) / rep.g_l2;

  const int d = grid.d;
  if (d > 2 && q > 2.0 && q < d) {
    rep.r = d * (q - 2.0) / (d - q);
    rep.r_defined = true;
  }
  rep.admissible = d > 2 && q > 2.0 && q < d - static_cast<double>(d * (d - 2)) / (kappa + d);

  const int M = grid.dealias_points();
  const int k = grid.k;
  std::vector<GridFunction> first;
  std::vector<GridFunction> second;
  for (int i = 0; i < d; ++i) {
    std::array<int, 3> o{0, 0, 0};
    o[i] = 1;
    first.push_back(evaluate(u, M, Nodes::closed, o));
    for (int j = i; j < d; ++j) {
      std::array<int, 3> s{0, 0, 0};
      s[i] += 1;
      s[j] += 1;
      second.push_back(evaluate(u, M, Nodes::closed, s));
    }
  }
  const std::size_t pts = first.front().points();
  std::vector<double> mixed(pts), grad_pow(pts);
  const double e = rep.r_defined && d == 3 ? d * (rep.r + 2.0) / (d - 2.0) : 0.0;
  for (std::size_t p = 0; p < pts; ++p) {
    double grad2 = 0.0;
    for (const auto& gf : first)
      for (int c = 0; c < k; ++c) grad2 += gf.values[c * pts + p] * gf.values[c * pts + p];
    double hess2 = 0.0;
    int idx = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j, ++idx) {
        const double w = i == j ? 1.0 : 2.0;
        for (int c = 0; c < k; ++c) hess2 += w * second[idx].values[c * pts + p] * second[idx].values[c * pts + p];
      }
    mixed[p] = hess2 * std::pow(grad2, 0.5 * rep.r);
    if (e > 0.0) grad_pow[p] = std::pow(grad2, 0.5 * e);
  }
  rep.mixed = std::sqrt(integrate(mixed, d, M, Nodes::closed, grid.L));
  if (e > 0.0) rep.grad_lr = std::pow(integrate(grad_pow, d, M, Nodes::closed, grid.L), 1.0 / e);
  return rep;
}

void to_json(nlohmann::json& j, const RegularityReport& r) {
  j = nlohmann::json{{"h2", r.h2},       {"fl2", r.fl2},   {"g_l2", r.g_l2},         {"ratio_2reg", r.ratio_2reg},
                     {"mixed", r.mixed}, {"q", r.q},       {"kappa", r.kappa},       {"r", r.r},
                     {"r_defined", r.r_defined}, {"admissible", r.admissible}};
  j["grad_lr"] = r.grad_lr ? nlohmann::json(*r.grad_lr) : nlohmann::json(nullptr);
}

}  // namespace monodiss
