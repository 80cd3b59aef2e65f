#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "monodiss/nonlinearity.hpp"
#include "monodiss/spectral.hpp"

namespace monodiss {

/// a (-(-Delta)^alpha) v - f(v) - shift v = rhs, v = 0 on the boundary.
/// alpha = 1 is the classical problem a Delta v - f(v) - shift v = rhs.
struct EllipticProblem {
  Eigen::MatrixXd a;
  NonlinearSpec f;
  double shift = 0.0;
  SpectralField rhs;
  double alpha = 1.0;
};

/// Validates the problem: a is k x k with a + a^T > 0 and the full operator
/// is strictly monotone (lambda_1^alpha * min eig sym(a) + shift > K).
EllipticProblem make_elliptic_problem(Eigen::MatrixXd a, NonlinearSpec f, double shift, SpectralField rhs,
                                      double alpha = 1.0);

/// Smallest eigenvalue of (a + a^T)/2; throws ConfigError("a") if a is not
/// square of size k or the value is not positive.
double check_diffusion_matrix(const Eigen::MatrixXd& a, int k);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  std::optional<SpectralField> initial_guess;
  double linear_rtol = 1e-12;
  int gmres_restart = 60;
  int gmres_max_iter = 2000;
};

struct SolveResult {
  SpectralField solution;
  /// L^2 residual norms of the accepted iterates, starting with the guess.
  std::vector<double> residual_history;
  int iterations = 0;
  int linear_iterations = 0;
};

/// Residual a(-(-Delta)^alpha)v - f(v) - shift v - rhs (dealiased).
SpectralField elliptic_residual(const EllipticProblem& problem, const SpectralField& v);

/// Damped Newton with Armijo backtracking (factor 1/2, minimum step 2^-20)
/// on the residual norm; the Newton systems are solved by GMRES
/// right-preconditioned with the per-mode inverse of lambda^alpha a + shift.
/// Throws SolverFailure (carrying the residual history) on non-convergence.
SolveResult solve(const EllipticProblem& problem, const NewtonOptions& options = {});

struct PreparedInitialData {
  SpectralField u0n;
  SpectralField G;
  ApproxSpec approx;
  SolveResult solve;
};

/// Solves a Delta v - f_n(v) - K v = G with G = a Delta u0 - f(u0) - K u0,
/// f_n = approximate(f, n, p1), starting from u0.
PreparedInitialData prepare_initial_data(const SpectralField& u0, const Eigen::MatrixXd& a, const NonlinearSpec& f,
                                         int n, std::optional<double> p1, double tol,
                                         const ApproxOptions& approx_options = {});

struct RegularityReport {
  double h2 = 0.0;          ///< ||Delta u||
  double fl2 = 0.0;         ///< ||f(u)||
  double g_l2 = 0.0;
  double ratio_2reg = 0.0;  ///< (h2 + fl2) / ||g||
  double mixed = 0.0;       ///< || |D^2 u| |grad u|^{r/2} ||
  std::optional<double> grad_lr;  ///< ||grad u||_{L^{d(r+2)/(d-2)}}, d = 3 only
  double q = 0.0;
  double kappa = 0.0;
  double r = 0.0;
  bool r_defined = false;  ///< r = d(q-2)/(d-q) needs 2 < d and q < d
  bool admissible = false;  ///< q < d - d(d-2)/(kappa+d), d > 2
};

RegularityReport regularity_report(const SpectralField& u, const SpectralField& g, const NonlinearSpec& f, double q,
                                   double kappa);

void to_json(nlohmann::json& j, const RegularityReport& r);

}  // namespace monodiss
