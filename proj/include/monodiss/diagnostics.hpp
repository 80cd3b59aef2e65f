#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "monodiss/evolution.hpp"
#include "monodiss/nonlinearity.hpp"
#include "monodiss/spectral.hpp"

namespace monodiss {

struct EnergyRow {
  double t = 0.0;
  double l2_sq = 0.0;
  double h1_sq = 0.0;
  double h2_sq = 0.0;
  double fu_dot_u_abs = 0.0;        ///< int |f(u).u|
  double fprime_grad_signed = 0.0;  ///< (f'(u) grad u, grad u)
  double fprime_grad_abs = 0.0;     ///< int |f'(u) grad u . grad u|
  double dt_l2_sq = 0.0;            ///< ||du/dt||^2
  double dt_lr = 0.0;               ///< ||du/dt||_{L^{r+2}}
  double d_norm_sq = 0.0;           ///< ||Delta u||^2 + ||f(u)||^2
  double ibp_residual = 0.0;        ///< |(f(u), Delta u) + (f'(u) grad u, grad u)|
};

struct EnergyReport {
  double r = 0.2;
  std::vector<EnergyRow> rows;

  std::vector<double> times() const;
  std::vector<double> column(const std::string& name) const;
};

/// All functionals on the closed dealiasing grid (exact for band-limited
/// cubic integrands).
EnergyReport energy_report(const Trajectory& trajectory, const NonlinearSpec& f, double r = 0.2);

/// |(f(u), Delta u) + (f'(u) grad u, grad u)| by trapezoid quadrature on M
/// interior points per axis (closed grid). M = 0 selects the dealiasing grid.
double ibp_residual(const NonlinearSpec& f, const SpectralField& u, int M = 0);

/// Column names in CSV order.
const std::vector<std::string>& energy_columns();
std::string energy_csv(const EnergyReport& report);

struct Verdict {
  std::string id;
  nlohmann::json constants = nlohmann::json::object();
  std::vector<double> times;
  std::vector<double> margins;  ///< min over the ensemble at each time
  bool pass = false;
  double witness_time = 0.0;
  double min_margin = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> flags;
};

void to_json(nlohmann::json& j, const Verdict& v);

enum class Functional { l2, h1 };

struct DissipativeOptions {
  double dt = 1e-3;                   ///< enters the tolerance 10 dt scale
  std::optional<double> forced_alpha;  ///< check a claimed rate instead of fitting one
};

/// Fits y(t) <= C e^{-alpha t} y(0) + B over an ensemble. B is the largest
/// final value; (C, alpha) come from least squares on log((y - B)/y(0)) over
/// points with y > 10 B, after which C is inflated minimally to dominate.
/// With a forced alpha, C is the least-squares value without inflation.
/// PASS iff the envelope dominates every sample within tolerance and
/// alpha > 0. Ensembles with fewer than 3 distinct initial magnitudes are
/// refused. All reports must share sample times.
Verdict check_dissipative(const std::vector<EnergyReport>& ensemble, Functional which,
                          const DissipativeOptions& options = {});

/// ratio(t) = ||u1 - u2||(t) / ||u1 - u2||(0) against (1 + 10 dt) e^{K t}.
/// constants carry K, the largest ratio and K1_fit = max_t log(ratio)/t.
Verdict check_lipschitz(const Trajectory& a, const Trajectory& b, double K, double dt);

struct SqueezingPair {
  SpectralField xi1, xi2;  ///< initial states
  SpectralField s1, s2;    ///< states at time T
};

struct SqueezingResult {
  double K_hat = 0.0;
  std::vector<double> ratios;
  double eps_sob = 0.0;
  double T = 0.0;
  bool outside_ball = false;
};

/// K_hat = max ||s1 - s2||_{H^eps} / ||xi1 - xi2||_{L^2}. Pairs whose initial
/// states leave the ball of radius `ball_radius` (L^2) raise the flag.
SqueezingResult check_squeezing(const std::vector<SqueezingPair>& pairs, double T, double eps_sob,
                                double ball_radius);

/// True when the two estimates differ by less than 20% of the larger.
bool refinement_stable(double coarse, double fine, double rel = 0.2);

struct SmoothingFit {
  double N_fit = 0.0;        ///< minus the slope of log ||du/dt||^2 vs log t
  double h1_slope = 0.0;     ///< slope of log ||grad u||^2
  double lr_slope = 0.0;     ///< slope of log (t ||du/dt||_{L^{r+2}}^{r+2})
  double decades = 0.0;
  int points = 0;
};

/// Least-squares slopes over samples with t in [t_min, t_max]; refuses
/// windows spanning fewer than 2 decades of samples.
SmoothingFit fit_smoothing_rate(const EnergyReport& report, double t_min, double t_max);

void to_json(nlohmann::json& j, const SmoothingFit& s);
void to_json(nlohmann::json& j, const SqueezingResult& s);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace monodiss
