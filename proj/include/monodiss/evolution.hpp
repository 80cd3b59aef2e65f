#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "monodiss/nonlinearity.hpp"
#include "monodiss/spectral.hpp"

namespace monodiss {

enum class Scheme { imex_euler, implicit_monotone_euler, reference_rk4 };

Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme s);

/// beta = 0:  du/dt = -a(-Delta)^alpha u - f(u) + g             (RDS)
/// beta > 0:  du/dt = -(-Delta)^beta (a(-Delta)^alpha u + f(u) - g)  (Cahn–Hilliard type)
struct EvolutionConfig {
  Grid grid;
  Eigen::MatrixXd a;
  NonlinearSpec f;
  SpectralField g;
  double alpha = 1.0;
  double beta = 0.0;
  Scheme scheme = Scheme::imex_euler;
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
};

/// Throws ConfigError naming the offending field.
void validate(const EvolutionConfig& config);

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<SpectralField> derivs;  ///< rhs(config, states[i])
  std::size_t steps = 0;
  int rejections = 0;
  double wall_seconds = 0.0;
};

SpectralField rhs(const EvolutionConfig& config, const SpectralField& u);

/// One IMEX-Euler step of size dt: per mode,
///   (I + dt lambda^{alpha+beta} a) c' = c + dt lambda^beta (g - f(u))^_m.
SpectralField step_imex(const EvolutionConfig& config, const SpectralField& u, double dt);

/// One implicit Euler step of size dt, u'/dt + a(-Delta)^alpha u' + f(u') = u/dt + g,
/// solved by damped Newton. A failed Newton solve is retried as two half
/// steps, at most 8 levels deep, before SolverFailure is thrown.
SpectralField step_implicit_monotone(const EvolutionConfig& config, const SpectralField& u, double dt,
                                     int* rejections = nullptr);

/// Largest stable imex step for the current state:
/// 0.5 / ((K + max|f'(u)|) lambda_max^beta); infinity when f = 0.
double imex_step_cap(const EvolutionConfig& config, const SpectralField& u);

/// Integrates to every time in `schedule` (strictly increasing, within
/// (0, T]) with steps of at most config.dt, landing exactly on samples.
/// The returned trajectory starts with the initial state at t = 0.
Trajectory evolve(const EvolutionConfig& config, const SpectralField& u0, double T, const std::vector<double>& schedule);

/// Classical RK4 with dt bounded by the stability of the fastest mode;
/// guarded to k * N^d <= 20000. `schedule` empty means {T}.
Trajectory reference_solve(const EvolutionConfig& config, const SpectralField& u0, double T,
                           const std::vector<double>& schedule = {});

std::vector<double> uniform_schedule(double T, int count);
/// `per_decade` log-spaced times on [t_min, t_max], both ends included.
std::vector<double> log_schedule(double t_min, double t_max, int per_decade);

}  // namespace monodiss
