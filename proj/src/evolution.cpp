#include "monodiss/evolution.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "monodiss/elliptic.hpp"
#include "monodiss/error.hpp"

namespace monodiss {

namespace {

struct ModeFactors {
  std::vector<double> diffusion;  // lambda^alpha
  std::vector<double> mobility;   // lambda^beta
};

ModeFactors mode_factors(const EvolutionConfig& c) {
  ModeFactors m;
  const std::size_t nm = c.grid.modes();
  m.diffusion.resize(nm);
  m.mobility.resize(nm);
  for (std::size_t i = 0; i < nm; ++i) {
    const double lam = c.grid.eigenvalue(i);
    m.diffusion[i] = c.alpha == 1.0 ? lam : std::pow(lam, c.alpha);
    m.mobility[i] = c.beta == 0.0 ? 1.0 : std::pow(lam, c.beta);
  }
  return m;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

void rk4_step(const EvolutionConfig& config, SpectralField& u, double h) {
  const SpectralField k1 = rhs(config, u);
  const SpectralField k2 = rhs(config, SpectralField(u).axpy(0.5 * h, k1));
  const SpectralField k3 = rhs(config, SpectralField(u).axpy(0.5 * h, k2));
  const SpectralField k4 = rhs(config, SpectralField(u).axpy(h, k3));
  u.axpy(h / 6.0, k1).axpy(h / 3.0, k2).axpy(h / 3.0, k3).axpy(h / 6.0, k4);
}

double rk4_step_cap(const EvolutionConfig& config, const SpectralField& u) {
  const double lmax = config.grid.max_eigenvalue();
  const double mobility = config.beta == 0.0 ? 1.0 : std::pow(lmax, config.beta);
  const double rho = spectral_norm(config.a) * std::pow(lmax, config.alpha) * mobility +
                     mobility * (config.f.identically_zero ? 0.0 : config.f.K + max_jacobian_norm(config.f, u));
  return 2.0 / rho;
}

SpectralField implicit_step(const EvolutionConfig& config, const SpectralField& u, double dt, int depth,
                            int* rejections) {
  EllipticProblem problem{config.a, config.f, 1.0 / dt, SpectralField(config.grid), config.alpha};
  problem.rhs = -1.0 / dt * u;
  problem.rhs -= config.g;
  NewtonOptions opts;
  opts.tol = config.newton_tol;
  opts.max_iter = config.newton_max_iter;
  opts.initial_guess = u;
  try {
    return solve(problem, opts).solution;
  } catch (const SolverFailure& failure) {
    if (depth >= 8) throw SolverFailure(std::string("implicit step rejected 8 times: ") + failure.what(),
                                        failure.residual_history());
    if (rejections != nullptr) ++*rejections;
    const SpectralField half = implicit_step(config, u, 0.5 * dt, depth + 1, rejections);
    return implicit_step(config, half, 0.5 * dt, depth + 1, rejections);
  }
}

}  // namespace

Scheme scheme_from_string(const std::string& name) {
  if (name == "imex_euler") return Scheme::imex_euler;
  if (name == "implicit_monotone_euler") return Scheme::implicit_monotone_euler;
  if (name == "reference_rk4") return Scheme::reference_rk4;
  throw ConfigError("scheme", "unknown scheme '" + name + "'");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::imex_euler: return "imex_euler";
    case Scheme::implicit_monotone_euler: return "implicit_monotone_euler";
    case Scheme::reference_rk4: return "reference_rk4";
  }
  return "unknown";
}

void validate(const EvolutionConfig& c) {
  make_grid(c.grid.d, c.grid.L, c.grid.N, c.grid.k);
  check_diffusion_matrix(c.a, c.grid.k);
  if (c.f.k != c.grid.k) throw ConfigError("nonlinearity", "component count differs from grid.k");
  if (!c.f.eval || !c.f.jac) throw ConfigError("nonlinearity", "missing evaluation callbacks");
  if (!(c.g.grid() == c.grid)) throw ConfigError("g", "forcing does not live on the configured grid");
  if (!(c.alpha > 0.0 && c.alpha <= 2.0)) throw ConfigError("alpha", "must lie in (0, 2]");
  if (!(c.beta >= 0.0 && c.beta <= 1.0)) throw ConfigError("beta", "must lie in [0, 1]");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt", "must be positive");
  if (!(c.newton_tol > 0.0)) throw ConfigError("newton.tol", "must be positive");
  if (c.newton_max_iter < 1) throw ConfigError("newton.max_iter", "must be >= 1");
  if (c.scheme == Scheme::implicit_monotone_euler) {
    if (c.beta != 0.0) throw ConfigError("scheme", "implicit_monotone_euler supports beta = 0 only");
    if (c.f.K > 0.0 && !(c.dt < 0.5 / c.f.K)) throw ConfigError("dt", "implicit scheme requires dt < 1/(2K)");
  }
}

SpectralField rhs(const EvolutionConfig& config, const SpectralField& u) {
  const Grid& g = config.grid;
  if (!(u.grid() == g)) throw DimensionError("rhs: state lives on a different grid");
  const ModeFactors mf = mode_factors(config);
  const SpectralField F = eval_on_field(config.f, u);
  SpectralField out(g);
  const int k = g.k;
  for (std::size_t m = 0; m < g.modes(); ++m) {
    for (int i = 0; i < k; ++i) {
      double au = 0.0;
      for (int j = 0; j < k; ++j) au += config.a(i, j) * u.at(j, m);
      out.at(i, m) = -mf.mobility[m] * (mf.diffusion[m] * au + F.at(i, m) - config.g.at(i, m));
    }
  }
  return out;
}

SpectralField step_imex(const EvolutionConfig& config, const SpectralField& u, double dt) {
  const Grid& g = config.grid;
  const ModeFactors mf = mode_factors(config);
  const SpectralField F = eval_on_field(config.f, u);
  SpectralField out(g);
  const int k = g.k;
  if (k == 1) {
    const double a = config.a(0, 0);
    for (std::size_t m = 0; m < g.modes(); ++m) {
      const double b = u.at(0, m) + dt * mf.mobility[m] * (config.g.at(0, m) - F.at(0, m));
      out.at(0, m) = b / (1.0 + dt * mf.diffusion[m] * mf.mobility[m] * a);
    }
    return out;
  }
  Eigen::MatrixXd B(k, k);
  Eigen::VectorXd b(k);
  for (std::size_t m = 0; m < g.modes(); ++m) {
    B = Eigen::MatrixXd::Identity(k, k) + dt * mf.diffusion[m] * mf.mobility[m] * config.a;
    for (int i = 0; i < k; ++i) b(i) = u.at(i, m) + dt * mf.mobility[m] * (config.g.at(i, m) - F.at(i, m));
    const Eigen::VectorXd x = B.partialPivLu().solve(b);
    for (int i = 0; i < k; ++i) out.at(i, m) = x(i);
  }
  return out;
}

SpectralField step_implicit_monotone(const EvolutionConfig& config, const SpectralField& u, double dt,
                                     int* rejections) {
  if (config.beta != 0.0) throw ConfigError("scheme", "implicit_monotone_euler supports beta = 0 only");
  return implicit_step(config, u, dt, 0, rejections);
}

double imex_step_cap(const EvolutionConfig& config, const SpectralField& u) {
  if (config.f.identically_zero) return std::numeric_limits<double>::infinity();
  const double mobility = config.beta == 0.0 ? 1.0 : std::pow(config.grid.max_eigenvalue(), config.beta);
  return 0.5 / ((config.f.K + max_jacobian_norm(config.f, u)) * mobility);
}

Trajectory evolve(const EvolutionConfig& config, const SpectralField& u0, double T, const std::vector<double>& schedule) {
  validate(config);
  if (!(u0.grid() == config.grid)) throw DimensionError("evolve: initial state lives on a different grid");
  if (!(T > 0.0)) throw ConfigError("T", "must be positive");
  if (schedule.empty()) throw ConfigError("schedule", "must contain at least one time");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || schedule[i] > T * (1.0 + 1e-12) || (i > 0 && !(schedule[i] > schedule[i - 1]))) {
      throw ConfigError("schedule", "times must be strictly increasing within (0, T]");
    }
  }
  if (config.scheme == Scheme::reference_rk4 && config.grid.size() > 20000) {
    throw Refusal("reference_rk4 is limited to k * N^d <= 20000 unknowns");
  }

  const auto start = std::chrono::steady_clock::now();
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.derivs.push_back(rhs(config, u0));

  SpectralField u = u0;
  double t = 0.0;
  double rk4_cap = config.scheme == Scheme::reference_rk4 ? rk4_step_cap(config, u) : 0.0;
  for (double ts : schedule) {
    while (t < ts) {
      const double remaining = ts - t;
      double hmax = config.dt;
      if (config.scheme == Scheme::imex_euler) {
        hmax = std::min(hmax, imex_step_cap(config, u));
      } else if (config.scheme == Scheme::reference_rk4) {
        if (traj.steps % 64 == 0) rk4_cap = rk4_step_cap(config, u);
        hmax = std::min(hmax, rk4_cap);
      }
      const double n = std::max(1.0, std::ceil(remaining / hmax - 1e-9));
      const double h = remaining / n;
      switch (config.scheme) {
        case Scheme::imex_euler: u = step_imex(config, u, h); break;
        case Scheme::implicit_monotone_euler: u = step_implicit_monotone(config, u, h, &traj.rejections); break;
        case Scheme::reference_rk4: rk4_step(config, u, h); break;
      }
      ++traj.steps;
      t = n == 1.0 ? ts : t + h;
      for (double c : u.coeffs()) {
        if (!std::isfinite(c)) throw SolverFailure("evolve: state became non-finite at t = " + std::to_string(t));
      }
    }
    traj.times.push_back(ts);
    traj.states.push_back(u);
    traj.derivs.push_back(rhs(config, u));
  }
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

Trajectory reference_solve(const EvolutionConfig& config, const SpectralField& u0, double T,
                           const std::vector<double>& schedule) {
  EvolutionConfig ref = config;
  ref.scheme = Scheme::reference_rk4;
  return evolve(ref, u0, T, schedule.empty() ? std::vector<double>{T} : schedule);
}

std::vector<double> uniform_schedule(double T, int count) {
  if (count < 1) throw ConfigError("schedule.count", "must be >= 1");
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) s[i] = T * (i + 1) / count;
  s.back() = T;
  return s;
}

std::vector<double> log_schedule(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw ConfigError("schedule", "need 0 < t_min < t_max");
  if (per_decade < 1) throw ConfigError("schedule.per_decade", "must be >= 1");
  const int n = static_cast<int>(std::lround(per_decade * std::log10(t_max / t_min)));
  std::vector<double> s;
  for (int i = 0; i <= n; ++i) s.push_back(t_min * std::pow(10.0, static_cast<double>(i) / per_decade));
  s.back() = t_max;
  return s;
}

}  // namespace monodiss
