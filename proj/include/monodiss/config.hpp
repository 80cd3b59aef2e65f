#pragma once

// Experiment configuration: the JSON document that fully determines a run.
//
// Field specifications (used for "g" and "initial"):
//   {"profile": "zero"}
//   {"profile": "sine", "amplitude": A, "mode": [m1, ...], "component": c}
//       A * prod_i sin(pi m_i x_i / L) in component c
//   {"profile": "power", "amplitude": A, "decay": s}
//       coefficient A * prod_i m_i^{-s} on every mode of every component
//   {"profile": "random", "norm": R, "decay": s, "stream": i}
//       normal coefficients scaled by prod_i m_i^{-s}, rescaled to L^2 norm R;
//       drawn from stream i of the run seed
//   {"modes": [{"component": c, "mode": [m1, ...], "value": v}, ...]}
//
// Schedules:
//   {"kind": "uniform", "count": n}
//   {"kind": "log", "t_min": t0, "per_decade": n}     (up to T)
//   {"kind": "list", "times": [...]}

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "monodiss/evolution.hpp"

namespace monodiss {

/// Random initial data for ensemble suites: member i has L^2 norm
/// magnitudes[i % size] and coefficients decaying like prod m_i^{-decay}.
struct EnsembleSection {
  int count = 9;
  std::vector<double> magnitudes = {1.0, 4.0, 16.0};
  double decay = 2.0;
};

struct EllipticSection {
  double q = 2.2;
  double kappa = 0.5;
  int samples = 10;  ///< random unit right-hand sides
  double shift = 0.0;
  int fine_N = 0;  ///< refinement grid; 0 means 2N
};

struct SmoothingSection {
  double t_min = 1e-3;
  double t_max = 1e-1;
};

struct SqueezingSection {
  double eps_sob = 0.25;
  double ball_radius = 2.0;
  int fine_N = 0;
};

struct AttractorSection {
  double burn_in = 3.0;
  int snapshots = 25;
  double spacing = 0.1;
  int projection = 8;
  std::vector<double> eps = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  int probes = 4;
  double probe_norm = 1.0;
  double rate_T = 3.0;
  int clusters = 0;  ///< 0 disables centroid extraction
};

struct ExperimentConfig {
  Grid grid{1, 1.0, 32, 1};
  std::vector<std::vector<double>> a;  ///< empty means the identity
  nlohmann::json nonlinearity = {{"name", "cubic_scalar"}, {"params", {{"lambda", 1.0}}}};
  nlohmann::json g = {{"profile", "zero"}};
  nlohmann::json initial = {{"profile", "sine"}, {"amplitude", 1.0}};
  std::string scheme = "imex_euler";
  double dt = 1e-3;
  double T = 1.0;
  double alpha = 1.0;
  double beta = 0.0;
  nlohmann::json schedule = {{"kind", "uniform"}, {"count", 100}};
  std::optional<std::uint64_t> seed;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  std::vector<std::string> suites;
  EnsembleSection ensemble;
  EllipticSection elliptic;
  SmoothingSection smoothing;
  SqueezingSection squeezing;
  AttractorSection attractor;
  /// {"parameters": {"dotted.path": [values...], ...}}
  nlohmann::json sweep = {{"parameters", nlohmann::json::object()}};
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys and wrong types raise
/// ConfigError with the dotted path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Checks everything that can be checked without running; throws ConfigError.
void validate(const ExperimentConfig& c);

EvolutionConfig evolution_config(const ExperimentConfig& c);
SpectralField make_field(const nlohmann::json& spec, const Grid& grid, std::uint64_t seed, const std::string& path);
std::vector<double> make_schedule(const nlohmann::json& spec, double T, const std::string& path);

/// Sets a dotted path ("nonlinearity.params.lambda", "grid.N") in a JSON
/// document, creating intermediate objects.
void set_path(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

/// Cartesian product of the sweep parameters, keys in sorted order with the
/// last one varying fastest. Each point is a full resolved config.
std::vector<nlohmann::json> sweep_points(const ExperimentConfig& c);

}  // namespace monodiss
