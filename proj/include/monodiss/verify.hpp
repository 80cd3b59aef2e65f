#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "monodiss/attractor.hpp"
#include "monodiss/config.hpp"

namespace monodiss {

struct SuiteResult {
  std::string name;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const SuiteResult& r);

// Suites runnable on any experiment config (`suites` in the config file).

/// imex and implicit errors against the reference at T for dt * {8, 4, 2, 1};
/// slopes in [0.8, 1.2].
SuiteResult suite_convergence(const ExperimentConfig& c);
/// L^2 and H^1 envelopes over the random ensemble.
SuiteResult suite_dissipativity(const ExperimentConfig& c, std::uint64_t seed, int workers);
/// ensemble.count random pairs, ratio <= (1 + 10 dt) e^{KT}.
SuiteResult suite_lipschitz(const ExperimentConfig& c, std::uint64_t seed, int workers);
/// Slopes over [smoothing.t_min, smoothing.t_max] against N_theory + 0.5 and -1.1.
SuiteResult suite_smoothing(const ExperimentConfig& c);
/// Residual < 1e-6 ||u||_{H^2} ||u||_{H^1} on ensemble.count random
/// band-limited fields, plus order >= 1 decrease of the undealiased residual
/// of 2/m^3-decaying fields under N doubling.
SuiteResult suite_ibp(const ExperimentConfig& c, std::uint64_t seed);
/// Regularity ratio on random unit right-hand sides at N and fine_N (within
/// 20%), plus a manufactured solution solved to residual < 1e-8.
SuiteResult suite_elliptic(const ExperimentConfig& c, std::uint64_t seed);
/// K_hat over ensemble.count pairs in the ball at N and fine_N (within 20%).
SuiteResult suite_squeezing(const ExperimentConfig& c, std::uint64_t seed, int workers);

const std::vector<std::string>& suite_names();
/// Runs one named suite; throws ConfigError("suites") for unknown names and
/// ConfigError("seed") when a stochastic suite has no seed.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& c, std::optional<std::uint64_t> seed,
                      int workers);

struct AttractorRun {
  AttractorCloud cloud;
  std::optional<BoxCount> box;
  std::vector<SpectralField> centroids;
  nlohmann::json summary = nlohmann::json::object();
};

/// Cloud, box-counting dimension, attraction rate and optional centroids for
/// the configured system. Refusals are reported in place of the value.
AttractorRun measure_attractor(const ExperimentConfig& c, std::uint64_t seed, int workers);

struct PresetInfo {
  std::string name;
  int criterion = 0;
  bool stochastic = true;
};

/// The acceptance checks, in criterion order.
const std::vector<PresetInfo>& presets();
const PresetInfo& find_preset(const std::string& name);
SuiteResult run_preset(const std::string& name, std::optional<std::uint64_t> seed, int workers);

/// The JSON document emitted by `verify`; contains no timing.
nlohmann::json verify_report(const SuiteResult& r, const PresetInfo* preset, std::optional<std::uint64_t> seed);

}  // namespace monodiss
