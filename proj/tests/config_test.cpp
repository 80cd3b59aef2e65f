#include <cmath>

#include <gtest/gtest.h>

#include "monodiss/config.hpp"
#include "monodiss/error.hpp"
#include "monodiss/io.hpp"
#include "monodiss/verify.hpp"

using namespace monodiss;
using nlohmann::json;

namespace {

std::string field_of(const json& j) {
  try {
    validate(config_from_json(j));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsRoundTripLosslessly) {
  ExperimentConfig c;
  c.seed = 18446744073709551615ULL;
  c.dt = 0.1 + 0.2;
  c.a = {{1.0, 0.25}, {-0.25, 2.0}};
  c.grid.k = 2;
  c.suites = {"ibp", "lipschitz"};
  c.sweep["parameters"]["dt"] = {1e-3, 2e-3};
  const json j = c;
  const ExperimentConfig back = config_from_json(j);
  EXPECT_EQ(json(back).dump(), j.dump());
  EXPECT_EQ(back.dt, c.dt);
  EXPECT_EQ(*back.seed, *c.seed);
}

TEST(Config, RoundTripThroughText) {
  ExperimentConfig c;
  c.attractor.eps = {0.1, 1.0 / 3.0};
  c.initial = {{"profile", "random"}, {"norm", 2.5}, {"decay", 1.1}, {"stream", 4}};
  const std::string text = json(c).dump();
  EXPECT_EQ(json(config_from_json(json::parse(text))).dump(), text);
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_EQ(field_of({{"grid", {{"N", 0}}}}), "grid.N");
  EXPECT_EQ(field_of({{"grid", {{"d", 4}}}}), "grid.d");
  EXPECT_EQ(field_of({{"dt", -1.0}}), "dt");
  EXPECT_EQ(field_of({{"alpha", 3.0}}), "alpha");
  EXPECT_EQ(field_of({{"beta", 2.0}}), "beta");
  EXPECT_EQ(field_of({{"scheme", "leapfrog"}}), "scheme");
  EXPECT_EQ(field_of({{"grid", {{"N", "8"}}}}), "grid.N");
  EXPECT_EQ(field_of({{"grids", 1}}), "grids");
  EXPECT_EQ(field_of({{"a", {{1.0, 0.0}}}}), "a.0");
  EXPECT_EQ(field_of({{"initial", {{"profile", "sine"}, {"mode", {40}}}}}), "initial.mode");
  EXPECT_EQ(field_of({{"schedule", {{"kind", "log"}, {"t_min", 2.0}}}}), "schedule.t_min");
  EXPECT_EQ(field_of({{"ensemble", {{"magnitudes", json::array()}}}}), "ensemble.magnitudes");
  EXPECT_EQ(field_of({{"seed", -3}}), "seed");
  EXPECT_EQ(field_of({{"nonlinearity", {{"name", "cubic_scalar"}, {"extra", 1}}}}), "nonlinearity.extra");
  EXPECT_EQ(field_of(json::object()), "");
}

TEST(Config, ImplicitSchemeStepGuard) {
  const json j = {{"scheme", "implicit_monotone_euler"}, {"dt", 0.6}};
  EXPECT_EQ(field_of(j), "dt");
}

TEST(Config, SineProfileIsPhysicalAmplitude) {
  for (int d : {1, 2, 3}) {
    const Grid g = make_grid(d, 2.0, 4, 1);
    const SpectralField u = make_field({{"profile", "sine"}, {"amplitude", 3.0}}, g, 0, "initial");
    // ||A prod sin(pi x_i / L)||^2 = A^2 (L/2)^d
    EXPECT_NEAR(l2_norm(u), 3.0, 1e-14);
  }
}

TEST(Config, FieldProfiles) {
  const Grid g = make_grid(2, 1.0, 6, 2);
  const SpectralField r = make_field({{"profile", "random"}, {"norm", 2.0}, {"stream", 3}}, g, 11, "g");
  EXPECT_NEAR(l2_norm(r), 2.0, 1e-14);
  EXPECT_EQ(r, make_field({{"profile", "random"}, {"norm", 2.0}, {"stream", 3}}, g, 11, "g"));
  EXPECT_NE(r, make_field({{"profile", "random"}, {"norm", 2.0}, {"stream", 4}}, g, 11, "g"));
  const SpectralField p = make_field({{"profile", "power"}, {"amplitude", 1.0}, {"decay", 2.0}}, g, 0, "g");
  EXPECT_DOUBLE_EQ(p.at(1, g.flat_index({2, 3, 1})), 1.0 / 36.0);
  const SpectralField m =
      make_field({{"modes", {{{"component", 1}, {"mode", {2, 1}}, {"value", 0.5}}}}}, g, 0, "g");
  EXPECT_EQ(m.at(1, g.flat_index({2, 1, 1})), 0.5);
  EXPECT_EQ(l2_norm(m), 0.5);
  EXPECT_THROW(make_field({{"profile", "wavelet"}}, g, 0, "g"), ConfigError);
}

TEST(Config, Schedules) {
  EXPECT_EQ(make_schedule({{"kind", "uniform"}, {"count", 4}}, 1.0, "s"), (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  const auto log = make_schedule({{"kind", "log"}, {"t_min", 1e-4}, {"per_decade", 20}}, 1.0, "s");
  EXPECT_EQ(log.size(), 81u);
  EXPECT_EQ(log.back(), 1.0);
  EXPECT_THROW(make_schedule({{"kind", "list"}, {"times", {0.5, 0.2}}}, 1.0, "s"), ConfigError);
}

TEST(Config, SweepPointsAreCartesian) {
  ExperimentConfig c;
  c.sweep["parameters"] = {{"dt", {1e-3, 2e-3}}, {"nonlinearity.params.lambda", {1.0, 2.0, 3.0}}};
  const auto pts = sweep_points(c);
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0]["dt"], 1e-3);
  EXPECT_EQ(pts[0]["nonlinearity"]["params"]["lambda"], 1.0);
  EXPECT_EQ(pts[1]["nonlinearity"]["params"]["lambda"], 2.0);
  EXPECT_EQ(pts[5]["dt"], 2e-3);
  for (const auto& p : pts) {
    EXPECT_NO_THROW(validate(config_from_json(p)));
    EXPECT_TRUE(p["sweep"]["parameters"].empty());
  }
  ExperimentConfig none;
  EXPECT_EQ(sweep_points(none).size(), 1u);
}

TEST(Config, MetadataRederivesTrajectory) {
  ExperimentConfig c;
  c.grid.N = 8;
  c.T = 0.05;
  c.schedule = {{"kind", "uniform"}, {"count", 5}};
  const EvolutionConfig ev = evolution_config(c);
  const Trajectory t = evolve(ev, make_field(c.initial, ev.grid, 0, "initial"), c.T, make_schedule(c.schedule, c.T, "s"));
  const json meta = trajectory_metadata(c, t);
  EXPECT_FALSE(meta.contains("wall_seconds"));
  const ExperimentConfig again = config_from_json(meta["config"]);
  const EvolutionConfig ev2 = evolution_config(again);
  const Trajectory t2 =
      evolve(ev2, make_field(again.initial, ev2.grid, 0, "initial"), again.T, make_schedule(again.schedule, again.T, "s"));
  EXPECT_EQ(t2.states.back(), t.states.back());
  EXPECT_EQ(trajectory_snapshots(t, {0.02}).at(0)["t"], 0.02);
}

TEST(Suites, UnknownNamesAndMissingSeed) {
  ExperimentConfig c;
  EXPECT_THROW(run_suite("nope", c, 1, 1), ConfigError);
  try {
    run_suite("lipschitz", c, std::nullopt, 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "seed");
  }
  EXPECT_THROW(run_preset("attractor", std::nullopt, 1), ConfigError);
  EXPECT_THROW(find_preset("everything"), ConfigError);
  EXPECT_EQ(presets().size(), 13u);
  for (std::size_t i = 0; i < presets().size(); ++i) EXPECT_EQ(presets()[i].criterion, static_cast<int>(i) + 1);
}

TEST(Suites, IbpOnConfiguredSystem) {
  ExperimentConfig c;
  c.grid.N = 8;
  c.ensemble.count = 5;
  const SuiteResult r = run_suite("ibp", c, 3, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.details["max_residual_over_bound"].get<double>(), 1e-6);
}

TEST(Suites, ReportIsReproducible) {
  ExperimentConfig c;
  c.grid.N = 8;
  c.T = 0.2;
  c.ensemble = {4, {0.5, 1.0}, 2.0};
  c.schedule = {{"kind", "uniform"}, {"count", 4}};
  const std::string a = verify_report(run_suite("lipschitz", c, 5, 1), nullptr, 5).dump();
  const std::string b = verify_report(run_suite("lipschitz", c, 5, 2), nullptr, 5).dump();
  EXPECT_EQ(a, b);
}
