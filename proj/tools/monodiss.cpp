#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "monodiss/attractor.hpp"
#include "monodiss/config.hpp"
#include "monodiss/diagnostics.hpp"
#include "monodiss/elliptic.hpp"
#include "monodiss/error.hpp"
#include "monodiss/exponents.hpp"
#include "monodiss/io.hpp"
#include "monodiss/parallel.hpp"
#include "monodiss/verify.hpp"

using namespace monodiss;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kSolver = 3 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 0;
};

ExperimentConfig load(const Common& o) {
  if (o.config_path.empty()) throw ConfigError("config", "--config is required for this command");
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) c.seed = o.seed;
  validate(c);
  return c;
}

std::string join_path(const std::string& dir, const std::string& name) { return dir + "/" + name; }

void emit(const Common& o, const std::string& name, const json& j) {
  std::cout << j.dump(2) << '\n';
  if (!o.out.empty()) write_json(join_path(o.out, name), j);
}

int cmd_simulate(const Common& o, bool snapshots) {
  const ExperimentConfig c = load(o);
  const EvolutionConfig ev = evolution_config(c);
  const SpectralField u0 = make_field(c.initial, ev.grid, c.seed.value_or(0), "initial");
  const Trajectory t = evolve(ev, u0, c.T, make_schedule(c.schedule, c.T, "schedule"));
  const json meta = trajectory_metadata(c, t);
  if (!o.out.empty()) {
    write_file(join_path(o.out, "energy.csv"), energy_csv(energy_report(t, ev.f)));
    if (snapshots) write_json(join_path(o.out, "snapshots.json"), trajectory_snapshots(t));
  }
  emit(o, "trajectory.json", meta);
  return kPass;
}

int cmd_elliptic(const Common& o) {
  const ExperimentConfig c = load(o);
  const EvolutionConfig ev = evolution_config(c);
  json reports = json::array();
  auto run = [&](const SpectralField& g, const std::string& label) {
    const auto problem = make_elliptic_problem(ev.a, ev.f, c.elliptic.shift, g, ev.alpha);
    const SolveResult s = solve(problem, {.tol = c.newton_tol, .max_iter = c.newton_max_iter, .initial_guess = {}});
    reports.push_back({{"rhs", label},
                       {"newton_iterations", s.iterations},
                       {"residual", s.residual_history.back()},
                       {"report", regularity_report(s.solution, g, ev.f, c.elliptic.q, c.elliptic.kappa)}});
  };
  run(ev.g, "g");
  if (c.seed) {
    for (int i = 0; i < c.elliptic.samples; ++i) {
      const json spec = {{"profile", "random"}, {"norm", 1.0}, {"decay", c.ensemble.decay}, {"stream", i}};
      run(make_field(spec, ev.grid, *c.seed, "elliptic"), "random:" + std::to_string(i));
    }
  }
  emit(o, "elliptic.json", {{"config", c}, {"reports", reports}});
  return kPass;
}

int cmd_exponents(const Common& o, const ExponentQuery& q, bool text) {
  const json table = exponent_table(q);
  if (text) {
    std::cout << exponent_table_text(table);
    if (!o.out.empty()) write_json(join_path(o.out, "exponents.json"), table);
    return kPass;
  }
  emit(o, "exponents.json", table);
  return kPass;
}

int cmd_verify(const Common& o, const std::string& preset) {
  if (!preset.empty()) {
    if (preset == "all") {
      json all = json::array();
      bool pass = true;
      for (const auto& p : presets()) {
        const SuiteResult r = run_preset(p.name, o.seed, o.workers);
        pass = pass && r.pass;
        all.push_back(verify_report(r, &p, o.seed));
      }
      emit(o, "verify.json", {{"pass", pass}, {"presets", all}});
      return pass ? kPass : kFail;
    }
    const PresetInfo& p = find_preset(preset);
    const SuiteResult r = run_preset(p.name, o.seed, o.workers);
    emit(o, "verify.json", verify_report(r, &p, o.seed));
    return r.pass ? kPass : kFail;
  }
  const ExperimentConfig c = load(o);
  if (c.suites.empty()) throw ConfigError("suites", "no suites listed and no --preset given");
  json results = json::array();
  bool pass = true;
  for (const auto& name : c.suites) {
    const SuiteResult r = run_suite(name, c, c.seed, o.workers);
    pass = pass && r.pass;
    results.push_back(verify_report(r, nullptr, c.seed));
  }
  emit(o, "verify.json", {{"pass", pass}, {"config", c}, {"suites", results}});
  return pass ? kPass : kFail;
}

int cmd_attractor(const Common& o) {
  const ExperimentConfig c = load(o);
  if (!c.seed) throw ConfigError("seed", "attractor sampling is stochastic; pass --seed");
  const AttractorRun run = measure_attractor(c, *c.seed, o.workers);
  if (!o.out.empty()) {
    write_json(join_path(o.out, "cloud.json"), cloud_json(run.cloud));
    if (run.box) write_file(join_path(o.out, "dimension.csv"), box_count_csv(*run.box));
  }
  emit(o, "attractor.json", {{"config", c}, {"summary", run.summary}});
  return kPass;
}

int cmd_sweep(const Common& o) {
  const ExperimentConfig c = load(o);
  if (o.out.empty()) throw ConfigError("out", "sweep writes one directory per point; pass --out");
  const std::vector<json> points = sweep_points(c);
  // each point is validated before any work starts
  std::vector<ExperimentConfig> configs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    configs.push_back(config_from_json(points[i]));
    validate(configs.back());
  }
  const auto results = parallel_map(configs.size(), o.workers, [&](std::size_t i) {
    const ExperimentConfig& pc = configs[i];
    char name[32];
    std::snprintf(name, sizeof name, "point_%04zu", i);
    const std::string dir = join_path(o.out, name);
    const EvolutionConfig ev = evolution_config(pc);
    const SpectralField u0 = make_field(pc.initial, ev.grid, pc.seed.value_or(0), "initial");
    const Trajectory t = evolve(ev, u0, pc.T, make_schedule(pc.schedule, pc.T, "schedule"));
    write_json(join_path(dir, "trajectory.json"), trajectory_metadata(pc, t));
    write_file(join_path(dir, "energy.csv"), energy_csv(energy_report(t, ev.f)));
    bool pass = true;
    json suites = json::array();
    for (const auto& s : pc.suites) {
      const SuiteResult r = run_suite(s, pc, pc.seed, 1);
      pass = pass && r.pass;
      suites.push_back(verify_report(r, nullptr, pc.seed));
    }
    if (!pc.suites.empty()) write_json(join_path(dir, "verify.json"), {{"pass", pass}, {"suites", suites}});
    return json{{"directory", name}, {"parameters", points[i]}, {"pass", pass}};
  });
  bool pass = true;
  json index = json::array();
  for (const auto& r : results) {
    pass = pass && r.at("pass").get<bool>();
    index.push_back({{"directory", r.at("directory")}, {"pass", r.at("pass")}});
  }
  emit(o, "sweep.json", {{"points", index}, {"pass", pass}, {"parameters", c.sweep.at("parameters")}});
  return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monodiss: monotone dissipative reaction-diffusion laboratory"};
  app.require_subcommand(1);
  Common o;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "experiment config (JSON)")->envname("MONODISS_CONFIG");
    sub->add_option("--seed", seed, "64-bit seed for stochastic suites")->envname("MONODISS_SEED");
    sub->add_option("--out", o.out, "output directory")->envname("MONODISS_OUT");
    sub->add_option("--workers", o.workers, "worker threads (0: available parallelism)")
        ->envname("MONODISS_WORKERS")
        ->check(CLI::NonNegativeNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate);
  bool snapshots = false;
  simulate->add_flag("--snapshots", snapshots, "also write every sampled state");

  auto* elliptic = app.add_subcommand("elliptic", "solve the stationary problem and report regularity ratios");
  add_common(elliptic);

  auto* exponents = app.add_subcommand("exponents", "closed-form exponent table");
  add_common(exponents);
  ExponentQuery q;
  bool text = false;
  exponents->add_option("--d", q.d, "space dimension")->check(CLI::PositiveNumber);
  exponents->add_option("--alpha", q.alpha, "fractional order");
  exponents->add_option("--p1", q.p1, "growth of the approximating nonlinearity");
  exponents->add_option("--p", q.p, "bootstrap growth exponent");
  exponents->add_option("--q", q.q, "bootstrap target integrability");
  exponents->add_option("--kappa", q.kappa, "ellipticity margin in [0, 1)");
  exponents->add_option("--r", q.r, "bootstrap seed exponent");
  exponents->add_option("--q-reg", q.q_reg, "integrability for the regularity exponent");
  exponents->add_option("--max-iter", q.max_iter, "bootstrap iteration cap");
  exponents->add_flag("--text", text, "aligned text instead of JSON");

  auto* verify = app.add_subcommand("verify", "run acceptance presets or the config's suites");
  add_common(verify);
  std::string preset;
  verify->add_option("--preset", preset, "preset name or 'all'")->envname("MONODISS_PRESET");

  auto* attractor = app.add_subcommand("attractor", "attractor cloud, dimension and attraction rate");
  add_common(attractor);

  auto* sweep = app.add_subcommand("sweep", "Cartesian product over sweep.parameters");
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  for (auto* sub : {simulate, elliptic, exponents, verify, attractor, sweep}) {
    if (sub->get_option("--seed")->count() > 0) o.seed = seed;
  }

  try {
    if (*simulate) return cmd_simulate(o, snapshots);
    if (*elliptic) return cmd_elliptic(o);
    if (*exponents) return cmd_exponents(o, q, text);
    if (*verify) return cmd_verify(o, preset);
    if (*attractor) return cmd_attractor(o);
    if (*sweep) return cmd_sweep(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const Refusal& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kConfig;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    const auto& h = e.residual_history();
    if (!h.empty()) std::cerr << "residual history: " << json(h).dump() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kConfig;
}
