#include "monodiss/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "monodiss/diagnostics.hpp"
#include "monodiss/elliptic.hpp"
#include "monodiss/error.hpp"
#include "monodiss/exponents.hpp"
#include "monodiss/parallel.hpp"
#include "monodiss/rng.hpp"

namespace monodiss {

using nlohmann::json;
using std::numbers::pi;

namespace {

SpectralField random_field(const Grid& g, std::uint64_t seed, int stream, double norm, double decay) {
  return make_field({{"profile", "random"}, {"norm", norm}, {"decay", decay}, {"stream", stream}}, g, seed,
                    "ensemble");
}

std::vector<SpectralField> ensemble_fields(const ExperimentConfig& c, const Grid& g, std::uint64_t seed,
                                           int offset = 0) {
  std::vector<SpectralField> out;
  const auto& e = c.ensemble;
  for (int i = 0; i < e.count; ++i)
    out.push_back(random_field(g, seed, offset + i, e.magnitudes[i % e.magnitudes.size()], e.decay));
  return out;
}

/// Coefficients copied by multi-index; modes beyond the source grid are zero.
SpectralField embed(const SpectralField& u, const Grid& fine) {
  SpectralField out(fine);
  const Grid& g = u.grid();
  for (int c = 0; c < g.k; ++c)
    for (std::size_t m = 0; m < g.modes(); ++m) out.at(c, fine.flat_index(g.multi_index(m))) = u.at(c, m);
  return out;
}

ExperimentConfig with_N(ExperimentConfig c, int N) {
  c.grid.N = N;
  return c;
}

double finite_or_inf(double x) { return std::isfinite(x) ? x : std::numeric_limits<double>::infinity(); }

std::uint64_t require_seed(std::optional<std::uint64_t> seed, const std::string& what) {
  if (!seed) throw ConfigError("seed", what + " is stochastic; pass --seed");
  return *seed;
}

json errors_json(const std::vector<double>& dts, const std::vector<double>& errs) {
  json j = json::array();
  for (std::size_t i = 0; i < dts.size(); ++i) j.push_back({{"dt", dts[i]}, {"error", errs[i]}});
  return j;
}

ExperimentConfig cubic_config(int d, int N, double lambda) {
  ExperimentConfig c;
  c.grid = Grid{d, 1.0, N, 1};
  c.nonlinearity = {{"name", "cubic_scalar"}, {"params", {{"lambda", lambda}}}};
  return c;
}

ExperimentConfig heat_config(int N) {
  ExperimentConfig c;
  c.grid = Grid{1, 1.0, N, 1};
  c.nonlinearity = {{"name", "zero"}, {"params", {{"k", 1}}}};
  return c;
}

}  // namespace

void to_json(json& j, const SuiteResult& r) { j = {{"name", r.name}, {"pass", r.pass}, {"details", r.details}}; }

SuiteResult suite_convergence(const ExperimentConfig& c) {
  const EvolutionConfig ev = evolution_config(c);
  const SpectralField u0 = make_field(c.initial, ev.grid, c.seed.value_or(0), "initial");
  EvolutionConfig ref = ev;
  ref.scheme = Scheme::reference_rk4;
  ref.dt = std::min(ev.dt / 8.0, 1e-4);
  const SpectralField exact = reference_solve(ref, u0, c.T).states.back();
  SuiteResult r{"convergence", true, {}};
  r.details["reference_dt"] = ref.dt;
  for (Scheme s : {Scheme::imex_euler, Scheme::implicit_monotone_euler}) {
    std::vector<double> dts, errs, lx, ly;
    for (double f : {8.0, 4.0, 2.0, 1.0}) {
      EvolutionConfig e = ev;
      e.scheme = s;
      e.dt = f * ev.dt;
      const double err = l2_norm(evolve(e, u0, c.T, {c.T}).states.back() - exact);
      dts.push_back(e.dt);
      errs.push_back(err);
      lx.push_back(std::log(e.dt));
      ly.push_back(std::log(err));
    }
    const double slope = ls_slope(lx, ly);
    const bool ok = slope >= 0.8 && slope <= 1.2;
    r.pass = r.pass && ok;
    r.details[to_string(s)] = {{"slope", slope}, {"errors", errors_json(dts, errs)}, {"pass", ok}};
  }
  r.details["bounds"] = {0.8, 1.2};
  r.details["config"] = c;
  return r;
}

SuiteResult suite_dissipativity(const ExperimentConfig& c, std::uint64_t seed, int workers) {
  const EvolutionConfig ev = evolution_config(c);
  const auto init = ensemble_fields(c, ev.grid, seed);
  const auto schedule = make_schedule(c.schedule, c.T, "schedule");
  const auto reports = parallel_map(init.size(), workers, [&](std::size_t i) {
    return energy_report(evolve(ev, init[i], c.T, schedule), ev.f);
  });
  const Verdict l2 = check_dissipative(reports, Functional::l2, {.dt = ev.dt});
  const Verdict h1 = check_dissipative(reports, Functional::h1, {.dt = ev.dt});
  SuiteResult r{"dissipativity", l2.pass && h1.pass, {}};
  std::vector<double> norms;
  for (const auto& u : init) norms.push_back(l2_norm(u));
  r.details = {{"l2", l2}, {"h1", h1}, {"initial_l2", norms}, {"config", c}};
  return r;
}

SuiteResult suite_lipschitz(const ExperimentConfig& c, std::uint64_t seed, int workers) {
  const EvolutionConfig ev = evolution_config(c);
  const auto schedule = make_schedule(c.schedule, c.T, "schedule");
  const auto& e = c.ensemble;
  const auto verdicts = parallel_map(static_cast<std::size_t>(e.count), workers, [&](std::size_t i) {
    const double norm = e.magnitudes[i % e.magnitudes.size()];
    const SpectralField u1 = random_field(ev.grid, seed, 2 * static_cast<int>(i), norm, e.decay);
    const SpectralField u2 = random_field(ev.grid, seed, 2 * static_cast<int>(i) + 1, norm, e.decay);
    return check_lipschitz(evolve(ev, u1, c.T, schedule), evolve(ev, u2, c.T, schedule), ev.f.K, ev.dt);
  });
  SuiteResult r{"lipschitz", true, {}};
  double max_ratio = 0.0, k1 = -std::numeric_limits<double>::infinity();
  json pairs = json::array();
  for (const auto& v : verdicts) {
    r.pass = r.pass && v.pass;
    max_ratio = std::max(max_ratio, v.constants.at("max_ratio").get<double>());
    if (v.constants.contains("K1_fit") && v.constants.at("K1_fit").is_number())
      k1 = std::max(k1, v.constants.at("K1_fit").get<double>());
    pairs.push_back({{"max_ratio", v.constants.at("max_ratio")},
                     {"final_ratio", v.constants.at("final_ratio")},
                     {"min_margin", v.min_margin},
                     {"pass", v.pass}});
  }
  r.details = {{"K", ev.f.K},
               {"bound_at_T", (1 + 10 * ev.dt) * std::exp(ev.f.K * c.T)},
               {"max_ratio", max_ratio},
               {"K1_fit", std::isfinite(k1) ? json(k1) : json(nullptr)},
               {"pairs", pairs},
               {"config", c}};
  return r;
}

SuiteResult suite_smoothing(const ExperimentConfig& c) {
  const EvolutionConfig ev = evolution_config(c);
  const SpectralField u0 = make_field(c.initial, ev.grid, c.seed.value_or(0), "initial");
  const Trajectory t = evolve(ev, u0, c.T, make_schedule(c.schedule, c.T, "schedule"));
  const SmoothingFit fit = fit_smoothing_rate(energy_report(t, ev.f), c.smoothing.t_min, c.smoothing.t_max);
  const double p1 = c.nonlinearity.contains("p1") ? c.nonlinearity.at("p1").get<double>() : ev.f.p + 0.5;
  const SmoothingExponents se = smoothing_exponents(c.grid.d, p1);
  const double N_theory = se.N_theory.to_double();
  const bool dt_ok = -fit.N_fit >= -(N_theory + 0.5);
  const bool h1_ok = fit.h1_slope >= -1.1;
  SuiteResult r{"smoothing", dt_ok && h1_ok, {}};
  r.details = {{"fit", fit},
               {"dt_slope", -fit.N_fit},
               {"dt_slope_bound", -(N_theory + 0.5)},
               {"N_theory", se.N_theory},
               {"s", se.s},
               {"p1", p1},
               {"h1_slope_bound", -1.1},
               {"config", c}};
  return r;
}

SuiteResult suite_ibp(const ExperimentConfig& c, std::uint64_t seed) {
  const EvolutionConfig ev = evolution_config(c);
  const auto fields = ensemble_fields(c, ev.grid, seed);
  double worst = 0.0;
  bool bound_ok = true;
  for (const auto& u : fields) {
    const double res = ibp_residual(ev.f, u);
    const double bound = 1e-6 * hs_norm(u, 2.0) * hs_norm(u, 1.0);
    bound_ok = bound_ok && res < bound;
    worst = std::max(worst, res / bound);
  }
  // fixed algebraic decay, undealiased closed-grid quadrature
  std::vector<double> res;
  std::vector<int> Ns;
  for (int N : {c.grid.N, 2 * c.grid.N, 4 * c.grid.N}) {
    const Grid g = make_grid(c.grid.d, c.grid.L, N, c.grid.k);
    SpectralField u(g);
    for (int comp = 0; comp < g.k; ++comp) {
      for (std::size_t m = 0; m < g.modes(); ++m) {
        const auto idx = g.multi_index(m);
        double w = 2.0;
        for (int i = 0; i < g.d; ++i) w /= std::pow(idx[i], 3);
        u.at(comp, m) = w;
      }
    }
    res.push_back(ibp_residual(ev.f, u, N));
    Ns.push_back(N);
  }
  const double order = std::log2(res[1] / res[2]);
  const bool refine_ok = res[1] < res[0] && res[2] < res[1] && order >= 1.0;
  SuiteResult r{"ibp", bound_ok && refine_ok, {}};
  r.details = {{"fields", fields.size()},
               {"max_residual_over_bound", worst},
               {"bound_factor", 1e-6},
               {"refinement", {{"N", Ns}, {"residual", res}, {"order", order}}},
               {"config", c}};
  return r;
}

SuiteResult suite_elliptic(const ExperimentConfig& c, std::uint64_t seed) {
  const EvolutionConfig ev = evolution_config(c);
  const int fine_N = c.elliptic.fine_N ? c.elliptic.fine_N : 2 * c.grid.N;
  const Grid coarse = ev.grid;
  const Grid fine = make_grid(c.grid.d, c.grid.L, fine_N, c.grid.k);
  double max_coarse = 0.0, max_fine = 0.0;
  int newton_max = 0;
  for (int i = 0; i < c.elliptic.samples; ++i) {
    const SpectralField g = random_field(coarse, seed, i, 1.0, c.ensemble.decay);
    for (const Grid* grid : {&coarse, &fine}) {
      const SpectralField gg = grid == &coarse ? g : embed(g, fine);
      const auto problem = make_elliptic_problem(ev.a, ev.f, c.elliptic.shift, gg, ev.alpha);
      const SolveResult s = solve(problem, {.tol = c.newton_tol, .max_iter = c.newton_max_iter});
      newton_max = std::max(newton_max, s.iterations);
      const double ratio = regularity_report(s.solution, gg, ev.f, c.elliptic.q, c.elliptic.kappa).ratio_2reg;
      (grid == &coarse ? max_coarse : max_fine) = std::max(grid == &coarse ? max_coarse : max_fine, ratio);
    }
  }
  const bool finite = std::isfinite(max_coarse) && std::isfinite(max_fine);
  const bool stable = finite && refinement_stable(max_coarse, max_fine);

  // manufactured: the exact solution's own residual is the right-hand side
  const SpectralField v = random_field(coarse, seed, c.elliptic.samples, 1.0, 3.0);
  const auto zero_rhs = make_elliptic_problem(ev.a, ev.f, c.elliptic.shift, SpectralField(coarse), ev.alpha);
  const auto problem = make_elliptic_problem(ev.a, ev.f, c.elliptic.shift, elliptic_residual(zero_rhs, v), ev.alpha);
  const SolveResult s = solve(problem, {.tol = 1e-12, .max_iter = std::max(c.newton_max_iter, 50)});
  const double residual = l2_norm(elliptic_residual(problem, s.solution));
  const double error = l2_norm(s.solution - v);

  SuiteResult r{"elliptic", stable && residual < 1e-8, {}};
  r.details = {{"samples", c.elliptic.samples},
               {"N", {coarse.N, fine_N}},
               {"max_ratio_2reg", {finite_or_inf(max_coarse), finite_or_inf(max_fine)}},
               {"refinement_stable", stable},
               {"newton_iterations_max", newton_max},
               {"manufactured", {{"residual", residual}, {"error", error}, {"bound", 1e-8}}},
               {"config", c}};
  return r;
}

SuiteResult suite_squeezing(const ExperimentConfig& c, std::uint64_t seed, int workers) {
  const EvolutionConfig ev = evolution_config(c);
  const int fine_N = c.squeezing.fine_N ? c.squeezing.fine_N : 2 * c.grid.N;
  const double R = c.squeezing.ball_radius;
  const int count = c.ensemble.count;
  std::vector<std::pair<SpectralField, SpectralField>> init;
  for (int i = 0; i < count; ++i) {
    const double norm = R * (i + 1.0) / (count + 1.0);
    init.emplace_back(random_field(ev.grid, seed, 2 * i, norm, c.ensemble.decay),
                      random_field(ev.grid, seed, 2 * i + 1, norm, c.ensemble.decay));
  }
  json levels = json::array();
  std::vector<double> khat;
  bool outside = false;
  for (int N : {c.grid.N, fine_N}) {
    EvolutionConfig e = evolution_config(with_N(c, N));
    e.g = embed(ev.g, e.grid);
    const auto pairs = parallel_map(init.size(), workers, [&](std::size_t i) {
      const SpectralField x1 = embed(init[i].first, e.grid), x2 = embed(init[i].second, e.grid);
      return SqueezingPair{x1, x2, evolve(e, x1, c.T, {c.T}).states.back(), evolve(e, x2, c.T, {c.T}).states.back()};
    });
    const SqueezingResult s = check_squeezing(pairs, c.T, c.squeezing.eps_sob, R);
    outside = outside || s.outside_ball;
    khat.push_back(s.K_hat);
    levels.push_back({{"N", N}, {"K_hat", finite_or_inf(s.K_hat)}, {"outside_ball", s.outside_ball}});
  }
  const bool finite = std::isfinite(khat[0]) && std::isfinite(khat[1]);
  const bool stable = finite && refinement_stable(khat[0], khat[1]);
  SuiteResult r{"squeezing", stable && !outside, {}};
  r.details = {{"levels", levels}, {"refinement_stable", stable}, {"eps_sob", c.squeezing.eps_sob},
               {"ball_radius", R}, {"config", c}};
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"convergence", "dissipativity", "lipschitz", "smoothing",
                                                 "ibp",         "elliptic",      "squeezing"};
  return names;
}

SuiteResult run_suite(const std::string& name, const ExperimentConfig& c, std::optional<std::uint64_t> seed,
                      int workers) {
  if (name == "convergence") return suite_convergence(c);
  if (name == "smoothing") return suite_smoothing(c);
  if (name == "dissipativity") return suite_dissipativity(c, require_seed(seed, name), workers);
  if (name == "lipschitz") return suite_lipschitz(c, require_seed(seed, name), workers);
  if (name == "ibp") return suite_ibp(c, require_seed(seed, name));
  if (name == "elliptic") return suite_elliptic(c, require_seed(seed, name));
  if (name == "squeezing") return suite_squeezing(c, require_seed(seed, name), workers);
  throw ConfigError("suites", "unknown suite '" + name + "'");
}

AttractorRun measure_attractor(const ExperimentConfig& c, std::uint64_t seed, int workers) {
  const EvolutionConfig ev = evolution_config(c);
  const auto& s = c.attractor;
  AttractorRun run;
  run.cloud = sample_cloud(ev, ensemble_fields(c, ev.grid, seed),
                           {.burn_in = s.burn_in,
                            .snapshots_per_trajectory = s.snapshots,
                            .spacing = s.spacing,
                            .projection_size = s.projection,
                            .workers = workers});
  double max_l2 = 0.0;
  for (const auto& u : run.cloud.snapshots) max_l2 = std::max(max_l2, l2_norm(u));
  json& out = run.summary;
  out["snapshots"] = run.cloud.snapshots.size();
  out["max_l2"] = max_l2;
  try {
    run.box = box_counting_dimension(run.cloud, s.eps);
    out["box"] = *run.box;
  } catch (const Refusal& e) {
    out["box"] = {{"refused", e.what()}};
  }
  std::vector<SpectralField> probes;
  for (int i = 0; i < s.probes; ++i) probes.push_back(random_field(ev.grid, seed, 1000000 + i, s.probe_norm, 2.0));
  try {
    out["rate"] = attraction_rate(ev, run.cloud, probes, {.T = s.rate_T, .workers = workers});
  } catch (const Refusal& e) {
    out["rate"] = {{"refused", e.what()}};
  }
  if (s.clusters > 0) {
    run.centroids = cluster_centroids(run.cloud.snapshots, s.clusters);
    const EllipticProblem steady{ev.a, ev.f, 0.0, -1.0 * ev.g, ev.alpha};
    json cs = json::array();
    for (const auto& v : run.centroids)
      cs.push_back({{"l2", l2_norm(v)}, {"residual", l2_norm(elliptic_residual(steady, v))}});
    out["centroids"] = cs;
  }
  return run;
}

// ---- presets ----

namespace {

SuiteResult preset_linear_oracle() {
  ExperimentConfig c = heat_config(32);
  c.initial = {{"profile", "sine"}, {"amplitude", 1.0}};
  c.dt = 1e-4;
  c.T = 0.1;
  const EvolutionConfig ev = evolution_config(c);
  const SpectralField u0 = make_field(c.initial, ev.grid, 0, "initial");
  const SpectralField exact = std::exp(-pi * pi * c.T) * u0;
  SuiteResult r{"linear_oracle", true, {}};
  for (auto [s, bound] : {std::pair{Scheme::imex_euler, 1e-6}, {Scheme::implicit_monotone_euler, 1e-6},
                          {Scheme::reference_rk4, 1e-10}}) {
    EvolutionConfig e = ev;
    e.scheme = s;
    const double err = l2_norm(evolve(e, u0, c.T, {c.T}).states.back() - exact);
    r.pass = r.pass && err <= bound;
    r.details[to_string(s)] = {{"error", err}, {"bound", bound}, {"pass", err <= bound}};
  }
  r.details["config"] = c;
  return r;
}

SuiteResult preset_convergence() {
  ExperimentConfig c = cubic_config(1, 16, 1.0);
  c.initial = {{"profile", "power"}, {"amplitude", 3.0}, {"decay", 3.0}};
  c.T = 0.2;
  c.dt = 5e-4;
  return suite_convergence(c);
}

SuiteResult preset_dissipativity(std::uint64_t seed, int workers) {
  ExperimentConfig c = cubic_config(1, 64, 1.0);
  c.scheme = "implicit_monotone_euler";
  c.dt = 1e-3;
  c.T = 1.0;
  c.schedule = {{"kind", "uniform"}, {"count", 50}};
  c.ensemble = {9, {1.0, 4.0, 16.0}, 2.0};
  c.seed = seed;
  return suite_dissipativity(c, seed, workers);
}

SuiteResult preset_lipschitz(std::uint64_t seed, int workers) {
  ExperimentConfig c = cubic_config(1, 32, 1.0);
  c.dt = 1e-3;
  c.T = 1.0;
  c.schedule = {{"kind", "uniform"}, {"count", 20}};
  c.ensemble = {20, {0.5, 1.0, 2.0}, 2.0};
  c.seed = seed;
  SuiteResult r = suite_lipschitz(c, seed, workers);

  // f = 0: a difference in the first mode contracts by exactly e^{-lambda_1 T}
  ExperimentConfig h = heat_config(32);
  h.scheme = "reference_rk4";
  h.dt = 1e-4;
  h.T = 1.0;
  h.seed = seed;
  const EvolutionConfig ev = evolution_config(h);
  const SpectralField u1 = random_field(ev.grid, seed, 999, 1.0, 2.0);
  SpectralField u2 = u1;
  u2.at(0, 0) += 0.3;
  const Verdict v = check_lipschitz(evolve(ev, u1, h.T, {h.T}), evolve(ev, u2, h.T, {h.T}), 0.0, ev.dt);
  const double ratio = v.constants.at("final_ratio").get<double>();
  const double dev = std::abs(ratio - std::exp(-pi * pi * h.T));
  const bool heat_ok = v.pass && dev <= 1e-6;
  r.details["heat"] = {{"final_ratio", ratio}, {"exact", std::exp(-pi * pi * h.T)}, {"deviation", dev},
                       {"bound", 1e-6}, {"pass", heat_ok}, {"config", h}};
  r.pass = r.pass && heat_ok;
  return r;
}

SuiteResult preset_approximation(std::uint64_t seed) {
  const NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  const std::vector<int> ns = {1, 4, 16, 64};
  const double p1 = 3.5;
  const ApproxOptions opts{.samples = 2000, .seed = seed};
  std::vector<ApproxSpec> specs;
  double growth = 0.0;
  for (int n : ns) {
    specs.push_back(approximate(f, n, p1, opts));
    growth = std::max(growth, specs.back().approx.C_growth);
  }
  SuiteResult r{"approximation", true, {}};
  json cert = json::array();
  bool cert_ok = true;
  for (auto& a : specs) {
    NonlinearSpec fn = a.approx;
    fn.C_growth = growth;
    const CertificationReport rep = verify_constants(fn, 4.0 * std::sqrt(a.R), 2000, seed);
    const bool ok = rep.pass && fn.C == 0.25 && fn.K == 1.0;
    cert_ok = cert_ok && ok;
    cert.push_back({{"n", a.n}, {"R", a.R}, {"C", fn.C}, {"K", fn.K}, {"pass", ok}});
  }
  const Grid g = make_grid(1, 1.0, 32, 1);
  const SpectralField u0 = make_field({{"profile", "sine"}, {"amplitude", 2.0}}, g, 0, "initial");
  std::vector<double> dist;
  for (int n : ns) {
    const auto prep = prepare_initial_data(u0, Eigen::MatrixXd::Identity(1, 1), f, n, p1, 1e-11, opts);
    dist.push_back(hs_norm(prep.u0n - u0, 1.0));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < dist.size(); ++i) monotone = monotone && dist[i] < dist[i - 1];
  const bool small = dist.back() < 1e-3;
  r.pass = cert_ok && monotone && small;
  r.details = {{"n", ns},
               {"p1", p1},
               {"growth_constant", growth},
               {"certification", cert},
               {"h1_distance", dist},
               {"monotone", monotone},
               {"final_bound", 1e-3},
               {"final_pass", small},
               {"grid", g}};
  return r;
}

SuiteResult preset_smoothing() {
  SuiteResult r{"smoothing", true, {}};
  for (auto [d, N] : {std::pair{1, 64}, {2, 32}}) {
    ExperimentConfig c = cubic_config(d, N, 1.0);
    c.nonlinearity["p1"] = 3.5;
    c.initial = {{"profile", "power"}, {"amplitude", 1.0}, {"decay", 1.1}};
    c.dt = 1e-5;
    c.T = 0.1;
    c.schedule = {{"kind", "log"}, {"t_min", 1e-4}, {"per_decade", 20}};
    c.smoothing = {1e-3, 1e-1};
    SuiteResult s = suite_smoothing(c);
    r.pass = r.pass && s.pass;
    r.details["d" + std::to_string(d)] = {{"pass", s.pass}, {"details", s.details}};
  }
  return r;
}

SuiteResult preset_exponents(std::uint64_t seed) {
  SuiteResult r{"exponents", true, {}};
  auto check = [&](const std::string& key, const Exponent& e, const Rational& want) {
    const bool ok = e.kind == Exponent::Kind::finite && e.value == want;
    r.pass = r.pass && ok;
    r.details[key] = {{"value", e}, {"pass", ok}};
  };
  check("p_crit_D(d=5)", critical_exponents(5, 1.0).D, 5);
  check("p_crit_h1(d=3)", critical_exponents(3, 1.0).h1, 5);
  check("p_crit_frac(d=3,alpha=0.5)", critical_exponents(3, 0.5).frac, 3);
  const SmoothingExponents se = smoothing_exponents(3, 3.0);
  check("s(d=3,p1=3)", se.s, Rational(1, 2));
  check("q1(d=3,p1=3)", se.q1, Rational(4, 3));
  const bool holder = se.holder_residual == 0;
  r.pass = r.pass && holder;
  r.details["holder_residual_zero"] = holder;
  check("epsilon_window(d=5,r=0.2,kappa=0)", epsilon_window(5, 0.2, 0.0), Rational(3, 2));

  SplitMix64 rng(seed);
  int mismatches = 0, cases = 0, skipped = 0;
  while (cases < 1000) {
    const int d = 5 + static_cast<int>(rng.next() % 6);
    const double p = rng.uniform(1.05, 8.0);
    const double kappa = rng.uniform(0.0, 0.99);
    const double q = rng.uniform(d / 2.0 + 0.01, 2.0 * d);
    const Rational q0 = exact(rng.uniform(0.5, 0.999 * p * q));
    const BootstrapResult b = bootstrap_from_seed(d, p, q, kappa, q0, 100000);
    if (b.steps == 0) {
      ++skipped;
      continue;
    }
    ++cases;
    if (b.criterion_increasing != b.first_step_increasing) ++mismatches;
  }
  r.pass = r.pass && mismatches == 0;
  r.details["bootstrap_sweep"] = {{"cases", cases}, {"mismatches", mismatches}, {"skipped_at_target", skipped}};
  return r;
}

SuiteResult preset_ibp(std::uint64_t seed) {
  ExperimentConfig c = cubic_config(1, 16, 1.0);
  c.ensemble = {50, {0.5, 1.0, 2.0, 4.0}, 1.5};
  c.seed = seed;
  return suite_ibp(c, seed);
}

SuiteResult preset_elliptic(std::uint64_t seed) {
  SuiteResult r{"elliptic", true, {}};
  for (auto [d, N, fine] : {std::tuple{1, 16, 32}, {3, 12, 16}}) {
    ExperimentConfig c = cubic_config(d, N, 1.0);
    c.elliptic.samples = 50;
    c.elliptic.fine_N = fine;
    c.ensemble.decay = 1.0;
    c.seed = seed;
    SuiteResult s = suite_elliptic(c, seed);
    r.pass = r.pass && s.pass;
    r.details["d" + std::to_string(d)] = {{"pass", s.pass}, {"details", s.details}};
  }
  return r;
}

SuiteResult preset_squeezing(std::uint64_t seed, int workers) {
  ExperimentConfig c = cubic_config(1, 32, 1.0);
  c.dt = 1e-3;
  c.T = 1.0;
  c.ensemble = {20, {1.0}, 2.0};
  c.squeezing = {0.25, 2.0, 64};
  c.seed = seed;
  return suite_squeezing(c, seed, workers);
}

std::vector<double> geometric(double hi, double lo, int n) {
  std::vector<double> e;
  for (int i = 0; i < n; ++i) e.push_back(hi * std::pow(lo / hi, i / (n - 1.0)));
  return e;
}

SuiteResult preset_attractor(std::uint64_t seed, int workers) {
  SuiteResult r{"attractor", true, {}};
  ExperimentConfig sub = cubic_config(1, 32, 5.0);
  sub.ensemble = {8, {0.5, 2.0, 8.0}, 2.0};
  sub.attractor.burn_in = 3.0;
  sub.attractor.snapshots = 25;
  sub.attractor.spacing = 0.1;
  sub.attractor.eps = geometric(1e-1, 1e-4, 7);
  sub.attractor.probes = 4;
  sub.attractor.probe_norm = 1.0;
  sub.attractor.rate_T = 3.0;
  sub.seed = seed;
  const AttractorRun a = measure_attractor(sub, seed, workers);
  const double max_l2 = a.summary.at("max_l2");
  const bool norm_ok = max_l2 < 1e-4;
  const bool dim_ok = a.box && std::isfinite(a.box->dimension) && a.box->dimension < 0.2;
  const double target = pi * pi - 5.0;
  const json& rate = a.summary.at("rate");
  const bool rate_ok = rate.contains("alpha") && std::abs(rate.at("alpha").get<double>() - target) <= 0.1 * target;
  r.details["subcritical"] = {{"measurements", a.summary},
                              {"max_l2_pass", norm_ok},
                              {"dimension_pass", dim_ok},
                              {"rate_target", target},
                              {"rate_pass", rate_ok},
                              {"config", sub}};

  ExperimentConfig sup = cubic_config(1, 32, 15.0);
  sup.ensemble = {8, {1.0, 4.0}, 2.0};
  sup.attractor.burn_in = 4.0;
  sup.attractor.snapshots = 5;
  sup.attractor.clusters = 2;
  sup.attractor.probes = 1;
  sup.seed = seed;
  const AttractorRun b = measure_attractor(sup, seed, workers);
  bool centroid_ok = !b.centroids.empty();
  for (const auto& cj : b.summary.at("centroids")) centroid_ok = centroid_ok && cj.at("residual").get<double>() < 1e-3;
  r.details["supercritical"] = {{"centroids", b.summary.at("centroids")},
                                {"residual_bound", 1e-3},
                                {"centroid_pass", centroid_ok},
                                {"config", sup}};
  r.pass = norm_ok && dim_ok && rate_ok && centroid_ok;
  return r;
}

SuiteResult preset_fractional() {
  SuiteResult r{"fractional", true, {}};
  json rows = json::array();
  for (auto [alpha, beta] : {std::pair{0.5, 0.0}, {1.0, 1.0}, {0.5, 1.0}}) {
    ExperimentConfig c = heat_config(16);
    c.scheme = "reference_rk4";
    c.alpha = alpha;
    c.beta = beta;
    c.dt = 1e-3;
    const EvolutionConfig ev = evolution_config(c);
    for (int m : {1, 2}) {
      const double lam = std::pow(pi * m, 2);
      const double rate = std::pow(lam, beta) * std::pow(lam, alpha);
      const double T = 1.0 / rate;
      SpectralField u0(ev.grid);
      u0.at(0, m - 1) = 1.0;
      const double measured = -std::log(evolve(ev, u0, T, {T}).states.back().at(0, m - 1)) / T;
      const double rel = std::abs(measured - rate) / rate;
      const bool ok = rel <= 1e-6;
      r.pass = r.pass && ok;
      rows.push_back({{"alpha", alpha}, {"beta", beta}, {"mode", m}, {"expected", rate}, {"measured", measured},
                      {"relative_error", rel}, {"pass", ok}});
    }
  }
  r.details = {{"rates", rows}, {"bound", 1e-6}};
  return r;
}

SuiteResult preset_determinism(std::uint64_t seed, int workers) {
  const PresetInfo& lip = find_preset("lipschitz");
  const std::string a = verify_report(run_preset("lipschitz", seed, workers), &lip, seed).dump();
  const std::string b = verify_report(run_preset("lipschitz", seed, workers), &lip, seed).dump();
  ExperimentConfig c = cubic_config(1, 16, 15.0);
  c.ensemble = {4, {1.0, 3.0}, 2.0};
  const EvolutionConfig ev = evolution_config(c);
  std::vector<SpectralField> init;
  for (int i = 0; i < 4; ++i) init.push_back(random_field(ev.grid, seed, i, 1.0 + i, 2.0));
  const std::string serial =
      cloud_json(sample_cloud(ev, init, {.burn_in = 0.5, .snapshots_per_trajectory = 3, .workers = 1})).dump();
  const std::string pooled =
      cloud_json(sample_cloud(ev, init, {.burn_in = 0.5, .snapshots_per_trajectory = 3, .workers = 3})).dump();
  SuiteResult r{"determinism", a == b && serial == pooled, {}};
  r.details = {{"repeat_identical", a == b}, {"report_bytes", a.size()}, {"worker_count_identical", serial == pooled}};
  return r;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = {
      {"linear_oracle", 1, false}, {"convergence", 2, false}, {"dissipativity", 3, true}, {"lipschitz", 4, true},
      {"approximation", 5, true},  {"smoothing", 6, false},   {"exponents", 7, true},     {"ibp", 8, true},
      {"elliptic", 9, true},       {"squeezing", 10, true},   {"attractor", 11, true},    {"fractional", 12, false},
      {"determinism", 13, true}};
  return list;
}

const PresetInfo& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

SuiteResult run_preset(const std::string& name, std::optional<std::uint64_t> seed, int workers) {
  const PresetInfo& p = find_preset(name);
  const std::uint64_t s = p.stochastic ? require_seed(seed, "preset " + name) : seed.value_or(0);
  switch (p.criterion) {
    case 1: return preset_linear_oracle();
    case 2: return preset_convergence();
    case 3: return preset_dissipativity(s, workers);
    case 4: return preset_lipschitz(s, workers);
    case 5: return preset_approximation(s);
    case 6: return preset_smoothing();
    case 7: return preset_exponents(s);
    case 8: return preset_ibp(s);
    case 9: return preset_elliptic(s);
    case 10: return preset_squeezing(s, workers);
    case 11: return preset_attractor(s, workers);
    case 12: return preset_fractional();
    default: return preset_determinism(s, workers);
  }
}

json verify_report(const SuiteResult& r, const PresetInfo* preset, std::optional<std::uint64_t> seed) {
  json j = {{"suite", r.name}, {"pass", r.pass}, {"details", r.details}};
  j["seed"] = seed ? json(*seed) : json(nullptr);
  if (preset) {
    j["preset"] = preset->name;
    j["criterion"] = preset->criterion;
  }
  return j;
}

}  // namespace monodiss
