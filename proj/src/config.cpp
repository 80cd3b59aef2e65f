#include "monodiss/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "monodiss/error.hpp"
#include "monodiss/rng.hpp"

namespace monodiss {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix.empty() ? "config" : prefix, "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(join(prefix, key), "unknown key");
  }
}

double number(const json& j, const std::string& key, const std::string& prefix, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(prefix, key), "must be a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& key, const std::string& prefix, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(prefix, key), "must be an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& prefix,
                            std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(join(prefix, key), "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(join(prefix, key) + "[" + std::to_string(i) + "]", "must be a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::array<int, 3> mode_index(const json& j, int d, const std::string& path) {
  std::array<int, 3> m{1, 1, 1};
  if (j.is_null()) return m;
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw ConfigError(path, "must be an array of " + std::to_string(d) + " positive integers");
  for (int i = 0; i < d; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 1) throw ConfigError(path, "mode indices start at 1");
    m[i] = j[i].get<int>();
  }
  return m;
}

double mode_weight(const Grid& g, std::size_t mode, double decay) {
  const auto m = g.multi_index(mode);
  double w = 1.0;
  for (int i = 0; i < g.d; ++i) w *= std::pow(static_cast<double>(m[i]), -decay);
  return w;
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  json a = json::array();
  for (const auto& row : c.a) a.push_back(row);
  j = json{{"grid", c.grid},
           {"a", a},
           {"nonlinearity", c.nonlinearity},
           {"g", c.g},
           {"initial", c.initial},
           {"scheme", c.scheme},
           {"dt", c.dt},
           {"T", c.T},
           {"alpha", c.alpha},
           {"beta", c.beta},
           {"schedule", c.schedule},
           {"seed", c.seed ? json(*c.seed) : json(nullptr)},
           {"newton", {{"tol", c.newton_tol}, {"max_iter", c.newton_max_iter}}},
           {"suites", c.suites},
           {"ensemble",
            {{"count", c.ensemble.count}, {"magnitudes", c.ensemble.magnitudes}, {"decay", c.ensemble.decay}}},
           {"elliptic",
            {{"q", c.elliptic.q}, {"kappa", c.elliptic.kappa}, {"samples", c.elliptic.samples},
             {"shift", c.elliptic.shift}, {"fine_N", c.elliptic.fine_N}}},
           {"smoothing", {{"t_min", c.smoothing.t_min}, {"t_max", c.smoothing.t_max}}},
           {"squeezing",
            {{"eps_sob", c.squeezing.eps_sob}, {"ball_radius", c.squeezing.ball_radius},
             {"fine_N", c.squeezing.fine_N}}},
           {"attractor",
            {{"burn_in", c.attractor.burn_in},
             {"snapshots", c.attractor.snapshots},
             {"spacing", c.attractor.spacing},
             {"projection", c.attractor.projection},
             {"eps", c.attractor.eps},
             {"probes", c.attractor.probes},
             {"probe_norm", c.attractor.probe_norm},
             {"rate_T", c.attractor.rate_T},
             {"clusters", c.attractor.clusters}}},
           {"sweep", c.sweep}};
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j, {"grid", "a", "nonlinearity", "g", "initial", "scheme", "dt", "T", "alpha", "beta", "schedule",
                     "seed", "newton", "suites", "ensemble", "elliptic", "smoothing", "squeezing", "attractor",
                     "sweep"},
                 "");
  ExperimentConfig c;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"d", "L", "N", "k"}, "grid");
    c.grid.d = integer(g, "d", "grid", c.grid.d);
    c.grid.L = number(g, "L", "grid", c.grid.L);
    c.grid.N = integer(g, "N", "grid", c.grid.N);
    c.grid.k = integer(g, "k", "grid", c.grid.k);
  }
  if (j.contains("a")) {
    const json& a = j.at("a");
    if (!a.is_array()) throw ConfigError("a", "must be a k x k array of rows");
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (!a[r].is_array()) throw ConfigError("a." + std::to_string(r), "must be an array of numbers");
      std::vector<double> row;
      for (const auto& x : a[r]) {
        if (!x.is_number()) throw ConfigError("a." + std::to_string(r), "must be an array of numbers");
        row.push_back(x.get<double>());
      }
      c.a.push_back(std::move(row));
    }
  }
  if (j.contains("nonlinearity")) {
    c.nonlinearity = j.at("nonlinearity");
    reject_unknown(c.nonlinearity, {"name", "params", "p1"}, "nonlinearity");
  }
  if (j.contains("g")) c.g = j.at("g");
  if (j.contains("initial")) c.initial = j.at("initial");
  if (j.contains("scheme")) {
    if (!j.at("scheme").is_string()) throw ConfigError("scheme", "must be a string");
    c.scheme = j.at("scheme").get<std::string>();
  }
  c.dt = number(j, "dt", "", c.dt);
  c.T = number(j, "T", "", c.T);
  c.alpha = number(j, "alpha", "", c.alpha);
  c.beta = number(j, "beta", "", c.beta);
  if (j.contains("schedule")) c.schedule = j.at("schedule");
  if (j.contains("seed") && !j.at("seed").is_null()) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "must be an unsigned 64-bit integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("newton")) {
    const json& n = j.at("newton");
    reject_unknown(n, {"tol", "max_iter"}, "newton");
    c.newton_tol = number(n, "tol", "newton", c.newton_tol);
    c.newton_max_iter = integer(n, "max_iter", "newton", c.newton_max_iter);
  }
  if (j.contains("suites")) {
    const json& s = j.at("suites");
    if (!s.is_array()) throw ConfigError("suites", "must be an array of preset names");
    for (const auto& x : s) {
      if (!x.is_string()) throw ConfigError("suites", "must be an array of preset names");
      c.suites.push_back(x.get<std::string>());
    }
  }
  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    reject_unknown(e, {"count", "magnitudes", "decay"}, "ensemble");
    c.ensemble.count = integer(e, "count", "ensemble", c.ensemble.count);
    c.ensemble.magnitudes = numbers(e, "magnitudes", "ensemble", c.ensemble.magnitudes);
    c.ensemble.decay = number(e, "decay", "ensemble", c.ensemble.decay);
  }
  if (j.contains("smoothing")) {
    const json& e = j.at("smoothing");
    reject_unknown(e, {"t_min", "t_max"}, "smoothing");
    c.smoothing.t_min = number(e, "t_min", "smoothing", c.smoothing.t_min);
    c.smoothing.t_max = number(e, "t_max", "smoothing", c.smoothing.t_max);
  }
  if (j.contains("squeezing")) {
    const json& e = j.at("squeezing");
    reject_unknown(e, {"eps_sob", "ball_radius", "fine_N"}, "squeezing");
    c.squeezing.eps_sob = number(e, "eps_sob", "squeezing", c.squeezing.eps_sob);
    c.squeezing.ball_radius = number(e, "ball_radius", "squeezing", c.squeezing.ball_radius);
    c.squeezing.fine_N = integer(e, "fine_N", "squeezing", c.squeezing.fine_N);
  }
  if (j.contains("elliptic")) {
    const json& e = j.at("elliptic");
    reject_unknown(e, {"q", "kappa", "samples", "shift", "fine_N"}, "elliptic");
    c.elliptic.fine_N = integer(e, "fine_N", "elliptic", c.elliptic.fine_N);
    c.elliptic.q = number(e, "q", "elliptic", c.elliptic.q);
    c.elliptic.kappa = number(e, "kappa", "elliptic", c.elliptic.kappa);
    c.elliptic.samples = integer(e, "samples", "elliptic", c.elliptic.samples);
    c.elliptic.shift = number(e, "shift", "elliptic", c.elliptic.shift);
  }
  if (j.contains("attractor")) {
    const json& a = j.at("attractor");
    const std::string p = "attractor";
    reject_unknown(a, {"burn_in", "snapshots", "spacing", "projection", "eps", "probes",
                       "probe_norm", "rate_T", "clusters"},
                   p);
    auto& s = c.attractor;
    s.burn_in = number(a, "burn_in", p, s.burn_in);
    s.snapshots = integer(a, "snapshots", p, s.snapshots);
    s.spacing = number(a, "spacing", p, s.spacing);
    s.projection = integer(a, "projection", p, s.projection);
    s.eps = numbers(a, "eps", p, s.eps);
    s.probes = integer(a, "probes", p, s.probes);
    s.probe_norm = number(a, "probe_norm", p, s.probe_norm);
    s.rate_T = number(a, "rate_T", p, s.rate_T);
    s.clusters = integer(a, "clusters", p, s.clusters);
  }
  if (j.contains("sweep")) {
    c.sweep = j.at("sweep");
    reject_unknown(c.sweep, {"parameters"}, "sweep");
    if (!c.sweep.contains("parameters")) c.sweep["parameters"] = json::object();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  const EvolutionConfig ev = evolution_config(c);
  validate(ev);
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw ConfigError("T", "must be positive");
  make_field(c.initial, c.grid, c.seed.value_or(0), "initial");
  make_schedule(c.schedule, c.T, "schedule");
  if (c.elliptic.samples < 1) throw ConfigError("elliptic.samples", "must be >= 1");
  if (!(c.elliptic.shift >= 0.0)) throw ConfigError("elliptic.shift", "must be nonnegative");
  if (c.elliptic.fine_N != 0 && c.elliptic.fine_N <= c.grid.N)
    throw ConfigError("elliptic.fine_N", "must exceed grid.N (or be 0)");
  if (c.ensemble.count < 1) throw ConfigError("ensemble.count", "must be >= 1");
  if (c.ensemble.magnitudes.empty()) throw ConfigError("ensemble.magnitudes", "must not be empty");
  for (double m : c.ensemble.magnitudes)
    if (!(m > 0.0)) throw ConfigError("ensemble.magnitudes", "must be positive");
  if (!(c.smoothing.t_min > 0.0 && c.smoothing.t_max > c.smoothing.t_min))
    throw ConfigError("smoothing.t_min", "need 0 < t_min < t_max");
  if (!(c.squeezing.eps_sob >= 0.0)) throw ConfigError("squeezing.eps_sob", "must be nonnegative");
  if (!(c.squeezing.ball_radius > 0.0)) throw ConfigError("squeezing.ball_radius", "must be positive");
  if (c.squeezing.fine_N != 0 && c.squeezing.fine_N <= c.grid.N)
    throw ConfigError("squeezing.fine_N", "must exceed grid.N (or be 0)");
  const auto& a = c.attractor;
  if (!(a.burn_in > 0.0)) throw ConfigError("attractor.burn_in", "must be positive");
  if (a.snapshots < 1) throw ConfigError("attractor.snapshots", "must be >= 1");
  if (!(a.spacing > 0.0)) throw ConfigError("attractor.spacing", "must be positive");
  if (a.projection < 1) throw ConfigError("attractor.projection", "must be >= 1");
  if (a.eps.size() < 2) throw ConfigError("attractor.eps", "need at least two box sizes");
  if (a.probes < 1) throw ConfigError("attractor.probes", "must be >= 1");
  if (!(a.rate_T > 0.0)) throw ConfigError("attractor.rate_T", "must be positive");
  if (a.clusters < 0) throw ConfigError("attractor.clusters", "must be >= 0");
  const json& params = c.sweep.at("parameters");
  if (!params.is_object()) throw ConfigError("sweep.parameters", "must be an object of value lists");
  for (const auto& [key, values] : params.items()) {
    if (!values.is_array() || values.empty()) throw ConfigError("sweep.parameters." + key, "must be a non-empty array");
  }
}

EvolutionConfig evolution_config(const ExperimentConfig& c) {
  EvolutionConfig ev;
  ev.grid = make_grid(c.grid.d, c.grid.L, c.grid.N, c.grid.k);
  const int k = c.grid.k;
  if (c.a.empty()) {
    ev.a = Eigen::MatrixXd::Identity(k, k);
  } else {
    if (static_cast<int>(c.a.size()) != k) throw ConfigError("a", "must have grid.k rows");
    ev.a.resize(k, k);
    for (int r = 0; r < k; ++r) {
      if (static_cast<int>(c.a[r].size()) != k) throw ConfigError("a." + std::to_string(r), "must have grid.k entries");
      for (int s = 0; s < k; ++s) ev.a(r, s) = c.a[r][s];
    }
  }
  ev.f = nonlinearity_from_json(c.nonlinearity);
  ev.g = make_field(c.g, ev.grid, c.seed.value_or(0), "g");
  ev.alpha = c.alpha;
  ev.beta = c.beta;
  ev.scheme = scheme_from_string(c.scheme);
  ev.dt = c.dt;
  ev.newton_tol = c.newton_tol;
  ev.newton_max_iter = c.newton_max_iter;
  return ev;
}

SpectralField make_field(const json& spec, const Grid& grid, std::uint64_t seed, const std::string& path) {
  if (!spec.is_object()) throw ConfigError(path, "must be an object");
  SpectralField u(grid);
  if (spec.contains("modes")) {
    reject_unknown(spec, {"modes"}, path);
    const json& list = spec.at("modes");
    if (!list.is_array()) throw ConfigError(path + ".modes", "must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".modes[" + std::to_string(i) + "]";
      reject_unknown(list[i], {"component", "mode", "value"}, p);
      const int c = integer(list[i], "component", p, 0);
      if (c < 0 || c >= grid.k) throw ConfigError(p + ".component", "out of range");
      const auto m = mode_index(list[i].value("mode", json()), grid.d, p + ".mode");
      for (int a = 0; a < grid.d; ++a)
        if (m[a] > grid.N) throw ConfigError(p + ".mode", "exceeds grid.N");
      u.at(c, grid.flat_index(m)) += number(list[i], "value", p, 0.0);
    }
    return u;
  }
  if (!spec.contains("profile") || !spec.at("profile").is_string())
    throw ConfigError(path + ".profile", "missing (expected zero, sine, power, random or modes)");
  const std::string profile = spec.at("profile").get<std::string>();
  if (profile == "zero") {
    reject_unknown(spec, {"profile"}, path);
  } else if (profile == "sine") {
    reject_unknown(spec, {"profile", "amplitude", "mode", "component"}, path);
    const auto m = mode_index(spec.value("mode", json()), grid.d, path + ".mode");
    for (int a = 0; a < grid.d; ++a)
      if (m[a] > grid.N) throw ConfigError(path + ".mode", "exceeds grid.N");
    const int c = integer(spec, "component", path, 0);
    if (c < 0 || c >= grid.k) throw ConfigError(path + ".component", "out of range");
    // prod sin = (L/2)^{d/2} phi_m
    u.at(c, grid.flat_index(m)) = number(spec, "amplitude", path, 1.0) * std::pow(grid.L / 2.0, grid.d / 2.0);
  } else if (profile == "power") {
    reject_unknown(spec, {"profile", "amplitude", "decay"}, path);
    const double amp = number(spec, "amplitude", path, 1.0);
    const double decay = number(spec, "decay", path, 1.0);
    for (int c = 0; c < grid.k; ++c)
      for (std::size_t m = 0; m < grid.modes(); ++m) u.at(c, m) = amp * mode_weight(grid, m, decay);
  } else if (profile == "random") {
    reject_unknown(spec, {"profile", "norm", "decay", "stream"}, path);
    const double norm = number(spec, "norm", path, 1.0);
    const double decay = number(spec, "decay", path, 2.0);
    const int stream = integer(spec, "stream", path, 0);
    if (!(norm >= 0.0)) throw ConfigError(path + ".norm", "must be nonnegative");
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(stream));
    for (int c = 0; c < grid.k; ++c)
      for (std::size_t m = 0; m < grid.modes(); ++m) u.at(c, m) = rng.normal() * mode_weight(grid, m, decay);
    const double n = l2_norm(u);
    if (n > 0.0) u *= norm / n;
  } else {
    throw ConfigError(path + ".profile", "unknown profile '" + profile + "'");
  }
  return u;
}

std::vector<double> make_schedule(const json& spec, double T, const std::string& path) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
    throw ConfigError(path + ".kind", "missing (expected uniform, log or list)");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "uniform") {
    reject_unknown(spec, {"kind", "count"}, path);
    const int n = integer(spec, "count", path, 100);
    if (n < 1) throw ConfigError(path + ".count", "must be >= 1");
    return uniform_schedule(T, n);
  }
  if (kind == "log") {
    reject_unknown(spec, {"kind", "t_min", "per_decade"}, path);
    const double t0 = number(spec, "t_min", path, 1e-4);
    const int per = integer(spec, "per_decade", path, 20);
    if (!(t0 > 0.0 && t0 < T)) throw ConfigError(path + ".t_min", "must lie in (0, T)");
    if (per < 1) throw ConfigError(path + ".per_decade", "must be >= 1");
    return log_schedule(t0, T, per);
  }
  if (kind == "list") {
    reject_unknown(spec, {"kind", "times"}, path);
    std::vector<double> t = numbers(spec, "times", path, {});
    if (t.empty()) throw ConfigError(path + ".times", "must not be empty");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > (i ? t[i - 1] : 0.0)) || t[i] > T)
        throw ConfigError(path + ".times", "must be strictly increasing within (0, T]");
    }
    return t;
  }
  throw ConfigError(path + ".kind", "unknown schedule kind '" + kind + "'");
}

void set_path(json& doc, const std::string& dotted, const json& value) {
  json* node = &doc;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("sweep.parameters", "empty parameter path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("sweep.parameters." + dotted, "path crosses a non-object");
    node = &next;
  }
  (*node)[parts.back()] = value;
}

std::vector<json> sweep_points(const ExperimentConfig& c) {
  const json base = [&] {
    json j = c;
    j["sweep"] = {{"parameters", json::object()}};
    return j;
  }();
  const json& params = c.sweep.at("parameters");
  std::vector<std::pair<std::string, json>> axes;
  for (const auto& [key, values] : params.items()) axes.emplace_back(key, values);
  std::vector<json> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    json point = base;
    for (std::size_t a = 0; a < axes.size(); ++a) set_path(point, axes[a].first, axes[a].second[idx[a]]);
    out.push_back(std::move(point));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

}  // namespace monodiss
