#include "monodiss/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "monodiss/diagnostics.hpp"
#include "monodiss/error.hpp"
#include "monodiss/parallel.hpp"

namespace monodiss {

namespace {

int count_magnitudes(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  int n = 1;
  double anchor = values.front();
  for (double v : values) {
    if (v > 2.0 * anchor) {
      ++n;
      anchor = v;
    }
  }
  return n;
}

double entry_time(const std::vector<double>& times, const std::vector<double>& norms, double R, bool* re_exit) {
  // last sample outside the ball; entry is the sample after it
  std::size_t last_out = times.size();
  bool entered = false;
  *re_exit = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (norms[i] > R) {
      if (entered) *re_exit = true;
      last_out = i;
    } else {
      entered = true;
    }
  }
  if (last_out == times.size()) return 0.0;
  if (last_out + 1 >= times.size()) return std::numeric_limits<double>::infinity();
  return times[last_out + 1];
}

double distance_to_cloud(const SpectralField& u, const std::vector<SpectralField>& cloud) {
  double best = std::numeric_limits<double>::infinity();
  const auto uc = u.coeffs();
  for (const auto& s : cloud) {
    const auto sc = s.coeffs();
    double acc = 0.0;
    for (std::size_t i = 0; i < uc.size() && acc < best * best; ++i) acc += (uc[i] - sc[i]) * (uc[i] - sc[i]);
    best = std::min(best, std::sqrt(acc));
  }
  return best;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

AbsorbingReport absorbing_radius(const EvolutionConfig& config, const std::vector<SpectralField>& initial,
                                 const AbsorbingOptions& options) {
  if (initial.empty()) throw Refusal("absorbing_radius: empty ensemble");
  std::vector<double> l2_0;
  for (const auto& u : initial) l2_0.push_back(l2_norm(u));
  if (count_magnitudes(l2_0) < 3) throw Refusal("absorbing_radius: ensemble needs at least 3 initial magnitudes");

  const std::vector<double> schedule = uniform_schedule(options.T, options.samples);
  const auto trajs = parallel_map(initial.size(), options.workers,
                                  [&](std::size_t i) { return evolve(config, initial[i], options.T, schedule); });

  std::vector<std::vector<double>> nl2, nh1;
  double tail_l2 = 0.0, tail_h1 = 0.0;
  for (const auto& t : trajs) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      a.push_back(l2_norm(t.states[i]));
      b.push_back(hs_norm(t.states[i], 1.0));
      if (t.times[i] >= 0.5 * options.T) {
        tail_l2 = std::max(tail_l2, a.back());
        tail_h1 = std::max(tail_h1, b.back());
      }
    }
    nl2.push_back(std::move(a));
    nh1.push_back(std::move(b));
  }

  AbsorbingReport rep;
  rep.R_l2 = options.radius_l2.value_or(1.1 * tail_l2);
  rep.R_h1 = options.radius_h1.value_or(1.1 * tail_h1);
  rep.initial_l2 = l2_0;
  for (std::size_t e = 0; e < trajs.size(); ++e) {
    bool re1 = false, re2 = false;
    const double t1 = entry_time(trajs[e].times, nl2[e], rep.R_l2, &re1);
    const double t2 = entry_time(trajs[e].times, nh1[e], rep.R_h1, &re2);
    if (!std::isfinite(t1) || !std::isfinite(t2)) {
      throw Refusal("absorbing_radius: trajectory " + std::to_string(e) + " is outside the ball at T = " +
                    fmt(options.T) + " (||u|| = " + fmt(nl2[e].back()) + ", ||grad u|| = " + fmt(nh1[e].back()) +
                    "); extend the horizon");
    }
    rep.entry_l2.push_back(t1);
    rep.entry_h1.push_back(t2);
    rep.re_exit.push_back(re1 || re2);
  }
  return rep;
}

std::vector<std::size_t> leading_projection(const std::vector<SpectralField>& snapshots, int count) {
  if (snapshots.empty()) return {};
  const std::size_t n = snapshots.front().coeffs().size();
  std::vector<double> energy(n, 0.0);
  for (const auto& s : snapshots)
    for (std::size_t i = 0; i < n; ++i) energy[i] += s.coeffs()[i] * s.coeffs()[i];
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return energy[a] > energy[b]; });
  idx.resize(std::min<std::size_t>(n, count));
  return idx;
}

AttractorCloud sample_cloud(const EvolutionConfig& config, const std::vector<SpectralField>& initial,
                            const CloudOptions& options) {
  if (initial.empty()) throw Refusal("sample_cloud: empty ensemble");
  if (!(options.burn_in > 0.0)) throw ConfigError("attractor.burn_in", "must be positive");
  if (options.snapshots_per_trajectory < 1) throw ConfigError("attractor.snapshots", "must be >= 1");
  if (!(options.spacing > 0.0)) throw ConfigError("attractor.spacing", "must be positive");
  std::vector<double> schedule;
  for (int i = 0; i < options.snapshots_per_trajectory; ++i) schedule.push_back(options.burn_in + i * options.spacing);
  const double T = schedule.back();
  const auto trajs = parallel_map(initial.size(), options.workers,
                                  [&](std::size_t i) { return evolve(config, initial[i], T, schedule); });
  AttractorCloud cloud;
  cloud.burn_in = options.burn_in;
  cloud.spacing = options.spacing;
  cloud.ball_radius = options.ball_radius;
  for (std::size_t e = 0; e < trajs.size(); ++e) {
    for (std::size_t i = 1; i < trajs[e].states.size(); ++i) {
      cloud.snapshots.push_back(trajs[e].states[i]);
      cloud.times.push_back(trajs[e].times[i]);
      cloud.source.push_back(static_cast<int>(e));
      if (options.ball_radius && l2_norm(trajs[e].states[i]) > *options.ball_radius) cloud.outside_ball = true;
    }
  }
  cloud.projection = leading_projection(cloud.snapshots, options.projection_size);
  std::vector<double> norms0;
  for (const auto& u : initial) norms0.push_back(l2_norm(u));
  cloud.ensemble = {{"members", initial.size()}, {"initial_l2", norms0}, {"T_end", T}};
  return cloud;
}

BoxCount box_counting_dimension(const std::vector<std::vector<double>>& points, const std::vector<double>& eps) {
  if (eps.size() < 2) throw ConfigError("eps", "need at least two box sizes");
  BoxCount out;
  std::vector<double> x, y;
  for (double e : eps) {
    if (!(e > 0.0)) throw ConfigError("eps", "box sizes must be positive");
    std::set<std::vector<long long>> boxes;
    for (const auto& p : points) {
      std::vector<long long> key(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) key[i] = static_cast<long long>(std::floor(p[i] / e));
      boxes.insert(std::move(key));
    }
    const double n = static_cast<double>(boxes.size());
    // once nearly every point sits in its own box the count saturates
    if (n >= 0.5 * static_cast<double>(points.size()) && points.size() > 1) {
      out.truncated = true;
      continue;
    }
    out.eps.push_back(e);
    out.counts.push_back(n);
    x.push_back(std::log(1.0 / e));
    y.push_back(std::log(n));
  }
  if (x.size() < 2) {
    out.dimension = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.dimension = ls_slope(x, y);
  double my = 0;
  for (double v : y) my += v;
  my /= static_cast<double>(y.size());
  double mx = 0;
  for (double v : x) mx += v;
  mx /= static_cast<double>(x.size());
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = my + out.dimension * (x[i] - mx);
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

BoxCount box_counting_dimension(const AttractorCloud& cloud, const std::vector<double>& eps) {
  if (cloud.snapshots.size() < 200) throw Refusal("box_counting_dimension: need at least 200 snapshots");
  std::vector<std::vector<double>> pts;
  for (const auto& s : cloud.snapshots) {
    std::vector<double> p;
    for (std::size_t i : cloud.projection) p.push_back(s.coeffs()[i]);
    pts.push_back(std::move(p));
  }
  return box_counting_dimension(pts, eps);
}

AttractionRate attraction_rate(const EvolutionConfig& config, const AttractorCloud& cloud,
                               const std::vector<SpectralField>& probes, const AttractionOptions& options) {
  if (cloud.snapshots.empty()) throw Refusal("attraction_rate: empty cloud");
  if (probes.empty()) throw Refusal("attraction_rate: no probes");
  AttractionRate out;
  for (std::size_t i = 0; i < cloud.snapshots.size(); ++i) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cloud.snapshots.size(); ++j) {
      if (i != j) nn = std::min(nn, l2_norm(cloud.snapshots[i] - cloud.snapshots[j]));
    }
    if (std::isfinite(nn)) out.floor = std::max(out.floor, nn);
  }

  const std::vector<double> schedule = uniform_schedule(options.T, options.samples);
  const auto dists = parallel_map(probes.size(), options.workers, [&](std::size_t p) {
    const Trajectory t = evolve(config, probes[p], options.T, schedule);
    std::vector<double> d;
    for (const auto& s : t.states) d.push_back(distance_to_cloud(s, cloud.snapshots));
    return d;
  });
  out.times.push_back(0.0);
  out.times.insert(out.times.end(), schedule.begin(), schedule.end());
  out.distances.assign(out.times.size(), 0.0);
  for (const auto& d : dists)
    for (std::size_t i = 0; i < d.size(); ++i) out.distances[i] = std::max(out.distances[i], d[i]);

  const double d0 = out.distances.front();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    const double d = out.distances[i];
    if (d <= options.start_fraction * d0 && d >= 1e3 * out.floor && d > 0.0) {
      x.push_back(out.times[i]);
      y.push_back(std::log(d));
    }
  }
  out.fitted_points = static_cast<int>(x.size());
  if (x.size() < 3) {
    throw Refusal("attraction_rate: only " + std::to_string(x.size()) +
                  " samples lie above the cloud floor; enlarge the cloud or shorten the horizon");
  }
  const double slope = ls_slope(x, y);
  if (!(slope < 0.0)) throw Refusal("attraction_rate: distances do not decrease; enlarge the cloud");
  out.alpha = -slope;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    if (out.distances[i] >= 1e3 * out.floor) {
      out.Q = std::max(out.Q, out.distances[i] * std::exp(out.alpha * out.times[i]));
    }
  }
  return out;
}

std::vector<SpectralField> cluster_centroids(const std::vector<SpectralField>& snapshots, int k, int max_iter) {
  if (snapshots.empty() || k < 1) return {};
  const std::size_t n = snapshots.size();
  k = std::min<int>(k, static_cast<int>(n));
  std::vector<SpectralField> centers;
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (l2_norm(snapshots[i]) > l2_norm(snapshots[first])) first = i;
  centers.push_back(snapshots[first]);
  while (static_cast<int>(centers.size()) < k) {
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = distance_to_cloud(snapshots[i], centers);
      if (d > best) best = d, far = i;
    }
    centers.push_back(snapshots[far]);
  }
  std::vector<int> label(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = l2_norm(snapshots[i] - centers[c]);
        if (d < best) best = d, arg = c;
      }
      if (label[i] != arg) label[i] = arg, changed = true;
    }
    if (!changed) break;
    for (int c = 0; c < k; ++c) {
      SpectralField sum(snapshots.front().grid());
      int count = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (label[i] == c) sum += snapshots[i], ++count;
      if (count > 0) centers[c] = (1.0 / count) * sum;
    }
  }
  return centers;
}

void to_json(nlohmann::json& j, const AbsorbingReport& r) {
  j = {{"R_l2", r.R_l2},           {"R_h1", r.R_h1},           {"entry_l2", r.entry_l2},
       {"entry_h1", r.entry_h1}, {"initial_l2", r.initial_l2}, {"re_exit", r.re_exit}};
}

void to_json(nlohmann::json& j, const BoxCount& b) {
  j = {{"dimension", std::isfinite(b.dimension) ? nlohmann::json(b.dimension) : nlohmann::json(nullptr)},
       {"r_squared", b.r_squared},
       {"eps", b.eps},
       {"counts", b.counts},
       {"truncated", b.truncated}};
}

void to_json(nlohmann::json& j, const AttractionRate& a) {
  j = {{"alpha", a.alpha}, {"Q", a.Q}, {"floor", a.floor}, {"times", a.times}, {"distances", a.distances},
       {"fitted_points", a.fitted_points}};
}

nlohmann::json cloud_json(const AttractorCloud& cloud) {
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : cloud.snapshots) snaps.push_back(s);
  return {{"metadata",
           {{"burn_in", cloud.burn_in},
            {"spacing", cloud.spacing},
            {"projection", cloud.projection},
            {"times", cloud.times},
            {"source", cloud.source},
            {"outside_ball", cloud.outside_ball},
            {"ensemble", cloud.ensemble}}},
          {"snapshots", snaps}};
}

std::string box_count_csv(const BoxCount& b) {
  std::ostringstream os;
  os << "eps,count\n";
  for (std::size_t i = 0; i < b.eps.size(); ++i) os << fmt(b.eps[i]) << ',' << fmt(b.counts[i]) << '\n';
  return os.str();
}

}  // namespace monodiss
