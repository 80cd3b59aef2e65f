#include "monodiss/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "monodiss/error.hpp"

namespace monodiss {

namespace {

struct ClosedGridState {
  int M = 0;
  std::size_t pts = 0;
  GridFunction u;
  std::vector<GridFunction> grad;
};

ClosedGridState closed_state(const SpectralField& u, int M, bool with_grad) {
  ClosedGridState s;
  s.M = M;
  s.u = evaluate(u, M, Nodes::closed);
  s.pts = s.u.points();
  if (with_grad) {
    for (int axis = 0; axis < u.grid().d; ++axis) {
      std::array<int, 3> deriv{0, 0, 0};
      deriv[axis] = 1;
      s.grad.push_back(evaluate(u, M, Nodes::closed, deriv));
    }
  }
  return s;
}

double integrate_closed(const std::vector<double>& v, const Grid& g, int M) {
  return integrate(v, g.d, M, Nodes::closed, g.L);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

double ibp_residual(const NonlinearSpec& f, const SpectralField& u, int M) {
  if (f.k != u.grid().k) throw DimensionError("ibp_residual: component counts differ");
  if (f.identically_zero) return 0.0;
  const Grid& g = u.grid();
  if (M <= 0) M = g.dealias_points();
  const ClosedGridState s = closed_state(u, M, true);
  const GridFunction neg_lap = evaluate(apply_fractional_laplacian(u, 1.0), M, Nodes::closed);
  const int k = g.k;
  std::vector<double> integrand(s.pts), ui(k), fi(k), J(k * k);
  for (std::size_t p = 0; p < s.pts; ++p) {
    for (int c = 0; c < k; ++c) ui[c] = s.u.values[c * s.pts + p];
    f.eval(ui, fi);
    f.jac(ui, J);
    double v = 0.0;
    for (int c = 0; c < k; ++c) v -= fi[c] * neg_lap.values[c * s.pts + p];
    for (const auto& gr : s.grad) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) v += gr.values[i * s.pts + p] * J[i * k + j] * gr.values[j * s.pts + p];
    }
    integrand[p] = v;
  }
  return std::abs(integrate_closed(integrand, g, M));
}

EnergyReport energy_report(const Trajectory& trajectory, const NonlinearSpec& f, double r) {
  if (!(r > 0.0)) throw ConfigError("r", "must be positive");
  EnergyReport rep;
  rep.r = r;
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    const SpectralField& u = trajectory.states[i];
    const SpectralField& th = trajectory.derivs[i];
    const Grid& g = u.grid();
    if (f.k != g.k) throw DimensionError("energy_report: component counts differ");
    EnergyRow row;
    row.t = trajectory.times[i];
    row.l2_sq = std::pow(l2_norm(u), 2);
    row.h1_sq = std::pow(hs_norm(u, 1.0), 2);
    row.h2_sq = std::pow(hs_norm(u, 2.0), 2);
    row.dt_l2_sq = std::pow(l2_norm(th), 2);
    row.dt_lr = lp_norm(th, r + 2.0, 2);
    if (f.identically_zero) {
      row.d_norm_sq = row.h2_sq;
      rep.rows.push_back(row);
      continue;
    }
    const int M = g.dealias_points();
    const ClosedGridState s = closed_state(u, M, false);
    const int k = g.k;
    std::vector<double> fu_abs(s.pts), f_sq(s.pts), ui(k), fi(k);
    for (std::size_t p = 0; p < s.pts; ++p) {
      for (int c = 0; c < k; ++c) ui[c] = s.u.values[c * s.pts + p];
      f.eval(ui, fi);
      double dotv = 0.0, sq = 0.0;
      for (int c = 0; c < k; ++c) dotv += fi[c] * ui[c], sq += fi[c] * fi[c];
      fu_abs[p] = std::abs(dotv);
      f_sq[p] = sq;
    }
    row.fu_dot_u_abs = integrate_closed(fu_abs, g, M);
    row.d_norm_sq = row.h2_sq + integrate_closed(f_sq, g, M);
    const GradientForm gf = gradient_form(f, u);
    row.fprime_grad_signed = gf.signed_value;
    row.fprime_grad_abs = gf.absolute_value;
    row.ibp_residual = ibp_residual(f, u, M);
    rep.rows.push_back(row);
  }
  return rep;
}

const std::vector<std::string>& energy_columns() {
  static const std::vector<std::string> cols = {"t",         "l2_sq",          "h1_sq",        "h2_sq",
                                                "fu_dot_u_abs", "fprime_grad_signed", "fprime_grad_abs",
                                                "dt_l2_sq",  "dt_lr",          "d_norm_sq",    "ibp_residual"};
  return cols;
}

std::vector<double> EnergyReport::times() const { return column("t"); }

std::vector<double> EnergyReport::column(const std::string& name) const {
  double EnergyRow::*member = nullptr;
  if (name == "t") member = &EnergyRow::t;
  else if (name == "l2_sq") member = &EnergyRow::l2_sq;
  else if (name == "h1_sq") member = &EnergyRow::h1_sq;
  else if (name == "h2_sq") member = &EnergyRow::h2_sq;
  else if (name == "fu_dot_u_abs") member = &EnergyRow::fu_dot_u_abs;
  else if (name == "fprime_grad_signed") member = &EnergyRow::fprime_grad_signed;
  else if (name == "fprime_grad_abs") member = &EnergyRow::fprime_grad_abs;
  else if (name == "dt_l2_sq") member = &EnergyRow::dt_l2_sq;
  else if (name == "dt_lr") member = &EnergyRow::dt_lr;
  else if (name == "d_norm_sq") member = &EnergyRow::d_norm_sq;
  else if (name == "ibp_residual") member = &EnergyRow::ibp_residual;
  else throw std::invalid_argument("unknown energy column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*member);
  return out;
}

std::string energy_csv(const EnergyReport& report) {
  std::ostringstream os;
  const auto& cols = energy_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  std::vector<std::vector<double>> data;
  for (const auto& c : cols) data.push_back(report.column(c));
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << fmt(data[i][r]);
    os << '\n';
  }
  return os.str();
}

void to_json(nlohmann::json& j, const Verdict& v) {
  j = {{"id", v.id},         {"constants", v.constants},       {"times", v.times},
       {"margins", v.margins}, {"pass", v.pass},                 {"witness_time", v.witness_time},
       {"min_margin", v.min_margin}, {"tolerance", v.tolerance}, {"flags", v.flags}};
}

Verdict check_dissipative(const std::vector<EnergyReport>& ensemble, Functional which,
                          const DissipativeOptions& options) {
  const std::string name = which == Functional::l2 ? "l2_sq" : "h1_sq";
  if (ensemble.empty()) throw Refusal("check_dissipative: empty ensemble");
  const std::vector<double> times = ensemble.front().times();
  if (times.size() < 3) throw Refusal("check_dissipative: need at least 3 sample times");

  std::vector<std::vector<double>> ys;
  std::vector<double> y0;
  for (const auto& rep : ensemble) {
    if (rep.times() != times) throw Refusal("check_dissipative: ensemble members use different sample times");
    ys.push_back(rep.column(name));
    y0.push_back(ys.back().front());
  }
  std::vector<double> sorted = y0;
  std::sort(sorted.begin(), sorted.end());
  int magnitudes = 1;
  double anchor = sorted.front();
  for (double v : sorted) {
    if (v > 2.0 * anchor) {
      ++magnitudes;
      anchor = v;
    }
  }
  if (magnitudes < 3) {
    throw Refusal("check_dissipative: ensemble spans " + std::to_string(magnitudes) +
                  " initial magnitude(s); at least 3 are required");
  }

  double B = 0.0, scale = 0.0;
  for (const auto& y : ys) {
    B = std::max(B, y.back());
    for (double v : y) scale = std::max(scale, v);
  }

  std::vector<double> xs, ls;
  for (std::size_t e = 0; e < ys.size(); ++e) {
    if (!(y0[e] > 0.0)) continue;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (ys[e][i] > 10.0 * B) {
        xs.push_back(times[i]);
        ls.push_back(std::log((ys[e][i] - B) / y0[e]));
      }
    }
  }

  Verdict v;
  v.id = which == Functional::l2 ? "dissipative_l2" : "dissipative_h1";
  v.times = times;
  v.tolerance = 10.0 * options.dt * scale;

  double alpha = 0.0, logC = 0.0;
  std::size_t distinct_t = 0;
  {
    std::vector<double> ts = xs;
    std::sort(ts.begin(), ts.end());
    distinct_t = std::unique(ts.begin(), ts.end()) - ts.begin();
  }
  if (options.forced_alpha) {
    alpha = *options.forced_alpha;
    if (xs.empty()) throw Refusal("check_dissipative: no samples above the absorbing level");
    for (std::size_t i = 0; i < xs.size(); ++i) logC += ls[i] + alpha * xs[i];
    logC /= static_cast<double>(xs.size());
  } else if (distinct_t >= 2) {
    const double slope = ls_slope(xs, ls);
    alpha = -slope;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ls[i];
    logC = (my - slope * mx) / static_cast<double>(xs.size());
    // inflate C minimally so the envelope dominates every sample
    for (std::size_t e = 0; e < ys.size(); ++e) {
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (ys[e][i] > B && y0[e] > 0.0) {
          logC = std::max(logC, std::log((ys[e][i] - B) / y0[e]) + alpha * times[i]);
        }
      }
    }
  } else {
    v.flags.push_back("insufficient_decay_samples");
  }
  const double C = std::exp(logC);

  v.margins.assign(times.size(), std::numeric_limits<double>::infinity());
  v.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < ys.size(); ++e) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double env = C * std::exp(-alpha * times[i]) * y0[e] + B;
      const double m = env - ys[e][i];
      v.margins[i] = std::min(v.margins[i], m);
      if (m < v.min_margin) {
        v.min_margin = m;
        v.witness_time = times[i];
      }
    }
  }
  v.constants = {{"functional", name}, {"C", C}, {"alpha", alpha}, {"B", B}, {"magnitudes", magnitudes},
                 {"forced", options.forced_alpha.has_value()}};
  v.pass = alpha > 0.0 && v.min_margin >= -v.tolerance && v.flags.empty();
  return v;
}

Verdict check_lipschitz(const Trajectory& a, const Trajectory& b, double K, double dt) {
  if (a.times != b.times) throw Refusal("check_lipschitz: trajectories use different sample times");
  Verdict v;
  v.id = "lipschitz";
  v.times = a.times;
  const double d0 = l2_norm(a.states.front() - b.states.front());
  double max_ratio = 0.0, K1 = -std::numeric_limits<double>::infinity(), scale = 0.0;
  std::vector<double> ratio(a.times.size());
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double di = l2_norm(a.states[i] - b.states[i]);
    ratio[i] = d0 > 0.0 ? di / d0 : 0.0;
    max_ratio = std::max(max_ratio, ratio[i]);
    scale = std::max(scale, (1.0 + 10.0 * dt) * std::exp(K * a.times[i]));
    if (a.times[i] > 0.0 && ratio[i] > 0.0) K1 = std::max(K1, std::log(ratio[i]) / a.times[i]);
  }
  v.tolerance = 10.0 * dt * scale;
  v.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double m = (1.0 + 10.0 * dt) * std::exp(K * a.times[i]) - ratio[i];
    v.margins.push_back(m);
    if (m < v.min_margin) {
      v.min_margin = m;
      v.witness_time = a.times[i];
    }
  }
  v.constants = {{"K", K}, {"max_ratio", max_ratio}, {"final_ratio", ratio.back()}, {"dt", dt}};
  if (std::isfinite(K1)) v.constants["K1_fit"] = K1;
  v.pass = v.min_margin >= -v.tolerance;
  return v;
}

SqueezingResult check_squeezing(const std::vector<SqueezingPair>& pairs, double T, double eps_sob,
                                double ball_radius) {
  SqueezingResult res;
  res.T = T;
  res.eps_sob = eps_sob;
  for (const auto& p : pairs) {
    if (l2_norm(p.xi1) > ball_radius || l2_norm(p.xi2) > ball_radius) res.outside_ball = true;
    const double d0 = l2_norm(p.xi1 - p.xi2);
    const double ratio = d0 > 0.0 ? hs_norm(p.s1 - p.s2, eps_sob) / d0 : 0.0;
    res.ratios.push_back(ratio);
    res.K_hat = std::max(res.K_hat, ratio);
  }
  return res;
}

bool refinement_stable(double coarse, double fine, double rel) {
  const double big = std::max(std::abs(coarse), std::abs(fine));
  return std::isfinite(coarse) && std::isfinite(fine) && std::abs(coarse - fine) < rel * big;
}

SmoothingFit fit_smoothing_rate(const EnergyReport& report, double t_min, double t_max) {
  std::vector<double> lt, ldt, lh1, llr;
  const double p = report.r + 2.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : report.rows) {
    if (row.t < t_min * (1 - 1e-12) || row.t > t_max * (1 + 1e-12) || !(row.t > 0.0)) continue;
    lo = std::min(lo, row.t);
    hi = std::max(hi, row.t);
    lt.push_back(std::log(row.t));
    ldt.push_back(std::log(row.dt_l2_sq));
    lh1.push_back(std::log(row.h1_sq));
    llr.push_back(std::log(row.t) + p * std::log(row.dt_lr));
  }
  SmoothingFit fit;
  fit.points = static_cast<int>(lt.size());
  fit.decades = lt.size() >= 2 ? std::log10(hi / lo) : 0.0;
  if (fit.decades < 2.0 - 1e-9) {
    throw Refusal("fit_smoothing_rate: samples in the window span " + fmt(fit.decades) +
                  " decades; at least 2 are required");
  }
  fit.N_fit = -ls_slope(lt, ldt);
  fit.h1_slope = ls_slope(lt, lh1);
  fit.lr_slope = ls_slope(lt, llr);
  return fit;
}

void to_json(nlohmann::json& j, const SmoothingFit& s) {
  j = {{"N_fit", s.N_fit}, {"h1_slope", s.h1_slope}, {"lr_slope", s.lr_slope}, {"decades", s.decades},
       {"points", s.points}};
}

void to_json(nlohmann::json& j, const SqueezingResult& s) {
  j = {{"K_hat", s.K_hat}, {"ratios", s.ratios}, {"eps_sob", s.eps_sob}, {"T", s.T}, {"outside_ball", s.outside_ball}};
}

}  // namespace monodiss
