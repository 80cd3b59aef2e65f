#include "monodiss/nonlinearity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "monodiss/error.hpp"
#include "monodiss/rng.hpp"

namespace monodiss {

namespace {

double norm2(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

double min_sym_eigenvalue(std::span<const double> jac, int k) {
  if (k == 1) return jac[0];
  Eigen::MatrixXd J(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) J(i, j) = jac[i * k + j];
  const Eigen::MatrixXd S = 0.5 * (J + J.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double operator_norm(std::span<const double> jac, int k) {
  if (k == 1) return std::abs(jac[0]);
  Eigen::MatrixXd J(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) J(i, j) = jac[i * k + j];
  return Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues()(0);
}

double param(const nlohmann::json& params, const char* key, double fallback) {
  if (params.contains(key)) return params.at(key).get<double>();
  return fallback;
}

// Radical inverse of i in the given base.
double halton(std::uint64_t i, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr std::array<unsigned, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// 20-point Gauss–Legendre rule on [-1, 1].
struct GaussLegendre {
  std::array<double, 20> x{};
  std::array<double, 20> w{};
  GaussLegendre() {
    constexpr int n = 20;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

// State of one regularised nonlinearity f_n.
struct Regularised {
  NonlinearSpec base;
  double eps;
  double p1;
  double R;

  double psi1(double z) const { return 0.5 * (p1 + 1.0) * std::pow(z, 0.5 * (p1 - 1.0)); }
  double psi2(double z) const {
    return 0.25 * (p1 + 1.0) * (p1 - 1.0) * std::pow(z, 0.5 * (p1 - 3.0));
  }
  // Second cut-off, on [2R, 3R].
  double capped_weight(double tau) const {
    if (tau <= 2.0 * R) return 1.0;
    if (tau >= 3.0 * R) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (tau - 2.0 * R) / R));
  }
  // Psi'_R(z) = Psi'(0) + int_0^z theta~(tau) Psi''(tau) dtau.
  double capped_psi1(double z) const {
    if (z <= 2.0 * R) return psi1(z);
    const double hi = std::min(z, 3.0 * R);
    const double lo = 2.0 * R;
    const auto& gl = gauss_legendre();
    double integral = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double tau = 0.5 * (hi - lo) * gl.x[i] + 0.5 * (hi + lo);
      integral += gl.w[i] * capped_weight(tau) * psi2(tau);
    }
    return psi1(lo) + 0.5 * (hi - lo) * integral;
  }
  double capped_psi2(double z) const {
    if (z <= 0.0 || z >= 3.0 * R) return 0.0;
    return capped_weight(z) * psi2(z);
  }

  void eval(std::span<const double> u, std::span<double> out) const {
    const int k = base.k;
    double z = 0.0;
    for (int i = 0; i < k; ++i) z += u[i] * u[i];
    const double theta = cutoff(z, R);
    if (theta > 0.0) {
      base.eval(u, out);
      for (int i = 0; i < k; ++i) out[i] *= theta;
    } else {
      for (int i = 0; i < k; ++i) out[i] = 0.0;
    }
    const double g = 2.0 * eps * capped_psi1(z);
    for (int i = 0; i < k; ++i) out[i] += g * u[i];
  }

  void jac(std::span<const double> u, std::span<double> out) const {
    const int k = base.k;
    double z = 0.0;
    for (int i = 0; i < k; ++i) z += u[i] * u[i];
    const double theta = cutoff(z, R);
    const double dtheta = cutoff_derivative(z, R);
    std::fill(out.begin(), out.end(), 0.0);
    if (theta > 0.0) {
      base.jac(u, out);
      for (double& v : out) v *= theta;
    }
    if (dtheta != 0.0) {
      std::array<double, 16> fu{};
      std::vector<double> heap;
      std::span<double> fs(fu.data(), k);
      if (k > 16) {
        heap.resize(k);
        fs = heap;
      }
      base.eval(u, fs);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out[i * k + j] += 2.0 * dtheta * fs[i] * u[j];
    }
    const double d1 = 2.0 * eps * capped_psi1(z);
    const double d2 = z > 0.0 ? 4.0 * eps * capped_psi2(z) : 0.0;
    for (int i = 0; i < k; ++i) {
      out[i * k + i] += d1;
      for (int j = 0; j < k; ++j) out[i * k + j] += d2 * u[i] * u[j];
    }
  }
};

template <class F>
void for_each_point(const GridFunction& u, F&& body) {
  const std::size_t pts = u.points();
  const int k = u.k;
  std::vector<double> buf(k);
  for (std::size_t i = 0; i < pts; ++i) {
    for (int c = 0; c < k; ++c) buf[c] = u.values[c * pts + i];
    body(i, std::span<const double>(buf));
  }
}

}  // namespace

NonlinearSpec builtin(const std::string& name, const nlohmann::json& params) {
  NonlinearSpec s;
  s.name = name;
  s.params = params.is_null() ? nlohmann::json::object() : params;

  if (name == "zero") {
    s.k = static_cast<int>(param(params, "k", 1.0));
    if (s.k < 1) throw ConfigError("nonlinearity.params.k", "must be >= 1");
    s.eval = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    s.jac = s.eval;
    s.C = 0.0;
    s.K = 0.0;
    s.p = 1.0;
    s.C_growth = 1.0;
    s.fprime_cert = 1.0;
    s.identically_zero = true;
    return s;
  }
  if (name == "linear") {
    if (!params.contains("matrix")) throw ConfigError("nonlinearity.params.matrix", "required for linear");
    const auto rows = params.at("matrix").get<std::vector<std::vector<double>>>();
    const int k = static_cast<int>(rows.size());
    if (k < 1) throw ConfigError("nonlinearity.params.matrix", "must be a non-empty square matrix");
    std::vector<double> A;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != k) throw ConfigError("nonlinearity.params.matrix", "must be square");
      A.insert(A.end(), r.begin(), r.end());
    }
    const double lmin = min_sym_eigenvalue(A, k);
    if (lmin < 0.0) {
      throw ConfigError("nonlinearity.params.matrix",
                        "sym(A) must be positive semidefinite for f(u).u to be bounded below");
    }
    s.k = k;
    s.eval = [A, k](std::span<const double> u, std::span<double> out) {
      for (int i = 0; i < k; ++i) {
        double v = 0.0;
        for (int j = 0; j < k; ++j) v += A[i * k + j] * u[j];
        out[i] = v;
      }
    };
    s.jac = [A](std::span<const double>, std::span<double> out) { std::copy(A.begin(), A.end(), out.begin()); };
    s.C = 0.0;
    s.K = 0.0;
    s.p = 1.0;
    s.C_growth = std::max(operator_norm(A, k), 1e-300);
    s.fprime_cert = s.C_growth;
    return s;
  }
  if (name == "cubic_scalar") {
    const double lambda = param(params, "lambda", 1.0);
    const double lp = std::max(lambda, 0.0);
    s.k = 1;
    s.eval = [lambda](std::span<const double> u, std::span<double> out) {
      out[0] = u[0] * u[0] * u[0] - lambda * u[0];
    };
    s.jac = [lambda](std::span<const double> u, std::span<double> out) { out[0] = 3.0 * u[0] * u[0] - lambda; };
    s.C = 0.25 * lp * lp;
    s.K = lp;
    s.p = 3.0;
    s.C_growth = 1.0 + std::abs(lambda);
    s.fprime_cert = std::max(3.0 + std::abs(lambda), 3.0 * std::abs(lambda));
    if (lambda >= 0.0 && lambda <= 1.0) {
      s.convexity = ConvexityCertificate{
          "|u|^6", [](std::span<const double> u) { return std::pow(u[0] * u[0], 3); }, 1.0, 0.25};
    }
    return s;
  }
  if (name == "ginzburg_landau") {
    s.k = 2;
    s.eval = [](std::span<const double> u, std::span<double> out) {
      const double z = u[0] * u[0] + u[1] * u[1];
      out[0] = (z - 1.0) * u[0];
      out[1] = (z - 1.0) * u[1];
    };
    s.jac = [](std::span<const double> u, std::span<double> out) {
      const double z = u[0] * u[0] + u[1] * u[1];
      out[0] = z - 1.0 + 2.0 * u[0] * u[0];
      out[1] = 2.0 * u[0] * u[1];
      out[2] = 2.0 * u[1] * u[0];
      out[3] = z - 1.0 + 2.0 * u[1] * u[1];
    };
    s.C = 0.25;
    s.K = 1.0;
    s.p = 3.0;
    s.C_growth = 2.0;
    s.fprime_cert = 4.0;
    s.convexity = ConvexityCertificate{
        "|u|^6",
        [](std::span<const double> u) { return std::pow(u[0] * u[0] + u[1] * u[1], 3); }, 1.0, 0.25};
    return s;
  }
  if (name == "polynomial_odd") {
    const double p = param(params, "p", 3.0);
    if (!(p >= 1.0)) throw ConfigError("nonlinearity.params.p", "must be >= 1");
    s.k = 1;
    s.eval = [p](std::span<const double> u, std::span<double> out) {
      out[0] = std::pow(std::abs(u[0]), p - 1.0) * u[0];
    };
    s.jac = [p](std::span<const double> u, std::span<double> out) {
      out[0] = p * std::pow(std::abs(u[0]), p - 1.0);
    };
    s.C = 0.0;
    s.K = 0.0;
    s.p = p;
    s.C_growth = 1.0;
    s.fprime_cert = p;
    s.convexity = ConvexityCertificate{
        "|u|^{2p}", [p](std::span<const double> u) { return std::pow(std::abs(u[0]), 2.0 * p); }, 1.0, 1.0};
    return s;
  }
  if (name == "supercritical_monotone") {
    const double p = param(params, "p", 5.0);
    const double d = param(params, "d", 3.0);
    if (!(d >= 1.0)) throw ConfigError("nonlinearity.params.d", "must be >= 1");
    if (!(p > 1.0 + 4.0 / d)) {
      throw ConfigError("nonlinearity.params.p", "must exceed the energy-critical exponent 1 + 4/d");
    }
    s.k = 1;
    s.eval = [p](std::span<const double> u, std::span<double> out) {
      out[0] = std::pow(std::abs(u[0]), p - 1.0) * u[0] - u[0];
    };
    s.jac = [p](std::span<const double> u, std::span<double> out) {
      out[0] = p * std::pow(std::abs(u[0]), p - 1.0) - 1.0;
    };
    // min over z = |u| of z^{p+1} - z^2 is attained at z^2 = (2/(p+1))^{2/(p-1)}.
    const double zstar = std::pow(2.0 / (p + 1.0), 2.0 / (p - 1.0));
    s.C = zstar * (p - 1.0) / (p + 1.0);
    s.K = 1.0;
    s.p = p;
    s.C_growth = 2.0;
    s.fprime_cert = p + 1.0;
    return s;
  }
  throw ConfigError("nonlinearity.name", "unknown nonlinearity '" + name + "'");
}

NonlinearSpec nonlinearity_from_json(const nlohmann::json& j) {
  if (!j.contains("name")) throw ConfigError("nonlinearity.name", "missing");
  return builtin(j.at("name").get<std::string>(), j.value("params", nlohmann::json::object()));
}

const CertificateMargin* CertificationReport::find(const std::string& name) const {
  for (const auto& m : margins)
    if (m.name == name) return &m;
  return nullptr;
}

std::vector<std::vector<double>> certification_samples(int k, double radius, int samples,
                                                       std::uint64_t seed) {
  if (k > static_cast<int>(kPrimes.size())) throw ConfigError("k", "certification supports k <= 12");
  std::vector<std::vector<double>> pts;
  pts.reserve(samples + 64 * k + 1);
  pts.emplace_back(k, 0.0);
  for (int axis = 0; axis < k; ++axis) {
    for (int j = 1; j <= 32; ++j) {
      for (double sign : {-1.0, 1.0}) {
        std::vector<double> u(k, 0.0);
        u[axis] = sign * radius * j / 32.0;
        pts.push_back(std::move(u));
      }
    }
  }
  SplitMix64 rng(seed);
  std::vector<double> shift(k);
  for (double& s : shift) s = rng.uniform();
  int accepted = 0;
  for (std::uint64_t i = 1; accepted < samples && i < 64ULL * (samples + 1); ++i) {
    std::vector<double> u(k);
    double r2 = 0.0;
    for (int c = 0; c < k; ++c) {
      double x = halton(i, kPrimes[c]) + shift[c];
      x -= std::floor(x);
      u[c] = radius * (2.0 * x - 1.0);
      r2 += u[c] * u[c];
    }
    if (r2 <= radius * radius) {
      pts.push_back(std::move(u));
      ++accepted;
    }
  }
  return pts;
}

CertificationReport verify_constants(const NonlinearSpec& spec, double radius, int samples,
                                     std::uint64_t seed) {
  if (!(radius > 0.0)) throw ConfigError("radius", "must be positive");
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  const int k = spec.k;
  const auto pts = certification_samples(k, radius, samples, seed);

  struct Acc {
    std::string name;
    double min = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    std::vector<double> witness;
    explicit Acc(std::string n) : name(std::move(n)) {}
    void add(double margin, double magnitude, const std::vector<double>& u) {
      scale = std::max(scale, std::abs(magnitude));
      if (margin < min) {
        min = margin;
        witness = u;
      }
    }
  };
  Acc dissipative{"dissipative"}, monotone{"monotone"}, growth{"growth"}, fprime{"fprime"},
      convex_lower{"convex_lower"}, convex_upper{"convex_upper"};

  CertificationReport report;
  report.radius = radius;
  report.samples = static_cast<int>(pts.size());
  report.seed = seed;

  std::vector<double> f(k), J(k * k);
  for (const auto& u : pts) {
    spec.eval(u, f);
    spec.jac(u, J);
    const double un = norm2(u);
    const double fn = norm2(f);
    double fu = 0.0;
    for (int i = 0; i < k; ++i) fu += f[i] * u[i];
    dissipative.add(fu + spec.C, std::max(std::abs(fu), spec.C), u);

    const double lmin = min_sym_eigenvalue(J, k);
    monotone.add(lmin + spec.K, std::max(std::abs(lmin), spec.K), u);

    const double envelope = 1.0 + std::pow(un, spec.p);
    growth.add(spec.C_growth * envelope - fn, spec.C_growth * envelope, u);
    report.fitted_growth = std::max(report.fitted_growth, fn / envelope);

    if (spec.fprime_cert) {
      const double rhs = *spec.fprime_cert * (1.0 + fn + un);
      fprime.add(rhs - operator_norm(J, k), rhs, u);
    }
    if (spec.convexity) {
      const auto& cc = *spec.convexity;
      const double psi = cc.psi(u);
      const double f2 = fn * fn;
      const double lower = cc.c2 * (psi - 1.0 - un * un);
      const double upper = cc.c1 * (psi + un * un + 1.0);
      convex_lower.add(f2 - lower, std::max(std::abs(lower), f2), u);
      convex_upper.add(upper - f2, std::max(std::abs(upper), f2), u);
    }
  }

  auto push = [&report](const Acc& a) {
    CertificateMargin m;
    m.name = a.name;
    m.min_margin = a.min;
    m.tolerance = 1e-9 * (1.0 + a.scale);
    m.witness = a.witness;
    m.pass = a.min >= -m.tolerance;
    report.pass = report.pass && m.pass;
    report.margins.push_back(std::move(m));
  };
  push(dissipative);
  push(monotone);
  push(growth);
  if (spec.fprime_cert) push(fprime);
  if (spec.convexity) {
    push(convex_lower);
    push(convex_upper);
  }
  return report;
}

double cutoff(double z, double R) {
  if (z <= R) return 1.0;
  if (z >= 2.0 * R) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (z - R) / R));
}

double cutoff_derivative(double z, double R) {
  if (z <= R || z >= 2.0 * R) return 0.0;
  return -0.5 * std::numbers::pi / R * std::sin(std::numbers::pi * (z - R) / R);
}

double ApproxSpec::sup_deviation(double radius, int samples) const {
  const auto pts = certification_samples(base.k, radius, samples, 0);
  std::vector<double> a(base.k), b(base.k);
  double sup = 0.0;
  for (const auto& u : pts) {
    base.eval(u, a);
    approx.eval(u, b);
    double d2 = 0.0;
    for (int i = 0; i < base.k; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    sup = std::max(sup, std::sqrt(d2));
  }
  return sup;
}

ApproxSpec approximate(const NonlinearSpec& spec, int n, std::optional<double> p1,
                       const ApproxOptions& options) {
  if (n < 1) throw ConfigError("n", "approximation index must be >= 1");
  const double exponent = p1.value_or(spec.p + 0.5);
  if (!(exponent > spec.p)) throw ConfigError("p1", "auxiliary growth exponent must exceed p");

  ApproxSpec out;
  out.base = spec;
  out.n = n;
  out.eps = 1.0 / n;
  out.p1 = exponent;

  double R = std::max(1.0, static_cast<double>(n));
  for (int doublings = 0;; ++doublings, R *= 2.0) {
    if (R > options.R_max) {
      throw SolverFailure("approximate: cut-off radius search exceeded R_max = " +
                          std::to_string(options.R_max));
    }
    auto data = std::make_shared<const Regularised>(Regularised{spec, out.eps, exponent, R});
    NonlinearSpec fn;
    fn.name = spec.name + "_approx";
    fn.params = {{"base", spec.name}, {"base_params", spec.params}, {"n", n}, {"p1", exponent}, {"R", R}};
    fn.k = spec.k;
    fn.eval = [data](std::span<const double> u, std::span<double> o) { data->eval(u, o); };
    fn.jac = [data](std::span<const double> u, std::span<double> o) { data->jac(u, o); };
    fn.C = spec.C;
    fn.K = spec.K;
    fn.p = exponent;
    fn.C_growth = std::numeric_limits<double>::max();

    const double ball = 4.0 * std::sqrt(R);
    CertificationReport first = verify_constants(fn, ball, options.samples, options.seed);
    if (first.find("dissipative")->pass && first.find("monotone")->pass) {
      fn.C_growth = first.fitted_growth;
      out.R = R;
      out.doublings = doublings;
      out.sigma = 2.0 * data->capped_psi1(3.0 * R);
      out.certification = verify_constants(fn, ball, options.samples, options.seed);
      out.approx = std::move(fn);
      return out;
    }
  }
}

GridFunction apply_pointwise(const NonlinearSpec& f, const GridFunction& u) {
  GridFunction out = u;
  const std::size_t pts = u.points();
  std::vector<double> val(f.k);
  for_each_point(u, [&](std::size_t i, std::span<const double> ui) {
    f.eval(ui, val);
    for (int c = 0; c < f.k; ++c) out.values[c * pts + i] = val[c];
  });
  return out;
}

SpectralField eval_on_field(const NonlinearSpec& f, const SpectralField& u) {
  const Grid& g = u.grid();
  if (f.k != g.k) throw DimensionError("nonlinearity and field have different component counts");
  if (f.identically_zero) return SpectralField(g);
  const GridFunction values = evaluate(u, g.dealias_points(), Nodes::interior);
  return project(apply_pointwise(f, values), g);
}

double nonlinear_l2_norm(const NonlinearSpec& f, const SpectralField& u) {
  const Grid& g = u.grid();
  if (f.k != g.k) throw DimensionError("nonlinearity and field have different component counts");
  if (f.identically_zero) return 0.0;
  const int M = g.dealias_points();
  const GridFunction fu = apply_pointwise(f, evaluate(u, M, Nodes::closed));
  const std::size_t pts = fu.points();
  std::vector<double> sq(pts, 0.0);
  for (int c = 0; c < g.k; ++c)
    for (std::size_t i = 0; i < pts; ++i) sq[i] += fu.values[c * pts + i] * fu.values[c * pts + i];
  return std::sqrt(integrate(sq, g.d, M, Nodes::closed, g.L));
}

double jac_quadratic_form(const NonlinearSpec& f, const SpectralField& u, const SpectralField& v) {
  const Grid& g = u.grid();
  if (!(g == v.grid())) throw DimensionError("jac_quadratic_form: fields live on different grids");
  if (f.k != g.k) throw DimensionError("nonlinearity and field have different component counts");
  if (f.identically_zero) return 0.0;
  const int M = g.dealias_points();
  const GridFunction uu = evaluate(u, M, Nodes::closed);
  const GridFunction vv = evaluate(v, M, Nodes::closed);
  const std::size_t pts = uu.points();
  const int k = g.k;
  std::vector<double> J(k * k), integrand(pts);
  for_each_point(uu, [&](std::size_t i, std::span<const double> ui) {
    f.jac(ui, J);
    double s = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) s += J[a * k + b] * vv.values[b * pts + i] * vv.values[a * pts + i];
    integrand[i] = s;
  });
  return integrate(integrand, g.d, M, Nodes::closed, g.L);
}

GradientForm gradient_form(const NonlinearSpec& f, const SpectralField& u) {
  const Grid& g = u.grid();
  if (f.k != g.k) throw DimensionError("nonlinearity and field have different component counts");
  if (f.identically_zero) return {};
  const int M = g.dealias_points();
  const GridFunction uu = evaluate(u, M, Nodes::closed);
  std::vector<GridFunction> grads;
  for (int axis = 0; axis < g.d; ++axis) {
    std::array<int, 3> deriv{0, 0, 0};
    deriv[axis] = 1;
    grads.push_back(evaluate(u, M, Nodes::closed, deriv));
  }
  const std::size_t pts = uu.points();
  const int k = g.k;
  std::vector<double> J(k * k), signed_part(pts), abs_part(pts);
  for_each_point(uu, [&](std::size_t i, std::span<const double> ui) {
    f.jac(ui, J);
    double s = 0.0;
    for (const auto& gr : grads)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) s += J[a * k + b] * gr.values[b * pts + i] * gr.values[a * pts + i];
    signed_part[i] = s;
    abs_part[i] = std::abs(s);
  });
  return {integrate(signed_part, g.d, M, Nodes::closed, g.L), integrate(abs_part, g.d, M, Nodes::closed, g.L)};
}

double max_jacobian_norm(const NonlinearSpec& f, const SpectralField& u) {
  const Grid& g = u.grid();
  if (f.identically_zero) return 0.0;
  const GridFunction uu = evaluate(u, g.dealias_points(), Nodes::interior);
  std::vector<double> J(g.k * g.k);
  double mx = 0.0;
  for_each_point(uu, [&](std::size_t, std::span<const double> ui) {
    f.jac(ui, J);
    mx = std::max(mx, operator_norm(J, g.k));
  });
  return mx;
}

}  // namespace monodiss
