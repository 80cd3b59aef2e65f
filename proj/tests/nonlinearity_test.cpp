#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "monodiss/error.hpp"
#include "monodiss/nonlinearity.hpp"
#include "monodiss/rng.hpp"

using namespace monodiss;
using nlohmann::json;
using std::numbers::pi;

namespace {

std::vector<double> call(const NonlinearSpec& f, std::vector<double> u) {
  std::vector<double> out(f.k);
  f.eval(u, out);
  return out;
}

std::vector<NonlinearSpec> all_builtins() {
  return {builtin("cubic_scalar", {{"lambda", 1.0}}), builtin("ginzburg_landau"),
          builtin("polynomial_odd", {{"p", 5.0}}), builtin("supercritical_monotone", {{"p", 4.0}, {"d", 2}}),
          builtin("linear", {{"matrix", {{2.0, 1.0}, {-1.0, 0.5}}}})};
}

}  // namespace

TEST(Builtin, CubicScalarConstants) {
  const NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  EXPECT_DOUBLE_EQ(f.C, 0.25);
  EXPECT_DOUBLE_EQ(f.K, 1.0);
  EXPECT_DOUBLE_EQ(f.p, 3.0);
  EXPECT_DOUBLE_EQ(call(f, {2.0})[0], 6.0);
}

TEST(Builtin, GinzburgLandauConstants) {
  const NonlinearSpec f = builtin("ginzburg_landau");
  EXPECT_EQ(f.k, 2);
  EXPECT_DOUBLE_EQ(f.K, 1.0);
  const auto v = call(f, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
}

TEST(Builtin, PolynomialOddConstants) {
  const NonlinearSpec f = builtin("polynomial_odd", {{"p", 5.0}});
  EXPECT_EQ(f.C, 0.0);
  EXPECT_EQ(f.K, 0.0);
  EXPECT_EQ(f.p, 5.0);
  EXPECT_DOUBLE_EQ(call(f, {-2.0})[0], -32.0);
}

TEST(Builtin, UnknownNameIsConfigError) {
  EXPECT_THROW(builtin("quartic"), ConfigError);
  EXPECT_THROW(builtin("supercritical_monotone", {{"p", 2.0}, {"d", 2}}), ConfigError);
}

TEST(Builtin, FromJson) {
  const NonlinearSpec f = nonlinearity_from_json(json{{"name", "cubic_scalar"}, {"params", {{"lambda", 2.0}}}});
  EXPECT_DOUBLE_EQ(f.K, 2.0);
  EXPECT_DOUBLE_EQ(f.C, 1.0);
}

TEST(Verify, BuiltinsPass) {
  for (const auto& f : all_builtins()) {
    const CertificationReport r = verify_constants(f, 10.0, 4000, 3);
    EXPECT_TRUE(r.pass) << f.name;
    for (const auto& m : r.margins) EXPECT_GE(m.min_margin, -m.tolerance) << f.name << " " << m.name;
  }
}

TEST(Verify, UnderclaimedKFailsNearOrigin) {
  NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  f.K = 0.5;
  const CertificationReport r = verify_constants(f, 10.0, 1000, 1);
  EXPECT_FALSE(r.pass);
  const CertificateMargin* m = r.find("monotone");
  ASSERT_NE(m, nullptr);
  EXPECT_FALSE(m->pass);
  EXPECT_NEAR(m->min_margin, -0.5, 1e-12);
  EXPECT_LT(std::abs(m->witness[0]), 1e-6);
}

TEST(Verify, GinzburgLandauConvexitySandwich) {
  // Envelope fit: with s = |u|^2, |f|^2 = s(s-1)^2 = s^3 - 2s^2 + s.
  // Upper: s^3 - 2s^2 + s <= s^3 + s + 1 for all s >= 0, so c1 = 1.
  // Lower: c2 (s^3 - 1 - s) <= s^3 - 2s^2 + s; at c2 = 1/4 the gap
  // 3/4 s^3 - 2s^2 + 5/4 s + 1/4 has minimum > 0 on s >= 0.
  const NonlinearSpec f = builtin("ginzburg_landau");
  ASSERT_TRUE(f.convexity.has_value());
  EXPECT_DOUBLE_EQ(f.convexity->c1, 1.0);
  EXPECT_DOUBLE_EQ(f.convexity->c2, 0.25);
  double gap_min = 1e300;
  for (double s = 0; s <= 100; s += 1e-3) gap_min = std::min(gap_min, 0.75 * s * s * s - 2 * s * s + 1.25 * s + 0.25);
  EXPECT_GT(gap_min, 0.0);
  EXPECT_TRUE(verify_constants(f, 20.0, 20000, 5).pass);
  NonlinearSpec bad = f;
  bad.convexity->c2 = 1.0;
  EXPECT_FALSE(verify_constants(bad, 20.0, 20000, 5).pass);
}

TEST(Verify, DeterministicForSeed) {
  const NonlinearSpec f = builtin("ginzburg_landau");
  const auto a = verify_constants(f, 5.0, 500, 42);
  const auto b = verify_constants(f, 5.0, 500, 42);
  ASSERT_EQ(a.margins.size(), b.margins.size());
  for (std::size_t i = 0; i < a.margins.size(); ++i) EXPECT_EQ(a.margins[i].min_margin, b.margins[i].min_margin);
}

TEST(Jacobian, MatchesCentralDifferences) {
  SplitMix64 rng(17);
  for (const auto& f : all_builtins()) {
    const int k = f.k;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> u(k);
      for (double& x : u) x = rng.uniform(-3.0, 3.0);
      std::vector<double> J(k * k);
      f.jac(u, J);
      for (int j = 0; j < k; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(u[j]));
        auto up = u, dn = u;
        up[j] += h;
        dn[j] -= h;
        const auto fp = call(f, up), fm = call(f, dn);
        for (int i = 0; i < k; ++i) {
          const double fd = (fp[i] - fm[i]) / (2 * h);
          EXPECT_NEAR(J[i * k + j], fd, 1e-5 * (1.0 + std::abs(fd))) << f.name;
        }
      }
    }
  }
}

TEST(Monotone, ShiftedMapIsMonotone) {
  SplitMix64 rng(23);
  for (const auto& f : all_builtins()) {
    const int k = f.k;
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> u(k), v(k);
      for (int i = 0; i < k; ++i) {
        u[i] = rng.uniform(-4.0, 4.0);
        v[i] = rng.uniform(-4.0, 4.0);
      }
      const auto fu = call(f, u), fv = call(f, v);
      double s = 0, scale = 0;
      for (int i = 0; i < k; ++i) {
        const double w = u[i] - v[i];
        s += (fu[i] - fv[i] + f.K * w) * w;
        scale += std::abs(fu[i] - fv[i]) * std::abs(w) + f.K * w * w;
      }
      EXPECT_GE(s, -1e-12 * (1 + scale)) << f.name;
    }
  }
}

TEST(Cutoff, RampShape) {
  EXPECT_EQ(cutoff(0.5, 1.0), 1.0);
  EXPECT_EQ(cutoff(1.0, 1.0), 1.0);
  EXPECT_NEAR(cutoff(1.5, 1.0), 0.5, 1e-15);
  EXPECT_EQ(cutoff(2.0, 1.0), 0.0);
  const double h = 1e-6;
  EXPECT_NEAR(cutoff_derivative(1.3, 1.0), (cutoff(1.3 + h, 1.0) - cutoff(1.3 - h, 1.0)) / (2 * h), 1e-8);
}

TEST(Approximate, InnerRegimeAddsPotentialGradient) {
  const NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  const ApproxSpec a = approximate(f, 4, 3.5, {.samples = 1000});
  EXPECT_GE(a.R, 4.0);
  for (double u : {-1.5, 0.3, 1.9}) {
    ASSERT_LE(u * u, a.R);
    const double expected = u * u * u - u + 0.25 * 4.5 * std::pow(std::abs(u), 2.5) * u;
    EXPECT_NEAR(call(a.approx, {u})[0], expected, 1e-12 * (1 + std::abs(expected)));
  }
}

TEST(Approximate, OuterRegimeIsLinear) {
  const NonlinearSpec f = builtin("ginzburg_landau");
  const ApproxSpec a = approximate(f, 2, 3.5, {.samples = 1000});
  const double r = std::sqrt(3.0 * a.R) * 1.01;
  for (double ang : {0.1, 1.0, 2.5}) {
    for (double scale : {1.0, 3.0}) {
      const std::vector<double> u{scale * r * std::cos(ang), scale * r * std::sin(ang)};
      const auto v = call(a.approx, u);
      EXPECT_NEAR(v[0], a.eps * a.sigma * u[0], 1e-9 * std::abs(v[0]));
      EXPECT_NEAR(v[1], a.eps * a.sigma * u[1], 1e-9 * std::abs(v[1]) + 1e-12);
      std::vector<double> J(4);
      a.approx.jac(u, J);
      EXPECT_NEAR(J[0], a.eps * a.sigma, 1e-9 * a.eps * a.sigma);
      EXPECT_NEAR(J[1], 0.0, 1e-9 * a.eps * a.sigma);
    }
  }
}

TEST(Approximate, SigmaIsCappedPotentialSlope) {
  // sigma = 2 Psi'_R(3R) with Psi'_R(s) = Psi'(0) + int_0^s theta~(t) Psi''(t) dt,
  // theta~ = 1 below 2R, cosine ramp to 0 at 3R. Psi(z) = z^{(p1+1)/2}.
  const NonlinearSpec f = builtin("polynomial_odd", {{"p", 3.0}});
  const ApproxSpec a = approximate(f, 1, 3.5, {.samples = 500});
  const double e = 2.25, R = a.R;
  auto psi2 = [&](double t) { return e * (e - 1) * std::pow(t, e - 2); };
  double integral = e * std::pow(2 * R, e - 1);
  const int n = 200000;
  const double h = R / n;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * R + (i + 0.5) * h;
    integral += h * 0.5 * (1 + std::cos(pi * (t - 2 * R) / R)) * psi2(t);
  }
  EXPECT_NEAR(a.sigma, 2 * integral, 1e-8 * a.sigma);
}

TEST(Approximate, UniformConstantsAcrossN) {
  const NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  double c1 = 0, cmax = 0;
  for (int n : {1, 4, 16, 64}) {
    const ApproxSpec a = approximate(f, n, 3.5, {.samples = 2000});
    EXPECT_TRUE(a.certification.pass) << n;
    EXPECT_EQ(a.approx.C, 0.25);
    EXPECT_EQ(a.approx.K, 1.0);
    if (n == 1) c1 = a.approx.C_growth;
    cmax = std::max(cmax, a.approx.C_growth);
  }
  EXPECT_LE(cmax, 2 * c1);
}

TEST(Approximate, ConvergesLocallyAtRateEps) {
  const NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  double prev = 1e300;
  for (int n : {1, 4, 16, 64}) {
    const ApproxSpec a = approximate(f, n, 3.5, {.samples = 500});
    const double dev = a.sup_deviation(1.0);
    EXPECT_LT(dev, prev);
    EXPECT_NEAR(dev, 4.5 / n, 1e-6);  // eps (p1+1) |u|^{p1} at |u| = 1
    prev = dev;
  }
}

TEST(Approximate, RejectsBadArguments) {
  const NonlinearSpec f = builtin("cubic_scalar");
  EXPECT_THROW(approximate(f, 0), ConfigError);
  EXPECT_THROW(approximate(f, 1, 2.5), ConfigError);
}

TEST(FieldForms, LinearQuadraticFormIsExact) {
  const Grid g = make_grid(1, 1.0, 12, 2);
  const NonlinearSpec f = builtin("linear", {{"matrix", {{2.0, 1.0}, {-1.0, 0.5}}}});
  SplitMix64 rng(4);
  SpectralField u(g), v(g);
  for (double& c : v.coeffs()) c = rng.normal();
  for (double& c : u.coeffs()) c = rng.normal();
  // (A v, v) = 2|v0|^2 + 0.5|v1|^2 (antisymmetric part drops)
  double expected = 0;
  for (std::size_t m = 0; m < g.modes(); ++m) expected += 2 * v.at(0, m) * v.at(0, m) + 0.5 * v.at(1, m) * v.at(1, m);
  EXPECT_NEAR(jac_quadratic_form(f, u, v), expected, 1e-11 * expected);
}

TEST(FieldForms, CubicQuadraticFormAgainstFineGrid) {
  const Grid g = make_grid(1, 1.0, 16, 1);
  const NonlinearSpec f = builtin("cubic_scalar", {{"lambda", 1.0}});
  SpectralField u(g), v(g);
  u.at(0, 0) = 1.0;
  v.at(0, 1) = 0.7;
  v.at(0, 4) = 0.2;
  // oracle: midpoint rule on a 4x finer grid of the physical functions
  const int M = 4 * (2 * g.N + 1);
  const double h = 1.0 / M;
  double oracle = 0;
  for (int j = 0; j < M; ++j) {
    const double x = (j + 0.5) * h;
    const double uu = std::sqrt(2.0) * std::sin(pi * x);
    const double vv = std::sqrt(2.0) * (0.7 * std::sin(2 * pi * x) + 0.2 * std::sin(5 * pi * x));
    oracle += h * (3 * uu * uu - 1) * vv * vv;
  }
  EXPECT_NEAR(jac_quadratic_form(f, u, v), oracle, 1e-6);
}

TEST(FieldForms, EvalOnFieldIsDealiased) {
  // sin^3 = (3 sin x - sin 3x)/4 is represented exactly.
  const Grid g = make_grid(1, 1.0, 8, 1);
  const NonlinearSpec f = builtin("polynomial_odd", {{"p", 3.0}});
  SpectralField u(g);
  u.at(0, 0) = 1.0 / std::sqrt(2.0);
  const SpectralField fu = eval_on_field(f, u);
  const double s = 1.0 / std::sqrt(2.0);  // sin = s * phi
  EXPECT_NEAR(fu.at(0, 0), 0.75 * s, 1e-14);
  EXPECT_NEAR(fu.at(0, 2), -0.25 * s, 1e-14);
  for (std::size_t m : {1u, 3u, 4u, 5u, 6u, 7u}) EXPECT_NEAR(fu.at(0, m), 0.0, 1e-14);
}
