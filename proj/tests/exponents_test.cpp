#include <cmath>

#include <gtest/gtest.h>

#include "monodiss/error.hpp"
#include "monodiss/exponents.hpp"
#include "monodiss/rng.hpp"

using namespace monodiss;

TEST(Exact, ShortestDecimal) {
  EXPECT_EQ(exact(0.2), Rational(1, 5));
  EXPECT_EQ(exact(4.9), Rational(49, 10));
  EXPECT_EQ(exact(-1.5e-3), Rational(-3, 2000));
  EXPECT_EQ(exact(1e22), Rational(boost::multiprecision::cpp_int("10000000000000000000000")));
  EXPECT_EQ(exact(3.0), Rational(3));
}

TEST(Critical, KnownValues) {
  EXPECT_EQ(critical_exponents(5, 1.0).D.value, 5);
  const CriticalExponents c3 = critical_exponents(3, 1.0);
  EXPECT_EQ(c3.h1.value, 5);
  EXPECT_EQ(c3.energy.value, Rational(7, 3));
  EXPECT_EQ(critical_exponents(3, 0.5).frac.value, 3);
}

TEST(Critical, HypothesesMarkUndefined) {
  EXPECT_FALSE(critical_exponents(4, 1.0).D.defined());
  EXPECT_FALSE(critical_exponents(2, 1.0).h1.defined());
  EXPECT_FALSE(critical_exponents(3, 1.0).frac.defined());  // d <= 4 alpha
  EXPECT_FALSE(critical_exponents(5, 1.5).frac.defined());
  EXPECT_TRUE(std::isnan(critical_exponents(4, 1.0).D.to_double()));
}

TEST(Critical, FractionalAtAlphaOneIsD) {
  for (int d = 5; d <= 40; ++d) {
    const CriticalExponents c = critical_exponents(d, 1.0);
    EXPECT_EQ(c.frac.value, c.D.value) << d;
  }
}

TEST(Smoothing, KnownValues) {
  const SmoothingExponents a = smoothing_exponents(3, 3.0);
  EXPECT_EQ(a.s.value, Rational(1, 2));
  EXPECT_EQ(a.q1.value, Rational(4, 3));
  EXPECT_EQ(a.holder_residual, 0);
  EXPECT_TRUE(a.range_ok);
  const SmoothingExponents b = smoothing_exponents(5, 5.0);
  EXPECT_EQ(b.s.value, Rational(2, 11));
  EXPECT_EQ(b.q1.value, Rational(11, 5));
  EXPECT_EQ(b.holder_residual, 0);
}

TEST(Smoothing, HolderIdentityHoldsEverywhere) {
  SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + static_cast<int>(rng.next() % 8);
    const double p1 = rng.uniform(1.01, 9.0);
    EXPECT_EQ(smoothing_exponents(d, p1).holder_residual, 0);
  }
}

TEST(Smoothing, MinimalNSatisfiesConstraint) {
  for (int d : {1, 2, 3}) {
    const SmoothingExponents s = smoothing_exponents(d, 3.5);
    const Rational N = s.N_theory.value;
    EXPECT_EQ(2 * (N - 1) / (2 - s.s.value), N);
    EXPECT_EQ(N, (d * Rational(5, 2) + 2) / 2);
  }
}

TEST(Bootstrap, JumpsToInfinityInOneStep) {
  const BootstrapResult b = bootstrap(5, 4.9, 3.0, 0.01, 0.2, 100);
  EXPECT_EQ(b.q0.value, Rational(55, 4));
  ASSERT_EQ(b.sequence.size(), 2u);
  EXPECT_EQ(b.sequence[1].kind, Exponent::Kind::infinite);
  EXPECT_EQ(b.verdict, BootstrapVerdict::reaches_target);
  EXPECT_EQ(b.steps, 1);
  EXPECT_TRUE(b.criterion_increasing);
}

TEST(Bootstrap, DecreasingSeedStalls) {
  const BootstrapResult b = bootstrap_from_seed(5, 6.0, 3.0, 0.0, Rational(2), 100);
  ASSERT_EQ(b.sequence.size(), 2u);
  EXPECT_EQ(b.sequence[1].value, Rational(10, 26));
  EXPECT_EQ(b.verdict, BootstrapVerdict::stalls);
  EXPECT_FALSE(b.criterion_increasing);
}

TEST(Bootstrap, SeedNeedsRoom) {
  EXPECT_THROW(bootstrap(4, 3.0, 3.0, 0.1, 0.2, 10), ConfigError);
}

TEST(Bootstrap, CriterionMatchesVerdictOnSweep) {
  SplitMix64 rng(2024);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 5 + static_cast<int>(rng.next() % 6);
    const double p = rng.uniform(1.05, 8.0);
    const double kappa = rng.uniform(0.0, 0.99);
    const double q = rng.uniform(d / 2.0 + 0.01, 2.0 * d);
    const Rational q0 = exact(rng.uniform(0.5, 0.999 * p * q));  // below the target
    const BootstrapResult b = bootstrap_from_seed(d, p, q, kappa, q0, 100000);
    const bool reached_or_rising =
        b.verdict == BootstrapVerdict::reaches_target && (b.first_step_increasing || b.steps == 0);
    if (b.steps == 0) continue;  // seed already at target: no step taken
    if (b.criterion_increasing != b.first_step_increasing) ++mismatches;
    if (b.criterion_increasing != reached_or_rising) ++mismatches;
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(EpsilonWindow, KnownValues) {
  EXPECT_EQ(epsilon_window(5, 0.2, 0.0).value, Rational(3, 2));
  EXPECT_EQ(epsilon_window(5, 0.0, 0.0).value, 0);
  EXPECT_NEAR(epsilon_window(6, 0.2, 0.1).to_double(), 1.9 * 2.2 / 1.8 - 2, 1e-15);
  EXPECT_FALSE(epsilon_window(4, 0.2, 0.0).defined());
  EXPECT_FALSE(epsilon_window(5, 1.5, 0.0).defined());
}

TEST(EpsilonWindow, MonotoneInRAndKappa) {
  for (int d : {5, 6, 8}) {
    Rational prev = -1;
    for (double r = 0.0; r < 0.9; r += 0.05) {
      const Rational e = epsilon_window(d, r, 0.1).value;
      EXPECT_GE(e, prev);
      prev = e;
    }
    prev = 100;
    for (double k = 0.0; k < 1.0; k += 0.05) {
      const Rational e = epsilon_window(d, 0.5, k).value;
      EXPECT_LE(e, prev);
      prev = e;
    }
  }
}

TEST(Regularity, ExponentAndAdmissibility) {
  EXPECT_EQ(regularity_exponent(3, 2.2).value, Rational(3, 4));
  EXPECT_TRUE(regularity_admissible(3, 2.2, 1.0));
  EXPECT_FALSE(regularity_admissible(3, 2.25, 1.0));
  EXPECT_FALSE(regularity_admissible(2, 2.1, 1.0));
  EXPECT_FALSE(regularity_exponent(3, 3.5).defined());
}

TEST(Table, JsonAndText) {
  const auto t = exponent_table({.d = 5, .alpha = 1.0, .p1 = 5.0, .p = 4.9, .q = 3.0, .kappa = 0.01, .r = 0.2});
  EXPECT_EQ(t["p_crit_D"]["exact"], "5");
  EXPECT_EQ(t["bootstrap"]["verdict"], "REACHES_TARGET");
  EXPECT_EQ(t["epsilon_window"]["status"], "finite");
  const std::string text = exponent_table_text(t);
  EXPECT_NE(text.find("p_crit_D"), std::string::npos);
  const auto t4 = exponent_table({.d = 4});
  EXPECT_TRUE(t4["p_crit_D"]["value"].is_null());
  EXPECT_EQ(t4["bootstrap"]["status"], "undefined");
}
