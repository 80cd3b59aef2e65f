#pragma once

// Closed-form exponents in exact rational arithmetic. Real inputs are read
// through their shortest decimal representation, so 0.2 means 1/5.

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace monodiss {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational equal to the shortest decimal that round-trips `x`.
Rational exact(double x);

struct Exponent {
  enum class Kind { finite, infinite, undefined };
  Kind kind = Kind::undefined;
  Rational value = 0;
  std::string hypothesis;  ///< condition under which the formula applies

  static Exponent finite(Rational v, std::string hyp = {});
  static Exponent infinite(std::string hyp = {});
  static Exponent undefined(std::string hyp);

  bool defined() const { return kind != Kind::undefined; }
  double to_double() const;  ///< NaN when undefined, +inf when infinite
  std::string exact_string() const;  ///< "p/q", "inf" or "undefined"
};

void to_json(nlohmann::json& j, const Exponent& e);

struct CriticalExponents {
  int d = 3;
  Rational alpha = 1;
  Exponent energy;  ///< 1 + 4/d
  Exponent h1;      ///< 1 + 4/(d-2), d > 2
  Exponent D;       ///< 1 + 4/(d-4), d > 4
  Exponent frac;    ///< 1 + 4 alpha/(d - 4 alpha), alpha in (0, 1], d > 4 alpha
};

CriticalExponents critical_exponents(int d, double alpha = 1.0);

struct SmoothingExponents {
  int d = 3;
  Rational p1 = 3;
  Exponent s;        ///< 4 / (d(p1-1) + 2)
  Exponent q1;       ///< (d(p1-1) + 2) / (2 p1)
  Exponent N_theory; ///< minimal real N with 2(N-1)/(2-s) >= N, i.e. 2/s
  Rational holder_residual = 0;  ///< 1/q1 + (2-s)(1/2 - 1/d) - 1
  bool range_ok = false;         ///< 0 < s < 2 and 1 < q1
};

SmoothingExponents smoothing_exponents(int d, double p1);

enum class BootstrapVerdict { reaches_target, stalls };

std::string to_string(BootstrapVerdict v);

struct BootstrapResult {
  Exponent q0;
  std::vector<Exponent> sequence;  ///< q_0, q_1, ... as computed
  BootstrapVerdict verdict = BootstrapVerdict::stalls;
  int steps = 0;  ///< index of the iterate achieving the target
  bool first_step_increasing = false;
  bool criterion_increasing = false;  ///< p - q0 (2 - kappa)/d < 1
};

/// q_{k+1} = s_k d / (d - s_k (2 - kappa)), s_k = min(q, q_k / p); a
/// nonpositive denominator gives infinity. The target is reached when s_k
/// saturates at q (q_k >= p q) or an iterate is infinite. The iteration
/// stops as STALLS at the first non-increasing step or after max_iter.
BootstrapResult bootstrap_from_seed(int d, double p, double q, double kappa, const Rational& q0, int max_iter);

/// Seeds with q0 = d(r+2)/(d-r-4); throws ConfigError when d <= r + 4.
BootstrapResult bootstrap(int d, double p, double q, double kappa, double r, int max_iter);

/// eps_max = (2-kappa)(r+2)/(d-r-4) - 4/(d-4), clamped at 0; undefined
/// unless d > max(4, r+4).
Exponent epsilon_window(int d, double r, double kappa);

/// r = d(q-2)/(d-q), defined for 2 < q < d.
Exponent regularity_exponent(int d, double q);
/// q < d - d(d-2)/(kappa+d) with d > 2.
bool regularity_admissible(int d, double q, double kappa);

struct ExponentQuery {
  int d = 3;
  double alpha = 1.0;
  double p1 = 3.0;
  double p = 3.0;
  double q = 2.0;
  double kappa = 0.5;
  double r = 0.2;
  double q_reg = 2.2;
  int max_iter = 1000;
};

/// Full table as JSON (every entry with its exact value and hypothesis).
nlohmann::json exponent_table(const ExponentQuery& query);
/// The same table as aligned text.
std::string exponent_table_text(const nlohmann::json& table);

}  // namespace monodiss
