#include "monodiss/exponents.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "monodiss/error.hpp"

namespace monodiss {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(int e) {
  cpp_int r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational min_r(const Rational& a, const Rational& b) { return a < b ? a : b; }

std::string str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

Rational exact(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact: non-finite input");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  const std::string s(buf, res.ptr);
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '-') neg = true, ++i;
  std::string digits;
  int frac = 0;
  bool after_point = false;
  int exp10 = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.') {
      after_point = true;
    } else if (c == 'e' || c == 'E') {
      exp10 = std::stoi(s.substr(i + 1));
      break;
    } else {
      digits.push_back(c);
      if (after_point) ++frac;
    }
  }
  // a leading zero would make cpp_int parse the string as octal
  const auto nz = digits.find_first_not_of('0');
  const cpp_int num(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  const int shift = exp10 - frac;
  Rational r = shift >= 0 ? Rational(num * pow10(shift)) : Rational(num, pow10(-shift));
  return neg ? Rational(-r) : r;
}

Exponent Exponent::finite(Rational v, std::string hyp) {
  Exponent e;
  e.kind = Kind::finite;
  e.value = std::move(v);
  e.hypothesis = std::move(hyp);
  return e;
}

Exponent Exponent::infinite(std::string hyp) {
  Exponent e;
  e.kind = Kind::infinite;
  e.hypothesis = std::move(hyp);
  return e;
}

Exponent Exponent::undefined(std::string hyp) {
  Exponent e;
  e.kind = Kind::undefined;
  e.hypothesis = std::move(hyp);
  return e;
}

double Exponent::to_double() const {
  switch (kind) {
    case Kind::finite: return value.convert_to<double>();
    case Kind::infinite: return std::numeric_limits<double>::infinity();
    case Kind::undefined: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string Exponent::exact_string() const {
  switch (kind) {
    case Kind::finite: return str(value);
    case Kind::infinite: return "inf";
    case Kind::undefined: break;
  }
  return "undefined";
}

void to_json(nlohmann::json& j, const Exponent& e) {
  const char* kind = e.kind == Exponent::Kind::finite ? "finite" : e.kind == Exponent::Kind::infinite ? "infinite" : "undefined";
  j = {{"value", number_or_null(e.to_double())}, {"exact", e.exact_string()}, {"status", kind},
       {"hypothesis", e.hypothesis}};
}

CriticalExponents critical_exponents(int d, double alpha) {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  CriticalExponents out;
  out.d = d;
  const Rational D(d);
  out.energy = Exponent::finite(1 + Rational(4) / D, "d >= 1");
  out.h1 = d > 2 ? Exponent::finite(1 + Rational(4) / (D - 2), "d > 2") : Exponent::undefined("d > 2");
  out.D = d > 4 ? Exponent::finite(1 + Rational(4) / (D - 4), "d > 4") : Exponent::undefined("d > 4");
  if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha)) {
    out.frac = Exponent::undefined("0 < alpha <= 1");
    return out;
  }
  out.alpha = exact(alpha);
  const Rational den = D - 4 * out.alpha;
  out.frac = den > 0 ? Exponent::finite(1 + 4 * out.alpha / den, "d > 4 alpha") : Exponent::undefined("d > 4 alpha");
  return out;
}

SmoothingExponents smoothing_exponents(int d, double p1) {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (!(p1 > 1.0)) throw ConfigError("p1", "must exceed 1");
  SmoothingExponents out;
  out.d = d;
  out.p1 = exact(p1);
  const Rational D(d);
  const Rational base = D * (out.p1 - 1) + 2;
  const Rational s = Rational(4) / base;
  const Rational q1 = base / (2 * out.p1);
  out.s = Exponent::finite(s, "p1 > 1");
  out.q1 = Exponent::finite(q1, "p1 > 1");
  out.N_theory = Exponent::finite(Rational(2) / s, "0 < s < 2");
  out.holder_residual = 1 / q1 + (2 - s) * (Rational(1, 2) - 1 / D) - 1;
  out.range_ok = s > 0 && s < 2 && q1 > 1;
  return out;
}

std::string to_string(BootstrapVerdict v) {
  return v == BootstrapVerdict::reaches_target ? "REACHES_TARGET" : "STALLS";
}

BootstrapResult bootstrap_from_seed(int d, double p, double q, double kappa, const Rational& q0, int max_iter) {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (!(p > 1.0)) throw ConfigError("p", "must exceed 1");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw ConfigError("kappa", "must lie in [0, 1)");
  if (!(q > 0.0)) throw ConfigError("q", "must be positive");
  if (max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
  const Rational D(d), P = exact(p), Q = exact(q), c = 2 - exact(kappa);

  BootstrapResult out;
  out.q0 = Exponent::finite(q0, "seed");
  out.sequence.push_back(out.q0);
  out.criterion_increasing = P - q0 * c / D < 1;

  Rational qk = q0;
  for (int k = 0; k < max_iter; ++k) {
    if (qk >= P * Q) {
      out.verdict = BootstrapVerdict::reaches_target;
      out.steps = k;
      return out;
    }
    const Rational s = min_r(Q, qk / P);
    const Rational den = D - s * c;
    if (den <= 0) {
      out.sequence.push_back(Exponent::infinite("nonpositive denominator"));
      if (k == 0) out.first_step_increasing = true;
      out.verdict = BootstrapVerdict::reaches_target;
      out.steps = k + 1;
      return out;
    }
    const Rational next = s * D / den;
    out.sequence.push_back(Exponent::finite(next));
    if (k == 0) out.first_step_increasing = next > qk;
    if (next <= qk) {
      out.verdict = BootstrapVerdict::stalls;
      out.steps = k + 1;
      return out;
    }
    qk = next;
  }
  out.verdict = qk >= P * Q ? BootstrapVerdict::reaches_target : BootstrapVerdict::stalls;
  out.steps = max_iter;
  return out;
}

BootstrapResult bootstrap(int d, double p, double q, double kappa, double r, int max_iter) {
  const Rational R = exact(r), D(d);
  if (!(D > R + 4)) throw ConfigError("r", "seed q0 = d(r+2)/(d-r-4) needs d > r + 4");
  return bootstrap_from_seed(d, p, q, kappa, D * (R + 2) / (D - R - 4), max_iter);
}

Exponent epsilon_window(int d, double r, double kappa) {
  const Rational R = exact(r), D(d), K = exact(kappa);
  if (!(D > 4 && D > R + 4)) return Exponent::undefined("d > max(4, r + 4)");
  Rational eps = (2 - K) * (R + 2) / (D - R - 4) - Rational(4) / (D - 4);
  if (eps < 0) eps = 0;
  return Exponent::finite(eps, "d > max(4, r + 4)");
}

Exponent regularity_exponent(int d, double q) {
  const Rational D(d), Q = exact(q);
  if (!(Q > 2 && Q < D)) return Exponent::undefined("2 < q < d");
  return Exponent::finite(D * (Q - 2) / (D - Q), "2 < q < d");
}

bool regularity_admissible(int d, double q, double kappa) {
  if (d <= 2 || !(kappa > 0.0)) return false;
  const Rational D(d), Q = exact(q), K = exact(kappa);
  return Q > 2 && Q < D - D * (D - 2) / (K + D);
}

nlohmann::json exponent_table(const ExponentQuery& q) {
  using nlohmann::json;
  const CriticalExponents c = critical_exponents(q.d, q.alpha);
  json t;
  t["input"] = {{"d", q.d}, {"alpha", q.alpha}, {"p1", q.p1}, {"p", q.p}, {"q", q.q}, {"kappa", q.kappa},
                {"r", q.r}, {"q_reg", q.q_reg}, {"max_iter", q.max_iter}};
  t["p_crit_energy"] = c.energy;
  t["p_crit_h1"] = c.h1;
  t["p_crit_D"] = c.D;
  t["p_crit_frac"] = c.frac;
  if (q.p1 > 1.0) {
    const SmoothingExponents s = smoothing_exponents(q.d, q.p1);
    t["s"] = s.s;
    t["q1"] = s.q1;
    t["N_theory"] = s.N_theory;
    t["holder_residual"] = str(s.holder_residual);
    t["smoothing_range_ok"] = s.range_ok;
  }
  const Exponent r = regularity_exponent(q.d, q.q_reg);
  t["r_regularity"] = r;
  t["regularity_admissible"] = regularity_admissible(q.d, q.q_reg, q.kappa);
  t["epsilon_window"] = epsilon_window(q.d, q.r, q.kappa);
  if (q.d > q.r + 4 && q.p > 1.0 && q.kappa >= 0.0 && q.kappa < 1.0) {
    const BootstrapResult b = bootstrap(q.d, q.p, q.q, q.kappa, q.r, q.max_iter);
    json seq = json::array();
    for (const auto& e : b.sequence) seq.push_back(e.exact_string());
    t["bootstrap"] = {{"q0", b.q0},
                      {"sequence", seq},
                      {"verdict", to_string(b.verdict)},
                      {"steps", b.steps},
                      {"first_step_increasing", b.first_step_increasing},
                      {"criterion_increasing", b.criterion_increasing}};
  } else {
    t["bootstrap"] = {{"status", "undefined"}, {"hypothesis", "d > r + 4, p > 1, 0 <= kappa < 1"}};
  }
  return t;
}

std::string exponent_table_text(const nlohmann::json& table) {
  std::ostringstream os;
  auto row = [&os](const std::string& name, const std::string& value, const std::string& exact_v,
                   const std::string& hyp) {
    os << std::left << std::setw(22) << name << std::setw(24) << value << std::setw(24) << exact_v << hyp << '\n';
  };
  row("quantity", "value", "exact", "hypothesis");
  for (const auto& [key, v] : table.items()) {
    if (key == "input" || key == "bootstrap") continue;
    if (v.is_object() && v.contains("exact")) {
      std::string value = v["value"].is_null() ? v["status"].get<std::string>() : v["value"].dump();
      row(key, value, v["exact"].get<std::string>(), v["hypothesis"].get<std::string>());
    } else if (v.is_string()) {
      row(key, "", v.get<std::string>(), "");
    } else {
      row(key, v.dump(), "", "");
    }
  }
  const auto& b = table["bootstrap"];
  if (b.contains("verdict")) {
    row("bootstrap.q0", b["q0"]["value"].dump(), b["q0"]["exact"].get<std::string>(), "d > r + 4");
    row("bootstrap.verdict", b["verdict"].get<std::string>(), "", "steps = " + b["steps"].dump());
  } else {
    row("bootstrap", "undefined", "", b["hypothesis"].get<std::string>());
  }
  return os.str();
}

}  // namespace monodiss
