#include "tentomo/spherequad.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "json.hpp"

#include "tentomo/combinatorics.hpp"
#include "tentomo/errors.hpp"

namespace tentomo {

namespace {

// Γ(b + 1/2) / √π = (2b)! / (4^b b!)
Rational half_gamma_ratio(int b) {
  Rational r = factorial_q(2 * b) / factorial_q(b);
  for (int i = 0; i < b; ++i) r /= 4;
  return r;
}

// Γ(h/2) for integer h >= 1 as coeff · √π^(h odd).
Rational gamma_half_integer(int h) {
  if (h % 2 == 0) return factorial_q(h / 2 - 1);
  return half_gamma_ratio((h - 1) / 2);
}

bool all_even(std::span<const int> e, int& half_sum, Rational& numer) {
  half_sum = 0;
  numer = 1;
  for (int a : e) {
    if (a < 0) throw PreconditionError("monomial integral: negative exponent");
    if (a % 2 != 0) return false;
    half_sum += a / 2;
    numer *= half_gamma_ratio(a / 2);
  }
  return true;
}

}  // namespace

double PiMultiple::value() const {
  return to_double(coeff) * std::pow(std::numbers::pi, pi_power);
}

PiMultiple& PiMultiple::operator+=(const PiMultiple& o) {
  if (o.coeff == 0) return *this;
  if (coeff == 0) {
    *this = o;
    return *this;
  }
  if (pi_power != o.pi_power) throw PreconditionError("PiMultiple: mixed powers of pi");
  coeff += o.coeff;
  return *this;
}

PiMultiple& PiMultiple::operator-=(const PiMultiple& o) {
  PiMultiple neg = o;
  neg.coeff = -neg.coeff;
  return *this += neg;
}

std::string to_string(const PiMultiple& v) {
  if (v.coeff == 0) return "0";
  if (v.pi_power == 0) return v.coeff.str();
  std::string s = v.coeff.str() + "*pi";
  if (v.pi_power > 1) s += "^" + std::to_string(v.pi_power);
  return s;
}

PiMultiple monomial_sphere_integral(int n, std::span<const int> exponents) {
  if (static_cast<int>(exponents.size()) != n) throw ShapeError("monomial_sphere_integral: arity");
  int b = 0;
  Rational numer;
  PiMultiple out{Rational(0), n / 2};
  if (!all_even(exponents, b, numer)) return out;
  // 2 π^{n/2} ∏ r_i / Γ(b + n/2); an odd n leaves one √π in the denominator.
  out.coeff = 2 * numer / gamma_half_integer(2 * b + n);
  return out;
}

double monomial_sphere_integral_double(int n, std::span<const int> exponents) {
  return monomial_sphere_integral(n, exponents).value();
}

PiMultiple monomial_ball_integral(int n, std::span<const int> exponents) {
  if (static_cast<int>(exponents.size()) != n) throw ShapeError("monomial_ball_integral: arity");
  int b = 0;
  Rational numer;
  PiMultiple out{Rational(0), n / 2};
  if (!all_even(exponents, b, numer)) return out;
  out.coeff = numer / gamma_half_integer(2 * b + n + 2);
  return out;
}

PiMultiple sphere_integral(const QPoly& p) {
  const int n = p.nvars();
  PiMultiple acc{Rational(0), n / 2};
  std::vector<int> e(static_cast<std::size_t>(n));
  for (const auto& [k, c] : p.terms()) {
    for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = exponent_of(k, i);
    acc += monomial_sphere_integral(n, e) * c;
  }
  return acc;
}

PiMultiple ball_integral(const QPoly& p, const Rational& radius) {
  const int n = p.nvars();
  PiMultiple acc{Rational(0), n / 2};
  std::vector<int> e(static_cast<std::size_t>(n));
  for (const auto& [k, c] : p.terms()) {
    int deg = 0;
    for (int i = 0; i < n; ++i) {
      e[static_cast<std::size_t>(i)] = exponent_of(k, i);
      deg += e[static_cast<std::size_t>(i)];
    }
    Rational scale(1);
    for (int i = 0; i < deg + n; ++i) scale *= radius;
    acc += monomial_ball_integral(n, e) * (c * scale);
  }
  return acc;
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw PreconditionError("gauss_legendre: order must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (slot) return *slot;
  auto rule = std::make_unique<GaussRule>();
  rule->nodes.resize(static_cast<std::size_t>(order));
  rule->weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (order == 1) p0 = 1.0;
    dp = order * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule->nodes[lo] = -z;
    rule->nodes[hi] = z;
    rule->weights[lo] = w;
    rule->weights[hi] = w;
  }
  if (order % 2 == 1) rule->nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  slot = std::move(rule);
  return *slot;
}

HomogeneousRational::HomogeneousRational(QPoly numerator, int degree, int r)
    : numerator_(std::move(numerator)), degree_(degree), r_(r) {
  if (r < 0) throw PreconditionError("HomogeneousRational: negative denominator power");
  if (!numerator_.is_homogeneous(degree))
    throw PreconditionError("HomogeneousRational: numerator is not homogeneous of the declared degree");
}

HomogeneousRational HomogeneousRational::derivative(int i) const {
  const int n = dim();
  const QPoly norm2 = squared_norm<Rational>(n, n);
  QPoly num = norm2 * numerator_.derivative(i);
  if (r_ > 0) num -= QPoly::variable(n, i) * numerator_ * Rational(2 * r_);
  return HomogeneousRational(std::move(num), degree_ + 1, r_ + 1);
}

double HomogeneousRational::operator()(std::span<const double> xi) const {
  double norm2 = 0.0;
  for (double v : xi) norm2 += v * v;
  return numerator_.evaluate<double>(xi) / std::pow(norm2, r_);
}

PiMultiple integrate_homogeneous(const HomogeneousRational& g) {
  return sphere_integral(g.numerator());
}

Rational c_constant(int l, int s, int n) {
  if (s < 0 || l < 0 || 2 * l > s) throw PreconditionError("c_constant: need 0 <= l <= floor(s/2)");
  Rational prod(1);
  for (int w = 0; w <= s - l - 1; ++w) prod *= (n - 1 + 2 * w);
  Rational c = prod * factorial_q(s) / (factorial_q(l) * factorial_q(s - 2 * l));
  for (int i = 0; i < l; ++i) c /= 2;
  return (l % 2 == 0) ? c : Rational(-c);
}

SymTensor<QPoly> ibp_kernel(int n, int s) {
  std::vector<QPoly> xi;
  for (int i = 0; i < n; ++i) xi.push_back(QPoly::variable(n, i));
  const auto power = tensor_power(xi, s);
  SymTensor<QPoly> out(n, s, QPoly(n));
  for (int l = 0; 2 * l <= s; ++l) {
    const auto term = ij_power(power, l);
    const Rational c = c_constant(l, s, n);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += term[r] * c;
  }
  return out;
}

PiMultiple verify_ibp(const HomogeneousRational& g, std::span<const int> indices) {
  const int s = static_cast<int>(indices.size());
  if (s < 1) throw PreconditionError("verify_ibp: need at least one index");
  if (g.lambda() != s - 1)
    throw PreconditionError("verify_ibp: g must be homogeneous of degree s - 1");
  HomogeneousRational d = g;
  for (int i : indices) d = d.derivative(i);
  const PiMultiple lhs = integrate_homogeneous(d);
  const auto kernel = ibp_kernel(g.dim(), s);
  const PiMultiple rhs = sphere_integral(kernel.at(indices) * g.numerator());
  return lhs - rhs;
}

SphereRule build_rule(int n, int exactness_degree) {
  if (exactness_degree < 0) throw PreconditionError("build_rule: negative degree");
  SphereRule rule;
  rule.n = n;
  rule.degree = exactness_degree;
  const int naz = exactness_degree + 1;
  if (n == 2) {
    for (int q = 0; q < naz; ++q) {
      const double th = 2.0 * std::numbers::pi * q / naz;
      rule.nodes.push_back({std::cos(th), std::sin(th)});
      rule.weights.push_back(2.0 * std::numbers::pi / naz);
    }
  } else if (n == 3) {
    const auto& gl = gauss_legendre(exactness_degree / 2 + 1);
    for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
      const double z = gl.nodes[a];
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int q = 0; q < naz; ++q) {
        const double ph = 2.0 * std::numbers::pi * q / naz;
        rule.nodes.push_back({rad * std::cos(ph), rad * std::sin(ph), z});
        rule.weights.push_back(gl.weights[a] * 2.0 * std::numbers::pi / naz);
      }
    }
  } else {
    throw PreconditionError("build_rule: only n = 2 and n = 3 are supported");
  }
  return rule;
}

std::string rule_to_json(const SphereRule& rule) {
  nlohmann::json j;
  j["n"] = rule.n;
  j["degree"] = rule.degree;
  j["nodes"] = rule.nodes;
  j["weights"] = rule.weights;
  return j.dump();
}

SphereRule rule_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SphereRule rule;
  rule.n = j.at("n").get<int>();
  rule.degree = j.at("degree").get<int>();
  rule.nodes = j.at("nodes").get<std::vector<std::vector<double>>>();
  rule.weights = j.at("weights").get<std::vector<double>>();
  if (rule.nodes.size() != rule.weights.size())
    throw ShapeError("rule_from_json: node and weight counts differ");
  for (const auto& x : rule.nodes)
    if (static_cast<int>(x.size()) != rule.n) throw ShapeError("rule_from_json: node dimension");
  return rule;
}

}  // namespace tentomo
