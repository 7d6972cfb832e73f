#pragma once

// Integration over the unit sphere S^{n-1}: closed-form monomial integrals
// in exact rational-times-pi form, homogeneous rational functions
// p(ξ)/|ξ|^{2r}, the integration-by-parts identity for homogeneous g, and
// tensor-product numerical rules for n = 2, 3.

#include <span>
#include <string>
#include <vector>

#include "tentomo/polynomial.hpp"
#include "tentomo/scalar.hpp"
#include "tentomo/symtensor.hpp"

namespace tentomo {

/// coeff * π^pi_power. Every monomial integral over S^{n-1} or the unit
/// ball in R^n has pi_power = floor(n/2), so sums stay in this form.
struct PiMultiple {
  Rational coeff{0};
  int pi_power = 0;

  double value() const;
  bool is_zero() const { return coeff == 0; }

  PiMultiple& operator+=(const PiMultiple& o);
  PiMultiple& operator-=(const PiMultiple& o);
  friend PiMultiple operator+(PiMultiple a, const PiMultiple& b) { return a += b; }
  friend PiMultiple operator-(PiMultiple a, const PiMultiple& b) { return a -= b; }
  friend PiMultiple operator*(PiMultiple a, const Rational& c) {
    a.coeff *= c;
    return a;
  }
  friend bool operator==(const PiMultiple& a, const PiMultiple& b) {
    return a.coeff == b.coeff && (a.coeff == 0 || a.pi_power == b.pi_power);
  }
};

std::string to_string(const PiMultiple& v);

/// ∫_{S^{n-1}} ξ^α dS: zero unless every α_i is even, else
/// 2 ∏Γ((α_i+1)/2) / Γ((|α|+n)/2).
PiMultiple monomial_sphere_integral(int n, std::span<const int> exponents);
double monomial_sphere_integral_double(int n, std::span<const int> exponents);

/// ∫_{|x|<=1} x^α dx = ∏Γ((α_i+1)/2) / Γ(|α|/2 + n/2 + 1).
PiMultiple monomial_ball_integral(int n, std::span<const int> exponents);

/// ∫_{S^{n-1}} p dS for a polynomial in n variables.
PiMultiple sphere_integral(const QPoly& p);

/// ∫_{|x|<=radius} p dx.
PiMultiple ball_integral(const QPoly& p, const Rational& radius = Rational(1));

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// ξ ↦ p(ξ)/|ξ|^{2r} with p homogeneous of the declared degree.
class HomogeneousRational {
 public:
  HomogeneousRational(QPoly numerator, int degree, int r);

  int dim() const { return numerator_.nvars(); }
  const QPoly& numerator() const { return numerator_; }
  int numerator_degree() const { return degree_; }
  int pow2r() const { return r_; }
  /// Homogeneity degree d - 2r.
  int lambda() const { return degree_ - 2 * r_; }

  /// Quotient rule: numerator |ξ|^2 ∂_i p - 2r ξ_i p over |ξ|^{2(r+1)}.
  HomogeneousRational derivative(int i) const;
  double operator()(std::span<const double> xi) const;

 private:
  QPoly numerator_;
  int degree_;
  int r_;
};

/// Exact ∫_{S^{n-1}} g dS (the denominator is 1 on the sphere).
PiMultiple integrate_homogeneous(const HomogeneousRational& g);

/// c_{l,s} = ∏_{w=0}^{s-l-1}(n-1+2w) · (-1)^l s! / (2^l l! (s-2l)!).
Rational c_constant(int l, int s, int n);

/// Σ_l c_{l,s} i^l j^l ξ^{⊙s} as a symmetric tensor of polynomials in ξ.
SymTensor<QPoly> ibp_kernel(int n, int s);

/// LHS − RHS of the integration-by-parts identity for g homogeneous of
/// degree s − 1, where s = indices.size() and indices are 0-based.
PiMultiple verify_ibp(const HomogeneousRational& g, std::span<const int> indices);

struct SphereRule {
  int n = 0;
  int degree = 0;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  template <class F>
  double integrate(F&& fn) const {
    double acc = 0.0;
    for (std::size_t q = 0; q < weights.size(); ++q) acc += weights[q] * fn(nodes[q]);
    return acc;
  }
};

/// n = 2: degree + 1 equispaced angles. n = 3: Gauss-Legendre in cos θ
/// times degree + 1 equispaced azimuths. Exact for polynomials of total
/// degree <= exactness_degree.
SphereRule build_rule(int n, int exactness_degree);

std::string rule_to_json(const SphereRule& rule);
SphereRule rule_from_json(const std::string& text);

}  // namespace tentomo
