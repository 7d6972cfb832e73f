#pragma once

// Ray, momentum ray and transverse ray transforms of polynomial bump
// fields. Along a line the integrand is a polynomial in t supported on the
// chord through the support ball, so Gauss-Legendre of the right order is
// exact up to roundoff. Derivatives in (x, ξ) are taken under the integral.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tentomo/polyfield.hpp"
#include "tentomo/symtensor.hpp"

namespace tentomo {

/// Oriented line x + tξ; ξ need not be a unit vector.
struct Line {
  std::vector<double> x;
  std::vector<double> xi;

  int dim() const { return static_cast<int>(x.size()); }
  void validate() const;
};

/// (ω, x, y) with |ω| = 1 and x, y orthogonal to ω.
struct TransverseRay {
  std::vector<double> omega;
  std::vector<double> x;
  std::vector<double> y;

  void validate(double tol = 1e-9) const;
};

/// Parameter interval [center − half, center + half] of the line inside
/// the ball of radius rho; empty when the line misses or is tangent.
struct Chord {
  double center;
  double half;
};
std::optional<Chord> chord(const Line& line, double rho);

/// Evaluates line integrals of one field. Derivative cores are compiled on
/// first use and cached, so an engine is not thread-safe; use one per
/// worker.
class TransformEngine {
 public:
  explicit TransformEngine(const PolyBumpField& f);
  TransformEngine(const TransformEngine&) = delete;
  TransformEngine& operator=(const TransformEngine&) = delete;

  const PolyBumpField& field() const { return f_; }

  /// ∫ t^k Σ_I f_I(x + tξ) w^I dt, with w^I = w_{i_1}⋯w_{i_m}.
  double weighted(const Line& line, std::span<const double> w, int k);

  /// J_m^k f(x, ξ).
  double momentum(const Line& line, int k);
  /// ∂_x^α ∂_ξ^β J_m^k f(x, ξ); orders are per-axis derivative counts.
  double derivative(const Line& line, int k, std::span<const int> x_orders,
                    std::span<const int> xi_orders);

 private:
  struct Entry {
    CompiledPolynomial core;
    int s;
    int degree;
  };
  struct Term {
    const Entry* entry;
    double weight;
    int tpow;
  };
  const Entry& entry(std::size_t component, const std::vector<int>& orders);
  double integrate(const Line& line, std::span<const Term> terms) const;

  PolyBumpField f_;
  DerivativeTable table_;
  double rho_;
  std::map<std::pair<std::size_t, std::vector<int>>, Entry> cache_;
};

double ray_transform(const PolyBumpField& f, const Line& line);
double momentum_transform(const PolyBumpField& f, const Line& line, int k);
double transform_derivative(const PolyBumpField& f, const Line& line, int k,
                            std::span<const int> x_orders, std::span<const int> xi_orders);
double transverse_transform(const PolyBumpField& f, const TransverseRay& ray);

/// J^k(x + sξ, ξ) from the values J^0 … J^k at (x, ξ).
double shifted_momentum(std::span<const double> moments, double s);

struct HomogeneityResidual {
  double scaling;  // J(x, rξ) − r^m/|r| J(x, ξ)
  double shift;    // J(x + sξ, ξ) − J(x, ξ)
};
HomogeneityResidual homogeneity_check(const PolyBumpField& f, std::span<const double> x,
                                      std::span<const double> xi, double r, double s_shift);

/// J_{ij} J_m^k f = ∂²/∂x_i∂ξ_j − ∂²/∂x_j∂ξ_i, at one line (0-based i, j).
double john_apply(TransformEngine& engine, const Line& line, int k, std::pair<int, int> pair);
double john_apply(const PolyBumpField& f, const Line& line, int k, std::pair<int, int> pair);
/// J_{i_1 j_1} ⋯ J_{i_p j_p} J_m^k f, expanded into 2^p mixed partials.
double john_iterate(TransformEngine& engine, const Line& line,
                    std::span<const std::pair<int, int>> pairs, int k = 0);
double john_iterate(const PolyBumpField& f, const Line& line,
                    std::span<const std::pair<int, int>> pairs, int k = 0);

/// For every tuple (i_1, j_1, …, i_m, j_m) the value
/// (−2)^m m! J_0((Rf)_{i_1 j_1 … i_m j_m}) − J_{i_1 j_1} ⋯ J_{i_m j_m} J_m f.
/// At m = 0 the entry is J_{12} J_0 f, which must vanish by itself.
DenseTensor<double> verify_john_relation(const PolyBumpField& f, const Line& line);

/// Symmetric tensor f with ⟨f, η_{i_1} ⊙ ⋯ ⊙ η_{i_m}⟩ = samples[r], where r
/// ranks the canonical tuple (i_1 … i_m) in IndexSpace(n, m).
SymTensor<double> trt_pointwise_recover(const std::vector<std::vector<double>>& etas, int m,
                                        std::span<const double> samples);

/// ⟨f, η_{i_1} ⊙ ⋯ ⊙ η_{i_m}⟩ by polarization from a pairing oracle
/// y ↦ ⟨f, y^{⊙m}⟩ evaluated at sums of the η's.
template <class Pairing>
double polarized_pairing(const std::vector<std::vector<double>>& etas,
                         std::span<const int> idx, Pairing&& pairing) {
  const int m = static_cast<int>(idx.size());
  const std::size_t n = etas.front().size();
  double acc = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<double> y(n, 0.0);
    int count = 0;
    for (int t = 0; t < m; ++t)
      if (mask & (1u << t)) {
        ++count;
        for (std::size_t c = 0; c < n; ++c) y[c] += etas[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])][c];
      }
    const double v = pairing(y);
    acc += ((m - count) % 2 == 0 ? 1.0 : -1.0) * v;
  }
  return acc / static_cast<double>(factorial(m));
}

std::vector<Line> read_lines_csv(std::istream& in, int n);
/// Mirrors the input rows and appends one column per value set.
void write_transform_csv(std::ostream& out, const std::vector<Line>& lines,
                         const std::vector<std::string>& value_names,
                         const std::vector<std::vector<double>>& values);

}  // namespace tentomo
