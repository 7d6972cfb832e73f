#pragma once

// Normal operators of the ray and momentum ray transforms, in angular form
// (sphere quadrature of line integrals) and convolution form (FFT on a
// grid), the solenoidal/potential split of grid fields, and residuals of
// the identities relating R f to the normal operators.

#include <complex>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tentomo/polyfield.hpp"
#include "tentomo/spherequad.hpp"
#include "tentomo/symtensor.hpp"
#include "tentomo/xray.hpp"

namespace tentomo {

// ---------------------------------------------------------------------------
// Angular expressions

/// Σ over terms of ∫_S P(x, ξ) ∂_x^γ J^l f(x, ξ) dS for a fixed field f,
/// with P a polynomial in 2n variables (x_1 … x_n, ξ_1 … ξ_n). Closed under
/// ∂/∂x, which lets the identities move derivatives onto f exactly.
class AngularExpr {
 public:
  using Key = std::pair<int, std::vector<int>>;  // (l, γ)

  explicit AngularExpr(int n = 0) : n_(n) {}
  /// ∫_S weight(x, ξ) ∂_x^γ J^l f(x, ξ) dS.
  static AngularExpr moment(int n, int l, QPoly weight, std::vector<int> gamma = {});

  int dim() const { return n_; }
  const std::map<Key, QPoly>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  /// Largest |γ| among the terms.
  int max_order() const;

  AngularExpr partial(int var) const;

  AngularExpr& operator+=(const AngularExpr& o);
  AngularExpr& operator-=(const AngularExpr& o);
  friend AngularExpr operator+(AngularExpr a, const AngularExpr& b) { return a += b; }
  friend AngularExpr operator-(AngularExpr a, const AngularExpr& b) { return a -= b; }
  friend AngularExpr operator-(AngularExpr a);
  friend AngularExpr operator*(AngularExpr a, const Rational& c);
  friend AngularExpr operator*(const Rational& c, AngularExpr a) { return std::move(a) * c; }
  /// Multiplies every weight by a polynomial in (x, ξ).
  friend AngularExpr operator*(AngularExpr a, const QPoly& p);
  friend bool operator==(const AngularExpr& a, const AngularExpr& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void add(const Key& key, const QPoly& p);

  int n_;
  std::map<Key, QPoly> terms_;
};

template <>
struct coefficient<AngularExpr> {
  using type = Rational;
};
inline AngularExpr zero_like(const AngularExpr& e) { return AngularExpr(e.dim()); }
inline AngularExpr scale_by(const AngularExpr& e, std::int64_t num, std::int64_t den) {
  return e * Rational(num, den);
}
inline bool is_zero(const AngularExpr& e) { return e.empty(); }

/// x_i and ξ_i as polynomials in the 2n expression variables.
QPoly x_var(int n, int i);
QPoly xi_var(int n, int i);
/// ⟨x, ξ⟩^p.
QPoly x_dot_xi(int n, int p);

/// (N_m^k f)_I = Σ_l C(k,l) ∫ ⟨x,ξ⟩^{2k−l} ξ^I J^l f(x, ξ) dS.
SymTensor<AngularExpr> normal_momentum_expr(int n, int m, int k);
/// δ^r N_m^k f via k!/(k−r)! Σ_l C(k,l) ∫ ⟨x,ξ⟩^{2k−r−l} ξ^{I'} J^l dS, r <= k.
SymTensor<AngularExpr> divergence_normal_expr(int n, int m, int k, int r);
/// ∫ ξ^I J^l f(x, ξ) dS with |I| = rank.
SymTensor<AngularExpr> sphere_moment_expr(int n, int rank, int l);
/// Σ_r (−1)^{k−r} (1/r!) C(k,r) j_{x^{⊙k−r}} δ^r N_m^r f, a rank m−k tensor.
SymTensor<AngularExpr> lemma_mrt_rhs_expr(int n, int m, int k);
/// Componentwise divergence Σ_i ∂_{x_i} H_{… i}.
SymTensor<AngularExpr> divergence_expr(const SymTensor<AngularExpr>& h);
/// divergence_expr applied r times.
SymTensor<AngularExpr> iterated_divergence_expr(SymTensor<AngularExpr> h, int r);
/// R^k applied to an expression tensor of rank m; interleaved pair layout.
DenseTensor<AngularExpr> generalized_R_expr(const SymTensor<AngularExpr>& h, int k);

/// Evaluates angular expressions of one field at points x with one rule.
/// Line-integral derivatives are shared across all expressions passed to
/// a single call.
class AngularEvaluator {
 public:
  AngularEvaluator(const PolyBumpField& f, const SphereRule& rule);

  std::vector<double> evaluate(std::span<const AngularExpr* const> exprs, std::span<const double> x);
  SymTensor<double> evaluate(const SymTensor<AngularExpr>& t, std::span<const double> x);
  DenseTensor<double> evaluate(const DenseTensor<AngularExpr>& t, std::span<const double> x);

 private:
  TransformEngine engine_;
  const SphereRule* rule_;
};

// ---------------------------------------------------------------------------
// Normal operators at a point

/// (N_m f)(x) = ∫_S ξ^{⊙m} J_m f(x, ξ) dS.
SymTensor<double> normal_ray(const PolyBumpField& f, std::span<const double> x, const SphereRule& rule);
/// (N_m^k f)(x) = ∫_S ⟨x,ξ⟩^k ξ^{⊙m} J_m^k f(x − ⟨x,ξ⟩ξ, ξ) dS.
SymTensor<double> normal_momentum(const PolyBumpField& f, std::span<const double> x, int k,
                                  const SphereRule& rule);
SymTensor<double> normal_momentum(TransformEngine& engine, std::span<const double> x, int k,
                                  const SphereRule& rule);
/// δ^r N_m^k f at x for 0 <= r <= k + 1, with the derivatives taken under the
/// sphere integral; at r = k + 1 the result vanishes up to quadrature roundoff.
SymTensor<double> divergence_normal(const PolyBumpField& f, std::span<const double> x, int k, int r,
                                    const SphereRule& rule);

// ---------------------------------------------------------------------------
// Identity residuals at a point

/// m! N_0((Rf)_{i_1 j_1 … i_m j_m}) − Σ_l c_{l,m} (R(i^l j^l N_m f))_{i_1 j_1 …},
/// all pair tuples (interleaved layout).
DenseTensor<double> verify_prop_ray(const PolyBumpField& f, std::span<const double> x,
                                    const SphereRule& rule);
/// ∫ ξ^{⊙m−k} J_m^k f dS − Σ_r (−1)^{k−r}(1/r!)C(k,r) j_{x^{⊙k−r}} δ^r N_m^r f.
SymTensor<double> verify_lemma_mrt(const PolyBumpField& f, std::span<const double> x, int k,
                                   const SphereRule& rule);
/// m! N_0((R^k f)_{p_1 q_1 … i_1 … i_k}) − σ(i) Σ_r (−1)^r C(k,r) ∂^r_{x_{i_1…i_r}}
/// (R^{k−r} G_{m−r})_{p_1 q_1 … i_{r+1} … i_k}; layout of generalized_R.
/// Needs budget >= m + k.
DenseTensor<double> verify_prop_mrt(const PolyBumpField& f, std::span<const double> x, int k,
                                    const SphereRule& rule);

// ---------------------------------------------------------------------------
// Grid fields

/// Symmetric tensor field sampled at the nodes −L/2 + j L/N, j = 0 … N−1,
/// of a periodic box; one row-major array per canonical component.
struct GridTensorField {
  int n = 2;
  int m = 0;
  int N = 0;
  double L = 0.0;
  std::vector<std::vector<double>> components;

  std::size_t nodes() const;
  double spacing() const { return L / N; }
  std::vector<double> node(std::size_t flat) const;
  const IndexSpace& space() const { return IndexSpace::get(n, m); }

  static GridTensorField zeros(int n, int m, int N, double L);
  /// Σ_I over all dense index tuples and nodes of v_I², times the cell volume.
  double l2_norm() const;
};

GridTensorField sample_field(const PolyBumpField& f, int N, double L);
GridTensorField operator-(const GridTensorField& a, const GridTensorField& b);
GridTensorField operator+(const GridTensorField& a, const GridTensorField& b);
/// ‖a − b‖ / ‖b‖ in the tensor L² norm.
double relative_l2(const GridTensorField& a, const GridTensorField& b);

/// Angular frequencies of the FFT bins along one axis; the Nyquist bin is
/// mapped to 0 so spectral derivatives stay real.
std::vector<double> grid_frequencies(int N, double L);

/// Spectral symmetrized derivative d and divergence δ.
GridTensorField grid_inner_derivative(const GridTensorField& f);
GridTensorField grid_divergence(const GridTensorField& f);

/// Per frequency: v̂ = (j_y i_y)^{−1} j_y f̂ / i, ŝf = f̂ − i i_y v̂; the zero
/// frequency goes entirely to ŝf.
struct SolenoidalSplit {
  GridTensorField solenoidal;
  GridTensorField potential;  // v, rank m − 1
};
SolenoidalSplit solenoidal_decompose(const GridTensorField& f);

/// N_m^k f by zero-padded FFT convolution with cell-averaged kernels and
/// the x^{⊙2k−l} prefactors applied pointwise afterwards.
GridTensorField normal_convolution(const GridTensorField& f, int k);
/// Cell average of z^{⊙(2m+2k−l)}_{P I J}/|z|^{2m+2k−2l+n−1} over the cell of
/// side h centred at offset (integers) · h; exposed for tests.
double kernel_cell_average(int n, std::span<const int> slots, int denom_power,
                           std::span<const int> offset, double h);

/// N_m on the periodic box through its Fourier symbol (n = 2 only):
/// (4π/|y|) η^{⊙m} ⟨f̂(y), η^{⊙m}⟩ with η ⊥ y a unit vector.
GridTensorField periodic_normal_ray(const GridTensorField& f);

/// Δ^m ŝf − 2^m δ_e^m R f spectrally, δ_e contracting one derivative into
/// each second slot of the pairs.
GridTensorField verify_smoothness(const GridTensorField& f);

/// Angular N_m^k f at every grid node (for comparison with the convolution).
GridTensorField normal_momentum_on_grid(const PolyBumpField& f, int N, double L, int k,
                                        const SphereRule& rule);

std::string grid_header_json(const GridTensorField& f);
void write_grid_csv(std::ostream& out, const GridTensorField& f);
GridTensorField read_grid(const std::string& header_json, std::istream& csv);

}  // namespace tentomo
