#pragma once

// Compactly supported polynomial tensor fields f_I = q_I(x)(ρ² − |x|²)^s on
// |x| <= ρ, zero outside, and the differential operators d, δ, Δ, W, R,
// W^k, R^k acting on them exactly.
//
// A derivative of q b^s (b = ρ² − |x|²) is again of that form:
// ∂_i(q b^s) = b^{s-1}(b ∂_i q − 2 s x_i q). Fields therefore carry the
// bump exponent alongside the core and every derivative lowers it by one.
// The global field is C^{s-1}, so at most s − 1 derivatives are allowed.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tentomo/polynomial.hpp"
#include "tentomo/random.hpp"
#include "tentomo/spherequad.hpp"
#include "tentomo/symtensor.hpp"

namespace tentomo {

class PolyBumpField {
 public:
  PolyBumpField(Rational rho, int s, SymTensor<QPoly> core);

  /// A plain polynomial field on all of R^n (no support bound, no budget).
  static PolyBumpField unrestricted(SymTensor<QPoly> core);
  /// Rank-0 field from one core polynomial.
  static PolyBumpField scalar(Rational rho, int s, QPoly core);

  int dim() const { return core_.dim(); }
  int rank() const { return core_.rank(); }
  const Rational& rho() const { return rho_; }
  int s() const { return s_; }
  bool bounded() const { return bounded_; }
  const SymTensor<QPoly>& core() const { return core_; }
  const QPoly& core(std::span<const int> idx) const { return core_.at(idx); }

  /// Number of classical derivatives still available (s − 1).
  int budget() const;
  void require_budget(int order, const char* op) const;

  /// ρ² − |x|² (or the constant 1 for unrestricted fields).
  QPoly bump() const;

  /// q_I · b^s, the component as a polynomial valid inside the ball.
  QPoly realized(std::size_t r) const;

  /// Same field with bump exponent lowered to s_new (core multiplied by
  /// b^{s − s_new}).
  PolyBumpField lowered(int s_new) const;

  Rational evaluate(std::span<const int> idx, std::span<const Rational> x) const;
  double evaluate(std::span<const int> idx, std::span<const double> x) const;

  PolyBumpField& operator+=(const PolyBumpField& o);
  PolyBumpField& operator-=(const PolyBumpField& o);
  friend PolyBumpField operator+(PolyBumpField a, const PolyBumpField& b) { return a += b; }
  friend PolyBumpField operator-(PolyBumpField a, const PolyBumpField& b) { return a -= b; }
  friend PolyBumpField operator*(PolyBumpField a, const Rational& c);

  /// Equality of the realized fields.
  friend bool operator==(const PolyBumpField& a, const PolyBumpField& b);

 private:
  Rational rho_;
  int s_;
  bool bounded_;
  SymTensor<QPoly> core_;
};

/// Core of ∂_var(q b^s): b ∂q − 2 s x_var q (bump exponent s − 1 implied).
QPoly bump_partial(const QPoly& q, int s, const QPoly& bump, int var);

/// Memoized mixed partials of the components of one field. The core
/// returned for derivative orders α carries bump exponent s − |α|.
/// Not thread-safe; use one table per worker.
class DerivativeTable {
 public:
  explicit DerivativeTable(const PolyBumpField& f);

  const PolyBumpField& field() const { return *f_; }
  /// orders[i] = number of derivatives in x_i.
  const QPoly& get(std::size_t component, const std::vector<int>& orders);
  const QPoly& get(std::span<const int> component_idx, const std::vector<int>& orders);

 private:
  const PolyBumpField* f_;
  QPoly bump_;
  std::map<std::pair<std::size_t, std::vector<int>>, QPoly> cache_;
};

/// ∂f/∂x_var componentwise.
PolyBumpField partial(const PolyBumpField& f, int var);

/// (df)_{i_1…i_{m+1}} = σ ∂_{i_{m+1}} f_{i_1…i_m}.
PolyBumpField inner_derivative(const PolyBumpField& f);
/// (δf)_{i_1…i_{m−1}} = Σ_i ∂_i f_{i_1…i_{m−1} i}.
PolyBumpField divergence(const PolyBumpField& f);
/// Componentwise Δ^p.
PolyBumpField laplacian_power(const PolyBumpField& f, int p);

/// Exact L² pairing Σ_I ∫ f_I g_I dx over the common support ball.
PiMultiple l2_inner(const PolyBumpField& f, const PolyBumpField& g);

enum class PairLayout {
  // p1 q1 p2 q2 … p_a q_a, then k trailing slots (images of R^k).
  Interleaved,
  // p1 … p_a, q1 … q_a, then k trailing slots (images of W^k); symmetric
  // within the p block and within the q block together with the tail.
  Blocked,
};

/// Dense array of polynomial cores with pair structure; all entries share
/// the field's bump exponent s.
struct PairSymTensorField {
  PairLayout layout;
  int pairs;
  int tail;
  Rational rho;
  int s;
  bool bounded;
  DenseTensor<QPoly> entries;

  int dim() const { return entries.dim(); }
  int m() const { return pairs + tail; }
  const QPoly& at(std::span<const int> idx) const { return entries.at(idx); }
  const QPoly& at(std::initializer_list<int> idx) const { return entries.at(idx); }

  /// Rank-0 field holding one component.
  PolyBumpField component(std::span<const int> idx) const;

  /// Same field with bump exponent lowered to s_new.
  PairSymTensorField lowered(int s_new) const;
  bool is_zero() const;
  friend bool operator==(const PairSymTensorField& a, const PairSymTensorField& b);
};

/// (W^k f)_{p q i} per the generalized Saint-Venant formula; W^0 = W.
PairSymTensorField generalized_W(const PolyBumpField& f, int k);
PairSymTensorField saint_venant_W(const PolyBumpField& f);

/// (R^k f)_{p1 q1 … p_a q_a i} = α(p1 q1)…α(p_a q_a) ∂_{q} f_{p i}; R^0 = R.
PairSymTensorField generalized_R(const PolyBumpField& f, int k);
PairSymTensorField operator_R(const PolyBumpField& f);

/// W = 2^m σ(i…)σ(j…) R.
PairSymTensorField r_to_w(const PairSymTensorField& rf, int m);
/// R = (1/(m+1)) α…α W.
PairSymTensorField w_to_r(const PairSymTensorField& wf, int m);

/// W^k = 2^{m−k} σ(q… i…) σ(p…) R^k.
PairSymTensorField r_to_w_general(const PairSymTensorField& rk, int m, int k);
/// R^k = c · α(p1 q1)…α(p_a q_a) W^k.
PairSymTensorField w_to_r_general(const PairSymTensorField& wk, int m, int k, const Rational& c);
/// The constant written for the W^k → R^k direction: C(m,k)/(m−k+1).
Rational gw_to_gr_constant(int m, int k);
/// The unique c with R^k = c · α…α W^k, if the two are proportional.
std::optional<Rational> solve_w_to_r_constant(const PairSymTensorField& rk,
                                              const PairSymTensorField& wk);

/// R^{k−1} from R^k: (R^{k−1})_{…, p q, i'} = α(p q) ∂_q (R^k)_{…, i' p}.
PairSymTensorField lower_generalized_R(const PairSymTensorField& rk);

/// Random core polynomial of total degree <= degree with small rational
/// coefficients; each monomial is kept with probability density.
QPoly random_polynomial(int nvars, int degree, SplitMix64& rng, double density = 0.7);
PolyBumpField random_field(int n, int m, const Rational& rho, int s, int degree, SplitMix64& rng);

std::string field_to_json(const PolyBumpField& f);
PolyBumpField field_from_json(const std::string& text);

}  // namespace tentomo
