#pragma once

// Sparse multivariate polynomials with exact or floating coefficients.
// Exponents of up to eight variables are packed into one 64-bit key, one
// byte per variable with variable 0 in the most significant byte, so the
// ordered map iterates terms in lexicographic exponent order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tentomo/errors.hpp"
#include "tentomo/scalar.hpp"

namespace tentomo {

using Exponents = std::array<int, 8>;

constexpr int kMaxPolyVars = 8;
constexpr int kMaxPolyExponent = 255;
constexpr std::size_t kMaxPolyTerms = 1'000'000;

inline std::uint64_t pack_exponents(std::span<const int> e) {
  if (e.size() > static_cast<std::size_t>(kMaxPolyVars))
    throw PreconditionError("Polynomial: at most 8 variables");
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] < 0 || e[i] > kMaxPolyExponent)
      throw SizeLimitError("Polynomial: exponent out of range");
    key |= static_cast<std::uint64_t>(e[i]) << (8 * (7 - i));
  }
  return key;
}

inline int exponent_of(std::uint64_t key, int var) {
  return static_cast<int>((key >> (8 * (7 - var))) & 0xFF);
}

inline Exponents unpack_exponents(std::uint64_t key) {
  Exponents e{};
  for (int i = 0; i < kMaxPolyVars; ++i) e[static_cast<std::size_t>(i)] = exponent_of(key, i);
  return e;
}

inline int key_degree(std::uint64_t key) {
  int d = 0;
  for (int i = 0; i < kMaxPolyVars; ++i) d += exponent_of(key, i);
  return d;
}

template <class C>
class Polynomial {
 public:
  using Terms = std::map<std::uint64_t, C>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 0 || nvars > kMaxPolyVars) throw PreconditionError("Polynomial: bad variable count");
  }

  static Polynomial constant(int nvars, const C& c) {
    Polynomial p(nvars);
    if (!is_zero(c)) p.terms_.emplace(0, c);
    return p;
  }

  static Polynomial variable(int nvars, int i) {
    if (i < 0 || i >= nvars) throw PreconditionError("Polynomial::variable: index out of range");
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(i)] = 1;
    return monomial(nvars, e, from_rational<C>(Rational(1)));
  }

  static Polynomial monomial(int nvars, std::span<const int> exps, const C& c) {
    if (static_cast<int>(exps.size()) != nvars)
      throw PreconditionError("Polynomial::monomial: exponent count mismatch");
    Polynomial p(nvars);
    if (!is_zero(c)) p.terms_.emplace(pack_exponents(exps), c);
    return p;
  }
  static Polynomial monomial(int nvars, const std::vector<int>& exps, const C& c) {
    return monomial(nvars, std::span<const int>(exps), c);
  }

  int nvars() const { return nvars_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  int degree() const {
    int d = -1;
    for (const auto& [k, c] : terms_) d = std::max(d, key_degree(k));
    return d;
  }

  bool is_homogeneous(int d) const {
    for (const auto& [k, c] : terms_)
      if (key_degree(k) != d) return false;
    return true;
  }

  C coefficient(std::span<const int> exps) const {
    auto it = terms_.find(pack_exponents(exps));
    return it == terms_.end() ? from_rational<C>(Rational(0)) : it->second;
  }

  void add_term(std::uint64_t key, const C& c) {
    if (is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    }
    if (terms_.size() > kMaxPolyTerms) throw SizeLimitError("Polynomial: term count exceeds 10^6");
  }

  Polynomial& operator+=(const Polynomial& o) {
    adopt(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    adopt(o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  Polynomial operator-() const {
    Polynomial r(*this);
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r(std::max(a.nvars_, b.nvars_));
    if (a.nvars_ != b.nvars_ && a.nvars_ != 0 && b.nvars_ != 0)
      throw ShapeError("Polynomial: variable count mismatch");
    if (a.empty() || b.empty()) return r;
    if (a.degree() + b.degree() > kMaxPolyExponent) {
      // Fall back to a per-variable check only when the cheap bound fails.
      Exponents ma{}, mb{};
      for (const auto& [k, c] : a.terms_)
        for (int i = 0; i < kMaxPolyVars; ++i)
          ma[static_cast<std::size_t>(i)] = std::max(ma[static_cast<std::size_t>(i)], exponent_of(k, i));
      for (const auto& [k, c] : b.terms_)
        for (int i = 0; i < kMaxPolyVars; ++i)
          mb[static_cast<std::size_t>(i)] = std::max(mb[static_cast<std::size_t>(i)], exponent_of(k, i));
      for (std::size_t i = 0; i < ma.size(); ++i)
        if (ma[i] + mb[i] > kMaxPolyExponent) throw SizeLimitError("Polynomial: exponent overflow");
    }
    if (a.size() * b.size() > 50 * kMaxPolyTerms)
      throw SizeLimitError("Polynomial: product too large");
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) r.add_term(ka + kb, ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator*(Polynomial p, const C& c) {
    if (is_zero(c)) return Polynomial(p.nvars_);
    for (auto& [k, v] : p.terms_) v *= c;
    return p;
  }
  friend Polynomial operator*(const C& c, Polynomial p) { return std::move(p) * c; }

  Polynomial derivative(int var) const {
    if (var < 0 || var >= nvars_) throw PreconditionError("Polynomial::derivative: bad variable");
    Polynomial r(nvars_);
    const std::uint64_t unit = std::uint64_t{1} << (8 * (7 - var));
    for (const auto& [k, c] : terms_) {
      const int e = exponent_of(k, var);
      if (e == 0) continue;
      r.terms_.emplace_hint(r.terms_.end(), k - unit, c * from_rational<C>(Rational(e)));
    }
    return r;
  }

  /// Mixed partial with orders[i] derivatives in variable i.
  Polynomial derivative(std::span<const int> orders) const {
    Polynomial r(*this);
    for (std::size_t i = 0; i < orders.size(); ++i)
      for (int t = 0; t < orders[i]; ++t) r = r.derivative(static_cast<int>(i));
    return r;
  }

  Polynomial pow(int e) const {
    if (e < 0) throw PreconditionError("Polynomial::pow: negative exponent");
    Polynomial r = constant(nvars_, from_rational<C>(Rational(1)));
    Polynomial b(*this);
    while (e > 0) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  /// Evaluates at a point of a possibly different scalar type.
  template <class T>
  T evaluate(std::span<const T> x) const {
    if (static_cast<int>(x.size()) < nvars_) throw ShapeError("Polynomial::evaluate: point too short");
    T acc = from_rational<T>(Rational(0));
    for (const auto& [k, c] : terms_) {
      T term = convert<T>(c);
      for (int i = 0; i < nvars_; ++i)
        for (int e = exponent_of(k, i); e > 0; --e) term = term * x[static_cast<std::size_t>(i)];
      acc += term;
    }
    return acc;
  }

  /// Substitutes polynomials (all over a common variable set) for variables.
  Polynomial compose(const std::vector<Polynomial>& subs) const {
    if (static_cast<int>(subs.size()) != nvars_) throw ShapeError("Polynomial::compose: arity mismatch");
    const int out_vars = subs.empty() ? 0 : subs.front().nvars();
    Polynomial r(out_vars);
    for (const auto& [k, c] : terms_) {
      Polynomial term = constant(out_vars, c);
      for (int i = 0; i < nvars_; ++i) {
        const int e = exponent_of(k, i);
        if (e > 0) term = term * subs[static_cast<std::size_t>(i)].pow(e);
      }
      r += term;
    }
    return r;
  }

  template <class D>
  Polynomial<D> cast() const {
    Polynomial<D> r(nvars_);
    for (const auto& [k, c] : terms_) r.add_term(k, convert<D>(c));
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.empty() && b.empty()) return true;
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  template <class T, class U>
  static T convert(const U& c) {
    if constexpr (std::is_same_v<T, U>) {
      return c;
    } else if constexpr (std::is_same_v<T, double>) {
      return to_double(c);
    } else {
      return T(c);
    }
  }

  void adopt(const Polynomial& o) {
    if (nvars_ == o.nvars_) return;
    if (nvars_ == 0 && terms_.size() <= 1 && (terms_.empty() || terms_.begin()->first == 0)) {
      nvars_ = o.nvars_;
      return;
    }
    if (o.nvars_ == 0 && (o.terms_.empty() || o.terms_.begin()->first == 0)) return;
    throw ShapeError("Polynomial: variable count mismatch");
  }

  int nvars_ = 0;
  Terms terms_;
};

using QPoly = Polynomial<Rational>;

template <class C>
struct coefficient<Polynomial<C>> {
  using type = C;
};

template <class C>
Polynomial<C> zero_like(const Polynomial<C>& p) {
  return Polynomial<C>(p.nvars());
}
template <class C>
Polynomial<C> one_like(const Polynomial<C>& p) {
  return Polynomial<C>::constant(p.nvars(), from_rational<C>(Rational(1)));
}
template <class C>
Polynomial<C> scale_by(const Polynomial<C>& p, std::int64_t num, std::int64_t den) {
  return p * from_rational<C>(Rational(num, den));
}
template <class C>
bool is_zero(const Polynomial<C>& p) {
  return p.empty();
}

/// Sum of squares of the first `count` variables.
template <class C>
Polynomial<C> squared_norm(int nvars, int count, int first = 0) {
  Polynomial<C> r(nvars);
  for (int i = first; i < first + count; ++i) {
    auto v = Polynomial<C>::variable(nvars, i);
    r += v * v;
  }
  return r;
}

std::string to_string(const QPoly& p);

/// Double-precision evaluator built once from a polynomial. Powers of each
/// coordinate are tabulated per call, so evaluation is one multiply-add
/// chain per term.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  template <class C>
  explicit CompiledPolynomial(const Polynomial<C>& p) : nvars_(p.nvars()) {
    coef_.reserve(p.size());
    exps_.reserve(p.size() * static_cast<std::size_t>(nvars_));
    max_exp_ = 0;
    for (const auto& [k, c] : p.terms()) {
      coef_.push_back(to_double(c));
      for (int i = 0; i < nvars_; ++i) {
        const int e = exponent_of(k, i);
        exps_.push_back(static_cast<std::uint8_t>(e));
        max_exp_ = std::max(max_exp_, e);
      }
    }
  }

  int nvars() const { return nvars_; }
  bool empty() const { return coef_.empty(); }

  double operator()(const double* x) const;

 private:
  int nvars_ = 0;
  int max_exp_ = 0;
  std::vector<double> coef_;
  std::vector<std::uint8_t> exps_;
};

}  // namespace tentomo
