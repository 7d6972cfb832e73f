#pragma once

// Symmetric tensor algebra over R^n at desk scale (n <= 4, m <= 4 or so).
// Contractions are explicit loops over index tuples; nothing is sparse.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "tentomo/combinatorics.hpp"
#include "tentomo/errors.hpp"
#include "tentomo/scalar.hpp"

namespace tentomo {

/// Full n^m array, slot 0 most significant.
template <class S>
class DenseTensor {
 public:
  DenseTensor(int n, int m, S zero)
      : space_(&IndexSpace::get(n, m)), entries_(space_->dense_size(), std::move(zero)) {}

  int dim() const { return space_->dim(); }
  int rank() const { return space_->rank(); }
  std::size_t size() const { return entries_.size(); }
  const IndexSpace& space() const { return *space_; }

  S& operator[](std::size_t flat) { return entries_[flat]; }
  const S& operator[](std::size_t flat) const { return entries_[flat]; }
  S& at(std::span<const int> idx) { return entries_[space_->flat_of(idx)]; }
  const S& at(std::span<const int> idx) const { return entries_[space_->flat_of(idx)]; }
  S& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
  const S& at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }

  const std::vector<S>& entries() const { return entries_; }

  DenseTensor& operator+=(const DenseTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.space_ == b.space_ && a.entries_ == b.entries_;
  }

 private:
  void check_same(const DenseTensor& o) const {
    if (space_ != o.space_) throw ShapeError("DenseTensor: shape mismatch");
  }

  const IndexSpace* space_;
  std::vector<S> entries_;
};

/// Symmetric rank-m tensor stored as one value per canonical multi-index.
template <class S>
class SymTensor {
 public:
  SymTensor(int n, int m, S zero)
      : space_(&IndexSpace::get(n, m)), entries_(space_->size(), std::move(zero)) {}

  int dim() const { return space_->dim(); }
  int rank() const { return space_->rank(); }
  std::size_t size() const { return entries_.size(); }
  const IndexSpace& space() const { return *space_; }

  S& operator[](std::size_t r) { return entries_[r]; }
  const S& operator[](std::size_t r) const { return entries_[r]; }
  S& at(std::span<const int> idx) { return entries_[space_->rank_of(idx)]; }
  const S& at(std::span<const int> idx) const { return entries_[space_->rank_of(idx)]; }
  S& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
  const S& at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }

  const std::vector<S>& entries() const { return entries_; }
  std::vector<S>& entries() { return entries_; }

  DenseTensor<S> expand() const {
    DenseTensor<S> d(dim(), rank(), zero_like(entries_.front()));
    for (std::size_t f = 0; f < d.size(); ++f) d[f] = entries_[space_->rank_of_flat(f)];
    return d;
  }

  template <class F>
  auto map(F&& fn) const {
    using R = decltype(fn(entries_.front()));
    SymTensor<R> out(dim(), rank(), fn(entries_.front()));
    for (std::size_t r = 0; r < size(); ++r) out[r] = fn(entries_[r]);
    return out;
  }

  SymTensor& operator+=(const SymTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }

  friend bool operator==(const SymTensor& a, const SymTensor& b) {
    return a.space_ == b.space_ && a.entries_ == b.entries_;
  }

 private:
  void check_same(const SymTensor& o) const {
    if (space_ != o.space_) throw ShapeError("SymTensor: shape mismatch");
  }

  const IndexSpace* space_;
  std::vector<S> entries_;
};

template <class S>
SymTensor<S> scaled(const SymTensor<S>& t, std::int64_t num, std::int64_t den) {
  return t.map([&](const S& x) { return scale_by(x, num, den); });
}

/// (1/m!) sum over all slot permutations.
template <class S>
SymTensor<S> symmetrize(const DenseTensor<S>& t) {
  const auto& sp = IndexSpace::get(t.dim(), t.rank());
  SymTensor<S> out(t.dim(), t.rank(), zero_like(t[0]));
  for (std::size_t f = 0; f < t.size(); ++f) out[sp.rank_of_flat(f)] += t[f];
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = scale_by(out[r], 1, sp.multiplicity(r));
  return out;
}

/// Averages t over the permutations of the given (0-based) slots.
template <class S>
DenseTensor<S> partial_symmetrize(const DenseTensor<S>& t, std::vector<int> slots) {
  const int m = t.rank();
  if (slots.empty()) throw PreconditionError("partial_symmetrize: empty slot set");
  for (int s : slots)
    if (s < 0 || s >= m) throw PreconditionError("partial_symmetrize: slot out of range");
  std::sort(slots.begin(), slots.end());
  if (std::adjacent_find(slots.begin(), slots.end()) != slots.end())
    throw PreconditionError("partial_symmetrize: repeated slot");
  const std::int64_t count = factorial(static_cast<int>(slots.size()));
  DenseTensor<S> out(t.dim(), m, zero_like(t[0]));
  std::vector<int> idx(static_cast<std::size_t>(m)), src(static_cast<std::size_t>(m));
  for (std::size_t f = 0; f < t.size(); ++f) {
    t.space().unflatten(f, idx);
    std::vector<int> perm(slots.size());
    std::iota(perm.begin(), perm.end(), 0);
    S acc = zero_like(t[0]);
    do {
      src = idx;
      for (std::size_t a = 0; a < slots.size(); ++a)
        src[static_cast<std::size_t>(slots[a])] =
            idx[static_cast<std::size_t>(slots[static_cast<std::size_t>(perm[a])])];
      acc += t.at(src);
    } while (std::next_permutation(perm.begin(), perm.end()));
    out[f] = scale_by(acc, 1, count);
  }
  return out;
}

/// Antisymmetrization in one pair of slots: (t - t with a,b swapped) / 2.
template <class S>
DenseTensor<S> alternate(const DenseTensor<S>& t, int slot_a, int slot_b) {
  const int m = t.rank();
  if (slot_a < 0 || slot_a >= m || slot_b < 0 || slot_b >= m)
    throw PreconditionError("alternate: slot out of range");
  if (slot_a == slot_b) throw PreconditionError("alternate: slots must differ");
  DenseTensor<S> out(t.dim(), m, zero_like(t[0]));
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (std::size_t f = 0; f < t.size(); ++f) {
    t.space().unflatten(f, idx);
    auto sw = idx;
    std::swap(sw[static_cast<std::size_t>(slot_a)], sw[static_cast<std::size_t>(slot_b)]);
    out[f] = scale_by(t[f] - t.at(sw), 1, 2);
  }
  return out;
}

template <class U, class V>
auto tensor_product(const DenseTensor<U>& u, const DenseTensor<V>& v) {
  using R = decltype(u[0] * v[0]);
  if (u.dim() != v.dim()) throw ShapeError("tensor_product: dimension mismatch");
  DenseTensor<R> out(u.dim(), u.rank() + v.rank(), u[0] * v[0]);
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = 0; b < v.size(); ++b) out[a * v.size() + b] = u[a] * v[b];
  return out;
}

/// u ⊙ v = σ(u ⊗ v), evaluated by splitting each canonical output index into
/// position subsets instead of expanding to dense form.
template <class U, class V>
auto sym_product(const SymTensor<U>& u, const SymTensor<V>& v) {
  using R = decltype(u[0] * v[0]);
  if (u.dim() != v.dim()) throw ShapeError("sym_product: dimension mismatch");
  const int n = u.dim();
  const int mu = u.rank();
  const int mv = v.rank();
  const int mt = mu + mv;
  SymTensor<R> out(n, mt, zero_like(u[0] * v[0]));
  const auto& sp = out.space();
  const std::int64_t splits = binomial(mt, mu);
  std::vector<int> a(static_cast<std::size_t>(mu)), b(static_cast<std::size_t>(mv));
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto& k = sp.canonical(r);
    R acc = zero_like(out[r]);
    // Enumerate subsets of positions of size mu via a selection mask.
    std::vector<char> mask(static_cast<std::size_t>(mt), 0);
    std::fill(mask.begin(), mask.begin() + mu, 1);
    do {
      std::size_t ia = 0, ib = 0;
      for (std::size_t p = 0; p < k.size(); ++p) {
        if (mask[p]) a[ia++] = k[p];
        else b[ib++] = k[p];
      }
      acc += u.at(a) * v.at(b);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    out[r] = scale_by(acc, 1, splits);
  }
  return out;
}

/// Symmetric multiplication by u: i_u f = u ⊙ f.
template <class U, class F>
auto i_mul(const SymTensor<U>& u, const SymTensor<F>& f) {
  return sym_product(u, f);
}

/// Dual of i_u: contracts the last rank(u) slots of g against u.
template <class U, class G>
SymTensor<G> j_contract(const SymTensor<U>& u, const SymTensor<G>& g) {
  if (u.dim() != g.dim()) throw ShapeError("j_contract: dimension mismatch");
  if (g.rank() < u.rank()) throw ShapeError("j_contract: rank(g) < rank(u)");
  const int n = g.dim();
  const int k = u.rank();
  const int m = g.rank() - k;
  SymTensor<G> out(n, m, zero_like(g[0]));
  const auto& sp = out.space();
  const auto& usp = u.space();
  std::vector<int> full(static_cast<std::size_t>(m + k));
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto& i = sp.canonical(r);
    std::copy(i.begin(), i.end(), full.begin());
    G acc = zero_like(g[0]);
    for (std::size_t c = 0; c < usp.size(); ++c) {
      const auto& kk = usp.canonical(c);
      std::copy(kk.begin(), kk.end(), full.begin() + m);
      acc += scale_by(g.at(full) * u[c], usp.multiplicity(c), 1);
    }
    out[r] = std::move(acc);
  }
  return out;
}

/// Full contraction <u, v> over all n^m dense index tuples.
template <class S>
S inner(const SymTensor<S>& u, const SymTensor<S>& v) {
  if (u.dim() != v.dim() || u.rank() != v.rank()) throw ShapeError("inner: shape mismatch");
  S acc = zero_like(u[0]);
  for (std::size_t r = 0; r < u.size(); ++r)
    acc += scale_by(u[r] * v[r], u.space().multiplicity(r), 1);
  return acc;
}

template <class S>
SymTensor<S> vector_tensor(std::span<const S> xi) {
  SymTensor<S> out(static_cast<int>(xi.size()), 1, zero_like(xi[0]));
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = xi[i];
  return out;
}

/// ξ^{⊙m}: entry at canonical I is the product of ξ_i over I.
template <class S>
SymTensor<S> tensor_power(std::span<const S> xi, int m) {
  const int n = static_cast<int>(xi.size());
  SymTensor<S> out(n, m, zero_like(xi[0]));
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto& idx = out.space().canonical(r);
    if (idx.empty()) {
      out[r] = one_like(xi[0]);
      continue;
    }
    S p = xi[static_cast<std::size_t>(idx[0])];
    for (std::size_t t = 1; t < idx.size(); ++t) p = p * xi[static_cast<std::size_t>(idx[t])];
    out[r] = std::move(p);
  }
  return out;
}

template <class S>
SymTensor<S> tensor_power(const std::vector<S>& xi, int m) {
  return tensor_power(std::span<const S>(xi), m);
}

/// Euclidean metric δ_ij as a rank-2 symmetric tensor.
template <class S>
SymTensor<S> metric_tensor(int n) {
  SymTensor<S> g(n, 2, from_rational<S>(Rational(0)));
  for (int i = 0; i < n; ++i) g.at({i, i}) = from_rational<S>(Rational(1));
  return g;
}

template <class S>
SymTensor<S> scalar_tensor(int n, S value) {
  SymTensor<S> t(n, 0, value);
  return t;
}

/// i (metric multiplication) applied `times` times.
template <class S>
SymTensor<S> i_metric(SymTensor<S> f, int times = 1) {
  const auto g = metric_tensor<coefficient_t<S>>(f.dim());
  for (int t = 0; t < times; ++t) f = i_mul(g, f);
  return f;
}

/// j (metric trace) applied `times` times.
template <class S>
SymTensor<S> j_metric(SymTensor<S> f, int times = 1) {
  const auto g = metric_tensor<coefficient_t<S>>(f.dim());
  for (int t = 0; t < times; ++t) f = j_contract(g, f);
  return f;
}

/// i^l j^l f.
template <class S>
SymTensor<S> ij_power(const SymTensor<S>& f, int l) {
  return i_metric(j_metric(f, l), l);
}

/// Rank of {η_{i1} ⊙ ... ⊙ η_{im} : i1 <= ... <= im} inside S^m.
int sym_power_span_rank(const std::vector<std::vector<double>>& vectors, int m,
                        double rel_tol = 1e-10);
int sym_power_span_rank(const std::vector<std::vector<Rational>>& vectors, int m);

/// Rows are the symmetric products η_{i1} ⊙ ... ⊙ η_{im} in canonical
/// coordinates, one per canonical multi-index over {0..n-1}.
template <class S>
std::vector<SymTensor<S>> symmetric_products(const std::vector<std::vector<S>>& vectors, int m) {
  const int n = static_cast<int>(vectors.size());
  if (n == 0) throw PreconditionError("symmetric_products: no vectors");
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != n)
      throw PreconditionError("symmetric_products: expected n vectors of length n");
  const auto& choose = IndexSpace::get(n, m);
  std::vector<SymTensor<S>> out;
  out.reserve(choose.size());
  for (std::size_t r = 0; r < choose.size(); ++r) {
    SymTensor<S> p = scalar_tensor<S>(n, from_rational<S>(Rational(1)));
    for (int which : choose.canonical(r))
      p = sym_product(p, vector_tensor<S>(std::span<const S>(vectors[static_cast<std::size_t>(which)])));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace tentomo
