#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tentomo/scalar.hpp"

namespace tentomo {

std::int64_t factorial(int k);
std::int64_t binomial(int n, int k);
Rational binomial_q(int n, int k);
Rational factorial_q(int k);

// Size of S^m over R^n: C(n+m-1, m).
std::size_t sym_dim(int n, int m);

// n^m, the entry count of a dense rank-m tensor.
std::size_t dense_size(int n, int m);

/// An ordered tuple of m indices in [0, n). Canonical form is non-decreasing.
struct MultiIndex {
  std::vector<int> indices;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> idx) : indices(std::move(idx)) {}

  int rank() const { return static_cast<int>(indices.size()); }
  MultiIndex canonical() const;
  bool is_canonical() const;

  /// Number of distinct orderings: m! / prod(repetition counts)!.
  std::int64_t multiplicity() const;

  /// Exponent vector (count of each index value) over n values.
  std::vector<int> counts(int n) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.canonical().indices == b.canonical().indices;
  }
};

/// Index bookkeeping for one (n, m): the canonical multi-indices in
/// lexicographic order, their multiplicities, and the map from dense flat
/// positions to canonical ranks. Instances are interned and never freed.
class IndexSpace {
 public:
  static const IndexSpace& get(int n, int m);

  int dim() const { return n_; }
  int rank() const { return m_; }
  std::size_t size() const { return canonical_.size(); }
  std::size_t dense_size() const { return dense_to_canonical_.size(); }

  const std::vector<int>& canonical(std::size_t r) const { return canonical_[r]; }
  std::int64_t multiplicity(std::size_t r) const { return multiplicity_[r]; }

  /// Canonical rank of an arbitrary (unsorted) index tuple.
  std::size_t rank_of(std::span<const int> indices) const;
  std::size_t rank_of_flat(std::size_t flat) const { return dense_to_canonical_[flat]; }

  /// Flat position of an index tuple in dense row-major storage
  /// (slot 0 most significant).
  std::size_t flat_of(std::span<const int> indices) const;
  void unflatten(std::size_t flat, std::span<int> out) const;

 private:
  IndexSpace(int n, int m);

  int n_;
  int m_;
  std::vector<std::vector<int>> canonical_;
  std::vector<std::int64_t> multiplicity_;
  std::vector<std::size_t> dense_to_canonical_;
};

/// Calls fn(tuple) for every index tuple in [0,n)^m in row-major order.
template <class Fn>
void for_each_tuple(int n, int m, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  while (true) {
    fn(std::span<const int>(idx));
    int t = m - 1;
    while (t >= 0 && ++idx[static_cast<std::size_t>(t)] == n) {
      idx[static_cast<std::size_t>(t)] = 0;
      --t;
    }
    if (t < 0) break;
  }
}

}  // namespace tentomo
