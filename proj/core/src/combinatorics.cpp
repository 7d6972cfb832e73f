#include "tentomo/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tentomo {

std::int64_t factorial(int k) {
  if (k < 0 || k > 20) throw std::out_of_range("factorial: argument out of range");
  std::int64_t r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Rational binomial_q(int n, int k) { return Rational(binomial(n, k)); }

Rational factorial_q(int k) {
  Rational r(1);
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

std::size_t sym_dim(int n, int m) {
  return static_cast<std::size_t>(binomial(n + m - 1, m));
}

std::size_t dense_size(int n, int m) {
  std::size_t r = 1;
  for (int i = 0; i < m; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

MultiIndex MultiIndex::canonical() const {
  MultiIndex c(indices);
  std::sort(c.indices.begin(), c.indices.end());
  return c;
}

bool MultiIndex::is_canonical() const {
  return std::is_sorted(indices.begin(), indices.end());
}

std::int64_t MultiIndex::multiplicity() const {
  auto c = canonical().indices;
  std::int64_t r = factorial(rank());
  std::size_t i = 0;
  while (i < c.size()) {
    std::size_t j = i;
    while (j < c.size() && c[j] == c[i]) ++j;
    r /= factorial(static_cast<int>(j - i));
    i = j;
  }
  return r;
}

std::vector<int> MultiIndex::counts(int n) const {
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  for (int i : indices) {
    if (i < 0 || i >= n) throw std::out_of_range("MultiIndex::counts: index out of range");
    ++c[static_cast<std::size_t>(i)];
  }
  return c;
}

IndexSpace::IndexSpace(int n, int m) : n_(n), m_(m) {
  if (n < 1) throw std::invalid_argument("IndexSpace: dimension must be positive");
  if (m < 0) throw std::invalid_argument("IndexSpace: rank must be non-negative");
  std::map<std::vector<int>, std::size_t> rank;
  for_each_tuple(n, m, [&](std::span<const int> t) {
    std::vector<int> v(t.begin(), t.end());
    if (std::is_sorted(v.begin(), v.end())) {
      rank.emplace(v, canonical_.size());
      canonical_.push_back(v);
    }
  });
  multiplicity_.resize(canonical_.size());
  for (std::size_t r = 0; r < canonical_.size(); ++r)
    multiplicity_[r] = MultiIndex(canonical_[r]).multiplicity();
  dense_to_canonical_.reserve(tentomo::dense_size(n, m));
  for_each_tuple(n, m, [&](std::span<const int> t) {
    std::vector<int> v(t.begin(), t.end());
    std::sort(v.begin(), v.end());
    dense_to_canonical_.push_back(rank.at(v));
  });
}

const IndexSpace& IndexSpace::get(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<IndexSpace>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[{n, m}];
  if (!slot) slot.reset(new IndexSpace(n, m));
  return *slot;
}

std::size_t IndexSpace::flat_of(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != m_)
    throw std::invalid_argument("IndexSpace: index tuple has wrong length");
  std::size_t f = 0;
  for (int i : indices) {
    if (i < 0 || i >= n_) throw std::out_of_range("IndexSpace: index out of range");
    f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }
  return f;
}

std::size_t IndexSpace::rank_of(std::span<const int> indices) const {
  return dense_to_canonical_[flat_of(indices)];
}

void IndexSpace::unflatten(std::size_t flat, std::span<int> out) const {
  for (int t = m_ - 1; t >= 0; --t) {
    out[static_cast<std::size_t>(t)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
}

}  // namespace tentomo
