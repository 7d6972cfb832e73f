#pragma once

// Brute-force reference implementations used only by tests.

#include <algorithm>
#include <numeric>
#include <vector>

#include "tentomo/random.hpp"
#include "tentomo/symtensor.hpp"

namespace tentomo::testing {

inline DenseTensor<Rational> random_dense(int n, int m, SplitMix64& rng) {
  DenseTensor<Rational> t(n, m, Rational(0));
  for (std::size_t f = 0; f < t.size(); ++f) t[f] = rng.rational(7, 5);
  return t;
}

inline SymTensor<Rational> random_sym(int n, int m, SplitMix64& rng) {
  SymTensor<Rational> t(n, m, Rational(0));
  for (std::size_t r = 0; r < t.size(); ++r) t[r] = rng.rational(7, 5);
  return t;
}

// Averages t over every slot permutation by explicit enumeration.
inline DenseTensor<Rational> brute_symmetrize(const DenseTensor<Rational>& t) {
  const int m = t.rank();
  DenseTensor<Rational> out(t.dim(), m, Rational(0));
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::vector<int> idx(static_cast<std::size_t>(m)), src(idx.size());
  std::int64_t count = 0;
  std::iota(perm.begin(), perm.end(), 0);
  do {
    ++count;
    for (std::size_t f = 0; f < t.size(); ++f) {
      t.space().unflatten(f, idx);
      for (int a = 0; a < m; ++a)
        src[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
      out[f] += t.at(src);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t f = 0; f < out.size(); ++f) out[f] /= count;
  return out;
}

// Σ over all n^m dense tuples of u_I v_I.
inline Rational dense_inner(const DenseTensor<Rational>& u, const DenseTensor<Rational>& v) {
  Rational acc(0);
  for (std::size_t f = 0; f < u.size(); ++f) acc += u[f] * v[f];
  return acc;
}

}  // namespace tentomo::testing
