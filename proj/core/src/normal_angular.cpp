#include <algorithm>
#include <cmath>
#include <numeric>

#include "tentomo/normalops.hpp"

namespace tentomo {

namespace {

QPoly xi_monomial(int n, std::span<const int> idx) {
  QPoly p = QPoly::constant(2 * n, Rational(1));
  for (int i : idx) p = p * xi_var(n, i);
  return p;
}

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// All permutations of `items` (with repetition, so duplicates appear).
std::vector<std::vector<int>> all_permutations(std::vector<int> items) {
  std::vector<int> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    std::vector<int> p;
    for (int o : order) p.push_back(items[static_cast<std::size_t>(o)]);
    out.push_back(std::move(p));
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace

AngularExpr AngularExpr::moment(int n, int l, QPoly weight, std::vector<int> gamma) {
  if (gamma.empty()) gamma.assign(static_cast<std::size_t>(n), 0);
  if (weight.nvars() != 2 * n) throw ShapeError("AngularExpr: weight must be a polynomial in 2n variables");
  AngularExpr e(n);
  e.add({l, std::move(gamma)}, weight);
  return e;
}

int AngularExpr::max_order() const {
  int best = 0;
  for (const auto& [key, p] : terms_) best = std::max(best, std::accumulate(key.second.begin(), key.second.end(), 0));
  return best;
}

void AngularExpr::add(const Key& key, const QPoly& p) {
  if (p.empty()) return;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, p);
    return;
  }
  it->second += p;
  if (it->second.empty()) terms_.erase(it);
}

AngularExpr AngularExpr::partial(int var) const {
  AngularExpr out(n_);
  for (const auto& [key, p] : terms_) {
    out.add(key, p.derivative(var));
    Key up = key;
    ++up.second[static_cast<std::size_t>(var)];
    out.add(up, p);
  }
  return out;
}

AngularExpr& AngularExpr::operator+=(const AngularExpr& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [key, p] : o.terms_) add(key, p);
  return *this;
}

AngularExpr& AngularExpr::operator-=(const AngularExpr& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [key, p] : o.terms_) add(key, -p);
  return *this;
}

AngularExpr operator-(AngularExpr a) {
  for (auto& [key, p] : a.terms_) p = -p;
  return a;
}

AngularExpr operator*(AngularExpr a, const Rational& c) {
  if (c == 0) return AngularExpr(a.n_);
  for (auto& [key, p] : a.terms_) p = p * c;
  return a;
}

AngularExpr operator*(AngularExpr a, const QPoly& q) {
  AngularExpr out(a.n_);
  for (const auto& [key, p] : a.terms_) out.add(key, p * q);
  return out;
}

QPoly x_var(int n, int i) { return QPoly::variable(2 * n, i); }
QPoly xi_var(int n, int i) { return QPoly::variable(2 * n, n + i); }

QPoly x_dot_xi(int n, int p) {
  QPoly d(2 * n);
  for (int i = 0; i < n; ++i) d += x_var(n, i) * xi_var(n, i);
  return d.pow(p);
}

SymTensor<AngularExpr> normal_momentum_expr(int n, int m, int k) {
  return divergence_normal_expr(n, m, k, 0);
}

SymTensor<AngularExpr> divergence_normal_expr(int n, int m, int k, int r) {
  if (k < 0 || r < 0 || r > k || r > m) throw PreconditionError("divergence_normal: need 0 <= r <= k and r <= m");
  SymTensor<AngularExpr> out(n, m - r, AngularExpr(n));
  const Rational lead = factorial_q(k) / factorial_q(k - r);
  for (std::size_t c = 0; c < out.size(); ++c) {
    const QPoly mono = xi_monomial(n, out.space().canonical(c));
    for (int l = 0; l <= k; ++l)
      out[c] += AngularExpr::moment(n, l, mono * x_dot_xi(n, 2 * k - r - l) * (lead * binomial_q(k, l)));
  }
  return out;
}

SymTensor<AngularExpr> sphere_moment_expr(int n, int rank, int l) {
  SymTensor<AngularExpr> out(n, rank, AngularExpr(n));
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = AngularExpr::moment(n, l, xi_monomial(n, out.space().canonical(c)));
  return out;
}

SymTensor<AngularExpr> lemma_mrt_rhs_expr(int n, int m, int k) {
  if (k < 0 || k > m) throw PreconditionError("lemma_mrt: need 0 <= k <= m");
  std::vector<QPoly> x;
  for (int i = 0; i < n; ++i) x.push_back(x_var(n, i));
  SymTensor<AngularExpr> out(n, m - k, AngularExpr(n));
  for (int r = 0; r <= k; ++r) {
    const auto xr = tensor_power(x, k - r);
    auto term = j_contract(xr, iterated_divergence_expr(normal_momentum_expr(n, m, r), r));
    Rational c = binomial_q(k, r) / factorial_q(r);
    if ((k - r) % 2 == 1) c = -c;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += term[i] * c;
  }
  return out;
}

SymTensor<AngularExpr> iterated_divergence_expr(SymTensor<AngularExpr> h, int r) {
  for (int t = 0; t < r; ++t) h = divergence_expr(h);
  return h;
}

SymTensor<AngularExpr> divergence_expr(const SymTensor<AngularExpr>& h) {
  const int n = h.dim();
  const int m = h.rank();
  if (m < 1) throw PreconditionError("divergence_expr: rank must be positive");
  SymTensor<AngularExpr> out(n, m - 1, AngularExpr(n));
  std::vector<int> full(static_cast<std::size_t>(m));
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto& idx = out.space().canonical(c);
    std::copy(idx.begin(), idx.end(), full.begin());
    for (int i = 0; i < n; ++i) {
      full.back() = i;
      out[c] += h.at(full).partial(i);
    }
  }
  return out;
}

DenseTensor<AngularExpr> generalized_R_expr(const SymTensor<AngularExpr>& h, int k) {
  const int n = h.dim();
  const int m = h.rank();
  if (k < 0 || k > m) throw PreconditionError("generalized_R_expr: need 0 <= k <= m");
  const int a = m - k;
  DenseTensor<AngularExpr> out(n, 2 * a + k, AngularExpr(n));
  std::map<std::pair<std::size_t, std::vector<int>>, AngularExpr> cache;
  auto derivative = [&](std::size_t comp, const std::vector<int>& orders) -> const AngularExpr& {
    auto key = std::make_pair(comp, orders);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    AngularExpr e = h[comp];
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < orders[static_cast<std::size_t>(i)]; ++t) e = e.partial(i);
    return cache.emplace(std::move(key), std::move(e)).first->second;
  };
  std::vector<int> idx(static_cast<std::size_t>(2 * a + k));
  std::vector<int> comp(static_cast<std::size_t>(m));
  std::vector<int> orders(static_cast<std::size_t>(n));
  const Rational scale = Rational(1, 1 << a);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out.space().unflatten(flat, idx);
    AngularExpr acc(n);
    for (std::uint32_t mask = 0; mask < (1u << a); ++mask) {
      std::fill(orders.begin(), orders.end(), 0);
      bool negative = false;
      for (int t = 0; t < a; ++t) {
        int p = idx[static_cast<std::size_t>(2 * t)];
        int q = idx[static_cast<std::size_t>(2 * t + 1)];
        if (mask & (1u << t)) {
          std::swap(p, q);
          negative = !negative;
        }
        comp[static_cast<std::size_t>(t)] = p;
        ++orders[static_cast<std::size_t>(q)];
      }
      for (int t = 0; t < k; ++t) comp[static_cast<std::size_t>(a + t)] = idx[static_cast<std::size_t>(2 * a + t)];
      const auto& d = derivative(h.space().rank_of(comp), orders);
      if (negative) acc -= d;
      else acc += d;
    }
    out[flat] = acc * scale;
  }
  return out;
}

AngularEvaluator::AngularEvaluator(const PolyBumpField& f, const SphereRule& rule)
    : engine_(f), rule_(&rule) {
  if (rule.n != f.dim()) throw ShapeError("AngularEvaluator: rule and field dimensions differ");
}

std::vector<double> AngularEvaluator::evaluate(std::span<const AngularExpr* const> exprs,
                                               std::span<const double> x) {
  const int n = engine_.field().dim();
  if (static_cast<int>(x.size()) != n) throw ShapeError("AngularEvaluator: point has wrong dimension");
  std::map<AngularExpr::Key, std::size_t> keys;
  struct Piece {
    std::size_t key;
    CompiledPolynomial weight;
  };
  std::vector<std::vector<Piece>> compiled(exprs.size());
  for (std::size_t e = 0; e < exprs.size(); ++e)
    for (const auto& [key, p] : exprs[e]->terms()) {
      auto it = keys.emplace(key, keys.size()).first;
      compiled[e].push_back({it->second, CompiledPolynomial(p)});
    }
  std::vector<const AngularExpr::Key*> key_list(keys.size());
  for (const auto& [key, i] : keys) key_list[i] = &key;

  std::vector<double> out(exprs.size(), 0.0);
  std::vector<double> jv(keys.size());
  std::vector<double> z(static_cast<std::size_t>(2 * n));
  std::copy(x.begin(), x.end(), z.begin());
  const std::vector<int> none(static_cast<std::size_t>(n), 0);
  Line line{{x.begin(), x.end()}, std::vector<double>(static_cast<std::size_t>(n))};
  for (std::size_t q = 0; q < rule_->size(); ++q) {
    const auto& xi = rule_->nodes[q];
    std::copy(xi.begin(), xi.end(), line.xi.begin());
    std::copy(xi.begin(), xi.end(), z.begin() + n);
    for (std::size_t kk = 0; kk < key_list.size(); ++kk)
      jv[kk] = engine_.derivative(line, key_list[kk]->first, key_list[kk]->second, none);
    const double w = rule_->weights[q];
    for (std::size_t e = 0; e < exprs.size(); ++e) {
      double acc = 0.0;
      for (const auto& piece : compiled[e]) acc += piece.weight(z.data()) * jv[piece.key];
      out[e] += w * acc;
    }
  }
  return out;
}

SymTensor<double> AngularEvaluator::evaluate(const SymTensor<AngularExpr>& t, std::span<const double> x) {
  std::vector<const AngularExpr*> ptrs;
  for (const auto& e : t.entries()) ptrs.push_back(&e);
  const auto vals = evaluate(ptrs, x);
  SymTensor<double> out(t.dim(), t.rank(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = vals[i];
  return out;
}

DenseTensor<double> AngularEvaluator::evaluate(const DenseTensor<AngularExpr>& t, std::span<const double> x) {
  std::vector<const AngularExpr*> ptrs;
  for (const auto& e : t.entries()) ptrs.push_back(&e);
  const auto vals = evaluate(ptrs, x);
  DenseTensor<double> out(t.dim(), t.rank(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = vals[i];
  return out;
}

SymTensor<double> normal_ray(const PolyBumpField& f, std::span<const double> x, const SphereRule& rule) {
  return normal_momentum(f, x, 0, rule);
}

SymTensor<double> normal_momentum(const PolyBumpField& f, std::span<const double> x, int k,
                                  const SphereRule& rule) {
  TransformEngine engine(f);
  return normal_momentum(engine, x, k, rule);
}

SymTensor<double> normal_momentum(TransformEngine& engine, std::span<const double> x, int k,
                                  const SphereRule& rule) {
  const auto& f = engine.field();
  const int n = f.dim();
  if (k < 0) throw PreconditionError("normal_momentum: k must be non-negative");
  if (rule.n != n || static_cast<int>(x.size()) != n) throw ShapeError("normal_momentum: dimension mismatch");
  SymTensor<double> out(n, f.rank(), 0.0);
  const auto& sp = out.space();
  Line line{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& xi = rule.nodes[q];
    double xd = 0.0;
    for (int i = 0; i < n; ++i) xd += x[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) {
      line.x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - xd * xi[static_cast<std::size_t>(i)];
      line.xi[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)];
    }
    const double j = engine.momentum(line, k) * pow_int(xd, k) * rule.weights[q];
    if (j == 0.0) continue;
    for (std::size_t c = 0; c < sp.size(); ++c) {
      double mono = 1.0;
      for (int i : sp.canonical(c)) mono *= xi[static_cast<std::size_t>(i)];
      out[c] += j * mono;
    }
  }
  return out;
}

SymTensor<double> divergence_normal(const PolyBumpField& f, std::span<const double> x, int k, int r,
                                    const SphereRule& rule) {
  const int m = f.rank();
  if (k < 0 || r < 0 || r > k + 1) throw PreconditionError("divergence_normal: need 0 <= r <= k + 1");
  if (r > m) throw PreconditionError("divergence_normal: r exceeds the rank");
  AngularEvaluator ev(f, rule);
  return ev.evaluate(iterated_divergence_expr(normal_momentum_expr(f.dim(), m, k), r), x);
}

namespace {

// m! N_0 of every component of a pair field, as a dense tensor.
DenseTensor<double> scaled_scalar_normals(const PairSymTensorField& pf, int m,
                                          std::span<const double> x, const SphereRule& rule) {
  DenseTensor<double> out(pf.dim(), pf.entries.rank(), 0.0);
  const double scale = static_cast<double>(factorial(m));
  std::map<std::string, double> seen;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const QPoly& comp = pf.entries[flat];
    if (comp.empty()) continue;
    // Skew pairs repeat the same polynomial up to sign; cache by text.
    const std::string key = to_string(comp);
    const std::string neg = to_string(-comp);
    if (auto it = seen.find(key); it != seen.end()) {
      out[flat] = it->second;
      continue;
    }
    if (auto it = seen.find(neg); it != seen.end()) {
      out[flat] = -it->second;
      continue;
    }
    std::vector<int> idx(static_cast<std::size_t>(out.rank()));
    out.space().unflatten(flat, idx);
    const double v = scale * normal_ray(pf.component(idx), x, rule)[0];
    seen.emplace(key, v);
    out[flat] = v;
  }
  return out;
}

}  // namespace

DenseTensor<double> verify_prop_ray(const PolyBumpField& f, std::span<const double> x,
                                    const SphereRule& rule) {
  const int n = f.dim();
  const int m = f.rank();
  f.require_budget(m, "verify_prop_ray");
  const auto lhs = scaled_scalar_normals(operator_R(f), m, x, rule);

  const auto nm = normal_momentum_expr(n, m, 0);
  DenseTensor<AngularExpr> rhs(n, 2 * m, AngularExpr(n));
  for (int l = 0; 2 * l <= m; ++l) {
    const auto r = generalized_R_expr(ij_power(nm, l), 0);
    const Rational c = c_constant(l, m, n);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += r[i] * c;
  }
  AngularEvaluator ev(f, rule);
  const auto rv = ev.evaluate(rhs, x);
  DenseTensor<double> out = lhs;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rv[i];
  return out;
}

SymTensor<double> verify_lemma_mrt(const PolyBumpField& f, std::span<const double> x, int k,
                                   const SphereRule& rule) {
  const int n = f.dim();
  const int m = f.rank();
  if (k < 0 || k > m) throw PreconditionError("verify_lemma_mrt: need 0 <= k <= m");
  f.require_budget(k, "verify_lemma_mrt");
  AngularEvaluator ev(f, rule);
  const auto lhs = ev.evaluate(sphere_moment_expr(n, m - k, k), x);
  const auto rhs = ev.evaluate(lemma_mrt_rhs_expr(n, m, k), x);
  return lhs - rhs;
}

DenseTensor<double> verify_prop_mrt(const PolyBumpField& f, std::span<const double> x, int k,
                                    const SphereRule& rule) {
  const int n = f.dim();
  const int m = f.rank();
  if (k < 0 || k > m) throw PreconditionError("verify_prop_mrt: need 0 <= k <= m");
  f.require_budget(m + k, "verify_prop_mrt");
  const int a = m - k;
  const auto lhs = scaled_scalar_normals(generalized_R(f, k), m, x, rule);

  std::vector<DenseTensor<AngularExpr>> t;
  for (int r = 0; r <= k; ++r) {
    const auto inner = lemma_mrt_rhs_expr(n, m, r);
    SymTensor<AngularExpr> g(n, m - r, AngularExpr(n));
    for (int l = 0; 2 * l <= m - r; ++l) {
      const auto term = ij_power(inner, l);
      const Rational c = c_constant(l, m - r, n);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += term[i] * c;
    }
    t.push_back(generalized_R_expr(g, k - r));
  }

  DenseTensor<AngularExpr> rhs(n, 2 * a + k, AngularExpr(n));
  std::vector<int> idx(static_cast<std::size_t>(2 * a + k));
  const Rational inv_kfact = Rational(1) / factorial_q(k);
  for (std::size_t flat = 0; flat < rhs.size(); ++flat) {
    rhs.space().unflatten(flat, idx);
    const std::vector<int> pairs(idx.begin(), idx.begin() + 2 * a);
    const std::vector<int> is(idx.begin() + 2 * a, idx.end());
    AngularExpr acc(n);
    for (const auto& perm : all_permutations(is)) {
      for (int r = 0; r <= k; ++r) {
        std::vector<int> tidx = pairs;
        tidx.insert(tidx.end(), perm.begin() + r, perm.end());
        AngularExpr e = t[static_cast<std::size_t>(r)].at(tidx);
        for (int s = 0; s < r; ++s) e = e.partial(perm[static_cast<std::size_t>(s)]);
        Rational c = binomial_q(k, r);
        if (r % 2 == 1) c = -c;
        acc += e * c;
      }
    }
    rhs[flat] = acc * inv_kfact;
  }
  AngularEvaluator ev(f, rule);
  const auto rv = ev.evaluate(rhs, x);
  DenseTensor<double> out = lhs;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rv[i];
  return out;
}

}  // namespace tentomo
