#include "tentomo/polyfield.hpp"

#include <algorithm>
#include <climits>

#include "json.hpp"

#include "tentomo/combinatorics.hpp"
#include "tentomo/errors.hpp"

namespace tentomo {

namespace {

std::vector<std::vector<int>> distinct_permutations(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::vector<int> counts_of(std::span<const int> idx, int n) {
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  for (int i : idx) ++c[static_cast<std::size_t>(i)];
  return c;
}

Rational pow2(int a) {
  Rational r(1);
  for (int i = 0; i < a; ++i) r *= 2;
  return r;
}

// Accumulates Σ coef · table(component, orders) before touching polynomials,
// so repeated terms from symmetrization cost one rational addition each.
struct TermSum {
  std::map<std::pair<std::size_t, std::vector<int>>, Rational> terms;
  void add(std::size_t comp, std::vector<int> orders, const Rational& c) {
    auto [it, ins] = terms.emplace(std::make_pair(comp, std::move(orders)), c);
    if (!ins) it->second += c;
  }
  QPoly evaluate(DerivativeTable& table, int n) const {
    QPoly acc(n);
    for (const auto& [key, c] : terms)
      if (c != 0) acc += table.get(key.first, key.second) * c;
    return acc;
  }
};

void check_same_support(const PolyBumpField& a, const PolyBumpField& b) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) throw ShapeError("PolyBumpField: shape mismatch");
  if (a.bounded() != b.bounded() || (a.bounded() && a.rho() != b.rho()))
    throw ShapeError("PolyBumpField: support mismatch");
}

PairSymTensorField make_pair_field(PairLayout layout, int pairs, int tail, const PolyBumpField& f,
                                   int s_out, DenseTensor<QPoly> entries) {
  return PairSymTensorField{layout, pairs, tail, f.rho(), s_out, f.bounded(), std::move(entries)};
}

QPoly bump_of(const Rational& rho, int n) {
  return QPoly::constant(n, rho * rho) - squared_norm<Rational>(n, n);
}

}  // namespace

PolyBumpField::PolyBumpField(Rational rho, int s, SymTensor<QPoly> core)
    : rho_(std::move(rho)), s_(s), bounded_(true), core_(std::move(core)) {
  if (rho_ <= 0) throw PreconditionError("PolyBumpField: support radius must be positive");
  if (s_ < 0) throw PreconditionError("PolyBumpField: negative smoothness exponent");
  for (const auto& q : core_.entries())
    if (!q.empty() && q.nvars() != dim()) throw ShapeError("PolyBumpField: core arity mismatch");
}

PolyBumpField PolyBumpField::unrestricted(SymTensor<QPoly> core) {
  PolyBumpField f(Rational(1), 0, std::move(core));
  f.bounded_ = false;
  f.rho_ = 0;
  return f;
}

PolyBumpField PolyBumpField::scalar(Rational rho, int s, QPoly core) {
  const int n = core.nvars();
  SymTensor<QPoly> t(n, 0, std::move(core));
  return PolyBumpField(std::move(rho), s, std::move(t));
}

int PolyBumpField::budget() const { return bounded_ ? s_ - 1 : INT_MAX; }

void PolyBumpField::require_budget(int order, const char* op) const {
  if (order > budget())
    throw SmoothnessBudgetError(std::string(op) + ": needs " + std::to_string(order) +
                                " derivatives but the field is only C^" + std::to_string(s_ - 1));
}

QPoly PolyBumpField::bump() const {
  return bounded_ ? bump_of(rho_, dim()) : QPoly::constant(dim(), Rational(1));
}

QPoly PolyBumpField::realized(std::size_t r) const {
  if (!bounded_) return core_[r];
  return core_[r] * bump().pow(s_);
}

PolyBumpField PolyBumpField::lowered(int s_new) const {
  if (!bounded_ || s_new == s_) return *this;
  if (s_new > s_ || s_new < 0) throw PreconditionError("PolyBumpField::lowered: bad exponent");
  const QPoly factor = bump().pow(s_ - s_new);
  PolyBumpField out = *this;
  out.s_ = s_new;
  for (auto& q : out.core_.entries()) q = q * factor;
  return out;
}

Rational PolyBumpField::evaluate(std::span<const int> idx, std::span<const Rational> x) const {
  const QPoly& q = core_.at(idx);
  if (!bounded_) return q.evaluate<Rational>(x);
  Rational r2(0);
  for (const auto& v : x) r2 += v * v;
  const Rational b = rho_ * rho_ - r2;
  if (b <= 0) return Rational(0);
  Rational bs(1);
  for (int i = 0; i < s_; ++i) bs *= b;
  return q.evaluate<Rational>(x) * bs;
}

double PolyBumpField::evaluate(std::span<const int> idx, std::span<const double> x) const {
  const QPoly& q = core_.at(idx);
  if (!bounded_) return q.evaluate<double>(x);
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double b = to_double(rho_) * to_double(rho_) - r2;
  if (b <= 0) return 0.0;
  return q.evaluate<double>(x) * std::pow(b, s_);
}

PolyBumpField& PolyBumpField::operator+=(const PolyBumpField& o) {
  check_same_support(*this, o);
  const int s = std::min(s_, o.s_);
  *this = lowered(s);
  const PolyBumpField b = o.lowered(s);
  for (std::size_t r = 0; r < core_.size(); ++r) core_[r] += b.core_[r];
  return *this;
}

PolyBumpField& PolyBumpField::operator-=(const PolyBumpField& o) {
  check_same_support(*this, o);
  const int s = std::min(s_, o.s_);
  *this = lowered(s);
  const PolyBumpField b = o.lowered(s);
  for (std::size_t r = 0; r < core_.size(); ++r) core_[r] -= b.core_[r];
  return *this;
}

PolyBumpField operator*(PolyBumpField a, const Rational& c) {
  for (auto& q : a.core_.entries()) q = q * c;
  return a;
}

bool operator==(const PolyBumpField& a, const PolyBumpField& b) {
  if (a.dim() != b.dim() || a.rank() != b.rank() || a.bounded() != b.bounded()) return false;
  if (a.bounded() && a.rho() != b.rho()) return false;
  const int s = std::min(a.s(), b.s());
  return a.lowered(s).core() == b.lowered(s).core();
}

QPoly bump_partial(const QPoly& q, int s, const QPoly& bump, int var) {
  const int n = bump.nvars();
  QPoly out = bump * q.derivative(var);
  if (s != 0) out -= QPoly::variable(n, var) * q * Rational(2 * s);
  return out;
}

DerivativeTable::DerivativeTable(const PolyBumpField& f) : f_(&f), bump_(f.bump()) {}

const QPoly& DerivativeTable::get(std::span<const int> component_idx, const std::vector<int>& orders) {
  return get(f_->core().space().rank_of(component_idx), orders);
}

const QPoly& DerivativeTable::get(std::size_t component, const std::vector<int>& orders) {
  auto key = std::make_pair(component, orders);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  int total = 0;
  int last = -1;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    total += orders[i];
    if (orders[i] > 0) last = static_cast<int>(i);
  }
  QPoly value;
  if (total == 0) {
    value = f_->core()[component];
  } else {
    f_->require_budget(total, "derivative");
    auto prev = orders;
    --prev[static_cast<std::size_t>(last)];
    const QPoly& base = get(component, prev);
    if (f_->bounded())
      value = bump_partial(base, f_->s() - (total - 1), bump_, last);
    else
      value = base.derivative(last);
  }
  return cache_.emplace(std::move(key), std::move(value)).first->second;
}

PolyBumpField partial(const PolyBumpField& f, int var) {
  f.require_budget(1, "partial");
  const QPoly b = f.bump();
  SymTensor<QPoly> core = f.core();
  for (auto& q : core.entries())
    q = f.bounded() ? bump_partial(q, f.s(), b, var) : q.derivative(var);
  if (!f.bounded()) return PolyBumpField::unrestricted(std::move(core));
  return PolyBumpField(f.rho(), f.s() - 1, std::move(core));
}

PolyBumpField inner_derivative(const PolyBumpField& f) {
  f.require_budget(1, "inner_derivative");
  const int n = f.dim();
  const int m = f.rank();
  DerivativeTable table(f);
  SymTensor<QPoly> core(n, m + 1, QPoly(n));
  std::vector<int> rest(static_cast<std::size_t>(m));
  for (std::size_t r = 0; r < core.size(); ++r) {
    const auto& idx = core.space().canonical(r);
    TermSum sum;
    for (int t = 0; t <= m; ++t) {
      std::size_t w = 0;
      for (int u = 0; u <= m; ++u)
        if (u != t) rest[w++] = idx[static_cast<std::size_t>(u)];
      std::vector<int> orders(static_cast<std::size_t>(n), 0);
      ++orders[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
      sum.add(f.core().space().rank_of(rest), std::move(orders), Rational(1, m + 1));
    }
    core[r] = sum.evaluate(table, n);
  }
  if (!f.bounded()) return PolyBumpField::unrestricted(std::move(core));
  return PolyBumpField(f.rho(), f.s() - 1, std::move(core));
}

PolyBumpField divergence(const PolyBumpField& f) {
  if (f.rank() < 1) throw PreconditionError("divergence: rank must be at least 1");
  f.require_budget(1, "divergence");
  const int n = f.dim();
  const int m = f.rank();
  DerivativeTable table(f);
  SymTensor<QPoly> core(n, m - 1, QPoly(n));
  std::vector<int> full(static_cast<std::size_t>(m));
  for (std::size_t r = 0; r < core.size(); ++r) {
    const auto& idx = core.space().canonical(r);
    std::copy(idx.begin(), idx.end(), full.begin());
    QPoly acc(n);
    for (int i = 0; i < n; ++i) {
      full.back() = i;
      std::vector<int> orders(static_cast<std::size_t>(n), 0);
      orders[static_cast<std::size_t>(i)] = 1;
      acc += table.get(full, orders);
    }
    core[r] = std::move(acc);
  }
  if (!f.bounded()) return PolyBumpField::unrestricted(std::move(core));
  return PolyBumpField(f.rho(), f.s() - 1, std::move(core));
}

PolyBumpField laplacian_power(const PolyBumpField& f, int p) {
  if (p < 0) throw PreconditionError("laplacian_power: negative power");
  f.require_budget(2 * p, "laplacian_power");
  PolyBumpField g = f;
  for (int t = 0; t < p; ++t) {
    PolyBumpField acc = partial(partial(g, 0), 0);
    for (int i = 1; i < f.dim(); ++i) acc += partial(partial(g, i), i);
    g = std::move(acc);
  }
  return g;
}

PiMultiple l2_inner(const PolyBumpField& f, const PolyBumpField& g) {
  check_same_support(f, g);
  if (!f.bounded()) throw PreconditionError("l2_inner: fields must be compactly supported");
  const QPoly b = f.bump().pow(f.s() + g.s());
  PiMultiple acc{Rational(0), f.dim() / 2};
  const auto& sp = f.core().space();
  for (std::size_t r = 0; r < sp.size(); ++r) {
    const QPoly integrand = f.core()[r] * g.core()[r] * b;
    acc += ball_integral(integrand, f.rho()) * Rational(sp.multiplicity(r));
  }
  return acc;
}

PolyBumpField PairSymTensorField::component(std::span<const int> idx) const {
  const QPoly& q = entries.at(idx);
  SymTensor<QPoly> t(dim(), 0, q.empty() ? QPoly(dim()) : q);
  if (!bounded) return PolyBumpField::unrestricted(std::move(t));
  return PolyBumpField(rho, s, std::move(t));
}

PairSymTensorField PairSymTensorField::lowered(int s_new) const {
  if (!bounded || s_new == s) return *this;
  if (s_new > s || s_new < 0) throw PreconditionError("PairSymTensorField::lowered: bad exponent");
  const QPoly factor = bump_of(rho, dim()).pow(s - s_new);
  PairSymTensorField out = *this;
  out.s = s_new;
  for (std::size_t f = 0; f < out.entries.size(); ++f) out.entries[f] = out.entries[f] * factor;
  return out;
}

bool PairSymTensorField::is_zero() const {
  for (const auto& q : entries.entries())
    if (!q.empty()) return false;
  return true;
}

bool operator==(const PairSymTensorField& a, const PairSymTensorField& b) {
  if (a.layout != b.layout || a.pairs != b.pairs || a.tail != b.tail || a.dim() != b.dim())
    return false;
  if (a.bounded != b.bounded || (a.bounded && a.rho != b.rho)) return false;
  const int s = std::min(a.s, b.s);
  const auto la = a.lowered(s);
  const auto lb = b.lowered(s);
  for (std::size_t f = 0; f < la.entries.size(); ++f)
    if (!(la.entries[f] == lb.entries[f])) return false;
  return true;
}

PairSymTensorField generalized_W(const PolyBumpField& f, int k) {
  const int m = f.rank();
  if (k < 0 || k > m) throw PreconditionError("generalized_W: need 0 <= k <= m");
  const int a = m - k;
  f.require_budget(a, "generalized_W");
  const int n = f.dim();
  DerivativeTable table(f);
  const auto& sp_p = IndexSpace::get(n, a);
  const auto& sp_qi = IndexSpace::get(n, m);
  const auto& sp_f = f.core().space();
  std::vector<std::vector<QPoly>> canon(sp_p.size(), std::vector<QPoly>(sp_qi.size()));
  std::vector<int> comp(static_cast<std::size_t>(m)), der;
  for (std::size_t rp = 0; rp < sp_p.size(); ++rp) {
    const auto perms_p = distinct_permutations(sp_p.canonical(rp));
    for (std::size_t rq = 0; rq < sp_qi.size(); ++rq) {
      const auto perms_qi = distinct_permutations(sp_qi.canonical(rq));
      const Rational avg(1, static_cast<std::int64_t>(perms_p.size() * perms_qi.size()));
      TermSum sum;
      for (const auto& pp : perms_p) {
        for (const auto& qq : perms_qi) {
          for (int l = 0; l <= a; ++l) {
            // f_{i, p_1…p_{a−l}, q_1…q_l} differentiated by p_{a−l+1}…p_a, q_{l+1}…q_a
            std::size_t w = 0;
            for (int t = a; t < m; ++t) comp[w++] = qq[static_cast<std::size_t>(t)];
            for (int t = 0; t < a - l; ++t) comp[w++] = pp[static_cast<std::size_t>(t)];
            for (int t = 0; t < l; ++t) comp[w++] = qq[static_cast<std::size_t>(t)];
            der.clear();
            for (int t = a - l; t < a; ++t) der.push_back(pp[static_cast<std::size_t>(t)]);
            for (int t = l; t < a; ++t) der.push_back(qq[static_cast<std::size_t>(t)]);
            const Rational c = avg * binomial(a, l) * ((l % 2 == 0) ? 1 : -1);
            sum.add(sp_f.rank_of(comp), counts_of(der, n), c);
          }
        }
      }
      canon[rp][rq] = sum.evaluate(table, n);
    }
  }
  DenseTensor<QPoly> dense(n, 2 * a + k, QPoly(n));
  std::vector<int> idx(static_cast<std::size_t>(2 * a + k));
  for (std::size_t fl = 0; fl < dense.size(); ++fl) {
    dense.space().unflatten(fl, idx);
    const auto rp = sp_p.rank_of(std::span<const int>(idx.data(), static_cast<std::size_t>(a)));
    const auto rq = sp_qi.rank_of(std::span<const int>(idx.data() + a, static_cast<std::size_t>(m)));
    dense[fl] = canon[rp][rq];
  }
  return make_pair_field(PairLayout::Blocked, a, k, f, f.bounded() ? f.s() - a : 0, std::move(dense));
}

PairSymTensorField saint_venant_W(const PolyBumpField& f) { return generalized_W(f, 0); }

PairSymTensorField generalized_R(const PolyBumpField& f, int k) {
  const int m = f.rank();
  if (k < 0 || k > m) throw PreconditionError("generalized_R: need 0 <= k <= m");
  const int a = m - k;
  f.require_budget(a, "generalized_R");
  const int n = f.dim();
  DerivativeTable table(f);
  const auto& sp_f = f.core().space();
  DenseTensor<QPoly> dense(n, 2 * a + k, QPoly(n));
  std::vector<int> idx(static_cast<std::size_t>(2 * a + k));
  std::vector<int> comp(static_cast<std::size_t>(m)), der(static_cast<std::size_t>(a));
  const Rational scale = Rational(1) / pow2(a);
  std::map<std::vector<int>, QPoly> memo;
  for (std::size_t fl = 0; fl < dense.size(); ++fl) {
    dense.space().unflatten(fl, idx);
    TermSum sum;
    for (int eps = 0; eps < (1 << a); ++eps) {
      int sign = 1;
      for (int t = 0; t < a; ++t) {
        int p = idx[static_cast<std::size_t>(2 * t)];
        int q = idx[static_cast<std::size_t>(2 * t + 1)];
        if (eps & (1 << t)) {
          std::swap(p, q);
          sign = -sign;
        }
        comp[static_cast<std::size_t>(t)] = p;
        der[static_cast<std::size_t>(t)] = q;
      }
      for (int t = 0; t < k; ++t)
        comp[static_cast<std::size_t>(a + t)] = idx[static_cast<std::size_t>(2 * a + t)];
      sum.add(sp_f.rank_of(comp), counts_of(der, n), scale * sign);
    }
    dense[fl] = sum.evaluate(table, n);
  }
  return make_pair_field(PairLayout::Interleaved, a, k, f, f.bounded() ? f.s() - a : 0,
                         std::move(dense));
}

PairSymTensorField operator_R(const PolyBumpField& f) { return generalized_R(f, 0); }

PairSymTensorField r_to_w_general(const PairSymTensorField& rk, int m, int k) {
  if (rk.layout != PairLayout::Interleaved || rk.pairs != m - k || rk.tail != k)
    throw ShapeError("r_to_w: input does not have the R^k pair structure");
  const int a = m - k;
  const int n = rk.dim();
  const auto& sp_p = IndexSpace::get(n, a);
  const auto& sp_qi = IndexSpace::get(n, m);
  std::vector<std::vector<QPoly>> canon(sp_p.size(), std::vector<QPoly>(sp_qi.size()));
  std::vector<int> src(static_cast<std::size_t>(2 * a + k));
  for (std::size_t rp = 0; rp < sp_p.size(); ++rp) {
    const auto perms_p = distinct_permutations(sp_p.canonical(rp));
    for (std::size_t rq = 0; rq < sp_qi.size(); ++rq) {
      const auto perms_qi = distinct_permutations(sp_qi.canonical(rq));
      const Rational c = pow2(a) / static_cast<std::int64_t>(perms_p.size() * perms_qi.size());
      std::map<std::size_t, Rational> coef;
      for (const auto& pp : perms_p)
        for (const auto& qq : perms_qi) {
          for (int t = 0; t < a; ++t) {
            src[static_cast<std::size_t>(2 * t)] = pp[static_cast<std::size_t>(t)];
            src[static_cast<std::size_t>(2 * t + 1)] = qq[static_cast<std::size_t>(t)];
          }
          for (int t = 0; t < k; ++t)
            src[static_cast<std::size_t>(2 * a + t)] = qq[static_cast<std::size_t>(a + t)];
          coef[rk.entries.space().flat_of(src)] += c;
        }
      QPoly acc(n);
      for (const auto& [fl, c2] : coef) acc += rk.entries[fl] * c2;
      canon[rp][rq] = std::move(acc);
    }
  }
  DenseTensor<QPoly> dense(n, 2 * a + k, QPoly(n));
  std::vector<int> idx(static_cast<std::size_t>(2 * a + k));
  for (std::size_t fl = 0; fl < dense.size(); ++fl) {
    dense.space().unflatten(fl, idx);
    const auto rp = sp_p.rank_of(std::span<const int>(idx.data(), static_cast<std::size_t>(a)));
    const auto rq = sp_qi.rank_of(std::span<const int>(idx.data() + a, static_cast<std::size_t>(m)));
    dense[fl] = canon[rp][rq];
  }
  return PairSymTensorField{PairLayout::Blocked, a, k, rk.rho, rk.s, rk.bounded, std::move(dense)};
}

PairSymTensorField w_to_r_general(const PairSymTensorField& wk, int m, int k, const Rational& c) {
  if (wk.layout != PairLayout::Blocked || wk.pairs != m - k || wk.tail != k)
    throw ShapeError("w_to_r: input does not have the W^k block structure");
  const int a = m - k;
  const int n = wk.dim();
  DenseTensor<QPoly> dense(n, 2 * a + k, QPoly(n));
  std::vector<int> idx(static_cast<std::size_t>(2 * a + k)), src(idx.size());
  const Rational scale = c / pow2(a);
  for (std::size_t fl = 0; fl < dense.size(); ++fl) {
    dense.space().unflatten(fl, idx);
    std::map<std::size_t, Rational> coef;
    for (int eps = 0; eps < (1 << a); ++eps) {
      int sign = 1;
      for (int t = 0; t < a; ++t) {
        int p = idx[static_cast<std::size_t>(2 * t)];
        int q = idx[static_cast<std::size_t>(2 * t + 1)];
        if (eps & (1 << t)) {
          std::swap(p, q);
          sign = -sign;
        }
        src[static_cast<std::size_t>(t)] = p;
        src[static_cast<std::size_t>(a + t)] = q;
      }
      for (int t = 0; t < k; ++t)
        src[static_cast<std::size_t>(2 * a + t)] = idx[static_cast<std::size_t>(2 * a + t)];
      coef[wk.entries.space().flat_of(src)] += scale * sign;
    }
    QPoly acc(n);
    for (const auto& [f2, c2] : coef)
      if (c2 != 0) acc += wk.entries[f2] * c2;
    dense[fl] = std::move(acc);
  }
  return PairSymTensorField{PairLayout::Interleaved, a, k, wk.rho, wk.s, wk.bounded, std::move(dense)};
}

PairSymTensorField r_to_w(const PairSymTensorField& rf, int m) { return r_to_w_general(rf, m, 0); }

PairSymTensorField w_to_r(const PairSymTensorField& wf, int m) {
  return w_to_r_general(wf, m, 0, Rational(1, m + 1));
}

Rational gw_to_gr_constant(int m, int k) {
  if (k < 0 || k > m) throw PreconditionError("gw_to_gr_constant: need 0 <= k <= m");
  return Rational(binomial(m, k), m - k + 1);
}

std::optional<Rational> solve_w_to_r_constant(const PairSymTensorField& rk,
                                              const PairSymTensorField& wk) {
  const int m = wk.pairs + wk.tail;
  const auto base = w_to_r_general(wk, m, wk.tail, Rational(1));
  if (base.pairs != rk.pairs || base.tail != rk.tail || base.dim() != rk.dim()) return std::nullopt;
  const int s = std::min(base.s, rk.s);
  const auto a = base.lowered(s);
  const auto b = rk.lowered(s);
  std::optional<Rational> c;
  for (std::size_t f = 0; f < a.entries.size() && !c; ++f) {
    const auto& pa = a.entries[f];
    if (pa.empty()) continue;
    const auto& [key, coef] = *pa.terms().begin();
    auto it = b.entries[f].terms().find(key);
    c = (it == b.entries[f].terms().end()) ? Rational(0) : it->second / coef;
  }
  if (!c) return b.is_zero() ? std::optional<Rational>(Rational(1)) : std::nullopt;
  for (std::size_t f = 0; f < a.entries.size(); ++f)
    if (!(a.entries[f] * *c == b.entries[f])) return std::nullopt;
  return c;
}

PairSymTensorField lower_generalized_R(const PairSymTensorField& rk) {
  if (rk.layout != PairLayout::Interleaved) throw ShapeError("lower_generalized_R: expected R^k layout");
  if (rk.tail < 1) throw PreconditionError("lower_generalized_R: k must be at least 1");
  if (rk.bounded && rk.s < 2)
    throw SmoothnessBudgetError("lower_generalized_R: field has no derivative budget left");
  const int n = rk.dim();
  const int a = rk.pairs;
  const int k = rk.tail;
  const QPoly b = rk.bounded ? bump_of(rk.rho, n) : QPoly::constant(n, Rational(1));
  auto diff = [&](const QPoly& q, int var) {
    return rk.bounded ? bump_partial(q, rk.s, b, var) : q.derivative(var);
  };
  const int rank = 2 * (a + 1) + (k - 1);
  DenseTensor<QPoly> dense(n, rank, QPoly(n));
  std::vector<int> idx(static_cast<std::size_t>(rank)), src(static_cast<std::size_t>(2 * a + k));
  std::map<std::pair<std::size_t, int>, QPoly> memo;
  auto term = [&](std::size_t flat, int var) -> const QPoly& {
    auto key = std::make_pair(flat, var);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    return memo.emplace(key, diff(rk.entries[flat], var)).first->second;
  };
  for (std::size_t fl = 0; fl < dense.size(); ++fl) {
    dense.space().unflatten(fl, idx);
    const int p = idx[static_cast<std::size_t>(2 * a)];
    const int q = idx[static_cast<std::size_t>(2 * a + 1)];
    std::copy(idx.begin(), idx.begin() + 2 * a, src.begin());
    for (int t = 0; t < k - 1; ++t)
      src[static_cast<std::size_t>(2 * a + t)] = idx[static_cast<std::size_t>(2 * a + 2 + t)];
    src.back() = p;
    QPoly acc = term(rk.entries.space().flat_of(src), q);
    src.back() = q;
    acc -= term(rk.entries.space().flat_of(src), p);
    dense[fl] = acc * Rational(1, 2);
  }
  return PairSymTensorField{PairLayout::Interleaved, a + 1, k - 1, rk.rho,
                            rk.bounded ? rk.s - 1 : 0, rk.bounded, std::move(dense)};
}

QPoly random_polynomial(int nvars, int degree, SplitMix64& rng, double density) {
  QPoly p(nvars);
  for_each_tuple(degree + 1, nvars, [&](std::span<const int> e) {
    int d = 0;
    for (int v : e) d += v;
    if (d > degree || rng.uniform() >= density) return;
    Rational c = rng.rational();
    while (c == 0) c = rng.rational();
    p.add_term(pack_exponents(e), c);
  });
  if (p.empty()) p = QPoly::constant(nvars, Rational(1));
  return p;
}

PolyBumpField random_field(int n, int m, const Rational& rho, int s, int degree, SplitMix64& rng) {
  SymTensor<QPoly> core(n, m, QPoly(n));
  for (auto& q : core.entries()) {
    auto child = rng.split();
    q = random_polynomial(n, degree, child);
  }
  return PolyBumpField(rho, s, std::move(core));
}

namespace {

nlohmann::json rational_json(const Rational& r) {
  const BigInt num = numerator(r);
  if (num >= INT64_MIN && num <= INT64_MAX) return num.convert_to<std::int64_t>();
  return num.str();
}

nlohmann::json denominator_json(const Rational& r) {
  const BigInt den = denominator(r);
  if (den <= INT64_MAX) return den.convert_to<std::int64_t>();
  return den.str();
}

BigInt bigint_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw ShapeError("field JSON: integer expected");
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return Rational(j.get<std::string>());
  if (j.is_object()) return Rational(bigint_from_json(j.at("num")), bigint_from_json(j.at("den")));
  throw ShapeError("field JSON: rational expected");
}

}  // namespace

std::string field_to_json(const PolyBumpField& f) {
  nlohmann::json j;
  j["n"] = f.dim();
  j["m"] = f.rank();
  if (denominator(f.rho()) == 1)
    j["rho"] = rational_json(f.rho());
  else
    j["rho"] = f.rho().str();
  j["s"] = f.s();
  j["bounded"] = f.bounded();
  nlohmann::json comps = nlohmann::json::array();
  const auto& sp = f.core().space();
  for (std::size_t r = 0; r < sp.size(); ++r) {
    nlohmann::json c;
    std::vector<int> idx;
    for (int i : sp.canonical(r)) idx.push_back(i + 1);
    c["index"] = idx;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [key, coef] : f.core()[r].terms()) {
      std::vector<int> e;
      for (int i = 0; i < f.dim(); ++i) e.push_back(exponent_of(key, i));
      terms.push_back({{"exps", e}, {"num", rational_json(coef)}, {"den", denominator_json(coef)}});
    }
    c["terms"] = terms;
    comps.push_back(c);
  }
  j["components"] = comps;
  return j.dump();
}

PolyBumpField field_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  SymTensor<QPoly> core(n, m, QPoly(n));
  for (const auto& c : j.at("components")) {
    std::vector<int> idx = c.at("index").get<std::vector<int>>();
    if (static_cast<int>(idx.size()) != m) throw ShapeError("field JSON: index has wrong rank");
    for (int& i : idx) {
      if (i < 1 || i > n) throw ShapeError("field JSON: index out of range");
      --i;
    }
    QPoly q(n);
    for (const auto& t : c.at("terms")) {
      const auto e = t.at("exps").get<std::vector<int>>();
      if (static_cast<int>(e.size()) != n) throw ShapeError("field JSON: exponent arity");
      q.add_term(pack_exponents(e), Rational(bigint_from_json(t.at("num")), bigint_from_json(t.at("den"))));
    }
    core.at(idx) = std::move(q);
  }
  if (j.contains("bounded") && !j.at("bounded").get<bool>()) return PolyBumpField::unrestricted(std::move(core));
  return PolyBumpField(rational_from_json(j.at("rho")), j.at("s").get<int>(), std::move(core));
}

}  // namespace tentomo
