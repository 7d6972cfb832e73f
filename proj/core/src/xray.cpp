#include "tentomo/xray.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "tentomo/linalg.hpp"
#include "tentomo/spherequad.hpp"

namespace tentomo {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ∂^δ ξ^c as a coefficient times ξ^{c−δ}.
double monomial_derivative(std::span<const int> c, std::span<const int> d,
                           std::span<const double> xi) {
  double v = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (d[i] > c[i]) return 0.0;
    for (int t = 0; t < d[i]; ++t) v *= c[i] - t;
    v *= std::pow(xi[i], c[i] - d[i]);
  }
  return v;
}

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

void Line::validate() const {
  if (x.size() != xi.size() || x.empty()) throw ShapeError("Line: x and xi must have the same positive length");
  if (std::all_of(xi.begin(), xi.end(), [](double v) { return v == 0.0; }))
    throw PreconditionError("Line: direction must be nonzero");
}

void TransverseRay::validate(double tol) const {
  if (omega.size() != x.size() || omega.size() != y.size())
    throw ShapeError("TransverseRay: omega, x and y must have the same length");
  if (std::abs(dot(omega, omega) - 1.0) > tol) throw PreconditionError("TransverseRay: omega is not a unit vector");
  if (std::abs(dot(omega, x)) > tol) throw PreconditionError("TransverseRay: x is not orthogonal to omega");
  if (std::abs(dot(omega, y)) > tol) throw PreconditionError("TransverseRay: y is not orthogonal to omega");
}

std::optional<Chord> chord(const Line& line, double rho) {
  const double a = dot(line.xi, line.xi);
  const double b = dot(line.x, line.xi);
  const double center = -b / a;
  double d2 = 0.0;
  for (std::size_t i = 0; i < line.x.size(); ++i) {
    const double p = line.x[i] + center * line.xi[i];
    d2 += p * p;
  }
  if (rho - std::sqrt(d2) <= 1e-14) return std::nullopt;
  return Chord{center, std::sqrt((rho * rho - d2) / a)};
}

TransformEngine::TransformEngine(const PolyBumpField& f)
    : f_(f), table_(f_), rho_(to_double(f.rho())) {
  if (!f_.bounded()) throw PreconditionError("TransformEngine: line integrals need a compactly supported field");
}

const TransformEngine::Entry& TransformEngine::entry(std::size_t component,
                                                     const std::vector<int>& orders) {
  auto key = std::make_pair(component, orders);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  int total = 0;
  for (int o : orders) total += o;
  const QPoly& q = table_.get(component, orders);
  Entry e{CompiledPolynomial(q), f_.s() - total, q.empty() ? 0 : q.degree()};
  return cache_.emplace(std::move(key), std::move(e)).first->second;
}

double TransformEngine::integrate(const Line& line, std::span<const Term> terms) const {
  const auto ch = chord(line, rho_);
  if (!ch) return 0.0;
  int degree = 0;
  for (const auto& t : terms)
    if (t.weight != 0.0 && !t.entry->core.empty())
      degree = std::max(degree, t.entry->degree + 2 * t.entry->s + t.tpow);
  const auto& gl = gauss_legendre(degree / 2 + 1);
  const int n = line.dim();
  std::vector<double> y(static_cast<std::size_t>(n));
  const double rho2 = rho_ * rho_;
  double acc = 0.0;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double t = ch->center + ch->half * gl.nodes[q];
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = line.x[static_cast<std::size_t>(i)] + t * line.xi[static_cast<std::size_t>(i)];
      r2 += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    }
    const double b = rho2 - r2;
    double v = 0.0;
    for (const auto& term : terms) {
      if (term.weight == 0.0 || term.entry->core.empty()) continue;
      v += term.weight * term.entry->core(y.data()) * pow_int(b, term.entry->s) * pow_int(t, term.tpow);
    }
    acc += gl.weights[q] * v;
  }
  return acc * ch->half;
}

double TransformEngine::weighted(const Line& line, std::span<const double> w, int k) {
  line.validate();
  if (line.dim() != f_.dim() || static_cast<int>(w.size()) != f_.dim())
    throw ShapeError("weighted transform: dimension mismatch");
  const auto& sp = f_.core().space();
  const std::vector<int> none(static_cast<std::size_t>(f_.dim()), 0);
  std::vector<Term> terms;
  for (std::size_t r = 0; r < sp.size(); ++r) {
    double wt = static_cast<double>(sp.multiplicity(r));
    for (int i : sp.canonical(r)) wt *= w[static_cast<std::size_t>(i)];
    terms.push_back({&entry(r, none), wt, k});
  }
  return integrate(line, terms);
}

double TransformEngine::momentum(const Line& line, int k) {
  if (k < 0) throw PreconditionError("momentum transform: k must be non-negative");
  return weighted(line, line.xi, k);
}

double TransformEngine::derivative(const Line& line, int k, std::span<const int> x_orders,
                                   std::span<const int> xi_orders) {
  line.validate();
  const int n = f_.dim();
  if (line.dim() != n || static_cast<int>(x_orders.size()) != n || static_cast<int>(xi_orders.size()) != n)
    throw ShapeError("transform_derivative: dimension mismatch");
  int total = 0;
  for (int i = 0; i < n; ++i) total += x_orders[static_cast<std::size_t>(i)] + xi_orders[static_cast<std::size_t>(i)];
  f_.require_budget(total, "transform_derivative");

  const auto& sp = f_.core().space();
  std::vector<Term> terms;
  std::vector<int> gamma(static_cast<std::size_t>(n), 0);
  std::vector<int> rest(static_cast<std::size_t>(n));
  std::vector<int> orders(static_cast<std::size_t>(n));
  // Leibniz over γ ≤ β: ∂_ξ^γ of f(x + tξ) gives t^{|γ|} ∂^γ f, the rest
  // falls on the monomial ξ^I.
  while (true) {
    double binom = 1.0;
    int gsum = 0;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      binom *= static_cast<double>(binomial(xi_orders[ui], gamma[ui]));
      rest[ui] = xi_orders[ui] - gamma[ui];
      orders[ui] = x_orders[ui] + gamma[ui];
      gsum += gamma[ui];
    }
    for (std::size_t r = 0; r < sp.size(); ++r) {
      const auto counts = MultiIndex(sp.canonical(r)).counts(n);
      const double mono = monomial_derivative(counts, rest, line.xi);
      if (mono == 0.0) continue;
      terms.push_back({&entry(r, orders), binom * static_cast<double>(sp.multiplicity(r)) * mono, k + gsum});
    }
    int i = 0;
    while (i < n && ++gamma[static_cast<std::size_t>(i)] > xi_orders[static_cast<std::size_t>(i)]) {
      gamma[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) break;
  }
  return integrate(line, terms);
}

double ray_transform(const PolyBumpField& f, const Line& line) {
  TransformEngine e(f);
  return e.momentum(line, 0);
}

double momentum_transform(const PolyBumpField& f, const Line& line, int k) {
  TransformEngine e(f);
  return e.momentum(line, k);
}

double transform_derivative(const PolyBumpField& f, const Line& line, int k,
                            std::span<const int> x_orders, std::span<const int> xi_orders) {
  TransformEngine e(f);
  return e.derivative(line, k, x_orders, xi_orders);
}

double transverse_transform(const PolyBumpField& f, const TransverseRay& ray) {
  ray.validate();
  TransformEngine e(f);
  return e.weighted(Line{ray.x, ray.omega}, ray.y, 0);
}

double shifted_momentum(std::span<const double> moments, double s) {
  const int k = static_cast<int>(moments.size()) - 1;
  double acc = 0.0;
  for (int l = 0; l <= k; ++l)
    acc += static_cast<double>(binomial(k, l)) * pow_int(-s, k - l) * moments[static_cast<std::size_t>(l)];
  return acc;
}

HomogeneityResidual homogeneity_check(const PolyBumpField& f, std::span<const double> x,
                                      std::span<const double> xi, double r, double s_shift) {
  if (r == 0.0) throw PreconditionError("homogeneity_check: r must be nonzero");
  TransformEngine e(f);
  const Line base{{x.begin(), x.end()}, {xi.begin(), xi.end()}};
  Line scaled = base;
  for (auto& v : scaled.xi) v *= r;
  Line shifted = base;
  for (std::size_t i = 0; i < shifted.x.size(); ++i) shifted.x[i] += s_shift * xi[i];
  const double j = e.momentum(base, 0);
  const double m = f.rank();
  return {e.momentum(scaled, 0) - std::pow(r, m) / std::abs(r) * j, e.momentum(shifted, 0) - j};
}

double john_apply(TransformEngine& engine, const Line& line, int k, std::pair<int, int> pair) {
  const std::pair<int, int> one[] = {pair};
  return john_iterate(engine, line, one, k);
}

double john_apply(const PolyBumpField& f, const Line& line, int k, std::pair<int, int> pair) {
  TransformEngine e(f);
  return john_apply(e, line, k, pair);
}

double john_iterate(TransformEngine& engine, const Line& line,
                    std::span<const std::pair<int, int>> pairs, int k) {
  const int n = engine.field().dim();
  const int p = static_cast<int>(pairs.size());
  for (const auto& [i, j] : pairs)
    if (i < 0 || j < 0 || i >= n || j >= n) throw PreconditionError("john operator: index out of range");
  engine.field().require_budget(2 * p, "john operator");
  std::vector<int> a(static_cast<std::size_t>(n));
  std::vector<int> b(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    std::fill(a.begin(), a.end(), 0);
    std::fill(b.begin(), b.end(), 0);
    double sign = 1.0;
    for (int t = 0; t < p; ++t) {
      auto [i, j] = pairs[static_cast<std::size_t>(t)];
      if (mask & (1u << t)) {
        std::swap(i, j);
        sign = -sign;
      }
      ++a[static_cast<std::size_t>(i)];
      ++b[static_cast<std::size_t>(j)];
    }
    acc += sign * engine.derivative(line, k, a, b);
  }
  return acc;
}

double john_iterate(const PolyBumpField& f, const Line& line,
                    std::span<const std::pair<int, int>> pairs, int k) {
  TransformEngine e(f);
  return john_iterate(e, line, pairs, k);
}

DenseTensor<double> verify_john_relation(const PolyBumpField& f, const Line& line) {
  const int n = f.dim();
  const int m = f.rank();
  TransformEngine engine(f);
  if (m == 0) {
    DenseTensor<double> out(n, 0, 0.0);
    const std::pair<int, int> pair[] = {{0, 1}};
    out[0] = john_iterate(engine, line, pair, 0);
    return out;
  }
  f.require_budget(2 * m, "verify_john_relation");
  const auto rf = operator_R(f);
  DenseTensor<double> out(n, 2 * m, 0.0);
  const double scale = pow_int(-2.0, m) * static_cast<double>(factorial(m));
  std::vector<int> idx(static_cast<std::size_t>(2 * m));
  std::vector<std::pair<int, int>> pairs(static_cast<std::size_t>(m));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out.space().unflatten(flat, idx);
    for (int t = 0; t < m; ++t)
      pairs[static_cast<std::size_t>(t)] = {idx[static_cast<std::size_t>(2 * t)], idx[static_cast<std::size_t>(2 * t + 1)]};
    const QPoly& comp = rf.at(idx);
    const double lhs = comp.empty() ? 0.0 : scale * ray_transform(rf.component(idx), line);
    out[flat] = lhs - john_iterate(engine, line, pairs, 0);
  }
  return out;
}

SymTensor<double> trt_pointwise_recover(const std::vector<std::vector<double>>& etas, int m,
                                        std::span<const double> samples) {
  if (etas.empty()) throw ShapeError("trt_pointwise_recover: no directions");
  const int n = static_cast<int>(etas.size());
  for (const auto& e : etas)
    if (static_cast<int>(e.size()) != n) throw ShapeError("trt_pointwise_recover: need n directions in R^n");
  const auto& sp = IndexSpace::get(n, m);
  if (samples.size() != sp.size()) throw ShapeError("trt_pointwise_recover: wrong sample count");
  const auto rows = symmetric_products(etas, m);
  DMatrix a(sp.size(), std::vector<double>(sp.size()));
  for (std::size_t r = 0; r < sp.size(); ++r)
    for (std::size_t c = 0; c < sp.size(); ++c) a[r][c] = rows[r][c] * static_cast<double>(sp.multiplicity(c));
  const auto sol = numeric_solve(a, {samples.begin(), samples.end()});
  SymTensor<double> out(n, m, 0.0);
  for (std::size_t c = 0; c < sp.size(); ++c) out[c] = sol[c];
  return out;
}

std::vector<Line> read_lines_csv(std::istream& in, int n) {
  std::vector<Line> lines;
  std::string row;
  int lineno = 0;
  while (std::getline(in, row)) {
    ++lineno;
    if (row.empty() || row[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(row);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (lines.empty() && lineno == 1) continue;  // header
      throw ShapeError("line CSV row " + std::to_string(lineno) + ": non-numeric cell");
    }
    if (static_cast<int>(vals.size()) != 2 * n)
      throw ShapeError("line CSV row " + std::to_string(lineno) + ": expected " + std::to_string(2 * n) + " columns");
    Line l{{vals.begin(), vals.begin() + n}, {vals.begin() + n, vals.end()}};
    l.validate();
    lines.push_back(std::move(l));
  }
  return lines;
}

void write_transform_csv(std::ostream& out, const std::vector<Line>& lines,
                         const std::vector<std::string>& value_names,
                         const std::vector<std::vector<double>>& values) {
  if (lines.empty()) return;
  const int n = lines.front().dim();
  for (int i = 1; i <= n; ++i) out << "x_" << i << ',';
  for (int i = 1; i <= n; ++i) out << "xi_" << i << (i < n || !value_names.empty() ? "," : "");
  for (std::size_t v = 0; v < value_names.size(); ++v) out << value_names[v] << (v + 1 < value_names.size() ? "," : "");
  out << '\n';
  std::ostringstream cell;
  cell.precision(17);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    cell.str("");
    for (double v : lines[r].x) cell << v << ',';
    for (int i = 0; i < n; ++i) cell << lines[r].xi[static_cast<std::size_t>(i)] << (i + 1 < n || !values.empty() ? "," : "");
    for (std::size_t v = 0; v < values.size(); ++v) cell << values[v][r] << (v + 1 < values.size() ? "," : "");
    out << cell.str() << '\n';
  }
}

}  // namespace tentomo
