#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "tentomo/normalops.hpp"
#include "tentomo/parallel.hpp"
#include "tentomo/polyfield.hpp"
#include "tentomo/spherequad.hpp"
#include "tentomo/ucp.hpp"
#include "tentomo/xray.hpp"

namespace tentomo::tools {

namespace {

using Case = std::function<Report()>;

std::string join_index(std::span<const int> idx) {
  std::string out;
  for (int i : idx) out += (out.empty() ? "" : "-") + std::to_string(i);
  return out.empty() ? "0" : out;
}

double exact_residual(const PiMultiple& v) {
  if (v.is_zero()) return 0.0;
  return std::max(std::abs(v.value()), std::numeric_limits<double>::min());
}

double exact_gap(const Rational& gap) {
  if (gap == 0) return 0.0;
  return std::max(std::abs(to_double(gap)), std::numeric_limits<double>::min());
}

// Entries that differ once both fields carry the same bump exponent.
std::size_t mismatches(PairSymTensorField a, PairSymTensorField b) {
  if (a.entries.size() != b.entries.size()) return std::max(a.entries.size(), b.entries.size());
  const int s = std::min(a.s, b.s);
  if (a.s != s) a = a.lowered(s);
  if (b.s != s) b = b.lowered(s);
  std::size_t count = 0;
  for (std::size_t f = 0; f < a.entries.size(); ++f)
    if (!(a.entries[f] == b.entries[f])) ++count;
  return count;
}

std::size_t nonzero_entries(const PairSymTensorField& p) {
  std::size_t count = 0;
  for (const auto& e : p.entries.entries())
    if (!e.empty()) ++count;
  return count;
}

Line random_line(SplitMix64& rng, int n, double rho) {
  Line l{rng.point_in_ball(n, 0.8 * rho), rng.unit_vector(n)};
  const double scale = rng.uniform(0.5, 1.5);
  for (auto& v : l.xi) v *= scale;
  return l;
}

QPoly random_homogeneous(int n, int degree, SplitMix64& rng) {
  QPoly p(n);
  for_each_tuple(degree + 1, n, [&](std::span<const int> e) {
    int d = 0;
    for (int v : e) d += v;
    if (d == degree && rng.uniform() < 0.8) p.add_term(pack_exponents(e), rng.rational());
  });
  return p;
}

// Seeds for the cases of one suite, drawn in case order.
class CaseSeeds {
 public:
  explicit CaseSeeds(std::uint64_t seed) : root_(seed) {}
  SplitMix64 next() { return root_.split(); }

 private:
  SplitMix64 root_;
};

Report run_cases(const std::string& suite, const std::vector<Case>& cases) {
  std::vector<Report> parts(cases.size(), Report(suite));
  parallel_for(cases.size(), [&](unsigned, std::size_t i) { parts[i] = cases[i](); }, 1);
  Report out(suite);
  for (const auto& p : parts) out.append(p);
  return out;
}

// ---------------------------------------------------------------------------

void algebra_case(Report& r, const ExperimentConfig& c, int n, int m, int t, SplitMix64 rng) {
  const int s = c.s.value_or(m + 1);
  const auto params = param_string({{"n", n}, {"m", m}, {"field", t}});
  const auto f = random_field(n, m, c.rho, s, c.degree, rng);
  const auto v = random_field(n, m - 1, c.rho, s + 1, c.degree, rng);
  const auto dv = inner_derivative(v);

  DenseTensor<Rational> dense(n, m, Rational(0));
  for (std::size_t i = 0; i < dense.size(); ++i) dense[i] = rng.rational(7, 5);
  const auto sym = symmetrize(dense);
  r.add("algebra.sym_idempotence", params, sym == symmetrize(sym.expand()) ? 0.0 : 1.0, 0.0);

  SymTensor<Rational> u(n, 1, Rational(0)), low(n, m - 1, Rational(0)), high(n, m, Rational(0));
  for (auto& e : u.entries()) e = rng.rational();
  for (auto& e : low.entries()) e = rng.rational();
  for (auto& e : high.entries()) e = rng.rational();
  Rational gap = inner(i_mul(u, low), high) - inner(low, j_contract(u, high));
  if (m >= 2) {
    SymTensor<Rational> lower2(n, m - 2, Rational(0));
    for (auto& e : lower2.entries()) e = rng.rational();
    gap += inner(i_metric(lower2), high) - inner(lower2, j_metric(high));
  }
  r.add("algebra.ij_duality", params, exact_gap(gap), 0.0);

  const auto rf = operator_R(f);
  std::size_t skew = 0;
  std::vector<int> idx(static_cast<std::size_t>(2 * m));
  for (std::size_t flat = 0; flat < rf.entries.size(); ++flat) {
    rf.entries.space().unflatten(flat, idx);
    for (int p = 0; p < m; ++p) {
      auto sw = idx;
      std::swap(sw[static_cast<std::size_t>(2 * p)], sw[static_cast<std::size_t>(2 * p + 1)]);
      if (!(rf.entries[flat] == -rf.at(sw))) ++skew;
    }
  }
  r.add("algebra.R_pair_skew", params, static_cast<double>(skew), 0.0);

  const auto wf = saint_venant_W(f);
  r.add("algebra.W_of_dv_nonzero", params, static_cast<double>(nonzero_entries(saint_venant_W(dv))), 0.0);
  r.add("algebra.R_of_dv_nonzero", params, static_cast<double>(nonzero_entries(operator_R(dv))), 0.0);
  r.add("algebra.R_to_W", params, static_cast<double>(mismatches(r_to_w(rf, m), wf)), 0.0);
  r.add("algebra.W_to_R", params, static_cast<double>(mismatches(w_to_r(wf, m), rf)), 0.0);

  for (int k : c.k) {
    if (k >= m) continue;
    const auto pk = params + ";k=" + std::to_string(k);
    const auto rk = generalized_R(f, k);
    const auto wk = generalized_W(f, k);
    r.add("algebra.GR_to_GW", pk, static_cast<double>(mismatches(r_to_w_general(rk, m, k), wk)), 0.0);
    const Rational written = gw_to_gr_constant(m, k);
    const auto solved = solve_w_to_r_constant(rk, wk);
    r.add_info("algebra.GW_to_GR_written_constant", pk + ";c=" + written.str(),
               static_cast<double>(mismatches(w_to_r_general(wk, m, k, written), rk)), 0.0);
    if (solved)
      r.add("algebra.GW_to_GR_solved_constant", pk + ";c=" + solved->str(),
            static_cast<double>(mismatches(w_to_r_general(wk, m, k, *solved), rk)), 0.0);
    else
      r.add("algebra.GW_to_GR_solved_constant", pk + ";c=none", std::numeric_limits<double>::quiet_NaN(), 0.0);
  }
}

Report algebra(const ExperimentConfig& c) {
  CaseSeeds seeds(c.seed);
  std::vector<Case> cases;
  for (int n : c.n)
    for (int m : c.m)
      for (int t = 0; t < *c.samples; ++t)
        cases.push_back([&c, n, m, t, rng = seeds.next()] {
          Report r(c.suite);
          algebra_case(r, c, n, m, t, rng);
          return r;
        });
  return run_cases(c.suite, cases);
}

// ---------------------------------------------------------------------------

Report ibp(const ExperimentConfig& c) {
  CaseSeeds seeds(c.seed);
  std::vector<Case> cases;
  cases.push_back([&c] {
    Report r(c.suite);
    for (int n : c.n) {
      const Rational nn(n);
      const std::pair<std::pair<int, int>, Rational> spots[] = {
          {{0, 1}, nn - 1},
          {{1, 2}, -(nn - 1)},
          {{0, 2}, (nn - 1) * (nn + 1)},
          {{1, 3}, Rational(-3) * (nn - 1) * (nn + 1)},
          {{2, 4}, Rational(3) * (nn - 1) * (nn + 1)},
      };
      for (const auto& [ls, expected] : spots)
        r.add("ibp.c_constant", param_string({{"n", n}, {"l", ls.first}, {"s", ls.second}}),
              exact_gap(c_constant(ls.first, ls.second, n) - expected), 0.0);
    }
    return r;
  });
  for (int n : c.n)
    for (int s = 1; s <= *c.s; ++s)
      for (int t = 0; t < *c.samples; ++t)
        cases.push_back([&c, n, s, t, rng = seeds.next()]() mutable {
          Report r(c.suite);
          const int pow2r = static_cast<int>(rng.uniform_int(0, 2));
          const int deg = s - 1 + 2 * pow2r;
          const HomogeneousRational g(random_homogeneous(n, deg, rng), deg, pow2r);
          const auto params = param_string({{"n", n}, {"s", s}, {"g", t}, {"r", pow2r}});
          for_each_tuple(n, s, [&](std::span<const int> idx) {
            r.add("ibp.residual", params + ";idx=" + join_index(idx), exact_residual(verify_ibp(g, idx)), 0.0);
          });
          return r;
        });
  return run_cases(c.suite, cases);
}

// ---------------------------------------------------------------------------

double john_tolerance(const ExperimentConfig& c, int m) {
  if (c.tolerance) return *c.tolerance;
  static constexpr double by_m[] = {1e-10, 1e-9, 1e-8, 1e-7};
  return by_m[std::clamp(m, 0, 3)];
}

Report john(const ExperimentConfig& c) {
  CaseSeeds seeds(c.seed);
  std::vector<Case> cases;
  for (int n : c.n)
    for (int m : c.m)
      for (int t = 0; t < *c.samples; ++t)
        cases.push_back([&c, n, m, t, rng = seeds.next()]() mutable {
          Report r(c.suite);
          const auto f = random_field(n, m, c.rho, c.s.value_or(std::max(2 * m + 2, 3)), c.degree, rng);
          const auto line = random_line(rng, n, to_double(c.rho));
          const auto res = verify_john_relation(f, line);
          const auto params = param_string({{"n", n}, {"m", m}, {"line", t}});
          const char* name = m == 0 ? "john.ultrahyperbolic" : "john.relation";
          std::vector<int> idx(static_cast<std::size_t>(res.rank()));
          for (std::size_t flat = 0; flat < res.size(); ++flat) {
            res.space().unflatten(flat, idx);
            r.add(name, params + ";idx=" + join_index(idx), std::abs(res[flat]), john_tolerance(c, m));
          }
          return r;
        });
  return run_cases(c.suite, cases);
}

// ---------------------------------------------------------------------------

// Residual rows per rule degree; the largest degree gates and the others
// are informational. A trailing row counts trend violations.
template <class Eval>
void convergence_rows(Report& r, const ExperimentConfig& c, const std::string& name, const std::string& params,
                      int n, const std::vector<std::vector<double>>& points, double tol, Eval&& eval) {
  auto degrees = c.rule_degrees;
  std::sort(degrees.begin(), degrees.end());
  std::vector<std::vector<double>> per_degree;
  for (int d : degrees) {
    const auto rule = build_rule(n, d);
    std::vector<double> values;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto res = eval(points[p], rule);
      std::vector<int> idx(static_cast<std::size_t>(res.rank()));
      for (std::size_t flat = 0; flat < res.size(); ++flat) {
        res.space().unflatten(flat, idx);
        const double v = std::abs(res[flat]);
        values.push_back(v);
        const auto rp = params + ";degree=" + std::to_string(d) + ";point=" + std::to_string(p) +
                        ";idx=" + join_index(idx);
        if (d == degrees.back()) r.add(name + ".residual", rp, v, tol);
        else r.add_info(name + ".residual", rp, v, tol);
      }
    }
    per_degree.push_back(std::move(values));
  }
  std::size_t violations = 0;
  std::string maxima;
  for (std::size_t d = 0; d < per_degree.size(); ++d) {
    double mx = 0.0;
    for (double v : per_degree[d]) mx = std::max(mx, v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", mx);
    maxima += std::string(maxima.empty() ? "" : "/") + buf;
    if (d == 0) continue;
    for (std::size_t i = 0; i < per_degree[d].size(); ++i)
      if (per_degree[d][i] > std::max(per_degree[d - 1][i], kTrendFloor)) ++violations;
  }
  r.add(name + ".monotone_trend", params + ";max_by_degree=" + maxima, static_cast<double>(violations), 0.0);
}

std::vector<std::vector<double>> sample_points(SplitMix64& rng, int n, double radius, int count) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < count; ++i) pts.push_back(rng.point_in_ball(n, radius));
  return pts;
}

Report prop_ray(const ExperimentConfig& c) {
  CaseSeeds seeds(c.seed);
  std::vector<Case> cases;
  for (int n : c.n)
    for (int m : c.m)
      cases.push_back([&c, n, m, rng = seeds.next()]() mutable {
        Report r(c.suite);
        const auto f = random_field(n, m, c.rho, c.s.value_or(m + 2), c.degree, rng);
        const auto pts = sample_points(rng, n, 0.7 * to_double(c.rho), *c.samples);
        convergence_rows(r, c, "prop_ray", param_string({{"n", n}, {"m", m}}), n, pts, c.tolerance.value_or(1e-5),
                         [&](const std::vector<double>& x, const SphereRule& rule) {
                           return verify_prop_ray(f, x, rule);
                         });
        return r;
      });
  return run_cases(c.suite, cases);
}

Report mrt(const ExperimentConfig& c) {
  CaseSeeds seeds(c.seed);
  std::vector<Case> cases;
  for (int n : c.n)
    for (int m : c.m)
      for (int k : c.k) {
        if (k > m) continue;
        cases.push_back([&c, n, m, k, rng = seeds.next()]() mutable {
          Report r(c.suite);
          const auto f = random_field(n, m, c.rho, c.s.value_or(k + 2), c.degree, rng);
          const auto pts = sample_points(rng, n, 0.7 * to_double(c.rho), *c.samples);
          convergence_rows(r, c, "mrt.lemma", param_string({{"n", n}, {"m", m}, {"k", k}}), n, pts,
                           c.tolerance.value_or(1e-5), [&](const std::vector<double>& x, const SphereRule& rule) {
                             return verify_lemma_mrt(f, x, k, rule);
                           });
          return r;
        });
        if (k < 1) continue;
        cases.push_back([&c, n, m, k, rng = seeds.next()]() mutable {
          Report r(c.suite);
          const auto f = random_field(n, m, c.rho, c.s.value_or(m + k + 1), c.degree, rng);
          const auto pts = sample_points(rng, n, 0.7 * to_double(c.rho), *c.samples);
          convergence_rows(r, c, "mrt.prop", param_string({{"n", n}, {"m", m}, {"k", k}}), n, pts,
                           c.tolerance.value_or(1e-5), [&](const std::vector<double>& x, const SphereRule& rule) {
                             return verify_prop_mrt(f, x, k, rule);
                           });
          return r;
        });
      }
  return run_cases(c.suite, cases);
}

// ---------------------------------------------------------------------------

Report decompose(const ExperimentConfig& c) {
  CaseSeeds seeds(c.seed);
  std::vector<Case> cases;
  const double L = c.grid_L;
  const int rule_degree = *std::max_element(c.rule_degrees.begin(), c.rule_degrees.end());
  for (int n : c.n)
    for (int m : c.m) {
      auto rng = seeds.next();
      const auto f = random_field(n, m, c.rho, *c.s, c.degree, rng);
      const auto pts = sample_points(rng, n, 0.7 * to_double(c.rho), *c.samples);
      for (int N : c.grid_N)
        cases.push_back([&c, f, n, m, N, L] {
          Report r(c.suite);
          const auto params = param_string({{"n", n}, {"m", m}, {"N", N}, {"L", L}});
          const auto g = sample_field(f, N, L);
          const double norm = g.l2_norm();
          const auto split = solenoidal_decompose(g);
          r.add("decompose.divergence_of_solenoidal", params, grid_divergence(split.solenoidal).l2_norm() / norm,
                c.tolerance.value_or(1e-9));
          const auto rebuilt = split.solenoidal + grid_inner_derivative(split.potential);
          r.add("decompose.reconstruction", params, relative_l2(rebuilt, g), c.tolerance.value_or(1e-10));
          r.add("decompose.normal_invariance", params,
                relative_l2(periodic_normal_ray(split.solenoidal), periodic_normal_ray(g)), 1e-6);
          const double lap = sample_field(laplacian_power(f, m), N, L).l2_norm();
          const double smooth = verify_smoothness(g).l2_norm() / lap;
          if (m == 1) r.add("decompose.smoothness", params, smooth, 1e-6);
          else r.add_info("decompose.smoothness", params, smooth, 1e-6);
          return r;
        });
      for (int k : c.k) {
        cases.push_back([&c, f, n, m, k, L, rule_degree, pts] {
          Report r(c.suite);
          const auto rule = build_rule(n, rule_degree);
          std::vector<double> errs;
          std::string trail;
          for (std::size_t i = 0; i < c.grid_N.size(); ++i) {
            const int N = c.grid_N[i];
            const auto params = param_string({{"n", n}, {"m", m}, {"k", k}, {"N", N}, {"L", L}});
            const auto g = sample_field(f, N, L);
            const double e = relative_l2(normal_convolution(g, k), normal_momentum_on_grid(f, N, L, k, rule));
            errs.push_back(e);
            if (i + 1 == c.grid_N.size()) r.add("normal.angular_vs_convolution", params, e, 1e-3);
            else r.add_info("normal.angular_vs_convolution", params, e, 1e-3);
          }
          std::size_t worse = 0;
          for (std::size_t i = 1; i < errs.size(); ++i)
            if (!(errs[i] < errs[i - 1])) ++worse;
          r.add("normal.refinement_trend", param_string({{"n", n}, {"m", m}, {"k", k}}), static_cast<double>(worse),
                0.0);
          if (k + 1 <= m) {
            for (std::size_t p = 0; p < pts.size(); ++p) {
              double scale = 0.0, top = 0.0;
              for (double v : normal_momentum(f, pts[p], k, rule).entries()) scale = std::max(scale, std::abs(v));
              for (double v : divergence_normal(f, pts[p], k, k + 1, rule).entries()) top = std::max(top, std::abs(v));
              r.add("normal.divergence_beyond_order",
                    param_string({{"n", n}, {"m", m}, {"k", k}, {"degree", rule_degree}, {"point", static_cast<double>(p)}}),
                    top / std::max(scale, 1e-300), 1e-5);
            }
          }
          return r;
        });
      }
    }
  return run_cases(c.suite, cases);
}

// ---------------------------------------------------------------------------

Report ucp(const ExperimentConfig& c) {
  const auto scenario = *parse_ucp_scenario(std::string_view(c.suite).substr(4));
  std::vector<Case> cases;
  const std::vector<int> ks = scenario == UcpScenario::Mrt ? c.k : std::vector<int>{c.k.front()};
  for (int n : c.n)
    for (int m : c.m)
      for (int k : ks)
        cases.push_back([&c, scenario, n, m, k] {
          UcpConfig u;
          u.n = n;
          u.m = m;
          u.k = k;
          u.rho = c.rho;
          u.s = *c.s;
          u.degree = c.degree;
          u.rule_degree = c.rule_degrees.front();
          u.samples = *c.samples;
          u.seed = c.seed;
          if (c.tolerance) u.tolerance = *c.tolerance;
          u.control_threshold = c.control_threshold;
          u.potential = c.potential;
          return ucp_experiment(scenario, u);
        });
  return run_cases(c.suite, cases);
}

}  // namespace

Report run_suite(const ExperimentConfig& c) {
  Stopwatch sw;
  Report r(c.suite);
  if (c.suite == "identities.algebra") r = algebra(c);
  else if (c.suite == "identities.ibp") r = ibp(c);
  else if (c.suite == "identities.john") r = john(c);
  else if (c.suite == "identities.prop-ray") r = prop_ray(c);
  else if (c.suite == "identities.mrt") r = mrt(c);
  else if (c.suite == "decompose") r = decompose(c);
  else r = ucp(c);
  r.set_config_json(config_to_json(c));
  r.total_seconds = sw.seconds();
  return r;
}

}  // namespace tentomo::tools
