#include "tentomo/ucp.hpp"

#include <algorithm>
#include <cmath>

#include "tentomo/normalops.hpp"
#include "tentomo/xray.hpp"

namespace tentomo {

namespace {

using Points = std::vector<std::vector<double>>;

Points sample_ball(SplitMix64& rng, std::span<const double> center, double radius, int count) {
  Points pts;
  for (int i = 0; i < count; ++i) {
    auto p = rng.point_in_ball(static_cast<int>(center.size()), radius);
    for (std::size_t d = 0; d < p.size(); ++d) p[d] += center[d];
    pts.push_back(std::move(p));
  }
  return pts;
}

double count_nonzero(const PairSymTensorField& pf) {
  double n = 0;
  for (const auto& e : pf.entries.entries())
    if (!e.empty()) ++n;
  return n;
}

// max |J^p f| over p <= pmax on one random line through each point.
double line_data(const PolyBumpField& f, const Points& pts, const Points& dirs, int pmax) {
  TransformEngine engine(f);
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Line line{pts[i], dirs[i]};
    for (int p = 0; p <= pmax; ++p) best = std::max(best, std::abs(engine.momentum(line, p)));
  }
  return best;
}

// max |∂_x^α N^p f(x)| over p <= pmax, |α| <= order and the points.
double normal_jet(const PolyBumpField& f, const Points& pts, int pmax, int order, const SphereRule& rule) {
  const int n = f.dim();
  std::vector<AngularExpr> exprs;
  for (int p = 0; p <= pmax; ++p) {
    const auto t = normal_momentum_expr(n, f.rank(), p);
    for (const auto& e : t.entries()) {
      std::vector<AngularExpr> frontier{e};
      exprs.push_back(e);
      for (int o = 1; o <= order; ++o) {
        std::vector<AngularExpr> next;
        for (const auto& g : frontier)
          for (int i = 0; i < n; ++i) next.push_back(g.partial(i));
        exprs.insert(exprs.end(), next.begin(), next.end());
        frontier = std::move(next);
      }
    }
  }
  std::vector<const AngularExpr*> ptrs;
  for (const auto& e : exprs) ptrs.push_back(&e);
  AngularEvaluator ev(f, rule);
  double best = 0.0;
  for (const auto& x : pts)
    for (double v : ev.evaluate(ptrs, x)) best = std::max(best, std::abs(v));
  return best;
}

Points random_directions(SplitMix64& rng, int n, std::size_t count) {
  Points dirs;
  for (std::size_t i = 0; i < count; ++i) dirs.push_back(rng.unit_vector(n));
  return dirs;
}

std::vector<double> orthogonal_unit(SplitMix64& rng, std::span<const double> omega) {
  while (true) {
    auto y = rng.unit_vector(static_cast<int>(omega.size()));
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) d += y[i] * omega[i];
    double norm = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] -= d * omega[i];
      norm += y[i] * y[i];
    }
    if (norm < 1e-4) continue;
    for (auto& v : y) v /= std::sqrt(norm);
    return y;
  }
}

std::vector<double> project_out(std::vector<double> x, std::span<const double> omega) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * omega[i];
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= d * omega[i];
  return x;
}

std::vector<double> normalized(std::vector<double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  for (auto& c : v) c /= std::sqrt(s);
  return v;
}

Report run_ray(const UcpConfig& c) {
  Report r("ucp.ray");
  SplitMix64 rng(c.seed);
  auto field_rng = rng.split();
  auto geo = rng.split();
  const double rho = to_double(c.rho);
  const auto v = random_field(c.n, c.m - 1, c.rho, c.s, c.degree, field_rng);
  const auto f = c.potential ? inner_derivative(v) : random_field(c.n, c.m, c.rho, c.s - 1, c.degree, field_rng);
  const auto g = random_field(c.n, c.m, c.rho, c.s - 1, c.degree, field_rng);
  const auto center = geo.point_in_ball(c.n, 0.4 * rho);
  const auto pts = sample_ball(geo, center, 0.2 * rho, c.samples);
  const auto dirs = random_directions(geo, c.n, pts.size());
  const auto rule = build_rule(c.n, c.rule_degree);
  const auto params = param_string({{"n", c.n}, {"m", c.m}, {"s", c.s}, {"seed", static_cast<double>(c.seed)}});

  Stopwatch sw;
  r.add("ray.R_f_nonzero_entries", params, count_nonzero(operator_R(f)), 0.0).seconds = sw.seconds();
  sw = Stopwatch();
  r.add("ray.J_on_lines_through_U", params, line_data(f, pts, dirs, 0), c.tolerance).seconds = sw.seconds();
  sw = Stopwatch();
  r.add("ray.N_jet_on_U", params + ";order=2", normal_jet(f, pts, 0, 2, rule), c.tolerance).seconds = sw.seconds();
  sw = Stopwatch();
  r.add("control.R_g_nonzero_entries", params, count_nonzero(operator_R(g)), 1.0, true).seconds = sw.seconds();
  sw = Stopwatch();
  r.add("control.N_jet_on_U", params + ";order=2", normal_jet(g, pts, 0, 2, rule), c.control_threshold, true)
      .seconds = sw.seconds();
  return r;
}

Report run_mrt(const UcpConfig& c) {
  Report r("ucp.mrt");
  SplitMix64 rng(c.seed);
  auto field_rng = rng.split();
  auto geo = rng.split();
  const double rho = to_double(c.rho);
  auto f = random_field(c.n, c.m - c.k - 1, c.rho, c.s, c.degree, field_rng);
  for (int t = 0; t <= c.k; ++t) f = inner_derivative(f);
  if (!c.potential) f = random_field(c.n, c.m, c.rho, f.s(), c.degree, field_rng);
  const auto g = random_field(c.n, c.m, c.rho, f.s(), c.degree, field_rng);
  const auto center = geo.point_in_ball(c.n, 0.4 * rho);
  const auto pts = sample_ball(geo, center, 0.2 * rho, c.samples);
  const auto dirs = random_directions(geo, c.n, pts.size());
  const auto rule = build_rule(c.n, c.rule_degree);
  const auto params =
      param_string({{"n", c.n}, {"m", c.m}, {"k", c.k}, {"s", c.s}, {"seed", static_cast<double>(c.seed)}});

  Stopwatch sw;
  r.add("mrt.Rk_f_nonzero_entries", params, count_nonzero(generalized_R(f, c.k)), 0.0).seconds = sw.seconds();
  for (int p = 0; p <= c.k; ++p) {
    sw = Stopwatch();
    const auto pp = params + ";p=" + std::to_string(p);
    TransformEngine engine(f);
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) best = std::max(best, std::abs(engine.momentum(Line{pts[i], dirs[i]}, p)));
    r.add("mrt.J_on_lines_through_U", pp, best, c.tolerance).seconds = sw.seconds();
  }
  sw = Stopwatch();
  r.add("mrt.N_jet_on_U", params + ";order=2", normal_jet(f, pts, c.k, 2, rule), c.tolerance).seconds = sw.seconds();

  // J^0 … J^k on one line determine J^r on every shifted parametrization.
  sw = Stopwatch();
  {
    TransformEngine engine(g);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Line line{pts[i], dirs[i]};
      std::vector<double> moments;
      for (int p = 0; p <= c.k; ++p) moments.push_back(engine.momentum(line, p));
      const double shift = geo.uniform(-0.5, 0.5);
      Line moved = line;
      for (std::size_t d = 0; d < moved.x.size(); ++d) moved.x[d] += shift * line.xi[d];
      for (int p = 0; p <= c.k; ++p) {
        const double direct = engine.momentum(moved, p);
        scale = std::max(scale, std::abs(direct));
        err = std::max(err, std::abs(shifted_momentum(std::span(moments).first(static_cast<std::size_t>(p) + 1), shift) - direct));
      }
    }
    r.add("mrt.shifted_moment_reduction", params, err, c.tolerance * (1.0 + scale)).seconds = sw.seconds();
  }
  sw = Stopwatch();
  r.add("control.Rk_g_nonzero_entries", params, count_nonzero(generalized_R(g, c.k)), 1.0, true).seconds = sw.seconds();
  sw = Stopwatch();
  r.add("control.J_on_lines_through_U", params, line_data(g, pts, dirs, c.k), c.control_threshold, true).seconds =
      sw.seconds();
  return r;
}

Report run_trt(const UcpConfig& c) {
  Report r("ucp.trt");
  SplitMix64 rng(c.seed);
  auto field_rng = rng.split();
  auto geo = rng.split();
  const int n = c.n;
  const int m = c.m;
  const double rho = to_double(c.rho);
  const auto f = random_field(n, m, c.rho, c.s, c.degree, field_rng);
  const auto& sp = f.core().space();
  const auto params = param_string({{"n", n}, {"m", m}, {"s", c.s}, {"seed", static_cast<double>(c.seed)}});

  // U lies outside the support; lines through U orthogonal to the radius miss it.
  Stopwatch sw;
  {
    std::vector<double> center(static_cast<std::size_t>(n), 0.0);
    center[0] = c.potential ? rho + 0.6 : 0.3 * rho;
    const auto pts = sample_ball(geo, center, 0.3, c.samples);
    double best = 0.0;
    for (const auto& x : pts) {
      const auto omega = orthogonal_unit(geo, normalized(x));
      const auto y = orthogonal_unit(geo, omega);
      const auto base = project_out(x, omega);
      std::vector<double> yy = project_out(y, omega);
      best = std::max(best, std::abs(transverse_transform(f, TransverseRay{omega, base, normalized(yy)})));
    }
    r.add("trt.T_on_lines_through_U", params, best, c.tolerance).seconds = sw.seconds();
  }

  // Transverse data against y^{⊙m} is the scalar ray transform of ⟨f, y^{⊙m}⟩.
  sw = Stopwatch();
  {
    std::vector<PolyBumpField> comps;
    for (std::size_t q = 0; q < sp.size(); ++q) comps.push_back(PolyBumpField::scalar(c.rho, c.s, f.core()[q]));
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < c.samples; ++i) {
      const auto omega = geo.unit_vector(n);
      const auto y = orthogonal_unit(geo, omega);
      const auto x = project_out(geo.point_in_ball(n, 0.8 * rho), omega);
      const double t = transverse_transform(f, TransverseRay{omega, x, y});
      double acc = 0.0;
      for (std::size_t q = 0; q < sp.size(); ++q) {
        double mono = static_cast<double>(sp.multiplicity(q));
        for (int a : sp.canonical(q)) mono *= y[static_cast<std::size_t>(a)];
        acc += mono * ray_transform(comps[q], Line{x, omega});
      }
      scale = std::max(scale, std::abs(t));
      err = std::max(err, std::abs(t - acc));
    }
    r.add("trt.T_equals_componentwise_I", params, err, c.tolerance * (1.0 + scale)).seconds = sw.seconds();
  }

  // Independent directions from a cone.
  const auto axis = geo.unit_vector(n);
  std::vector<std::vector<double>> etas;
  for (int i = 0; i < n; ++i) {
    auto u = geo.unit_vector(n);
    std::vector<double> e(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) e[static_cast<std::size_t>(d)] = axis[static_cast<std::size_t>(d)] + 0.4 * u[static_cast<std::size_t>(d)];
    etas.push_back(normalized(std::move(e)));
  }
  const auto expected = static_cast<double>(binomial(n + m - 1, m));
  sw = Stopwatch();
  r.add("trt.sym_power_rank_deficit", params + ";expected=" + std::to_string(static_cast<int>(expected)),
        expected - sym_power_span_rank(etas, m), 0.0)
      .seconds = sw.seconds();

  sw = Stopwatch();
  {
    double err = 0.0;
    std::vector<double> samples(sp.size());
    for (int i = 0; i < std::max(c.samples, 1); ++i) {
      const auto x = geo.point_in_ball(n, 0.9 * rho);
      std::vector<double> fx(sp.size());
      for (std::size_t q = 0; q < sp.size(); ++q) fx[q] = f.evaluate(sp.canonical(q), x);
      auto pairing = [&](std::span<const double> y) {
        double acc = 0.0;
        for (std::size_t q = 0; q < sp.size(); ++q) {
          double mono = static_cast<double>(sp.multiplicity(q));
          for (int a : sp.canonical(q)) mono *= y[static_cast<std::size_t>(a)];
          acc += mono * fx[q];
        }
        return acc;
      };
      for (std::size_t q = 0; q < sp.size(); ++q) samples[q] = polarized_pairing(etas, sp.canonical(q), pairing);
      const auto rec = trt_pointwise_recover(etas, m, samples);
      for (std::size_t q = 0; q < sp.size(); ++q) err = std::max(err, std::abs(rec[q] - fx[q]));
    }
    r.add("trt.pointwise_recovery", params + ";points=" + std::to_string(std::max(c.samples, 1)), err, c.tolerance)
        .seconds = sw.seconds();
  }

  // Dependent directions cannot separate the components.
  sw = Stopwatch();
  {
    auto dependent = etas;
    std::vector<double> sum(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) sum[static_cast<std::size_t>(d)] = etas[0][static_cast<std::size_t>(d)] + etas[1][static_cast<std::size_t>(d)];
    dependent.back() = normalized(std::move(sum));
    if (n == 2) dependent.back() = etas[0];
    r.add("control.sym_power_rank_deficit", params, expected - sym_power_span_rank(dependent, m), 1.0, true);
    double singular = 0.0;
    try {
      trt_pointwise_recover(dependent, m, std::vector<double>(sp.size(), 1.0));
    } catch (const SingularSystemError&) {
      singular = 1.0;
    }
    r.add("control.singular_system_detected", params, singular, 1.0, true).seconds = sw.seconds();
  }
  return r;
}

}  // namespace

std::optional<UcpScenario> parse_ucp_scenario(std::string_view name) {
  if (name == "ray") return UcpScenario::Ray;
  if (name == "mrt") return UcpScenario::Mrt;
  if (name == "trt") return UcpScenario::Trt;
  return std::nullopt;
}

std::string_view to_string(UcpScenario s) {
  switch (s) {
    case UcpScenario::Ray: return "ray";
    case UcpScenario::Mrt: return "mrt";
    case UcpScenario::Trt: return "trt";
  }
  return "?";
}

void validate(UcpScenario scenario, const UcpConfig& c) {
  auto fail = [](const std::string& msg) { throw PreconditionError("ucp: " + msg); };
  if (c.n < 2 || c.n > 3) fail("n must be 2 or 3");
  if (c.m < 1 || c.m > 3) fail("m must be between 1 and 3");
  if (c.rho <= 0) fail("rho must be positive");
  if (c.degree < 0) fail("degree must be non-negative");
  if (c.samples < 1) fail("samples must be positive");
  if (c.rule_degree < 2) fail("rule_degree must be at least 2");
  if (!(c.tolerance > 0.0)) fail("tolerance must be positive");
  switch (scenario) {
    case UcpScenario::Ray:
      if (c.s < std::max(c.m + 2, 4)) fail("ray needs s >= max(m + 2, 4) so that R f and two derivatives of N f exist");
      break;
    case UcpScenario::Mrt:
      if (c.k < 0 || c.k >= c.m) fail("mrt needs 0 <= k < m (f = d^{k+1} v with v of rank m - k - 1)");
      if (c.s < c.k + 2 + std::max(c.m - c.k, 2))
        fail("mrt needs s >= k + 2 + max(m - k, 2) for R^k f and two derivatives of N^p f");
      break;
    case UcpScenario::Trt:
      if (c.s < 1) fail("trt needs s >= 1");
      break;
  }
}

Report ucp_experiment(UcpScenario scenario, const UcpConfig& config) {
  validate(scenario, config);
  Stopwatch sw;
  Report r = scenario == UcpScenario::Ray ? run_ray(config)
             : scenario == UcpScenario::Mrt ? run_mrt(config)
                                            : run_trt(config);
  r.total_seconds = sw.seconds();
  return r;
}

}  // namespace tentomo
