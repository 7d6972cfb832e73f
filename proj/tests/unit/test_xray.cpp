#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "line_oracle.hpp"
#include "tentomo/xray.hpp"

using namespace tentomo;
using tentomo::testing::exact_weighted_integral;

namespace {

PolyBumpField rnd(int n, int m, int s, std::uint64_t seed, int degree = 2) {
  SplitMix64 rng(seed);
  return random_field(n, m, Rational(1), s, degree, rng);
}

Line random_line(SplitMix64& rng, int n) {
  Line l{rng.point_in_ball(n, 0.8), rng.unit_vector(n)};
  const double scale = rng.uniform(0.5, 1.5);
  for (auto& v : l.xi) v *= scale;
  return l;
}

std::vector<double> to_d(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

}  // namespace

TEST(Chord, MissAndTangent) {
  EXPECT_FALSE(chord(Line{{0.0, 2.0}, {1.0, 0.0}}, 1.0).has_value());
  EXPECT_FALSE(chord(Line{{0.0, 1.0}, {1.0, 0.0}}, 1.0).has_value());
  const auto c = chord(Line{{0.0, 0.6}, {2.0, 0.0}}, 1.0);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->center, 0.0, 1e-15);
  EXPECT_NEAR(c->half, 0.4, 1e-15);
}

TEST(RayTransform, ClosedFormBump) {
  const auto f = PolyBumpField::scalar(Rational(1), 1, QPoly::constant(2, Rational(1)));
  EXPECT_NEAR(ray_transform(f, Line{{0.0, 0.0}, {1.0, 0.0}}), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(ray_transform(f, Line{{3.0, 3.0}, {1.0, 0.0}}), 0.0);
}

TEST(RayTransform, MatchesExactAntiderivative) {
  // Lines with rational chords: (0, a) + t e_1 against ρ = 1 with a = 3/5, 5/13.
  struct Case {
    Rational a, half;
  };
  const Case cases[] = {{Rational(3, 5), Rational(4, 5)}, {Rational(5, 13), Rational(12, 13)}};
  for (int m = 0; m <= 2; ++m) {
    const auto f = rnd(2, m, 3, 40 + m);
    for (const auto& c : cases) {
      const std::vector<Rational> x{Rational(0), c.a}, xi{Rational(1), Rational(0)};
      for (int k = 0; k <= 2; ++k) {
        const Rational exact = exact_weighted_integral(f, x, xi, xi, k, -c.half, c.half);
        EXPECT_NEAR(momentum_transform(f, Line{to_d(x), to_d(xi)}, k), to_double(exact),
                    1e-13 * std::max(1.0, std::abs(to_double(exact))));
      }
    }
  }
}

TEST(RayTransform, PotentialFieldsIntegrateToZero) {
  SplitMix64 rng(77);
  for (int n = 2; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      const auto f = inner_derivative(rnd(n, m - 1, 4, 50 + n * 5 + m));
      TransformEngine e(f);
      for (int i = 0; i < 50; ++i) EXPECT_NEAR(e.momentum(random_line(rng, n), 0), 0.0, 1e-12);
    }
}

TEST(Homogeneity, ScalingAndShift) {
  const std::vector<double> x{0.1, -0.3}, xi{0.6, 0.2};
  for (int m = 0; m <= 2; ++m) {
    const auto f = rnd(2, m, 3, 60 + m);
    for (double r : {2.0, -1.0, 0.5, -3.0}) {
      const auto res = homogeneity_check(f, x, xi, r, 0.37);
      EXPECT_NEAR(res.scaling, 0.0, 1e-12);
      EXPECT_NEAR(res.shift, 0.0, 1e-12);
    }
  }
  EXPECT_THROW(homogeneity_check(rnd(2, 1, 3, 1), x, xi, 0.0, 0.0), PreconditionError);
}

TEST(MomentumTransform, ShiftLaw) {
  const auto f = rnd(2, 1, 3, 70);
  TransformEngine e(f);
  SplitMix64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    Line l = random_line(rng, 2);
    const double s = rng.uniform(-0.5, 0.5);
    const std::vector<double> moments{e.momentum(l, 0), e.momentum(l, 1), e.momentum(l, 2)};
    Line shifted = l;
    for (std::size_t i = 0; i < 2; ++i) shifted.x[i] += s * l.xi[i];
    EXPECT_NEAR(e.momentum(shifted, 2), shifted_momentum(moments, s), 1e-12);
  }
}

TEST(MomentumTransform, ScalingLaw) {
  const auto f = rnd(2, 1, 3, 72);
  TransformEngine e(f);
  const Line l{{0.2, 0.1}, {0.3, -0.8}};
  Line scaled = l;
  for (auto& v : scaled.xi) v *= 3.0;
  // r^{m−k}/|r| with m = k = 1.
  EXPECT_NEAR(e.momentum(scaled, 1), e.momentum(l, 1) / 3.0, 1e-12);
  EXPECT_EQ(e.momentum(l, 0), ray_transform(f, l));
}

TEST(TransformDerivative, ZeroOrdersAndScalarGradient) {
  const auto f = rnd(2, 0, 4, 80);
  const Line l{{0.1, 0.2}, {0.7, 0.4}};
  const std::vector<int> zero{0, 0}, dx1{1, 0};
  EXPECT_DOUBLE_EQ(transform_derivative(f, l, 1, zero, zero), momentum_transform(f, l, 1));
  EXPECT_NEAR(transform_derivative(f, l, 0, dx1, zero), ray_transform(partial(f, 0), l), 1e-13);
}

TEST(TransformDerivative, MatchesFiniteDifferences) {
  SplitMix64 rng(81);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const int m = trial % 3;
    const int k = trial % 2;
    const auto f = rnd(n, m, 4, 100 + trial);
    TransformEngine e(f);
    const Line l = random_line(rng, n);
    for (int var = 0; var < n; ++var) {
      std::vector<int> a(static_cast<std::size_t>(n), 0), b(static_cast<std::size_t>(n), 0);
      a[static_cast<std::size_t>(var)] = 1;
      Line lp = l, lm = l;
      lp.x[static_cast<std::size_t>(var)] += h;
      lm.x[static_cast<std::size_t>(var)] -= h;
      const double fd_x = (e.momentum(lp, k) - e.momentum(lm, k)) / (2 * h);
      const double an_x = e.derivative(l, k, a, b);
      EXPECT_NEAR(an_x, fd_x, 1e-7 * std::max(1.0, std::abs(an_x)));

      lp = l;
      lm = l;
      lp.xi[static_cast<std::size_t>(var)] += h;
      lm.xi[static_cast<std::size_t>(var)] -= h;
      const double fd_xi = (e.momentum(lp, k) - e.momentum(lm, k)) / (2 * h);
      const double an_xi = e.derivative(l, k, b, a);
      EXPECT_NEAR(an_xi, fd_xi, 1e-7 * std::max(1.0, std::abs(an_xi)));

      // Second order: difference the analytic first ξ-derivative in x.
      std::vector<int> c(static_cast<std::size_t>(n), 0);
      c[static_cast<std::size_t>((var + 1) % n)] = 1;
      lp = l;
      lm = l;
      lp.x[static_cast<std::size_t>(var)] += h;
      lm.x[static_cast<std::size_t>(var)] -= h;
      const double fd_mixed = (e.derivative(lp, k, b, c) - e.derivative(lm, k, b, c)) / (2 * h);
      const double an_mixed = e.derivative(l, k, a, c);
      EXPECT_NEAR(an_mixed, fd_mixed, 1e-6 * std::max(1.0, std::abs(an_mixed)));
    }
  }
}

TEST(TransformDerivative, BudgetEnforced) {
  const auto f = rnd(2, 1, 2, 82);
  const Line l{{0.0, 0.0}, {1.0, 0.0}};
  const std::vector<int> a{1, 1}, zero{0, 0};
  EXPECT_THROW(transform_derivative(f, l, 0, a, zero), SmoothnessBudgetError);
}

TEST(John, ScalarTransformsAreUltrahyperbolic) {
  SplitMix64 rng(90);
  for (int n = 2; n <= 3; ++n) {
    const auto f = rnd(n, 0, 4, 91 + n);
    TransformEngine e(f);
    for (int trial = 0; trial < 50; ++trial) {
      const Line l = random_line(rng, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) EXPECT_NEAR(john_apply(e, l, 0, {i, j}), 0.0, 1e-10);
    }
  }
}

TEST(John, AntisymmetryAndDiagonal) {
  const auto f = rnd(3, 1, 4, 95);
  TransformEngine e(f);
  const Line l{{0.1, -0.2, 0.3}, {0.5, 0.5, -0.4}};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(john_apply(e, l, 0, {i, i}), 0.0);
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(john_apply(e, l, 0, {i, j}), -john_apply(e, l, 0, {j, i}), 1e-13);
  }
}

TEST(John, RelationWithR) {
  SplitMix64 rng(96);
  const std::pair<int, double> cases[] = {{1, 1e-10}, {2, 1e-9}};
  for (const auto& [m, tol] : cases) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = rnd(2, m, 2 * m + 2, 200 + 30 * m + trial);
      const auto res = verify_john_relation(f, random_line(rng, 2));
      for (double v : res.entries()) EXPECT_NEAR(v, 0.0, tol) << "m=" << m;
    }
  }
}

TEST(John, PotentialFieldBothSidesVanish) {
  const auto f = inner_derivative(rnd(2, 0, 5, 97));
  const Line l{{0.2, 0.1}, {0.6, 0.8}};
  const std::pair<int, int> pairs[] = {{0, 1}};
  EXPECT_NEAR(john_iterate(f, l, pairs), 0.0, 1e-12);
  const auto res = verify_john_relation(f, l);
  for (double v : res.entries()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(TransverseTransform, Cases) {
  const auto f0 = rnd(3, 0, 2, 110);
  const TransverseRay ray{{0.0, 0.0, 1.0}, {0.2, 0.1, 0.0}, {0.5, -0.7, 0.0}};
  EXPECT_DOUBLE_EQ(transverse_transform(f0, ray), ray_transform(f0, Line{ray.x, ray.omega}));
  const auto f2 = rnd(3, 2, 2, 111);
  EXPECT_EQ(transverse_transform(f2, TransverseRay{ray.omega, ray.x, {0.0, 0.0, 0.0}}), 0.0);
  EXPECT_THROW(transverse_transform(f2, TransverseRay{ray.omega, ray.x, {0.0, 0.1, 0.2}}), PreconditionError);
}

TEST(TransverseTransform, SingleComponentMatchesScalarTransform) {
  SplitMix64 rng(112);
  const QPoly q = random_polynomial(3, 2, rng);
  SymTensor<QPoly> core(3, 2, QPoly(3));
  core.at({0, 1}) = q;
  const PolyBumpField f(Rational(1), 2, core);
  const auto g = PolyBumpField::scalar(Rational(1), 2, q);
  const double c = 1.0 / std::sqrt(2.0);
  const TransverseRay ray{{c, 0.0, c}, {0.1, 0.3, -0.1}, {0.4, 0.9, -0.4}};
  const double expect = 2.0 * ray.y[0] * ray.y[1] * ray_transform(g, Line{ray.x, ray.omega});
  EXPECT_NEAR(transverse_transform(f, ray), expect, 1e-13);
}

TEST(TrtRecover, ZeroBasisAndRandom) {
  const std::vector<std::vector<double>> basis{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto& sp = IndexSpace::get(3, 2);
  const std::vector<double> zeros(sp.size(), 0.0);
  const auto f0 = trt_pointwise_recover(basis, 2, zeros);
  for (double v : f0.entries()) EXPECT_EQ(v, 0.0);

  SplitMix64 rng(120);
  SymTensor<double> f(3, 2, 0.0);
  for (auto& v : f.entries()) v = rng.uniform(-1, 1);
  auto recover_from = [&](const std::vector<std::vector<double>>& etas) {
    const auto rows = symmetric_products(etas, 2);
    std::vector<double> samples;
    for (const auto& row : rows) samples.push_back(inner(f, row));
    return trt_pointwise_recover(etas, 2, samples);
  };
  const auto fb = recover_from(basis);
  for (std::size_t r = 0; r < f.size(); ++r) EXPECT_NEAR(fb[r], f[r], 1e-14);

  std::vector<std::vector<double>> etas;
  for (int i = 0; i < 3; ++i) etas.push_back(rng.unit_vector(3));
  const auto fr = recover_from(etas);
  for (std::size_t r = 0; r < f.size(); ++r) EXPECT_NEAR(fr[r], f[r], 1e-10);

  const std::vector<std::vector<double>> dependent{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_THROW(trt_pointwise_recover(dependent, 2, zeros), SingularSystemError);
}

TEST(TrtRecover, PolarizationMatchesSymmetricProducts) {
  SplitMix64 rng(121);
  SymTensor<double> f(3, 3, 0.0);
  for (auto& v : f.entries()) v = rng.uniform(-1, 1);
  std::vector<std::vector<double>> etas;
  for (int i = 0; i < 3; ++i) etas.push_back(rng.unit_vector(3));
  const auto rows = symmetric_products(etas, 3);
  const auto& sp = IndexSpace::get(3, 3);
  for (std::size_t r = 0; r < sp.size(); ++r) {
    const double v = polarized_pairing(etas, sp.canonical(r), [&](const std::vector<double>& y) {
      return inner(f, tensor_power(y, 3));
    });
    EXPECT_NEAR(v, inner(f, rows[r]), 1e-12);
  }
}

TEST(LineCsv, RoundTrip) {
  std::istringstream in("x_1,x_2,xi_1,xi_2\n0.5,0,1,0\n-0.25,0.125,0,2\n");
  const auto lines = read_lines_csv(in, 2);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1].xi[1], 2.0);
  std::ostringstream out;
  write_transform_csv(out, lines, {"J"}, {{1.5, -2.0}});
  EXPECT_EQ(out.str(), "x_1,x_2,xi_1,xi_2,J\n0.5,0,1,0,1.5\n-0.25,0.125,0,2,-2\n");
  std::istringstream bad("1,2,3\n");
  EXPECT_THROW(read_lines_csv(bad, 2), ShapeError);
}
