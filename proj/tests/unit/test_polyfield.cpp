#include <gtest/gtest.h>

#include "tentomo/polyfield.hpp"

using namespace tentomo;

namespace {

QPoly var(int n, int i) { return QPoly::variable(n, i); }

PolyBumpField rnd(int n, int m, int s, std::uint64_t seed, int degree = 2) {
  SplitMix64 rng(seed);
  return random_field(n, m, Rational(1), s, degree, rng);
}

// Realized components of a pair field as plain polynomials.
QPoly realized(const PairSymTensorField& f, std::span<const int> idx) {
  const QPoly b = QPoly::constant(f.dim(), f.rho * f.rho) - squared_norm<Rational>(f.dim(), f.dim());
  return f.at(idx) * b.pow(f.s);
}

}  // namespace

TEST(InnerDerivative, ScalarGradient) {
  const QPoly x1 = var(2, 0), x2 = var(2, 1);
  const auto f = PolyBumpField::scalar(Rational(1), 2, QPoly::constant(2, Rational(1)));
  const auto df = inner_derivative(f);
  EXPECT_EQ(df.rank(), 1);
  EXPECT_EQ(df.s(), 1);
  const QPoly b = QPoly::constant(2, Rational(1)) - x1 * x1 - x2 * x2;
  EXPECT_EQ(df.realized(0), b * x1 * Rational(-4));
  EXPECT_EQ(df.realized(1), b * x2 * Rational(-4));
}

TEST(InnerDerivative, AgreesWithExpandedPolynomial) {
  const auto f = rnd(2, 1, 4, 1);
  const auto df = inner_derivative(f);
  // (df)_{01} = (∂_1 f_0 + ∂_0 f_1) / 2 on the realized polynomials.
  const QPoly expect = (f.realized(0).derivative(1) + f.realized(1).derivative(0)) * Rational(1, 2);
  EXPECT_EQ(df.realized(df.core().space().rank_of(std::vector<int>{0, 1})), expect);
  EXPECT_THROW(inner_derivative(PolyBumpField::scalar(Rational(1), 1, var(2, 0))), SmoothnessBudgetError);
}

TEST(Divergence, RotationalFieldIsDivergenceFree) {
  SymTensor<QPoly> core(2, 1, QPoly(2));
  core[0] = var(2, 1);
  core[1] = -var(2, 0);
  const PolyBumpField f(Rational(1), 3, core);
  const auto d = divergence(f);
  EXPECT_TRUE(d.core()[0].empty());
  EXPECT_THROW(divergence(PolyBumpField::scalar(Rational(1), 3, var(2, 0))), PreconditionError);
}

TEST(Divergence, OfGradientIsLaplacian) {
  const auto v = rnd(2, 0, 5, 2);
  EXPECT_EQ(divergence(inner_derivative(v)), laplacian_power(v, 1));
}

TEST(Divergence, DualToInnerDerivative) {
  for (int n = 2; n <= 3; ++n)
    for (int m = 0; m <= 2; ++m) {
      const auto f = rnd(n, m, 3, 10 + n * 3 + m);
      const auto g = rnd(n, m + 1, 3, 20 + n * 3 + m);
      const PiMultiple lhs = l2_inner(inner_derivative(f), g);
      const PiMultiple rhs = l2_inner(f, divergence(g));
      EXPECT_EQ(lhs + rhs, PiMultiple{}) << "n=" << n << " m=" << m;
    }
}

TEST(Laplacian, Cases) {
  const QPoly x1 = var(2, 0), x2 = var(2, 1);
  const int s = 3;
  const auto f = PolyBumpField::scalar(Rational(1), s, QPoly::constant(2, Rational(1)));
  const QPoly b = QPoly::constant(2, Rational(1)) - x1 * x1 - x2 * x2;
  const QPoly bs = b.pow(s);
  EXPECT_EQ(laplacian_power(f, 1).realized(0), bs.derivative(0).derivative(0) + bs.derivative(1).derivative(1));
  EXPECT_EQ(laplacian_power(f, 0), f);
  SymTensor<QPoly> h(2, 0, x1 * x1 - x2 * x2);
  EXPECT_TRUE(laplacian_power(PolyBumpField::unrestricted(h), 1).core()[0].empty());
  EXPECT_THROW(laplacian_power(f, 2), SmoothnessBudgetError);
}

TEST(OperatorR, FirstOrderExample) {
  SymTensor<QPoly> core(2, 1, QPoly(2));
  core[0] = var(2, 0) * var(2, 1) + var(2, 1) * var(2, 1);
  const PolyBumpField f(Rational(1), 3, core);
  const auto rf = operator_R(f);
  const std::vector<int> idx{0, 1};
  EXPECT_EQ(realized(rf, idx), f.realized(0).derivative(1) * Rational(1, 2));
}

TEST(OperatorR, PairSymmetries) {
  const auto f = rnd(3, 2, 4, 5);
  const auto rf = operator_R(f);
  for_each_tuple(3, 4, [&](std::span<const int> t) {
    const std::vector<int> a(t.begin(), t.end());
    const std::vector<int> skew{a[1], a[0], a[2], a[3]};
    const std::vector<int> swap{a[2], a[3], a[0], a[1]};
    EXPECT_EQ(rf.at(a), -rf.at(skew));
    EXPECT_EQ(rf.at(a), rf.at(swap));
  });
}

TEST(KernelOfWAndR, PotentialFields) {
  for (int n = 2; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      const auto v = rnd(n, m - 1, m + 2, 100 + 7 * n + m);
      const auto f = inner_derivative(v);
      EXPECT_TRUE(saint_venant_W(f).is_zero()) << n << " " << m;
      EXPECT_TRUE(operator_R(f).is_zero()) << n << " " << m;
    }
}

TEST(RWEquivalence, RoundTrips) {
  for (int n = 2; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      const auto f = rnd(n, m, m + 1, 200 + 5 * n + m, 1);
      const auto rf = operator_R(f);
      const auto wf = saint_venant_W(f);
      EXPECT_EQ(r_to_w(rf, m), wf) << n << " " << m;
      EXPECT_EQ(w_to_r(wf, m), rf) << n << " " << m;
      EXPECT_EQ(w_to_r(r_to_w(rf, m), m), rf);
      EXPECT_EQ(r_to_w(w_to_r(wf, m), m), wf);
    }
}

TEST(RWEquivalence, FirstOrderFromExample) {
  SymTensor<QPoly> core(2, 1, QPoly(2));
  core[0] = var(2, 1);
  const PolyBumpField f(Rational(1), 2, core);
  const auto rf = operator_R(f);
  const auto wf = saint_venant_W(f);
  // W_{12} = 2 σσ R_{12} = (R_{12} + R_{21})... only σ over single slots, so W = 2R at m = 1.
  for_each_tuple(2, 2, [&](std::span<const int> t) {
    EXPECT_EQ(wf.at(t), rf.at(t) * Rational(2));
  });
}

TEST(GeneralizedOperators, Endpoints) {
  const auto f = rnd(2, 2, 4, 9);
  const auto wm = generalized_W(f, 2);
  const auto rm = generalized_R(f, 2);
  for_each_tuple(2, 2, [&](std::span<const int> t) {
    EXPECT_EQ(wm.at(t), f.core(t));
    EXPECT_EQ(rm.at(t), f.core(t));
  });
  EXPECT_EQ(generalized_W(f, 0), saint_venant_W(f));
  EXPECT_EQ(generalized_R(f, 0), operator_R(f));
  EXPECT_THROW(generalized_W(f, 3), PreconditionError);
  EXPECT_THROW(generalized_R(f, -1), PreconditionError);
}

TEST(GeneralizedOperators, RkIsROfFixedSlice) {
  const auto f = rnd(2, 2, 4, 10);
  const auto r1 = generalized_R(f, 1);
  for (int i = 0; i < 2; ++i) {
    SymTensor<QPoly> slice(2, 1, QPoly(2));
    for (int p = 0; p < 2; ++p) slice[static_cast<std::size_t>(p)] = f.core(std::vector<int>{i, p});
    const auto rs = operator_R(PolyBumpField(f.rho(), f.s(), slice));
    for_each_tuple(2, 2, [&](std::span<const int> t) {
      EXPECT_EQ(r1.at(std::vector<int>{t[0], t[1], i}), rs.at(t));
    });
  }
}

TEST(GeneralizedOperators, GRtoGWHolds) {
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = rnd(2, 2, 3, 300 + trial);
    EXPECT_EQ(r_to_w_general(generalized_R(f, 1), 2, 1), generalized_W(f, 1));
  }
}

TEST(GeneralizedOperators, WkToRkConstantIsSolvable) {
  // The W^k -> R^k direction is checked by solving for the scalar; the
  // acceptance suite reports it against C(m,k)/(m-k+1).
  const auto f = rnd(2, 2, 3, 400);
  const auto c = solve_w_to_r_constant(generalized_R(f, 1), generalized_W(f, 1));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(w_to_r_general(generalized_W(f, 1), 2, 1, *c), generalized_R(f, 1));
  std::printf("solved W^1 -> R^1 constant at m=2: %s (written constant %s)\n", c->str().c_str(),
              gw_to_gr_constant(2, 1).str().c_str());
}

TEST(GeneralizedOperators, LowerKRecoversR) {
  const auto f = rnd(2, 2, 4, 11);
  EXPECT_EQ(lower_generalized_R(generalized_R(f, 1)), operator_R(f));
  EXPECT_EQ(lower_generalized_R(generalized_R(f, 2)), generalized_R(f, 1));
}

TEST(GeneralizedOperators, BudgetEnforced) {
  const auto f = rnd(2, 2, 2, 12);
  EXPECT_THROW(operator_R(f), SmoothnessBudgetError);
  EXPECT_NO_THROW(generalized_R(f, 1));
}

TEST(FieldJson, RoundTrip) {
  const auto f = rnd(3, 2, 4, 13);
  const auto text = field_to_json(f);
  EXPECT_EQ(field_from_json(text), f);
  EXPECT_EQ(field_to_json(field_from_json(text)), text);
}
