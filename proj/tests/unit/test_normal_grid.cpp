#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "tentomo/normalops.hpp"

using namespace tentomo;

namespace {

using cplx = std::complex<double>;

PolyBumpField rnd(int n, int m, int s, std::uint64_t seed, int degree = 2) {
  SplitMix64 rng(seed);
  return random_field(n, m, Rational(1), s, degree, rng);
}

double dot(const GridTensorField& a, const GridTensorField& b) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.components.size(); ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.components[c].size(); ++i) s += a.components[c][i] * b.components[c][i];
    acc += static_cast<double>(a.space().multiplicity(c)) * s;
  }
  return acc;
}

// Naive 2-D DFT, sign −1 forward, unnormalized.
std::vector<cplx> dft2(const std::vector<cplx>& a, int N, int sign) {
  std::vector<cplx> tmp(a.size()), out(a.size());
  const double w = sign * 2.0 * std::numbers::pi / N;
  for (int r = 0; r < N; ++r)
    for (int k = 0; k < N; ++k) {
      cplx s = 0.0;
      for (int j = 0; j < N; ++j) s += a[static_cast<std::size_t>(r * N + j)] * std::polar(1.0, w * j * k);
      tmp[static_cast<std::size_t>(r * N + k)] = s;
    }
  for (int c = 0; c < N; ++c)
    for (int k = 0; k < N; ++k) {
      cplx s = 0.0;
      for (int j = 0; j < N; ++j) s += tmp[static_cast<std::size_t>(j * N + c)] * std::polar(1.0, w * j * k);
      out[static_cast<std::size_t>(k * N + c)] = s;
    }
  return out;
}

// Helmholtz split of a 2-D vector field through scalar Poisson solves for
// Δφ = div f and Δψ = curl f; returns the divergence-free part ∇^⊥ψ plus the mean.
GridTensorField helmholtz_solenoidal(const GridTensorField& f) {
  const int N = f.N;
  const auto k = grid_frequencies(N, f.L);
  std::vector<cplx> a(f.components[0].begin(), f.components[0].end());
  std::vector<cplx> b(f.components[1].begin(), f.components[1].end());
  const auto ah = dft2(a, N, -1), bh = dft2(b, N, -1);
  std::vector<cplx> sa(ah.size()), sb(bh.size());
  const cplx I(0.0, 1.0);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) {
      const auto i = static_cast<std::size_t>(r * N + c);
      const double kx = k[static_cast<std::size_t>(r)], ky = k[static_cast<std::size_t>(c)];
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        sa[i] = ah[i];
        sb[i] = bh[i];
        continue;
      }
      const cplx curl = I * kx * bh[i] - I * ky * ah[i];
      const cplx psi = -curl / k2;
      sa[i] = -I * ky * psi;
      sb[i] = I * kx * psi;
    }
  auto out = GridTensorField::zeros(2, 1, N, f.L);
  const auto ra = dft2(sa, N, 1), rb = dft2(sb, N, 1);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    out.components[0][i] = ra[i].real() / (N * N);
    out.components[1][i] = rb[i].real() / (N * N);
  }
  return out;
}

}  // namespace

TEST(GridFrequencies, NyquistMappedToZero) {
  const auto k = grid_frequencies(8, 2.0 * std::numbers::pi);
  const std::vector<double> expect{0, 1, 2, 3, 0, -3, -2, -1};
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_DOUBLE_EQ(k[i], expect[i]);
  const auto odd = grid_frequencies(5, 2.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(odd[2], 2.0);
  EXPECT_DOUBLE_EQ(odd[3], -2.0);
}

TEST(GridField, NodesAndNorm) {
  auto f = GridTensorField::zeros(2, 1, 4, 2.0);
  EXPECT_EQ(f.nodes(), 16u);
  EXPECT_EQ(f.node(0), (std::vector<double>{-1.0, -1.0}));
  EXPECT_EQ(f.node(5), (std::vector<double>{-0.5, -0.5}));
  f.components[1][3] = 2.0;
  EXPECT_DOUBLE_EQ(f.l2_norm(), 2.0 * 0.5);
}

TEST(GridDerivative, SpectralOnTrigonometricField) {
  const int N = 32;
  const double L = 2.0 * std::numbers::pi;
  auto u = GridTensorField::zeros(2, 0, N, L);
  for (std::size_t i = 0; i < u.nodes(); ++i) {
    const auto x = u.node(i);
    u.components[0][i] = std::sin(3 * x[0]) * std::cos(2 * x[1]);
  }
  const auto du = grid_inner_derivative(u);
  double err = 0.0;
  for (std::size_t i = 0; i < u.nodes(); ++i) {
    const auto x = u.node(i);
    err = std::max(err, std::abs(du.components[0][i] - 3 * std::cos(3 * x[0]) * std::cos(2 * x[1])));
    err = std::max(err, std::abs(du.components[1][i] + 2 * std::sin(3 * x[0]) * std::sin(2 * x[1])));
  }
  EXPECT_LT(err, 1e-12);
}

TEST(GridDerivative, DivergenceIsNegativeAdjoint) {
  for (int m = 0; m <= 2; ++m) {
    const auto u = sample_field(rnd(2, m, 4, 10 + m), 32, 3.0);
    const auto g = sample_field(rnd(2, m + 1, 4, 20 + m), 32, 3.0);
    const double lhs = dot(grid_inner_derivative(u), g);
    const double rhs = -dot(u, grid_divergence(g));
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + std::abs(lhs))) << "m=" << m;
  }
}

TEST(GridDerivative, MatchesAnalyticDerivativeOfSmoothBump) {
  const auto f = rnd(2, 1, 6, 31);
  const auto g = grid_inner_derivative(sample_field(f, 128, 4.0));
  EXPECT_LT(relative_l2(g, sample_field(inner_derivative(f), 128, 4.0)), 1e-6);
}

TEST(Solenoidal, ResidualsAndReconstruction) {
  for (int n : {2, 3}) {
    for (int m = 1; m <= 2; ++m) {
      const int N = n == 2 ? 64 : 16;
      const auto f = sample_field(rnd(n, m, 5, 40 + 10 * n + m), N, 3.5);
      const auto split = solenoidal_decompose(f);
      EXPECT_EQ(split.potential.m, m - 1);
      EXPECT_LE(grid_divergence(split.solenoidal).l2_norm(), 1e-9 * f.l2_norm()) << "n=" << n << " m=" << m;
      const auto rebuilt = split.solenoidal + grid_inner_derivative(split.potential);
      EXPECT_LE((rebuilt - f).l2_norm(), 1e-10 * f.l2_norm()) << "n=" << n << " m=" << m;
    }
  }
}

TEST(Solenoidal, PotentialFieldHasNoSolenoidalPart) {
  for (int m = 1; m <= 2; ++m) {
    const auto v0 = sample_field(rnd(2, m - 1, 6, 60 + m), 128, 4.0);
    const auto f = grid_inner_derivative(v0);
    const auto split = solenoidal_decompose(f);
    EXPECT_LE(split.solenoidal.l2_norm(), 1e-6 * f.l2_norm()) << "m=" << m;
  }
}

TEST(Solenoidal, ProjectorIsIdempotent) {
  const auto f = sample_field(rnd(2, 2, 5, 71), 64, 3.5);
  const auto s = solenoidal_decompose(f).solenoidal;
  const auto again = solenoidal_decompose(s);
  EXPECT_LE(again.potential.l2_norm(), 1e-9 * s.l2_norm());
  EXPECT_LE((again.solenoidal - s).l2_norm(), 1e-12 * s.l2_norm());
}

TEST(Solenoidal, MatchesHelmholtzSplit) {
  const auto f = sample_field(rnd(2, 1, 5, 81), 32, 3.5);
  const auto oracle = helmholtz_solenoidal(f);
  EXPECT_LE(relative_l2(solenoidal_decompose(f).solenoidal, oracle), 1e-11);
}

TEST(Solenoidal, ScalarRejected) {
  EXPECT_THROW(solenoidal_decompose(GridTensorField::zeros(2, 0, 8, 1.0)), PreconditionError);
}

TEST(KernelCell, OriginCellOfInverseDistance) {
  // ∫_{[−1/2, 1/2]²} |z|^{−1} dz = 4 ln(1 + √2).
  const std::vector<int> none, origin{0, 0};
  EXPECT_NEAR(kernel_cell_average(2, none, 1, origin, 1.0), 4.0 * std::log(1.0 + std::sqrt(2.0)), 1e-12);
  // Homogeneity 1 − n scales as h^{1−n}.
  EXPECT_NEAR(kernel_cell_average(2, none, 1, origin, 0.5), 2.0 * 4.0 * std::log(1.0 + std::sqrt(2.0)), 1e-11);
  // Odd kernels average to zero over the symmetric cell.
  const std::vector<int> one{0};
  EXPECT_NEAR(kernel_cell_average(2, one, 2, origin, 1.0), 0.0, 1e-14);
  // z_0² / |z|³: half of the inverse-distance integral by symmetry.
  const std::vector<int> two{0, 0};
  EXPECT_NEAR(kernel_cell_average(2, two, 3, origin, 1.0), 2.0 * std::log(1.0 + std::sqrt(2.0)), 1e-12);
}

TEST(KernelCell, OffsetCellMatchesFineMidpointSum) {
  const std::vector<int> slots{0, 1};
  const std::vector<int> off{1, 2};
  const double h = 0.1;
  const int M = 2000;
  double acc = 0.0;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const double x = off[0] * h - h / 2 + (a + 0.5) * h / M;
      const double y = off[1] * h - h / 2 + (b + 0.5) * h / M;
      acc += x * y / std::pow(x * x + y * y, 1.5);
    }
  EXPECT_NEAR(kernel_cell_average(2, slots, 3, off, h), acc / (static_cast<double>(M) * M), 1e-6);
}

TEST(NormalConvolution, AgreesWithAngularAndRefines) {
  struct Case {
    int m, k;
  };
  const auto rule = build_rule(2, 120);
  for (const auto& c : {Case{0, 0}, Case{1, 0}, Case{1, 1}}) {
    const auto f = rnd(2, c.m, 3, 90 + 10 * c.m + c.k);
    std::vector<double> err;
    for (int N : {32, 64}) {
      const auto conv = normal_convolution(sample_field(f, N, 3.0), c.k);
      err.push_back(relative_l2(conv, normal_momentum_on_grid(f, N, 3.0, c.k, rule)));
    }
    EXPECT_LT(err[1], 3e-3) << "m=" << c.m << " k=" << c.k;
    EXPECT_LT(err[1], err[0]) << "m=" << c.m << " k=" << c.k;
  }
}

TEST(PeriodicNormal, SolenoidalPartHasSameNormalOperator) {
  for (int m = 1; m <= 2; ++m) {
    const auto f = sample_field(rnd(2, m, 5, 110 + m), 64, 3.5);
    const auto nf = periodic_normal_ray(f);
    const auto ns = periodic_normal_ray(solenoidal_decompose(f).solenoidal);
    EXPECT_LE(relative_l2(ns, nf), 1e-6) << "m=" << m;
  }
}

TEST(Smoothness, FirstOrderResidual) {
  const auto f = sample_field(rnd(2, 1, 6, 131), 128, 4.0);
  const auto lap = grid_divergence(grid_inner_derivative(grid_inner_derivative(grid_divergence(f))));
  EXPECT_LE(verify_smoothness(f).l2_norm(), 1e-6 * (1.0 + lap.l2_norm()));
}

TEST(Smoothness, PotentialFieldBothSidesVanish) {
  const auto v0 = sample_field(rnd(2, 1, 6, 141), 64, 4.0);
  const auto f = grid_inner_derivative(v0);
  EXPECT_LE(verify_smoothness(f).l2_norm(), 1e-8 * f.l2_norm());
}

TEST(GridIo, RoundTrip) {
  const auto f = sample_field(rnd(2, 2, 3, 151), 8, 3.0);
  std::stringstream csv;
  write_grid_csv(csv, f);
  const auto back = read_grid(grid_header_json(f), csv);
  EXPECT_EQ(back.components, f.components);
  EXPECT_EQ(back.L, f.L);
  std::stringstream bad("x0,x1\n");
  EXPECT_THROW(read_grid(grid_header_json(f), bad), ShapeError);
}
