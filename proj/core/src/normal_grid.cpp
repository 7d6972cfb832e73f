#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "tentomo/normalops.hpp"
#include "tentomo/parallel.hpp"

namespace tentomo {

namespace {

using cplx = std::complex<double>;
using Spectrum = std::vector<cplx>;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

class Fft {
 public:
  Fft(int n, int size) : count_(ipow(static_cast<std::size_t>(size), n)) {
    std::vector<int> dims(static_cast<std::size_t>(n), size);
    Spectrum buf(count_);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(n, dims.data(), p, p, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(n, dims.data(), p, p, FFTW_BACKWARD, flags);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  ~Fft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(Spectrum& a) const {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(forward_, p, p);
  }
  void inverse(Spectrum& a) const {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(backward_, p, p);
    const double s = 1.0 / static_cast<double>(count_);
    for (auto& v : a) v *= s;
  }

 private:
  std::size_t count_;
  fftw_plan forward_;
  fftw_plan backward_;
};

void unflatten_grid(std::size_t flat, int n, int N, std::span<int> out) {
  for (int d = n - 1; d >= 0; --d) {
    out[static_cast<std::size_t>(d)] = static_cast<int>(flat % static_cast<std::size_t>(N));
    flat /= static_cast<std::size_t>(N);
  }
}

struct SpectralField {
  int n, m, N;
  std::vector<Spectrum> comps;
};

SpectralField to_spectrum(const GridTensorField& f, const Fft& fft) {
  SpectralField s{f.n, f.m, f.N, {}};
  for (const auto& c : f.components) {
    Spectrum a(c.begin(), c.end());
    fft.forward(a);
    s.comps.push_back(std::move(a));
  }
  return s;
}

GridTensorField from_spectrum(SpectralField s, double L, const Fft& fft) {
  auto out = GridTensorField::zeros(s.n, s.m, s.N, L);
  for (std::size_t c = 0; c < s.comps.size(); ++c) {
    fft.inverse(s.comps[c]);
    auto& dst = out.components[c];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = s.comps[c][i].real();
  }
  return out;
}

// Symmetrized i_y (rank r → r + 1) and its adjoint j_y (rank r → r − 1) on
// canonical component vectors.
class SymOps {
 public:
  SymOps(int n, int r) : r_(r) {
    const auto& up = IndexSpace::get(n, r + 1);
    const auto& src = IndexSpace::get(n, r);
    std::vector<int> rest(static_cast<std::size_t>(r));
    up_.resize(up.size());
    for (std::size_t c = 0; c < up.size(); ++c) {
      const auto& idx = up.canonical(c);
      for (int t = 0; t <= r; ++t) {
        std::size_t w = 0;
        for (int u = 0; u <= r; ++u)
          if (u != t) rest[w++] = idx[static_cast<std::size_t>(u)];
        up_[c].emplace_back(idx[static_cast<std::size_t>(t)], src.rank_of(rest));
      }
    }
    if (r > 0) {
      const auto& down = IndexSpace::get(n, r - 1);
      std::vector<int> full(static_cast<std::size_t>(r));
      down_.resize(down.size());
      for (std::size_t c = 0; c < down.size(); ++c) {
        const auto& idx = down.canonical(c);
        std::copy(idx.begin(), idx.end(), full.begin());
        for (int i = 0; i < n; ++i) {
          full.back() = i;
          down_[c].emplace_back(i, src.rank_of(full));
        }
      }
    }
  }

  // in: rank r, out: rank r + 1.
  void i_y(std::span<const double> y, std::span<const cplx> in, std::span<cplx> out) const {
    const double s = 1.0 / (r_ + 1);
    for (std::size_t c = 0; c < up_.size(); ++c) {
      cplx acc = 0.0;
      for (const auto& [axis, from] : up_[c]) acc += y[static_cast<std::size_t>(axis)] * in[from];
      out[c] = s * acc;
    }
  }
  // in: rank r, out: rank r − 1.
  void j_y(std::span<const double> y, std::span<const cplx> in, std::span<cplx> out) const {
    for (std::size_t c = 0; c < down_.size(); ++c) {
      cplx acc = 0.0;
      for (const auto& [axis, from] : down_[c]) acc += y[static_cast<std::size_t>(axis)] * in[from];
      out[c] = acc;
    }
  }

 private:
  int r_;
  std::vector<std::vector<std::pair<int, std::size_t>>> up_;
  std::vector<std::vector<std::pair<int, std::size_t>>> down_;
};

// Frequency vector of flat bin `flat`.
class FrequencyGrid {
 public:
  FrequencyGrid(int n, int N, double L) : n_(n), N_(N), axis_(grid_frequencies(N, L)) {}
  void at(std::size_t flat, std::span<double> y) const {
    for (int d = n_ - 1; d >= 0; --d) {
      y[static_cast<std::size_t>(d)] = axis_[flat % static_cast<std::size_t>(N_)];
      flat /= static_cast<std::size_t>(N_);
    }
  }

 private:
  int n_, N_;
  std::vector<double> axis_;
};

void gather(const SpectralField& s, std::size_t bin, std::span<cplx> out) {
  for (std::size_t c = 0; c < s.comps.size(); ++c) out[c] = s.comps[c][bin];
}

void scatter(SpectralField& s, std::size_t bin, std::span<const cplx> in) {
  for (std::size_t c = 0; c < s.comps.size(); ++c) s.comps[c][bin] = in[c];
}

// Gaussian elimination with partial pivoting; a is size×size row-major.
void solve_small(std::vector<cplx> a, std::span<cplx> b, std::size_t size) {
  for (std::size_t col = 0; col < size; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < size; ++r)
      if (std::abs(a[r * size + col]) > std::abs(a[piv * size + col])) piv = r;
    if (std::abs(a[piv * size + col]) < 1e-300) throw SingularSystemError("solenoidal_decompose: singular Gram matrix");
    if (piv != col) {
      for (std::size_t c = 0; c < size; ++c) std::swap(a[piv * size + c], a[col * size + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < size; ++r) {
      const cplx fct = a[r * size + col] / a[col * size + col];
      if (fct == 0.0) continue;
      for (std::size_t c = col; c < size; ++c) a[r * size + c] -= fct * a[col * size + c];
      b[r] -= fct * b[col];
    }
  }
  for (std::size_t r = size; r-- > 0;) {
    cplx acc = b[r];
    for (std::size_t c = r + 1; c < size; ++c) acc -= a[r * size + c] * b[c];
    b[r] = acc / a[r * size + r];
  }
}

double norm2(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

void require_grid(const GridTensorField& f, const char* op) {
  if (f.n < 1 || f.N < 2 || !(f.L > 0.0)) throw PreconditionError(std::string(op) + ": invalid grid");
  if (f.components.size() != f.space().size()) throw ShapeError(std::string(op) + ": component count mismatch");
  for (const auto& c : f.components)
    if (c.size() != f.nodes()) throw ShapeError(std::string(op) + ": component length mismatch");
}

}  // namespace

std::size_t GridTensorField::nodes() const { return ipow(static_cast<std::size_t>(N), n); }

std::vector<double> GridTensorField::node(std::size_t flat) const {
  std::vector<int> j(static_cast<std::size_t>(n));
  unflatten_grid(flat, n, N, j);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) x[static_cast<std::size_t>(d)] = -L / 2 + j[static_cast<std::size_t>(d)] * spacing();
  return x;
}

GridTensorField GridTensorField::zeros(int n, int m, int N, double L) {
  GridTensorField f{n, m, N, L, {}};
  f.components.assign(IndexSpace::get(n, m).size(), std::vector<double>(f.nodes(), 0.0));
  return f;
}

double GridTensorField::l2_norm() const {
  const auto& sp = space();
  double acc = 0.0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    double s = 0.0;
    for (double v : components[c]) s += v * v;
    acc += static_cast<double>(sp.multiplicity(c)) * s;
  }
  return std::sqrt(acc * std::pow(spacing(), n));
}

GridTensorField sample_field(const PolyBumpField& f, int N, double L) {
  auto out = GridTensorField::zeros(f.dim(), f.rank(), N, L);
  const auto& sp = out.space();
  parallel_for(out.nodes(), [&](unsigned, std::size_t i) {
    const auto x = out.node(i);
    for (std::size_t c = 0; c < sp.size(); ++c) out.components[c][i] = f.evaluate(sp.canonical(c), x);
  }, 256);
  return out;
}

GridTensorField operator-(const GridTensorField& a, const GridTensorField& b) {
  if (a.n != b.n || a.m != b.m || a.N != b.N) throw ShapeError("GridTensorField: shape mismatch");
  GridTensorField out = a;
  for (std::size_t c = 0; c < out.components.size(); ++c)
    for (std::size_t i = 0; i < out.components[c].size(); ++i) out.components[c][i] -= b.components[c][i];
  return out;
}

GridTensorField operator+(const GridTensorField& a, const GridTensorField& b) {
  if (a.n != b.n || a.m != b.m || a.N != b.N) throw ShapeError("GridTensorField: shape mismatch");
  GridTensorField out = a;
  for (std::size_t c = 0; c < out.components.size(); ++c)
    for (std::size_t i = 0; i < out.components[c].size(); ++i) out.components[c][i] += b.components[c][i];
  return out;
}

double relative_l2(const GridTensorField& a, const GridTensorField& b) {
  const double denom = b.l2_norm();
  const double num = (a - b).l2_norm();
  return denom == 0.0 ? num : num / denom;
}

std::vector<double> grid_frequencies(int N, double L) {
  std::vector<double> k(static_cast<std::size_t>(N));
  const double base = 2.0 * std::numbers::pi / L;
  for (int j = 0; j < N; ++j) {
    int w = j < (N + 1) / 2 ? j : j - N;
    if (N % 2 == 0 && j == N / 2) w = 0;
    k[static_cast<std::size_t>(j)] = base * w;
  }
  return k;
}

GridTensorField grid_inner_derivative(const GridTensorField& f) {
  require_grid(f, "grid_inner_derivative");
  const Fft fft(f.n, f.N);
  const auto src = to_spectrum(f, fft);
  SpectralField dst{f.n, f.m + 1, f.N, std::vector<Spectrum>(IndexSpace::get(f.n, f.m + 1).size(), Spectrum(f.nodes()))};
  const SymOps ops(f.n, f.m);
  const FrequencyGrid freq(f.n, f.N, f.L);
  std::vector<double> y(static_cast<std::size_t>(f.n));
  std::vector<cplx> in(src.comps.size()), out(dst.comps.size());
  const cplx I(0.0, 1.0);
  for (std::size_t b = 0; b < f.nodes(); ++b) {
    freq.at(b, y);
    gather(src, b, in);
    ops.i_y(y, in, out);
    for (auto& v : out) v *= I;
    scatter(dst, b, out);
  }
  return from_spectrum(std::move(dst), f.L, fft);
}

GridTensorField grid_divergence(const GridTensorField& f) {
  require_grid(f, "grid_divergence");
  if (f.m < 1) throw PreconditionError("grid_divergence: rank must be positive");
  const Fft fft(f.n, f.N);
  const auto src = to_spectrum(f, fft);
  SpectralField dst{f.n, f.m - 1, f.N, std::vector<Spectrum>(IndexSpace::get(f.n, f.m - 1).size(), Spectrum(f.nodes()))};
  const SymOps ops(f.n, f.m);
  const FrequencyGrid freq(f.n, f.N, f.L);
  std::vector<double> y(static_cast<std::size_t>(f.n));
  std::vector<cplx> in(src.comps.size()), out(dst.comps.size());
  const cplx I(0.0, 1.0);
  for (std::size_t b = 0; b < f.nodes(); ++b) {
    freq.at(b, y);
    gather(src, b, in);
    ops.j_y(y, in, out);
    for (auto& v : out) v *= I;
    scatter(dst, b, out);
  }
  return from_spectrum(std::move(dst), f.L, fft);
}

SolenoidalSplit solenoidal_decompose(const GridTensorField& f) {
  require_grid(f, "solenoidal_decompose");
  if (f.m < 1) throw PreconditionError("solenoidal_decompose: rank must be positive");
  const Fft fft(f.n, f.N);
  auto sol = to_spectrum(f, fft);
  const std::size_t low = IndexSpace::get(f.n, f.m - 1).size();
  SpectralField pot{f.n, f.m - 1, f.N, std::vector<Spectrum>(low, Spectrum(f.nodes()))};
  const SymOps lower(f.n, f.m - 1);  // i_y: rank m−1 → m
  const SymOps upper(f.n, f.m);      // j_y: rank m → m−1
  const FrequencyGrid freq(f.n, f.N, f.L);
  std::vector<double> y(static_cast<std::size_t>(f.n));
  std::vector<cplx> fhat(sol.comps.size()), w(low), iw(sol.comps.size()), unit(low), col(sol.comps.size()), g(low);
  std::vector<cplx> gram(low * low);
  const cplx I(0.0, 1.0);
  for (std::size_t b = 0; b < f.nodes(); ++b) {
    freq.at(b, y);
    if (norm2(y) == 0.0) continue;
    gather(sol, b, fhat);
    for (std::size_t c = 0; c < low; ++c) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[c] = 1.0;
      lower.i_y(y, unit, col);
      upper.j_y(y, col, g);
      for (std::size_t r = 0; r < low; ++r) gram[r * low + c] = g[r];
    }
    upper.j_y(y, fhat, w);
    solve_small(gram, w, low);
    lower.i_y(y, w, iw);
    for (std::size_t c = 0; c < fhat.size(); ++c) fhat[c] -= iw[c];
    scatter(sol, b, fhat);
    for (auto& v : w) v *= -I;
    scatter(pot, b, w);
  }
  return {from_spectrum(std::move(sol), f.L, fft), from_spectrum(std::move(pot), f.L, fft)};
}

double kernel_cell_average(int n, std::span<const int> slots, int denom_power, std::span<const int> offset,
                           double h) {
  if (static_cast<int>(offset.size()) != n) throw ShapeError("kernel_cell_average: offset has wrong dimension");
  const int homogeneity = static_cast<int>(slots.size()) - denom_power;
  auto kernel = [&](std::span<const double> z) {
    double r2 = 0.0;
    for (double v : z) r2 += v * v;
    double num = 1.0;
    for (int s : slots) num *= z[static_cast<std::size_t>(s)];
    return num / std::pow(r2, 0.5 * denom_power);
  };
  const bool origin = std::all_of(offset.begin(), offset.end(), [](int o) { return o == 0; });
  std::vector<double> z(static_cast<std::size_t>(n));
  if (origin) {
    if (n + homogeneity <= 0) throw PreconditionError("kernel_cell_average: kernel is not locally integrable");
    // ∫_cube g = (1/(n + d)) ∫_∂cube g (z·ν) dA for g homogeneous of degree d.
    const auto& gl = gauss_legendre(24);
    const std::size_t q = gl.nodes.size();
    const std::size_t face_pts = ipow(q, n - 1);
    double total = 0.0;
    for (int axis = 0; axis < n; ++axis)
      for (int side : {-1, 1})
        for (std::size_t p = 0; p < face_pts; ++p) {
          std::size_t rem = p;
          double w = 1.0;
          for (int d = 0; d < n; ++d) {
            if (d == axis) {
              z[static_cast<std::size_t>(d)] = side * h / 2;
              continue;
            }
            const std::size_t g = rem % q;
            rem /= q;
            z[static_cast<std::size_t>(d)] = gl.nodes[g] * h / 2;
            w *= gl.weights[g] * h / 2;
          }
          total += w * kernel(z) * (h / 2);
        }
    return total / (n + homogeneity) / std::pow(h, n);
  }
  int reach = 0;
  for (int o : offset) reach = std::max(reach, std::abs(o));
  const int sub = reach <= 2 ? 4 : 1;
  const auto& gl = gauss_legendre(reach <= 2 ? 8 : 4);
  const std::size_t q = gl.nodes.size();
  const std::size_t per_cell = ipow(q, n);
  const std::size_t cells = ipow(static_cast<std::size_t>(sub), n);
  const double hs = h / sub;
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t p = 0; p < per_cell; ++p) {
      std::size_t rc = c, rp = p;
      double w = 1.0;
      for (int d = 0; d < n; ++d) {
        const auto sc = static_cast<int>(rc % static_cast<std::size_t>(sub));
        rc /= static_cast<std::size_t>(sub);
        const std::size_t g = rp % q;
        rp /= q;
        const double lo = offset[static_cast<std::size_t>(d)] * h - h / 2 + sc * hs;
        z[static_cast<std::size_t>(d)] = lo + (gl.nodes[g] + 1.0) * hs / 2;
        w *= gl.weights[g] * hs / 2;
      }
      total += w * kernel(z);
    }
  return total / std::pow(h, n);
}

GridTensorField normal_convolution(const GridTensorField& f, int k) {
  require_grid(f, "normal_convolution");
  if (k < 0) throw PreconditionError("normal_convolution: k must be non-negative");
  const int n = f.n;
  const int m = f.m;
  const int N = f.N;
  const int M = 2 * N;
  const double h = f.spacing();
  const Fft fft(n, M);
  const std::size_t padded = ipow(static_cast<std::size_t>(M), n);
  std::vector<int> j(static_cast<std::size_t>(n));

  const auto& fsp = f.space();
  std::vector<Spectrum> fhat;
  for (const auto& comp : f.components) {
    Spectrum a(padded, 0.0);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      unflatten_grid(i, n, N, j);
      std::size_t p = 0;
      for (int d = 0; d < n; ++d) p = p * static_cast<std::size_t>(M) + static_cast<std::size_t>(j[static_cast<std::size_t>(d)]);
      a[p] = comp[i];
    }
    fft.forward(a);
    fhat.push_back(std::move(a));
  }

  // Convolution kernels K'(c) = cell integral of K at offset −c, indexed by
  // the sorted slot multiset.
  std::map<std::vector<int>, Spectrum> kernels;
  auto kernel_hat = [&](std::vector<int> slots, int denom) -> const Spectrum& {
    std::sort(slots.begin(), slots.end());
    auto it = kernels.find(slots);
    if (it != kernels.end()) return it->second;
    Spectrum a(padded, 0.0);
    const double cell = std::pow(h, n);
    parallel_for(padded, [&](unsigned, std::size_t p) {
      std::vector<int> c(static_cast<std::size_t>(n));
      unflatten_grid(p, n, M, c);
      for (auto& v : c) {
        if (v == N) return;
        if (v > N) v -= M;
        v = -v;
      }
      a[p] = kernel_cell_average(n, slots, denom, c, h) * cell;
    }, 64);
    fft.forward(a);
    return kernels.emplace(slots, std::move(a)).first->second;
  };

  auto out = GridTensorField::zeros(n, m, N, f.L);
  const auto& osp = out.space();
  Spectrum acc(padded);
  for (int l = 0; l <= k; ++l) {
    const int prank = 2 * k - l;
    const int denom = 2 * m + 2 * k - 2 * l + n - 1;
    const auto& psp = IndexSpace::get(n, prank);
    for (std::size_t ci = 0; ci < osp.size(); ++ci)
      for (std::size_t cp = 0; cp < psp.size(); ++cp) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t cj = 0; cj < fsp.size(); ++cj) {
          std::vector<int> slots = psp.canonical(cp);
          slots.insert(slots.end(), osp.canonical(ci).begin(), osp.canonical(ci).end());
          slots.insert(slots.end(), fsp.canonical(cj).begin(), fsp.canonical(cj).end());
          const auto& kh = kernel_hat(std::move(slots), denom);
          const double mult = static_cast<double>(fsp.multiplicity(cj));
          for (std::size_t p = 0; p < padded; ++p) acc[p] += mult * fhat[cj][p] * kh[p];
        }
        fft.inverse(acc);
        const double c = 2.0 * to_double(binomial_q(k, l)) * static_cast<double>(psp.multiplicity(cp));
        auto& dst = out.components[ci];
        for (std::size_t i = 0; i < dst.size(); ++i) {
          unflatten_grid(i, n, N, j);
          std::size_t p = 0;
          double xp = 1.0;
          for (int d = 0; d < n; ++d)
            p = p * static_cast<std::size_t>(M) + static_cast<std::size_t>(j[static_cast<std::size_t>(d)]);
          const auto x = out.node(i);
          for (int s : psp.canonical(cp)) xp *= x[static_cast<std::size_t>(s)];
          dst[i] += c * xp * acc[p].real();
        }
      }
  }
  return out;
}

GridTensorField periodic_normal_ray(const GridTensorField& f) {
  require_grid(f, "periodic_normal_ray");
  if (f.n != 2) throw PreconditionError("periodic_normal_ray: only n = 2 is supported");
  const Fft fft(f.n, f.N);
  auto s = to_spectrum(f, fft);
  const auto& sp = f.space();
  const FrequencyGrid freq(f.n, f.N, f.L);
  std::vector<double> y(2);
  std::vector<cplx> in(sp.size());
  for (std::size_t b = 0; b < f.nodes(); ++b) {
    freq.at(b, y);
    const double r = std::sqrt(norm2(y));
    if (r == 0.0) {
      for (auto& c : s.comps) c[b] = 0.0;
      continue;
    }
    const double eta[2] = {-y[1] / r, y[0] / r};
    gather(s, b, in);
    cplx pair = 0.0;
    std::vector<double> mono(sp.size(), 1.0);
    for (std::size_t c = 0; c < sp.size(); ++c) {
      for (int i : sp.canonical(c)) mono[c] *= eta[i];
      pair += static_cast<double>(sp.multiplicity(c)) * mono[c] * in[c];
    }
    for (std::size_t c = 0; c < sp.size(); ++c) s.comps[c][b] = 4.0 * std::numbers::pi / r * mono[c] * pair;
  }
  return from_spectrum(std::move(s), f.L, fft);
}

GridTensorField verify_smoothness(const GridTensorField& f) {
  require_grid(f, "verify_smoothness");
  const int n = f.n;
  const int m = f.m;
  if (m == 0) return GridTensorField::zeros(n, 0, f.N, f.L);
  const Fft fft(n, f.N);
  const auto fs = to_spectrum(f, fft);
  auto sol = to_spectrum(solenoidal_decompose(f).solenoidal, fft);
  const auto& sp = f.space();
  const FrequencyGrid freq(n, f.N, f.L);
  std::vector<double> y(static_cast<std::size_t>(n));
  std::vector<cplx> fh(sp.size());

  // 2^m δ_e^m R f at frequency y, symmetrized over I:
  // (−1)^m Σ_J Σ_ε sign(ε) Π_t y_{j_t} y_{q_t} f̂_{p}, (p_t, q_t) = (i_t, j_t) or swapped.
  const auto& dense_m = IndexSpace::get(n, m);
  std::vector<int> I(static_cast<std::size_t>(m)), J(static_cast<std::size_t>(m)), p(static_cast<std::size_t>(m));
  const double sign_m = m % 2 == 0 ? 1.0 : -1.0;
  for (std::size_t b = 0; b < f.nodes(); ++b) {
    freq.at(b, y);
    gather(fs, b, fh);
    std::vector<cplx> rhs(sp.size(), 0.0);
    std::vector<double> count(sp.size(), 0.0);
    for (std::size_t di = 0; di < dense_m.dense_size(); ++di) {
      dense_m.unflatten(di, I);
      const std::size_t ci = sp.rank_of(I);
      cplx acc = 0.0;
      for (std::size_t dj = 0; dj < dense_m.dense_size(); ++dj) {
        dense_m.unflatten(dj, J);
        double yj = 1.0;
        for (int t = 0; t < m; ++t) yj *= y[static_cast<std::size_t>(J[static_cast<std::size_t>(t)])];
        if (yj == 0.0) continue;
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
          double w = yj;
          for (int t = 0; t < m; ++t) {
            int pi = I[static_cast<std::size_t>(t)], qi = J[static_cast<std::size_t>(t)];
            if (mask & (1u << t)) {
              std::swap(pi, qi);
              w = -w;
            }
            p[static_cast<std::size_t>(t)] = pi;
            w *= y[static_cast<std::size_t>(qi)];
          }
          acc += w * fh[sp.rank_of(p)];
        }
      }
      rhs[ci] += sign_m * acc;
      count[ci] += 1.0;
    }
    const double lap = std::pow(-norm2(y), m);
    for (std::size_t c = 0; c < sp.size(); ++c) sol.comps[c][b] = lap * sol.comps[c][b] - rhs[c] / count[c];
  }
  return from_spectrum(std::move(sol), f.L, fft);
}

GridTensorField normal_momentum_on_grid(const PolyBumpField& f, int N, double L, int k, const SphereRule& rule) {
  auto out = GridTensorField::zeros(f.dim(), f.rank(), N, L);
  std::vector<std::unique_ptr<TransformEngine>> engines(worker_count());
  parallel_for(out.nodes(), [&](unsigned w, std::size_t i) {
    if (!engines[w]) engines[w] = std::make_unique<TransformEngine>(f);
    const auto x = out.node(i);
    const auto v = normal_momentum(*engines[w], x, k, rule);
    for (std::size_t c = 0; c < v.size(); ++c) out.components[c][i] = v[c];
  }, 32);
  return out;
}

std::string grid_header_json(const GridTensorField& f) {
  nlohmann::json j;
  j["n"] = f.n;
  j["m"] = f.m;
  j["N"] = f.N;
  j["L"] = f.L;
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t c = 0; c < f.space().size(); ++c) comps.push_back(f.space().canonical(c));
  j["components"] = comps;
  return j.dump();
}

void write_grid_csv(std::ostream& out, const GridTensorField& f) {
  const auto& sp = f.space();
  for (int d = 0; d < f.n; ++d) out << (d ? "," : "") << 'x' << d;
  for (std::size_t c = 0; c < sp.size(); ++c) {
    out << ",f";
    for (int i : sp.canonical(c)) out << i;
  }
  out << '\n';
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i < f.nodes(); ++i) {
    line.str("");
    const auto x = f.node(i);
    for (int d = 0; d < f.n; ++d) line << (d ? "," : "") << x[static_cast<std::size_t>(d)];
    for (std::size_t c = 0; c < sp.size(); ++c) line << ',' << f.components[c][i];
    out << line.str() << '\n';
  }
}

GridTensorField read_grid(const std::string& header_json, std::istream& csv) {
  const auto j = nlohmann::json::parse(header_json);
  auto f = GridTensorField::zeros(j.at("n").get<int>(), j.at("m").get<int>(), j.at("N").get<int>(),
                                  j.at("L").get<double>());
  const auto comps = j.at("components").get<std::vector<std::vector<int>>>();
  if (comps.size() != f.space().size()) throw ShapeError("read_grid: component list does not match the rank");
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (comps[c] != f.space().canonical(c)) throw ShapeError("read_grid: components must be canonical and ordered");
  std::string line;
  if (!std::getline(csv, line)) throw ShapeError("read_grid: missing header row");
  for (std::size_t i = 0; i < f.nodes(); ++i) {
    if (!std::getline(csv, line)) throw ShapeError("read_grid: too few rows");
    std::istringstream row(line);
    std::string cell;
    for (int d = 0; d < f.n; ++d) std::getline(row, cell, ',');
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (!std::getline(row, cell, ',')) throw ShapeError("read_grid: short row");
      f.components[c][i] = std::stod(cell);
    }
  }
  return f;
}

}  // namespace tentomo
