#include "tentomo/linalg.hpp"

#include <Eigen/Dense>

#include "tentomo/errors.hpp"

namespace tentomo {

namespace {

Eigen::MatrixXd to_eigen(const DMatrix& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c)
      throw ShapeError("matrix rows have unequal length");
    for (Eigen::Index j = 0; j < c; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace

int exact_rank(QMatrix a) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

std::vector<Rational> exact_solve(QMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw ShapeError("exact_solve: size mismatch");
  for (const auto& row : a)
    if (row.size() != n) throw ShapeError("exact_solve: matrix is not square");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw SingularSystemError("exact_solve: singular matrix");
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

int numeric_rank(const DMatrix& rows, double rel_tol) {
  if (rows.empty()) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(rows));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

std::vector<double> numeric_solve(const DMatrix& a, const std::vector<double>& b, double rel_tol) {
  const Eigen::MatrixXd m = to_eigen(a);
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != b.size())
    throw ShapeError("numeric_solve: shape mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(rel_tol);
  if (!lu.isInvertible()) throw SingularSystemError("numeric_solve: singular matrix");
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

}  // namespace tentomo
