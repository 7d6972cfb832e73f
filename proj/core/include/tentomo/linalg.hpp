#pragma once

// Small dense linear algebra: exact elimination over the rationals and
// double-precision rank/solve through Eigen.

#include <vector>

#include "tentomo/scalar.hpp"

namespace tentomo {

using QMatrix = std::vector<std::vector<Rational>>;
using DMatrix = std::vector<std::vector<double>>;

int exact_rank(QMatrix rows);

/// Solves the square system A x = b exactly; throws SingularSystemError.
std::vector<Rational> exact_solve(QMatrix a, std::vector<Rational> b);

/// Numerical rank with singular values below rel_tol * max treated as zero.
int numeric_rank(const DMatrix& rows, double rel_tol);

/// Solves A x = b with full-pivot LU; throws SingularSystemError when A is
/// rank deficient at relative tolerance rel_tol.
std::vector<double> numeric_solve(const DMatrix& a, const std::vector<double>& b,
                                  double rel_tol = 1e-12);

}  // namespace tentomo
