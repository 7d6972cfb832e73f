#include "tentomo/polynomial.hpp"

#include <sstream>

namespace tentomo {

std::string to_string(const QPoly& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    for (int i = 0; i < p.nvars(); ++i) {
      const int e = exponent_of(k, i);
      if (e == 1) os << "*x" << i + 1;
      else if (e > 1) os << "*x" << i + 1 << "^" << e;
    }
  }
  return os.str();
}

double CompiledPolynomial::operator()(const double* x) const {
  if (coef_.empty()) return 0.0;
  // pw[i * (max_exp_ + 1) + e] = x_i^e
  const int stride = max_exp_ + 1;
  double buf[kMaxPolyVars * 64];
  std::vector<double> heap;
  double* pw = buf;
  if (nvars_ * stride > kMaxPolyVars * 64) {
    heap.resize(static_cast<std::size_t>(nvars_ * stride));
    pw = heap.data();
  }
  for (int i = 0; i < nvars_; ++i) {
    double* row = pw + i * stride;
    row[0] = 1.0;
    for (int e = 1; e < stride; ++e) row[e] = row[e - 1] * x[i];
  }
  double acc = 0.0;
  const std::uint8_t* ex = exps_.data();
  for (std::size_t t = 0; t < coef_.size(); ++t) {
    double term = coef_[t];
    for (int i = 0; i < nvars_; ++i, ++ex) term *= pw[i * stride + *ex];
    acc += term;
  }
  return acc;
}

}  // namespace tentomo
