#include "tentomo/symtensor.hpp"

#include "tentomo/linalg.hpp"

namespace tentomo {

int sym_power_span_rank(const std::vector<std::vector<double>>& vectors, int m, double rel_tol) {
  DMatrix rows;
  for (const auto& p : symmetric_products(vectors, m)) rows.push_back(p.entries());
  return numeric_rank(rows, rel_tol);
}

int sym_power_span_rank(const std::vector<std::vector<Rational>>& vectors, int m) {
  QMatrix rows;
  for (const auto& p : symmetric_products(vectors, m)) rows.push_back(p.entries());
  return exact_rank(std::move(rows));
}

}  // namespace tentomo
