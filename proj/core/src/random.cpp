#include "tentomo/random.hpp"

#include <cmath>
#include <numbers>

namespace tentomo {

double SplitMix64::normal() {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

std::vector<double> SplitMix64::unit_vector(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0.0;
  while (norm < 1e-8) {
    norm = 0.0;
    for (auto& c : v) {
      c = normal();
      norm += c * c;
    }
    norm = std::sqrt(norm);
  }
  for (auto& c : v) c /= norm;
  return v;
}

std::vector<double> SplitMix64::point_in_ball(int n, double radius) {
  auto dir = unit_vector(n);
  const double r = radius * std::pow(uniform(), 1.0 / n);
  for (auto& c : dir) c *= r;
  return dir;
}

}  // namespace tentomo
