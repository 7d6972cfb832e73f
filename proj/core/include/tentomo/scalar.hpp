#pragma once

// Scalar types shared by every module: exact GMP rationals for identity
// checks and plain doubles for quadrature paths.

#include <cstdint>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace tentomo {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline double zero_like(double) { return 0.0; }
inline Rational zero_like(const Rational&) { return Rational(0); }
inline double one_like(double) { return 1.0; }
inline Rational one_like(const Rational&) { return Rational(1); }

/// Scalar type of the constants a value type can be multiplied by.
template <class S>
struct coefficient {
  using type = S;
};
template <class S>
using coefficient_t = typename coefficient<S>::type;

inline double scale_by(double x, std::int64_t num, std::int64_t den) {
  return x * static_cast<double>(num) / static_cast<double>(den);
}
inline Rational scale_by(const Rational& x, std::int64_t num, std::int64_t den) {
  return x * Rational(num, den);
}

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return x == 0; }

// Promotes an exact constant into scalar type S.
template <class S>
S from_rational(const Rational& r);

template <>
inline double from_rational<double>(const Rational& r) {
  return to_double(r);
}
template <>
inline Rational from_rational<Rational>(const Rational& r) {
  return r;
}

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace tentomo
