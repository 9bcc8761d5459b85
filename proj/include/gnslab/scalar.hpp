#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "gnslab/error.hpp"

namespace gnslab {

using Rational = boost::multiprecision::cpp_rational;

// Element of Q(i): exact complex rational. Closed under +, -, *, / and
// conjugation; no rounding ever occurs.
struct ExactScalar {
  Rational re{0};
  Rational im{0};

  ExactScalar() = default;
  ExactScalar(int v) : re(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(long long v) : re(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ExactScalar operator-(const ExactScalar& a) { return {-a.re, -a.im}; }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    Rational d = b.re * b.re + b.im * b.im;
    if (d == 0) fail("DivisionByZero", "exact scalar division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  ExactScalar& operator+=(const ExactScalar& b) { return *this = *this + b; }
  ExactScalar& operator-=(const ExactScalar& b) { return *this = *this - b; }
  ExactScalar& operator*=(const ExactScalar& b) { return *this = *this * b; }
  ExactScalar& operator/=(const ExactScalar& b) { return *this = *this / b; }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }
};

using FloatScalar = std::complex<double>;

template <class K>
struct scalar_traits;

template <>
struct scalar_traits<ExactScalar> {
  static constexpr bool exact = true;
  static constexpr const char* backend_name = "exact";
};

template <>
struct scalar_traits<FloatScalar> {
  static constexpr bool exact = false;
  static constexpr const char* backend_name = "float";
};

template <class K>
inline constexpr bool is_exact_v = scalar_traits<K>::exact;

inline ExactScalar conj_s(const ExactScalar& x) { return {x.re, -x.im}; }
inline FloatScalar conj_s(const FloatScalar& x) { return std::conj(x); }

inline bool is_zero(const ExactScalar& x) { return x.re == 0 && x.im == 0; }
inline bool is_zero(const FloatScalar& x) { return x == FloatScalar(0.0, 0.0); }

inline bool is_real(const ExactScalar& x) { return x.im == 0; }
inline bool is_real(const FloatScalar& x) { return x.imag() == 0.0; }

// Approximate magnitude, used for float pivoting and residual scaling only.
inline double mag(const ExactScalar& x) {
  return std::abs(x.re.convert_to<double>()) + std::abs(x.im.convert_to<double>());
}
inline double mag(const FloatScalar& x) { return std::abs(x); }

inline FloatScalar to_float(const ExactScalar& x) {
  return {x.re.convert_to<double>(), x.im.convert_to<double>()};
}
inline FloatScalar to_float(const FloatScalar& x) { return x; }

template <class K>
K scalar_from_int(long long n) {
  if constexpr (is_exact_v<K>) {
    return ExactScalar(n);
  } else {
    return FloatScalar(static_cast<double>(n), 0.0);
  }
}

template <class K>
K scalar_from_ratio(long long p, long long q) {
  if constexpr (is_exact_v<K>) {
    return ExactScalar(Rational(p, q));
  } else {
    return FloatScalar(static_cast<double>(p) / static_cast<double>(q), 0.0);
  }
}

// i (the imaginary unit) in either backend.
template <class K>
K scalar_i() {
  if constexpr (is_exact_v<K>) {
    return ExactScalar(Rational(0), Rational(1));
  } else {
    return FloatScalar(0.0, 1.0);
  }
}

namespace detail {

inline std::string rational_to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

}  // namespace detail

/// Canonical text form: "a/b" (real), "c/d i" (imaginary), "a/b+c/d i" or
// "a/b-c/d i" (general); each rational in lowest terms, "/1" omitted.
inline std::string format_scalar(const ExactScalar& x) {
  using detail::rational_to_string;
  if (x.im == 0) return rational_to_string(x.re);
  std::string imag = rational_to_string(abs(x.im)) + " i";
  if (x.re == 0) return (x.im < 0 ? "-" : "") + imag;
  return rational_to_string(x.re) + (x.im < 0 ? "-" : "+") + imag;
}

std::string format_scalar(const FloatScalar& x);

// Parses the canonical exact grammar; accepts plain integers and pure
// imaginary parts ("i", "-2/3 i", "1+i").
ExactScalar parse_exact_scalar(const std::string& text);

}  // namespace gnslab
