#pragma once

// Scalar layer: the whole library is templated on a complex scalar type C.
// Two instantiations are supported: std::complex<double> (binary64 mode)
// and boost::multiprecision::cpp_complex_50 (extended mode, ~50 digits).

#include <complex>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace irrper {

using cplx64 = std::complex<double>;
using real50 = boost::multiprecision::cpp_bin_float_50;
using cplx50 = boost::multiprecision::cpp_complex_50;

template <class C>
struct scalar_traits;

template <>
struct scalar_traits<cplx64> {
  using real = double;
  static constexpr int digits10 = std::numeric_limits<double>::digits10;
  static double epsilon() { return std::numeric_limits<double>::epsilon(); }
  static double pi() { return 3.14159265358979323846264338327950288; }
  static const char* name() { return "double"; }
};

template <>
struct scalar_traits<cplx50> {
  using real = real50;
  static constexpr int digits10 = std::numeric_limits<real50>::digits10;
  static real50 epsilon() { return std::numeric_limits<real50>::epsilon(); }
  static real50 pi() {
    static const real50 value = 4 * atan(real50(1));
    return value;
  }
  static const char* name() { return "extended"; }
};

template <class C>
using real_t = typename scalar_traits<C>::real;

inline double to_double(double x) { return x; }
inline double to_double(const real50& x) { return x.convert_to<double>(); }

inline cplx64 to_cplx64(const cplx64& z) { return z; }
inline cplx64 to_cplx64(const cplx50& z) {
  return {to_double(z.real()), to_double(z.imag())};
}

template <class C>
C make_cplx(double re, double im = 0.0) {
  return C(real_t<C>(re), real_t<C>(im));
}

// ADL-friendly wrappers; boost's complex adaptor overloads live in its own
// namespace, std::complex in std.
template <class C>
real_t<C> abs_of(const C& z) {
  using std::abs;
  return abs(z);
}

template <class C>
real_t<C> arg_of(const C& z) {
  using std::arg;
  return arg(z);
}

template <class C>
C log_of(const C& z) {
  using std::log;
  return log(z);
}

template <class C>
C exp_of(const C& z) {
  using std::exp;
  return exp(z);
}

template <class C>
C sqrt_of(const C& z) {
  using std::sqrt;
  return sqrt(z);
}

// z^w with the principal branch of log.
template <class C>
C pow_principal(const C& z, const C& w) {
  return exp_of<C>(w * log_of<C>(z));
}

}  // namespace irrper
