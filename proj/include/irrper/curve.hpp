#pragma once

// Closed-form algebra of the Legendre curve y^2 = f(x) = x(x-1)(x-lambda):
// critical points of f, critical values, companion roots, square-root branch
// choices, and the rapid-decay sector geometry at infinity.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrper/scalar.hpp"

namespace irrper {

enum class CurveCase { Generic, Exceptional };

struct CurveTolerances {
  double exceptional = 1e-9;     // |lambda^2-lambda+1| below this => Exceptional
  double conditioning = 1e-3;    // below this (but above exceptional) => warning
  double degenerate = 1e-12;     // |lambda| or |lambda-1| below this => error
};

template <class C>
struct CurveParams {
  C lambda;
  CurveCase kase = CurveCase::Generic;
  CurveTolerances tol;
  std::vector<std::string> warnings;
};

// x1, x2: roots of f'(x); c_i = f(x_i); s_i: chosen square roots of c_i;
// x3, x4: companion roots of f(x) - c_i. In the exceptional case only the
// (x1, c1, s1, x3) family is meaningful and x2 = x1.
template <class C>
struct CriticalData {
  C lambda;
  CurveCase kase = CurveCase::Generic;
  C x1, x2;
  C c1, c2;
  C s1, s2;
  C x3, x4;
  std::vector<std::string> warnings;

  C disc() const { return lambda * lambda - lambda + C(1); }  // lambda^2-lambda+1
};

template <class C>
C legendre_f(const C& lambda, const C& x) {
  return x * (x - C(1)) * (x - lambda);
}

template <class C>
C legendre_fprime(const C& lambda, const C& x) {
  return C(3) * x * x - C(2) * (lambda + C(1)) * x + lambda;
}

template <class C>
CurveParams<C> make_curve(const C& lambda, CurveTolerances tol = {}) {
  using R = real_t<C>;
  CurveParams<C> p;
  p.lambda = lambda;
  p.tol = tol;
  const R a0 = abs_of(lambda);
  const R a1 = abs_of(lambda - C(1));
  if (a0 < R(tol.degenerate) || a1 < R(tol.degenerate))
    throw std::domain_error("make_curve: degenerate curve, lambda in {0, 1}");
  if (a0 < R(tol.conditioning) || a1 < R(tol.conditioning))
    p.warnings.push_back("near-degenerate: lambda close to {0, 1}");
  const R d = abs_of(lambda * lambda - lambda + C(1));
  if (d < R(tol.exceptional)) {
    p.kase = CurveCase::Exceptional;
  } else if (d < R(tol.conditioning)) {
    p.warnings.push_back("ill-conditioned: lambda^2 - lambda + 1 small but not zero");
  }
  return p;
}

namespace detail {
// Deterministic ordering: lexicographic on (Re, Im).
template <class C>
bool lex_less(const C& a, const C& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}
}  // namespace detail

template <class C>
CriticalData<C> critical_data(const CurveParams<C>& params) {
  CriticalData<C> cd;
  cd.lambda = params.lambda;
  cd.kase = params.kase;
  cd.warnings = params.warnings;
  const C lam = params.lambda;
  const C one(1);
  const C sum = lam + one;  // x1 + x2 = 2(lambda+1)/3, x1 x2 = lambda/3
  if (params.kase == CurveCase::Exceptional) {
    cd.x1 = cd.x2 = sum / C(3);
    cd.c1 = cd.c2 = legendre_f(lam, cd.x1);  // equals (2*lambda - 1)/9 on the locus
    cd.s1 = cd.s2 = sqrt_of(cd.c1);
    // f(x) - c1 has a triple root at x1.
    cd.x3 = cd.x4 = cd.x1;
    return cd;
  }
  const C root = sqrt_of(sum * sum - C(3) * lam);  // sqrt(lambda^2 - lambda + 1)
  C xa = (sum - root) / C(3);
  C xb = (sum + root) / C(3);
  if (!detail::lex_less(xa, xb)) std::swap(xa, xb);
  cd.x1 = xa;
  cd.x2 = xb;
  cd.c1 = legendre_f(lam, cd.x1);
  cd.c2 = legendre_f(lam, cd.x2);
  cd.s1 = sqrt_of(cd.c1);
  cd.s2 = sqrt_of(cd.c2);
  // f(x) - f(xi) = (x - xi)^2 (x - companion); the roots sum to lambda+1.
  cd.x3 = sum - C(2) * cd.x1;
  cd.x4 = sum - C(2) * cd.x2;
  return cd;
}

template <class C>
CriticalData<C> critical_data(const C& lambda) {
  return critical_data(make_curve(lambda));
}

// Largest relative error over the critical-data identities; used by tests
// and the verification report.
template <class C>
real_t<C> critical_identity_error(const CriticalData<C>& cd) {
  using R = real_t<C>;
  using std::max;
  const C lam = cd.lambda;
  const C d = cd.disc();
  auto rel = [](const C& got, const C& want) -> R {
    R scale = max(abs_of(want), real_t<C>(1e-30));
    return abs_of(got - want) / scale;
  };
  const R fp_scale = R(1) + abs_of(lam) * abs_of(lam);
  R err(0);
  err = max(err, abs_of(legendre_fprime(lam, cd.x1)) / fp_scale);
  err = max(err, abs_of(legendre_fprime(lam, cd.x2)) / fp_scale);
  err = max(err, rel(cd.s1 * cd.s1, cd.c1));
  err = max(err, rel(cd.s2 * cd.s2, cd.c2));
  err = max(err, rel(cd.c1 * cd.c2, -lam * lam * (lam - C(1)) * (lam - C(1)) / C(27)));
  const C diff = cd.c1 - cd.c2;
  err = max(err, rel(diff * diff, C(16) * d * d * d / C(729)));
  if (cd.kase == CurveCase::Generic) {
    // (x1-x3)(x2-x4) = (3x1-(lambda+1))(3x2-(lambda+1)) = -(lambda^2-lambda+1)
    const C a = cd.x1 - cd.x3;
    const C b = cd.x2 - cd.x4;
    err = max(err, rel(a * b, -d));
  }
  return err;
}

// Rapid-decay sectors in the local parameter t = -(1/y)^{1/3} at infinity:
// three open arcs of width pi/3 centered at 2(i-1)pi/3; along any ray into a
// sector, Re(y) -> -infinity so |exp(y)| -> 0.
template <class C>
struct SectorDescriptor {
  int index = 1;                  // 1..3
  real_t<C> arg_lo, arg_hi;       // open interval of arg t
  real_t<C> center() const { return (arg_lo + arg_hi) / 2; }
};

template <class C>
std::array<SectorDescriptor<C>, 3> rapid_decay_sectors(const CriticalData<C>&) {
  using R = real_t<C>;
  const R pi = scalar_traits<C>::pi();
  std::array<SectorDescriptor<C>, 3> out;
  for (int i = 1; i <= 3; ++i) {
    const R mid = R(2 * (i - 1)) * pi / 3;
    out[i - 1] = SectorDescriptor<C>{i, mid - pi / 6, mid + pi / 6};
  }
  return out;
}

}  // namespace irrper
