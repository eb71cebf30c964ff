#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "irrper/gamma.hpp"
#include "irrper/scalar.hpp"

using namespace irrper;

TEST_CASE("scalar traits and helpers") {
  CHECK(scalar_traits<cplx64>::digits10 < scalar_traits<cplx50>::digits10);
  CHECK(to_double(scalar_traits<cplx50>::pi()) == doctest::Approx(3.14159265358979).epsilon(1e-12));

  const cplx64 z = make_cplx<cplx64>(3.0, 4.0);
  CHECK(abs_of(z) == doctest::Approx(5.0));
  CHECK(to_double(exp_of(log_of(z)).real()) == doctest::Approx(3.0));

  const cplx50 w = make_cplx<cplx50>(-1.0, 0.0);
  // principal branch: log(-1) = i pi
  CHECK(to_double(log_of(w).imag()) == doctest::Approx(3.14159265358979).epsilon(1e-12));

  const cplx64 p = pow_principal(cplx64(2.0, 0.0), cplx64(0.5, 0.0));
  CHECK(std::abs(p - std::sqrt(cplx64(2.0))) < 1e-14);
}

TEST_CASE("gamma at standard points, double") {
  const double pi = 3.141592653589793238462643383279502884;
  CHECK(std::abs(gamma_fn(cplx64(1.0)) - cplx64(1.0)) < 1e-14);
  CHECK(std::abs(gamma_fn(cplx64(5.0)) - cplx64(24.0)) < 1e-12);
  CHECK(std::abs(gamma_fn(cplx64(0.5)) - cplx64(std::sqrt(pi))) < 1e-13);
  // frozen oracle: Gamma(1 + i)
  const cplx64 g1i = gamma_fn(cplx64(1.0, 1.0));
  CHECK(std::abs(g1i - cplx64(0.49801566811835604271, -0.15494982830181068512)) < 1e-12);
  // reflection regime
  const cplx64 gneg = gamma_fn(cplx64(-0.5));
  CHECK(std::abs(gneg - cplx64(-2 * std::sqrt(pi))) < 1e-12);
}

TEST_CASE("gamma product identities, double") {
  const double pi = 3.141592653589793238462643383279502884;
  const cplx64 lhs1 = gamma_fn(cplx64(1.0)) * gamma_fn(cplx64(1.5));
  CHECK(std::abs(lhs1 - cplx64(std::sqrt(pi) / 2)) < 1e-12);
  const cplx64 g13 = gamma_fn(cplx64(1.0 / 3));
  const cplx64 g23 = gamma_fn(cplx64(2.0 / 3));
  CHECK(std::abs(g13 * g13 * g23 * g23 - cplx64(4 * pi * pi / 3)) < 1e-11);
}

TEST_CASE("gamma recurrence, random complex arguments") {
  // z Gamma(z) = Gamma(z+1) across both half-planes
  const double re[] = {0.3, -1.7, 2.4, -0.2, 4.9};
  const double im[] = {0.8, -2.1, 0.1, 3.5, -0.6};
  for (int i = 0; i < 5; ++i) {
    const cplx64 z(re[i], im[i]);
    const cplx64 lhs = z * gamma_fn(z);
    const cplx64 rhs = gamma_fn(z + cplx64(1.0));
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-12);
  }
}

TEST_CASE("gamma identities, extended precision") {
  using C = cplx50;
  using R = real50;
  const R pi = scalar_traits<C>::pi();
  const C g = gamma_fn(C(R(1) / 3));
  const C g2 = gamma_fn(C(R(2) / 3));
  const C prod = g * g * g2 * g2;
  CHECK(to_double(abs_of(prod - C(4 * pi * pi / 3))) < 1e-30);

  const C half = gamma_fn(C(R(1) / 2));
  CHECK(to_double(abs_of(half * half - C(pi))) < 1e-30);

  // log-gamma additivity for a large shifted argument
  const C z = make_cplx<C>(41.0, 3.0);
  const C diff = log_gamma(z + C(1)) - log_gamma(z) - log_of(z);
  CHECK(to_double(abs_of(diff)) < 1e-35);
}
