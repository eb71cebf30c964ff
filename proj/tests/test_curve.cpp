#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "irrper/curve.hpp"
#include "irrper/scalar.hpp"

using namespace irrper;

TEST_CASE("critical data identities at lambda = 2") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  CHECK(cd.kase == CurveCase::Generic);
  CHECK(to_double(critical_identity_error(cd)) < 1e-13);
  // c1 c2 = -lambda^2 (lambda-1)^2 / 27
  CHECK(std::abs(cd.c1 * cd.c2 - cplx64(-4.0 / 27)) < 1e-14);
  // s_i^2 = c_i with the recorded branch
  CHECK(std::abs(cd.s1 * cd.s1 - cd.c1) < 1e-14);
  CHECK(std::abs(cd.s2 * cd.s2 - cd.c2) < 1e-14);
  // f(x) - c_i = (x - x_i)^2 (x - companion): roots sum to lambda + 1
  CHECK(std::abs(cplx64(2.0) * cd.x1 + cd.x3 - cplx64(3.0)) < 1e-14);
  CHECK(std::abs(cplx64(2.0) * cd.x2 + cd.x4 - cplx64(3.0)) < 1e-14);
  // companions really are roots: f(x3) = c1, f(x4) = c2
  CHECK(std::abs(legendre_f(cd.lambda, cd.x3) - cd.c1) < 1e-13);
  CHECK(std::abs(legendre_f(cd.lambda, cd.x4) - cd.c2) < 1e-13);
  // at lambda = 2: c1 - c2 = (4/27) * 3^{3/2} > 0 under the lex ordering
  CHECK(cd.c1.real() > cd.c2.real());
  CHECK(std::abs(cd.c1 - cd.c2 - cplx64(4.0 / 27 * std::sqrt(27.0))) < 1e-13);
}

TEST_CASE("identities on random lambda") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    cplx64 lam(u(rng), u(rng));
    if (std::abs(lam) < 0.05 || std::abs(lam - cplx64(1.0)) < 0.05) continue;
    const auto cd = critical_data(make_curve(lam));
    CHECK(to_double(critical_identity_error(cd)) < 1e-12);
    // critical points satisfy f'(x) = 0
    CHECK(std::abs(legendre_fprime(lam, cd.x1)) < 1e-11 * (1.0 + std::abs(lam)));
    CHECK(std::abs(legendre_fprime(lam, cd.x2)) < 1e-11 * (1.0 + std::abs(lam)));
    // critical values are f at the critical points
    CHECK(std::abs(legendre_f(lam, cd.x1) - cd.c1) < 1e-11 * (1.0 + std::abs(cd.c1)));
    CHECK(std::abs(legendre_f(lam, cd.x2) - cd.c2) < 1e-11 * (1.0 + std::abs(cd.c2)));
  }
}

TEST_CASE("deterministic ordering") {
  const auto a = critical_data(make_curve(cplx64(2.0)));
  const auto b = critical_data(make_curve(cplx64(2.0)));
  CHECK(a.x1 == b.x1);
  CHECK(a.s2 == b.s2);
  CHECK(detail::lex_less(a.x1, a.x2));
}

TEST_CASE("degenerate and exceptional parameters") {
  CHECK_THROWS(make_curve(cplx64(0.0)));
  CHECK_THROWS(make_curve(cplx64(1.0)));

  // lambda^2 - lambda + 1 = 0
  const cplx64 lam(0.5, 0.5 * std::sqrt(3.0));
  const auto cd = critical_data(make_curve(lam));
  CHECK(cd.kase == CurveCase::Exceptional);
  CHECK(std::abs(cd.x1 - (lam + cplx64(1.0)) / cplx64(3.0)) < 1e-14);
  CHECK(std::abs(cd.c1 - (cplx64(2.0) * lam - cplx64(1.0)) / cplx64(9.0)) < 1e-14);

  // near-exceptional parameters stay generic but warn
  const cplx64 near_lam = lam + cplx64(1e-5, 0.0);
  const auto near_cd = critical_data(make_curve(near_lam));
  CHECK(near_cd.kase == CurveCase::Generic);
  CHECK(!near_cd.warnings.empty());
}

TEST_CASE("identities in extended precision") {
  using C = cplx50;
  const auto cd = critical_data(make_curve(make_cplx<C>(2.0, 0.0)));
  CHECK(to_double(critical_identity_error(cd)) < 1e-30);
}

TEST_CASE("rapid decay sectors cover the decay directions") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto sectors = rapid_decay_sectors(cd);
  CHECK(sectors.size() == 3);
  for (const auto& s : sectors) {
    // the central direction t maps to y = -t^{-3} on the negative real axis
    const cplx64 t = std::exp(cplx64(0.0, s.center()));
    const cplx64 y = cplx64(-1.0) / (t * t * t);
    CHECK(y.real() < 0.0);
    CHECK(std::abs(y.imag()) < 1e-12);
  }
}
