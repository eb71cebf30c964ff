#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "irrper/comparison.hpp"
#include "irrper/curve.hpp"

using namespace irrper;

static const double kPi = 3.141592653589793238462643383279502884;

TEST_CASE("change-of-basis determinant equals the closed form") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto sm = sigma_matrix(cd);
  CHECK(std::abs(sm.det - sm.det_closed) < 1e-12 * std::abs(sm.det_closed));

  std::mt19937 rng(987);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int done = 0;
  while (done < 50) {
    const cplx64 lam(u(rng), u(rng));
    if (std::abs(lam) < 0.05 || std::abs(lam - cplx64(1.0)) < 0.05) continue;
    if (std::abs(lam * lam - lam + cplx64(1.0)) < 1e-2) continue;
    const auto cd2 = critical_data(make_curve(lam));
    const auto sm2 = sigma_matrix(cd2);
    CHECK(std::abs(sm2.det - sm2.det_closed) < 1e-10 * std::abs(sm2.det_closed));
    ++done;
  }
}

TEST_CASE("exceptional change-of-basis determinant") {
  const cplx64 lam(0.5, 0.5 * std::sqrt(3.0));
  const auto cd = critical_data(make_curve(lam));
  const auto sm = sigma_matrix_exceptional(cd);
  CHECK(std::abs(sm.det - sm.det_closed) < 1e-13 * std::abs(sm.det_closed));
  CHECK(std::abs(sm.det_closed + cplx64(2.0) * cd.s1) < 1e-14);
  CHECK_THROWS(sigma_matrix(cd));
  CHECK_THROWS(sigma_matrix_exceptional(critical_data(make_curve(cplx64(2.0)))));
}

TEST_CASE("final period: independent closed forms agree") {
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int done = 0;
  while (done < 25) {
    const cplx64 lam(u(rng), u(rng));
    if (std::abs(lam) < 0.05 || std::abs(lam - cplx64(1.0)) < 0.05) continue;
    if (std::abs(lam * lam - lam + cplx64(1.0)) < 1e-2) continue;
    const auto cd = critical_data(make_curve(lam));
    const auto fp = final_period(cd);
    CHECK(std::abs(fp.closed_critical - fp.closed_lambda) <
          1e-10 * std::abs(fp.closed_critical));
    CHECK(std::abs(fp.assembled * cplx64(16.0) - fp.closed_critical) <
          1e-10 * std::abs(fp.closed_critical));
    ++done;
  }
}

TEST_CASE("exceptional final period") {
  const cplx64 lam(0.5, 0.5 * std::sqrt(3.0));
  const auto cd = critical_data(make_curve(lam));
  const auto fp = final_period_exceptional(cd);
  CHECK(std::abs(fp.limit - cplx64(4 * kPi * kPi / 3)) < 1e-12);
  // with the (+s1, -s1) normalization the assembled value sits exactly on
  // the principal branch of 2 pi^2 (-3)^{-1/4}
  CHECK(std::abs(fp.assembled - fp.reference_value) < 1e-12 * std::abs(fp.reference_value));
  CHECK_THROWS(final_period_exceptional(critical_data(make_curve(cplx64(2.0)))));
  CHECK_THROWS(final_period(cd));
}

TEST_CASE("engine vs tabulated determinant: stable reported discrepancy") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto g10 = golden_comparison(cd, 10, cplx64(0.25));
  const auto g20 = golden_comparison(cd, 20, cplx64(0.25));
  // the two readings differ by a fixed factor, independent of m
  CHECK(std::abs(g10.log_ratio - g20.log_ratio) < 1e-8);
  // its modulus is (c1-c2)^9
  CHECK(std::abs(g10.log_ratio.real() - 9 * std::log(std::abs(cd.c1 - cd.c2))) < 1e-9);

  const cplx64 lam(0.5, 0.5 * std::sqrt(3.0));
  const auto ce = critical_data(make_curve(lam));
  const auto e10 = golden_comparison(ce, 10, cplx64(0.3));
  const auto e20 = golden_comparison(ce, 20, cplx64(0.3));
  // exceptional case: engine and tabulated form agree outright
  CHECK(std::abs(e10.log_ratio) < 1e-8);
  CHECK(std::abs(e20.log_ratio) < 1e-8);
}
