#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "irrper/curve.hpp"
#include "irrper/direct_curve.hpp"

using namespace irrper;

TEST_CASE("direct periods at lambda = 2: convergence, Stokes, margin") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto qs = QuadratureSettings<double>::defaults();
  const auto res = direct_curve_period(cd, qs);
  CHECK(res.converged);
  CHECK(to_double(res.tail_bound) < 1e-11);
  // exactness residuals vanish on every cycle
  CHECK(to_double(res.stokes_max) < 1e-8);
  // determinant clearly nonzero against the error budget
  CHECK(std::abs(res.determinant) > 1e3 * to_double(res.det_error));
  CHECK(std::abs(res.closed_form) > 0.0);
}

TEST_CASE("homotopy invariance of the determinant") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto qs = QuadratureSettings<double>::defaults();
  const auto base = direct_curve_period(cd, qs);

  DirectCurveOptions alt1;
  alt1.loop_margin = 0.22;
  alt1.base_radius = 0.5;
  const auto res1 = direct_curve_period(cd, qs, alt1);
  CHECK(std::abs(res1.determinant - base.determinant) < 1e-6 * std::abs(base.determinant));

  DirectCurveOptions alt2;
  alt2.loop_margin = 0.5;
  alt2.base_radius = 0.7;
  const auto res2 = direct_curve_period(cd, qs, alt2);
  CHECK(std::abs(res2.determinant - base.determinant) < 1e-6 * std::abs(base.determinant));
}

TEST_CASE("ratio to the closed form is stable across tolerances") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  auto loose = QuadratureSettings<double>::defaults();
  loose.rel_tol = 1e-9;
  auto tight = QuadratureSettings<double>::defaults();
  tight.rel_tol = 1e-12;
  const auto a = direct_curve_period(cd, loose);
  const auto b = direct_curve_period(cd, tight);
  CHECK(std::abs(a.ratio - b.ratio) < 1e-6 * std::abs(b.ratio));
}

TEST_CASE("off-axis parameter") {
  const auto cd = critical_data(make_curve(cplx64(2.0, 0.7)));
  const auto qs = QuadratureSettings<double>::defaults();
  const auto res = direct_curve_period(cd, qs);
  CHECK(res.converged);
  CHECK(to_double(res.stokes_max) < 1e-8);
  CHECK(std::abs(res.determinant) > 1e3 * to_double(res.det_error));
}

TEST_CASE("inseparable branch points are rejected") {
  const auto cd = critical_data(make_curve(cplx64(0.5)));
  CHECK_THROWS(direct_curve_period(cd, QuadratureSettings<double>::defaults()));
}
