#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "irrper/curve.hpp"
#include "irrper/period_engine.hpp"

using namespace irrper;

static const double kPi = 3.141592653589793238462643383279502884;

static LogConnection<cplx64> rank1_conn(const std::vector<cplx64>& pts,
                                        const std::vector<cplx64>& s) {
  LogConnection<cplx64> c;
  c.rank = 1;
  for (size_t i = 0; i < pts.size(); ++i) {
    Mat<cplx64> r(1, 1);
    r(0, 0) = s[i];
    c.points.push_back({pts[i], r});
  }
  return c;
}

TEST_CASE("rank-1 beta calibration: quadrature = closed forms") {
  const std::vector<cplx64> pts = {cplx64(0.0), cplx64(1.0)};
  const std::vector<cplx64> s = {cplx64(1.0 / 3), cplx64(2.0 / 3)};
  const auto conn = rank1_conn(pts, s);
  const auto paths = default_symbol_paths(conn, cplx64(0.5));
  const auto settings = QuadratureSettings<double>::defaults();

  const auto eta = period_matrix_rank1(pts, s, paths.gammas, FormBasis::Eta, settings);
  const auto omega = period_matrix_rank1(pts, s, paths.gammas, FormBasis::Omega, settings);
  CHECK(eta.converged);
  CHECK(omega.converged);

  const cplx64 selberg = selberg_rank1_det(s, pts);
  const auto prod = regular_period_det(conn, paths);
  CHECK(std::abs(eta.determinant - selberg) < 1e-10 * std::abs(selberg));
  CHECK(std::abs(omega.determinant - prod.value) < 1e-10 * std::abs(prod.value));
  // basis change: det_eta * Delta^rank = det_omega
  CHECK(std::abs(eta.determinant * vandermonde_correction(pts, 1) - omega.determinant) <
        1e-10 * std::abs(omega.determinant));
}

TEST_CASE("rank-1 random real configurations: quadrature = closed forms") {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> upt(-3.0, 3.0);
  std::uniform_real_distribution<double> us(0.15, 1.85);
  const auto settings = QuadratureSettings<double>::defaults();
  int done = 0;
  while (done < 6) {
    const int n = 2 + (done % 2);
    std::vector<cplx64> pts;
    std::vector<double> raw;
    for (int i = 0; i < n; ++i) raw.push_back(upt(rng));
    std::sort(raw.begin(), raw.end());
    bool ok = true;
    for (int i = 0; i + 1 < n; ++i)
      if (raw[i + 1] - raw[i] < 0.4) ok = false;
    if (!ok) continue;
    for (double p : raw) pts.push_back(cplx64(p));
    std::vector<cplx64> s;
    for (int i = 0; i < n; ++i) s.push_back(cplx64(us(rng)));

    const cplx64 base = (pts.front() + pts.back()) / cplx64(2.0) + cplx64(0.05, 0.0);
    const auto conn = rank1_conn(pts, s);
    const auto paths = default_symbol_paths(conn, base);
    const auto eta = period_matrix_rank1(pts, s, paths.gammas, FormBasis::Eta, settings);
    const auto omega = period_matrix_rank1(pts, s, paths.gammas, FormBasis::Omega, settings);

    const cplx64 selberg = selberg_rank1_det(s, pts);
    const auto prod = regular_period_det(conn, paths);
    CHECK(std::abs(eta.determinant - selberg) < 1e-8 * std::abs(selberg));
    CHECK(std::abs(omega.determinant - prod.value) < 1e-8 * std::abs(prod.value));
    cplx64 corr = vandermonde_correction(pts, 1);
    CHECK(std::abs(eta.determinant * corr - omega.determinant) <
          1e-8 * std::abs(omega.determinant));
    ++done;
  }
}

TEST_CASE("rank-2 transport determinant against the closed product") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto pair = pushforward_legendre(cd);
  const auto reg = regularize(twist_by_D(pair.rank2, cd), RegularizationIndex<cplx64>{10}, cd);
  const cplx64 base(0.25, 0.0);
  const auto paths = default_symbol_paths(reg, base);

  auto qsettings = QuadratureSettings<double>::defaults();
  qsettings.rel_tol = 1e-9;
  const auto omega = period_matrix_transport(reg, paths.gammas, FormBasis::Omega, qsettings);
  CHECK(omega.entries.rows() == 8);

  const auto prod = regular_period_det(reg, paths);
  const cplx64 norm = transport_normalization(reg, base);
  CHECK(std::abs(omega.determinant * norm - prod.value) < 1e-6 * std::abs(prod.value));

  // basis-change invariant: det_eta * Delta^2 = det_omega
  const auto eta = period_matrix_transport(reg, paths.gammas, FormBasis::Eta, qsettings);
  const cplx64 corr = vandermonde_correction(reg.singular_locations(), 2);
  CHECK(std::abs(eta.determinant * corr - omega.determinant) <
        1e-6 * std::abs(omega.determinant));
}

TEST_CASE("approximation sequence: per-record identity and limit") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const auto res = approx_sequence(cd, {10, 20, 40, 60, 80});
  CHECK(res.records.size() == 5);
  for (const auto& rec : res.records) {
    const cplx64 rebuilt =
        res.closed_form * rec.factor_power * rec.factor_symbol * rec.factor_gamma;
    CHECK(std::abs(rec.p_m - rebuilt) < 1e-9 * std::abs(rec.p_m));
  }
  // the extrapolated limit should already be close at moderate m
  CHECK(std::abs(res.limit - res.closed_form) < 5e-2 * std::abs(res.closed_form));
  // the slowest factor converges to 1 at rate O(1/m)
  CHECK(std::abs(res.records.back().factor_gamma - cplx64(1.0)) < 0.4);
  CHECK(std::abs(res.records.back().factor_symbol - cplx64(1.0)) < 1e-3);
  CHECK_THROWS(approx_sequence(cd, {1}));
}

TEST_CASE("pushforward period closed form") {
  const auto cd = critical_data(make_curve(cplx64(2.0)));
  const cplx64 want = cplx64(16 * kPi * kPi) * cd.c1 * cd.c1 * cd.c2 * cd.c2 /
                      (cd.c1 - cd.c2);
  CHECK(std::abs(pushforward_period(cd) - want) < 1e-10 * std::abs(want));
}

TEST_CASE("exceptional pipeline") {
  const cplx64 lam(0.5, 0.5 * std::sqrt(3.0));
  const auto cd = critical_data(make_curve(lam));
  const auto res = exceptional_pipeline(cd, {10, 20, 40});
  for (const auto& rec : res.records) {
    const cplx64 gamma_part = std::exp(
        cplx64(2.0) * (log_gamma(cplx64(1.0 / 3)) + log_gamma(cplx64(2.0 / 3))));
    const cplx64 rebuilt =
        gamma_part * rec.factor_power * rec.factor_symbol * rec.factor_gamma;
    CHECK(std::abs(rec.p_m - rebuilt) < 1e-10 * std::abs(rec.p_m));
  }
  CHECK(std::abs(res.closed_form - cplx64(4 * kPi * kPi / 3)) < 1e-12);
  CHECK(std::abs(res.limit - res.closed_form) < 1e-2 * std::abs(res.closed_form));
  CHECK(std::abs(res.assembled - res.limit / (cplx64(2.0) * cd.s1)) < 1e-12);
  // 2 pi^2 (-3)^{-1/4}, principal branch
  const cplx64 ref = cplx64(2 * kPi * kPi) * std::exp(-std::log(cplx64(-3.0)) / cplx64(4.0));
  CHECK(std::abs(res.reference_value - ref) < 1e-12);

  const auto generic = critical_data(make_curve(cplx64(2.0)));
  CHECK_THROWS(exceptional_pipeline(generic, {10}));
}

TEST_CASE("argument validation") {
  const std::vector<cplx64> pts = {cplx64(0.0), cplx64(1.0)};
  const std::vector<cplx64> s = {cplx64(0.5), cplx64(0.5)};
  CHECK_THROWS(period_matrix_rank1(pts, s, std::vector<PathSpec<cplx64>>{}, FormBasis::Eta,
                                   QuadratureSettings<double>::defaults()));
}
