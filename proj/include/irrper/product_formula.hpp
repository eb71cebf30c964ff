#pragma once

// Closed-form side of the period computation: tame symbols with
// path-tracked logarithm branches, Gamma factors, the product formula for
// the determinant of a regular-singular period matrix, the Vandermonde
// basis-change factor, the Selberg-type rank-1 closed form, and the rank-1
// irregular determinant. Everything is carried both as a value and as a
// logarithm so huge-exponent factors stay representable.

#include <stdexcept>
#include <vector>

#include "irrper/connection.hpp"
#include "irrper/gamma.hpp"
#include "irrper/path.hpp"
#include "irrper/scalar.hpp"

namespace irrper {

// Paths fixing every branch: gammas[i] runs from the common base point to
// singular point i; gamma_inf runs from the base to a real point right of
// the whole configuration (its endpoint stands in for +infinity; it must
// not wind around the configuration).
template <class C>
struct SymbolPaths {
  C base;
  std::vector<PathSpec<C>> gammas;
  PathSpec<C> gamma_inf;
};

template <class C>
SymbolPaths<C> default_symbol_paths(const LogConnection<C>& conn, const C& base) {
  using R = real_t<C>;
  SymbolPaths<C> out;
  out.base = base;
  const std::vector<C> pts = conn.singular_locations();
  R radius(0);
  for (const C& p : pts) {
    radius = std::max(radius, abs_of(p - base));
    if (abs_of(p - base) == R(0))
      throw std::invalid_argument("default_symbol_paths: base point is singular");
  }
  for (const C& p : pts) out.gammas.push_back(build_path(base, p, std::span<const C>(pts)));
  const C far = base + C(4 * radius + R(8));
  out.gamma_inf = build_path(base, far, std::span<const C>(pts));
  return out;
}

template <class C>
struct SymbolValue {
  C value;
  C log_value;
  int path_index = -1;  // -1 means the point at infinity
};

// Tame symbol at singular point i along gammas[i]: for rank r it is the
// symbol of the determinant connection, exp(sum_{j != i} tr(B_j) * L_j)
// with L_j the branch of log(x - lambda_j) continued along the path from
// the principal value at the base point.
template <class C>
SymbolValue<C> tame_symbol(const LogConnection<C>& conn, const SymbolPaths<C>& paths,
                           size_t i) {
  if (i >= conn.points.size()) throw std::out_of_range("tame_symbol: point index");
  C log_sum(0);
  for (size_t j = 0; j < conn.points.size(); ++j) {
    if (j == i) continue;
    BranchTracker<C> tracker(paths.gammas[i], conn.points[j].location);
    log_sum += conn.residue_trace(j) * tracker.log_at_end();
  }
  return {exp_of(log_sum), log_sum, static_cast<int>(i)};
}

// Symbol at infinity: lim D(x) x^{-sum tr B}. Along an admissible gamma_inf
// (ending on the positive real side beyond the configuration, no net
// winding of x) the limit is exp(2 pi i * sum_j tr(B_j) w_j) where w_j is
// the integer winding of the tracked branch of log(x - lambda_j) against
// the principal one at the endpoint.
template <class C>
SymbolValue<C> tame_symbol_infinity(const LogConnection<C>& conn,
                                    const SymbolPaths<C>& paths) {
  using R = real_t<C>;
  using std::round;
  const R two_pi = 2 * scalar_traits<C>::pi();
  C log_sum(0);
  const C end = paths.gamma_inf.end();
  for (size_t j = 0; j < conn.points.size(); ++j) {
    BranchTracker<C> tracker(paths.gamma_inf, conn.points[j].location);
    const R tracked = tracker.log_at_end().imag();
    const R principal = arg_of(end - conn.points[j].location);
    const double w = std::round(to_double((tracked - principal) / two_pi));
    log_sum += conn.residue_trace(j) * C(R(0), two_pi * R(w));
  }
  return {exp_of(log_sum), log_sum, -1};
}

// Product of Gamma over the residue eigenvalues; at infinity over the
// eigenvalues of -Res_infinity.
template <class C>
C log_gamma_factor(const LogConnection<C>& conn, size_t i) {
  C sum(0);
  for (const C& ev : residue_eigenvalues(conn.points[i].residue)) sum += log_gamma(ev);
  return sum;
}

template <class C>
C log_gamma_factor_infinity(const LogConnection<C>& conn) {
  C sum(0);
  Mat<C> minus_inf = -conn.residue_at_infinity();
  for (const C& ev : residue_eigenvalues(minus_inf)) sum += log_gamma(ev);
  return sum;
}

template <class C>
C gamma_factor(const LogConnection<C>& conn, size_t i) {
  return exp_of(log_gamma_factor(conn, i));
}

template <class C>
C gamma_factor_infinity(const LogConnection<C>& conn) {
  return exp_of(log_gamma_factor_infinity(conn));
}

// det(period matrix in the omega basis) =
//   prod_i symbol_i * symbol_inf^{-1} * prod_i Gamma_i * Gamma_inf^{-1}.
template <class C>
struct PeriodProduct {
  C value;
  C log_value;
  std::vector<C> log_symbols;
  C log_symbol_infinity;
  std::vector<C> log_gammas;
  C log_gamma_infinity;
};

template <class C>
PeriodProduct<C> regular_period_det(const LogConnection<C>& conn,
                                    const SymbolPaths<C>& paths) {
  PeriodProduct<C> out;
  C log_sum(0);
  for (size_t i = 0; i < conn.points.size(); ++i) {
    out.log_symbols.push_back(tame_symbol(conn, paths, i).log_value);
    out.log_gammas.push_back(log_gamma_factor(conn, i));
    log_sum += out.log_symbols.back() + out.log_gammas.back();
  }
  out.log_symbol_infinity = tame_symbol_infinity(conn, paths).log_value;
  out.log_gamma_infinity = log_gamma_factor_infinity(conn);
  log_sum -= out.log_symbol_infinity + out.log_gamma_infinity;
  out.log_value = log_sum;
  out.value = exp_of(log_sum);
  return out;
}

template <class C>
PeriodProduct<C> regular_period_det(const LogConnection<C>& conn, const C& base) {
  return regular_period_det(conn, default_symbol_paths(conn, base));
}

// Vandermonde determinant prod_{i<j} (lambda_i - lambda_j).
template <class C>
C vandermonde(const std::vector<C>& pts) {
  using R = real_t<C>;
  C prod(1);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const C d = pts[i] - pts[j];
      if (abs_of(d) == R(0)) throw std::invalid_argument("vandermonde: repeated points");
      prod *= d;
    }
  return prod;
}

template <class C>
C log_vandermonde(const std::vector<C>& pts) {
  using R = real_t<C>;
  C sum(0);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const C d = pts[i] - pts[j];
      if (abs_of(d) == R(0)) throw std::invalid_argument("vandermonde: repeated points");
      sum += log_of(d);
    }
  return sum;
}

// Basis-change factor Delta^r between the omega and eta form bases.
template <class C>
C vandermonde_correction(const std::vector<C>& pts, int rank) {
  C v = vandermonde(pts);
  C out(1);
  for (int k = 0; k < rank; ++k) out *= v;
  return out;
}

// Closed form of det( int_{delta_j} prod_k (x-lambda_k)^{s_k - 1} x^{i-1} dx ):
//   Gamma(s_1)...Gamma(s_n)/Gamma(s) * prod_{i<j}(lambda_j - lambda_i)
//   * prod_i prod_{j != i} (lambda_j - lambda_i)^{s_i - 1},
// with principal logarithm branches throughout (callers choose
// configurations where the symbol paths realize principal branches).
template <class C>
C selberg_rank1_det(const std::vector<C>& s, const std::vector<C>& pts) {
  if (s.size() != pts.size()) throw std::invalid_argument("selberg_rank1_det: size mismatch");
  const size_t n = pts.size();
  C log_sum(0);
  C total_s(0);
  for (size_t i = 0; i < n; ++i) {
    log_sum += log_gamma(s[i]);
    total_s += s[i];
  }
  log_sum -= log_gamma(total_s);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) log_sum += log_of(pts[j] - pts[i]);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      log_sum += (s[i] - C(1)) * log_of(pts[j] - pts[i]);
    }
  return exp_of(log_sum);
}

// Rank-1 irregular connection d + dF + sum s_i dx/(x - lambda_i): period
// determinant over the chain basis (consecutive-point chains plus one decay
// chain per rapid-decay sector of exp(F)).
template <class C>
struct IrregularRank1Spec {
  Polynomial<C> f;  // the irregular part F
  std::vector<C> s;
  std::vector<C> points;
};

template <class C>
C irregular_rank1_det(const IrregularRank1Spec<C>& spec) {
  using R = real_t<C>;
  const int d = spec.f.degree();
  if (d < 1) throw std::invalid_argument("irregular_rank1_det: needs deg F >= 1");
  if (spec.s.size() != spec.points.size())
    throw std::invalid_argument("irregular_rank1_det: size mismatch");
  const size_t n = spec.points.size();
  const C ad = spec.f.coeff[d];
  C total_s(0);
  C log_sum(0);
  const R pi = scalar_traits<C>::pi();
  for (size_t i = 0; i < n; ++i) {
    log_sum += log_gamma(spec.s[i]);
    total_s += spec.s[i];
  }
  log_sum += C((R(d) - 1) / 2) * log_of(C(2 * pi));
  log_sum += (-total_s - C((R(d) - 1) / 2)) * log_of(C(R(d)) * ad);
  // (-1)^{ds + d(d-1)/4} as exp(i pi (...)), principal
  log_sum += C(R(0), pi) * (C(R(d)) * total_s + C(R(d) * R(d - 1) / 4));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      log_sum += (spec.s[i] - C(1)) * log_of(spec.points[i] - spec.points[j]);
    }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) log_sum += log_of(spec.points[j] - spec.points[i]);
  for (size_t i = 0; i < n; ++i) log_sum += spec.f.eval(spec.points[i]);
  // critical values of F
  if (d == 2) {
    const C u = -spec.f.coeff[1] / (C(2) * spec.f.coeff[2]);
    log_sum += spec.f.eval(u);
  } else if (d > 2) {
    throw std::invalid_argument("irregular_rank1_det: deg F > 2 critical points unsupported");
  }
  return exp_of(log_sum);
}

// ---------------------------------------------------------------------------
// Reference closed forms for the Legendre pipeline, tabulated independently
// of the generic engine and cross-checked against it in tests.
// ---------------------------------------------------------------------------

// log of the omega-basis determinant of the regularized rank-2 connection:
// generic case.
template <class C>
C log_dm_reference(const CriticalData<C>& cd, int m) {
  using R = real_t<C>;
  const R pi = scalar_traits<C>::pi();
  const C c1 = cd.c1, c2 = cd.c2;
  const C m2 = C(R(m)) * C(R(m));
  const C mp1 = C(R(m + 1));
  C log_sum = log_of(C(64) * C(pi) * C(pi));  // 2^6 pi^2
  log_sum += C(R(5) / 2) * (log_of(c1) + log_of(c2));
  log_sum += log_of(c1 - c2);
  log_sum += (C(2) * mp1 + C(R(5) / 2)) * (log_of(m2 - c1) + log_of(m2 - c2));
  log_sum += C(2) * log_gamma(mp1);
  log_sum -= log_gamma(mp1 + C(R(14) / 3)) + log_gamma(mp1 + C(R(16) / 3));
  return log_sum;
}

// Vandermonde of (-s1, s1, -s2, s2, -m), closed form:
// 4 s1 s2 (c2 - c1)^2 (m^2 - c1)(m^2 - c2) under the locked point order
// (an interleaved order flips the overall sign; only the square enters the
// convergent sequence).
template <class C>
C delta_m_reference(const CriticalData<C>& cd, int m) {
  using R = real_t<C>;
  const C m2 = C(R(m)) * C(R(m));
  return C(4) * cd.s1 * cd.s2 * (cd.c2 - cd.c1) * (cd.c2 - cd.c1) * (m2 - cd.c1) *
         (m2 - cd.c2);
}

// Vandermonde of (s1, -s1, s2, -s2): 4 s1 s2 (c2 - c1)^2.
template <class C>
C delta_sigma_reference(const CriticalData<C>& cd) {
  return C(4) * cd.s1 * cd.s2 * (cd.c2 - cd.c1) * (cd.c2 - cd.c1);
}

// Exceptional case: log omega-basis determinant of the regularized 2x2
// connection with residue eigenvalues {1/3, 2/3} at +-s1.
template <class C>
C log_dm_exceptional_reference(const CriticalData<C>& cd, int m) {
  using R = real_t<C>;
  const C m2 = C(R(m)) * C(R(m));
  const C mp1 = C(R(m + 1));
  // symbols: (2 s1)(s1+m)^{2(m+1)} * (-2 s1)(m-s1)^{2(m+1)} * (m^2-c1)
  C log_sum = log_of(C(2) * cd.s1) + log_of(C(-2) * cd.s1);
  log_sum += C(2) * mp1 * (log_of(cd.s1 + C(R(m))) + log_of(C(R(m)) - cd.s1));
  log_sum += log_of(m2 - cd.c1);
  // Gamma factors: Gamma(1/3)Gamma(2/3) at each of +-s1, Gamma(m+1)^2 at -m,
  // divided by Gamma(m+1+2/3)Gamma(m+1+4/3) at infinity
  log_sum += C(2) * (log_gamma(C(R(1) / 3)) + log_gamma(C(R(2) / 3)));
  log_sum += C(2) * log_gamma(mp1);
  log_sum -= log_gamma(mp1 + C(R(2) / 3)) + log_gamma(mp1 + C(R(4) / 3));
  return log_sum;
}

// Vandermonde of (-s1, s1, -m): -2 s1 (m^2 - c1) under the locked order.
template <class C>
C delta_m_exceptional_reference(const CriticalData<C>& cd, int m) {
  using R = real_t<C>;
  const C m2 = C(R(m)) * C(R(m));
  return C(-2) * cd.s1 * (m2 - cd.c1);
}

}  // namespace irrper
