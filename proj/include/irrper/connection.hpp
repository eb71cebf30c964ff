#pragma once

// Logarithmic connections on the affine line with a polynomial irregular
// part: d + dF + sum_i B_i/(y - p_i) dy. Constructors for everything the
// pipeline needs: the rank-2 direct-image connection of the Legendre curve
// (derived in-code, not transcribed), the divisor twist, and the
// regularization that trades dF = dy for a logarithmic point at -m.

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrper/curve.hpp"
#include "irrper/scalar.hpp"

namespace irrper {

template <class C>
using Mat = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
template <class C>
using Vec = Eigen::Matrix<C, Eigen::Dynamic, 1>;

// Coefficients a_0..a_d of the irregular part F; F = y is {0, 1}.
template <class C>
struct Polynomial {
  std::vector<C> coeff;

  int degree() const {
    int d = static_cast<int>(coeff.size()) - 1;
    while (d > 0 && abs_of(coeff[d]) == real_t<C>(0)) --d;
    return d;
  }
  bool is_zero() const {
    for (const C& c : coeff)
      if (abs_of(c) != real_t<C>(0)) return false;
    return true;
  }
  C eval(const C& y) const {
    C v(0);
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) v = v * y + *it;
    return v;
  }
  Polynomial derivative() const {
    Polynomial d;
    for (size_t k = 1; k < coeff.size(); ++k) d.coeff.push_back(C(real_t<C>(k)) * coeff[k]);
    if (d.coeff.empty()) d.coeff.push_back(C(0));
    return d;
  }
  static Polynomial zero() { return Polynomial{{C(0)}}; }
  static Polynomial identity_y() { return Polynomial{{C(0), C(1)}}; }
};

template <class C>
struct SingularPoint {
  C location;
  Mat<C> residue;
};

template <class C>
struct LogConnection {
  int rank = 1;
  std::vector<SingularPoint<C>> points;
  Polynomial<C> irregular = Polynomial<C>::zero();
  std::string frame = "standard";

  // B^(inf) is derived, never stored.
  Mat<C> residue_at_infinity() const {
    Mat<C> s = Mat<C>::Zero(rank, rank);
    for (const auto& p : points) s -= p.residue;
    return s;
  }

  std::vector<C> singular_locations() const {
    std::vector<C> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.location);
    return out;
  }

  // Full coefficient matrix A(y) of the dy part: sum B_i/(y-p_i) + F'(y) I.
  Mat<C> coefficient(const C& y) const {
    Mat<C> a = Mat<C>::Zero(rank, rank);
    for (const auto& p : points) a += p.residue / (y - p.location);
    if (!irregular.is_zero()) {
      const C fp = irregular.derivative().eval(y);
      for (int i = 0; i < rank; ++i) a(i, i) += fp;
    }
    return a;
  }

  C residue_trace(size_t i) const { return points[i].residue.trace(); }
};

// Eigenvalues of an r x r residue, r <= 2, by closed form.
template <class C>
std::vector<C> residue_eigenvalues(const Mat<C>& m) {
  if (m.rows() == 1) return {m(0, 0)};
  if (m.rows() == 2) {
    const C tr = m(0, 0) + m(1, 1);
    const C det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const C disc = sqrt_of(tr * tr - C(4) * det);
    return {(tr - disc) / C(2), (tr + disc) / C(2)};
  }
  throw std::invalid_argument("residue_eigenvalues: rank > 2 not supported");
}

// ---------------------------------------------------------------------------
// Direct image of (O_U, d) under (x, y) -> y, rank-2 trace-zero part.
//
// The connection matrix is re-derived numerically-symbolically: for sample
// values of y the action of d on the frame v1 = x - (lambda+1)/3,
// v2 = x^2 - (lambda^2+1)/3 is computed fiberwise (interpolation over the
// three roots of f(x) = y^2) and the resulting matrix-valued function, which
// is (P0 + P1 y^2) * 2y / (3 (y^2-c1)(y^2-c2)) in the generic case, is
// fitted exactly from two samples and verified on a third.
// ---------------------------------------------------------------------------

namespace detail {

// Roots of the monic cubic x^3 + a2 x^2 + a1 x + a0 (deterministic order).
template <class C>
std::array<C, 3> cubic_roots(const C& a2, const C& a1, const C& a0) {
  using R = real_t<C>;
  // depressed cubic t^3 + p t + q, x = t - a2/3
  const C shift = a2 / C(3);
  const C p = a1 - a2 * a2 / C(3);
  const C q = C(2) * a2 * a2 * a2 / C(27) - a2 * a1 / C(3) + a0;
  const C disc = q * q / C(4) + p * p * p / C(27);
  const C sd = sqrt_of(disc);
  C u3 = -q / C(2) + sd;
  if (abs_of(u3) < abs_of(-q / C(2) - sd)) u3 = -q / C(2) - sd;
  C u = pow_principal(u3, C(1) / C(3));
  if (abs_of(u) == R(0)) u = pow_principal(-q, C(1) / C(3));
  std::array<C, 3> roots;
  const C omega = exp_of(C(R(0), 2 * scalar_traits<C>::pi() / 3));
  for (int k = 0; k < 3; ++k) {
    C uk = u;
    for (int j = 0; j < k; ++j) uk *= omega;
    C t = (abs_of(uk) == R(0)) ? C(0) : uk - p / (C(3) * uk);
    roots[k] = t - shift;
  }
  // Newton polish
  for (C& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const C f = ((r + a2) * r + a1) * r + a0;
      const C fp = (C(3) * r + C(2) * a2) * r + a1;
      if (abs_of(fp) == R(0)) break;
      r -= f / fp;
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const C& a, const C& b) { return detail::lex_less(a, b); });
  return roots;
}

// Roots of f(x) - y^2 = x^3 - (lambda+1)x^2 + lambda x - y^2.
template <class C>
std::array<C, 3> fiber_roots(const C& lambda, const C& y) {
  return cubic_roots(-(lambda + C(1)), lambda, -y * y);
}

template <class C>
C frame_v1(const C& lambda, const C& x) {
  return x - (lambda + C(1)) / C(3);
}
template <class C>
C frame_v2(const C& lambda, const C& x) {
  return x * x - (lambda * lambda + C(1)) / C(3);
}

// A(y) of the rank-2 part, evaluated pointwise: columns are the coordinates
// of d v_k / dy in the frame (v1, v2). The constant component must vanish
// (trace-zero invariance); its size is returned as a consistency measure.
template <class C>
Eigen::Matrix<C, 2, 2> pushforward_coefficient_pointwise(const C& lambda, const C& y,
                                                         real_t<C>* residual = nullptr) {
  using R = real_t<C>;
  const auto roots = fiber_roots(lambda, y);
  Eigen::Matrix<C, 3, 3> basis;
  Eigen::Matrix<C, 3, 2> rhs;
  for (int k = 0; k < 3; ++k) {
    const C x = roots[k];
    const C fp = legendre_fprime(lambda, x);
    basis(k, 0) = C(1);
    basis(k, 1) = frame_v1(lambda, x);
    basis(k, 2) = frame_v2(lambda, x);
    rhs(k, 0) = C(2) * y / fp;          // d v1 / dy on the fiber
    rhs(k, 1) = C(4) * x * y / fp;      // d v2 / dy on the fiber
  }
  Eigen::Matrix<C, 3, 2> sol = basis.fullPivLu().solve(rhs);
  if (residual) {
    *residual = std::max(abs_of(sol(0, 0)), abs_of(sol(0, 1)));
  }
  Eigen::Matrix<C, 2, 2> a;
  a << sol(1, 0), sol(1, 1), sol(2, 0), sol(2, 1);
  return a;
}

}  // namespace detail

// Derived polynomial part of the rank-2 connection matrix: A(y) =
// (P0 + P1 * y^2) * 2y / (3 (y^2 - c1)(y^2 - c2)); in the exceptional case
// A(y) = G * 2y / (3 (y^2 - c1)) with constant G.
template <class C>
struct PushforwardMatrix {
  Eigen::Matrix<C, 2, 2> p0, p1;  // generic: P(s) = p0 + p1 s at s = y^2
  Eigen::Matrix<C, 2, 2> g;       // exceptional: constant matrix
  CurveCase kase = CurveCase::Generic;
  real_t<C> fit_residual{};       // verification error at an independent sample

  Eigen::Matrix<C, 2, 2> numerator(const C& s) const {
    return kase == CurveCase::Generic ? Eigen::Matrix<C, 2, 2>(p0 + p1 * s) : g;
  }
};

template <class C>
PushforwardMatrix<C> derive_pushforward_matrix(const CriticalData<C>& cd) {
  using R = real_t<C>;
  using M2 = Eigen::Matrix<C, 2, 2>;
  PushforwardMatrix<C> out;
  out.kase = cd.kase;
  auto denom = [&](const C& y) {
    const C s = y * y;
    if (cd.kase == CurveCase::Generic) return C(3) * (s - cd.c1) * (s - cd.c2);
    return C(3) * (s - cd.c1);
  };
  // sample points away from the singular set, scaled to the curve data
  const R scale = abs_of(cd.s1) + abs_of(cd.s2) + R(1);
  auto sample = [&](double mult, double im) {
    return C(scale) * make_cplx<C>(mult, im);
  };
  const C y1 = sample(1.37, 0.41), y2 = sample(2.11, -0.73), y3 = sample(0.57, 1.19);
  auto g_at = [&](const C& y) -> M2 {
    const M2 a = detail::pushforward_coefficient_pointwise(cd.lambda, y);
    return M2(a * denom(y) / (C(2) * y));
  };
  const M2 g1 = g_at(y1), g2 = g_at(y2), g3 = g_at(y3);
  if (cd.kase == CurveCase::Generic) {
    const C s1 = y1 * y1, s2 = y2 * y2, s3 = y3 * y3;
    out.p1 = (g1 - g2) / (s1 - s2);
    out.p0 = g1 - out.p1 * s1;
    out.fit_residual = (M2(out.p0 + out.p1 * s3) - g3).cwiseAbs().maxCoeff() /
                       (R(1) + g3.cwiseAbs().maxCoeff());
  } else {
    out.g = g1;
    out.fit_residual = (g2 - g1).cwiseAbs().maxCoeff() / (R(1) + g1.cwiseAbs().maxCoeff());
  }
  return out;
}

// Diagnostic: which of the two candidate closed forms of the (1,2) entry the
// derivation reproduces. Variant A has lambda*(lambda+1) in the constant
// term, variant B lambda*(lambda^2+1); the rest of the matrix is common.
enum class MatrixVariant { A, B, Neither };

template <class C>
MatrixVariant pushforward_matrix_variant(const CriticalData<C>& cd,
                                         const PushforwardMatrix<C>& pm,
                                         real_t<C> tol_rel = real_t<C>(1e-8)) {
  using R = real_t<C>;
  if (cd.kase != CurveCase::Generic) return MatrixVariant::Neither;
  const C lam = cd.lambda;
  const C got = pm.p0(0, 1);
  const C variant_a = C(2) / C(9) * lam * (lam + C(1));
  const C variant_b = C(2) / C(9) * lam * (lam * lam + C(1));
  const R scale = abs_of(variant_a) + abs_of(variant_b) + R(1);
  if (abs_of(got - variant_a) / scale < tol_rel) return MatrixVariant::A;
  if (abs_of(got - variant_b) / scale < tol_rel) return MatrixVariant::B;
  return MatrixVariant::Neither;
}

// (d + dy) tensor nabla' : irregular part y, residues of the rank-2 part at
// +-s1, +-s2 (generic) or +-s1 (exceptional). Point order is fixed as
// (-s1, +s1, -s2, +s2) for deterministic bases downstream.
template <class C>
struct PushforwardPair {
  LogConnection<C> rank1;  // d + dy on the trivial line bundle
  LogConnection<C> rank2;  // (d + dy) tensor nabla'
  PushforwardMatrix<C> matrix;
  MatrixVariant variant = MatrixVariant::Neither;
};

template <class C>
PushforwardPair<C> pushforward_legendre(const CriticalData<C>& cd) {
  using M2 = Eigen::Matrix<C, 2, 2>;
  PushforwardPair<C> out;
  out.matrix = derive_pushforward_matrix(cd);
  out.variant = pushforward_matrix_variant(cd, out.matrix);

  out.rank1.rank = 1;
  out.rank1.irregular = Polynomial<C>::identity_y();
  out.rank1.frame = "trivial";

  out.rank2.rank = 2;
  out.rank2.irregular = Polynomial<C>::identity_y();
  out.rank2.frame = "(v1, v2)";
  if (cd.kase == CurveCase::Generic) {
    // Res_{y=p} of N(y^2) * 2y/(3 (y^2-c1)(y^2-c2)) at p^2 = ci equals
    // N(ci) / (3 (ci - cj)).
    const std::array<C, 4> locs = {-cd.s1, cd.s1, -cd.s2, cd.s2};
    for (int i = 0; i < 4; ++i) {
      const C ci = (i < 2) ? cd.c1 : cd.c2;
      const C cj = (i < 2) ? cd.c2 : cd.c1;
      M2 res = out.matrix.numerator(ci) / (C(3) * (ci - cj));
      Mat<C> r(2, 2);
      r = res;
      out.rank2.points.push_back({locs[i], r});
    }
  } else {
    // Res_{y=p} of G * 2y/(3(y^2-c1)) at p^2 = c1 equals G/3.
    for (const C& loc : {-cd.s1, cd.s1}) {
      Mat<C> r(2, 2);
      r = M2(out.matrix.g / C(3));
      out.rank2.points.push_back({loc, r});
    }
  }
  return out;
}

// The regular-singular rank-2 connection nabla' itself (no dF part); the
// object whose dual flat sections admit the fiberwise branch-tracking
// oracle.
template <class C>
LogConnection<C> pushforward_prime(const CriticalData<C>& cd) {
  auto pair = pushforward_legendre(cd);
  pair.rank2.irregular = Polynomial<C>::zero();
  return pair.rank2;
}

// Twist by (O(-D), d + varpi): adds the identity residue at every point of
// the divisor D = {singular points of conn over D} and registers any new
// divisor points absent from the connection.
template <class C>
LogConnection<C> twist_by_divisor(const LogConnection<C>& conn, const std::vector<C>& divisor) {
  LogConnection<C> out = conn;
  for (const C& p : divisor) {
    bool found = false;
    for (auto& sp : out.points) {
      if (sp.location == p) {
        for (int i = 0; i < out.rank; ++i) sp.residue(i, i) += C(1);
        found = true;
        break;
      }
    }
    if (!found) {
      Mat<C> r = Mat<C>::Identity(out.rank, out.rank);
      out.points.push_back({p, r});
    }
  }
  return out;
}

// Twist of the rank-2 direct-image part by the ramification divisor.
template <class C>
LogConnection<C> twist_by_D(const LogConnection<C>& conn, const CriticalData<C>& cd) {
  if (cd.kase == CurveCase::Exceptional)
    throw std::invalid_argument("twist_by_D: exceptional case needs no twist");
  return twist_by_divisor(conn, {-cd.s1, cd.s1, -cd.s2, cd.s2});
}

template <class C>
struct RegularizationIndex {
  int m;
};

template <class C>
void check_regularization_index(const RegularizationIndex<C>& idx, const CriticalData<C>& cd) {
  using R = real_t<C>;
  if (idx.m < 2) throw std::invalid_argument("regularize: m must be >= 2");
  const C m2 = C(R(idx.m)) * C(R(idx.m));
  if (abs_of(m2 - cd.c1) < R(1e-9) || abs_of(m2 - cd.c2) < R(1e-9))
    throw std::invalid_argument("regularize: m^2 collides with a critical value");
}

// Replace dF = dy by the logarithmic point -m with residue (m+1) I:
// d + dy + ...  ->  d + (m+1) dy/(y+m) + ...
template <class C>
LogConnection<C> regularize(const LogConnection<C>& conn, const RegularizationIndex<C>& idx,
                            const CriticalData<C>& cd) {
  using R = real_t<C>;
  check_regularization_index(idx, cd);
  if (conn.irregular.degree() != 1 || abs_of(conn.irregular.coeff[1] - C(1)) != R(0))
    throw std::invalid_argument("regularize: connection must have irregular part F = y");
  LogConnection<C> out = conn;
  out.irregular = Polynomial<C>::zero();
  Mat<C> r = Mat<C>::Identity(out.rank, out.rank) * C(R(idx.m + 1));
  out.points.push_back({C(R(-idx.m)), r});
  return out;
}

// Admissibility report per singular point: positivity of eigenvalue real
// parts, integer differences, and smallness (no eigenvalue a non-positive
// integer).
template <class C>
struct AdmissibilityEntry {
  C location;
  std::vector<C> eigenvalues;
  bool positive = true;
  bool integer_difference = false;
  bool small = true;
};

template <class C>
struct AdmissibilityReport {
  std::vector<AdmissibilityEntry<C>> entries;
  AdmissibilityEntry<C> infinity;
  bool passes = true;
};

template <class C>
AdmissibilityReport<C> admissibility(const LogConnection<C>& conn) {
  using R = real_t<C>;
  using std::fabs;
  using std::round;
  AdmissibilityReport<C> rep;
  auto classify = [&](const Mat<C>& residue, const C& loc, bool at_infinity) {
    AdmissibilityEntry<C> e;
    e.location = loc;
    Mat<C> r = at_infinity ? Mat<C>(-residue) : residue;
    e.eigenvalues = residue_eigenvalues(r);
    for (const C& ev : e.eigenvalues) {
      if (!(ev.real() > R(0))) e.positive = false;
      const R re = ev.real(), im = ev.imag();
      const R nearest = round(to_double(re));
      if (fabs(to_double(im)) < 1e-12 && fabs(to_double(re) - to_double(nearest)) < 1e-12 &&
          to_double(nearest) <= 0)
        e.small = false;
    }
    for (size_t i = 0; i < e.eigenvalues.size(); ++i)
      for (size_t j = i + 1; j < e.eigenvalues.size(); ++j) {
        const C d = e.eigenvalues[i] - e.eigenvalues[j];
        const double re = to_double(d.real()), im = to_double(d.imag());
        if (fabs(im) < 1e-12 && fabs(re - std::round(re)) < 1e-12 && fabs(re) > 0.5)
          e.integer_difference = true;
      }
    return e;
  };
  for (const auto& p : conn.points) {
    rep.entries.push_back(classify(p.residue, p.location, false));
    const auto& e = rep.entries.back();
    if (!e.positive || e.integer_difference || !e.small) rep.passes = false;
  }
  rep.infinity = classify(conn.residue_at_infinity(), C(0), true);
  return rep;
}

}  // namespace irrper
