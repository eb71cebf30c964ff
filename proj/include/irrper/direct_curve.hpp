#pragma once

// Period matrix computed directly on the Legendre curve y^2 = x(x-1)(x-l):
// two compact loops in the x-plane (y tracked continuously across the double
// cover) and two differences of rapid-decay chains reaching y -> -infty
// through the sectors where e^y dies. Forms {dx/y, x dx/y, dx, x dx} are
// paired against the flat weight e^y; exactness (Stokes) residuals for a
// basis of potentials come along in the same node sweep.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "irrper/curve.hpp"
#include "irrper/path.hpp"
#include "irrper/period_engine.hpp"
#include "irrper/quadrature.hpp"
#include "irrper/scalar.hpp"

namespace irrper {

// Continuous branch of y = sqrt(f(x)) along an x-plane path.
template <class C>
class SqrtBranch {
 public:
  using R = real_t<C>;

  SqrtBranch(const PathSpec<C>& path, const C& lambda) : path_(&path), lambda_(lambda) {
    C carried = sqrt_of(legendre_f(lambda, path.start()));
    for (size_t s = 0; s < path.segments.size(); ++s) {
      Checkpoints cp;
      cp.t.push_back(R(0));
      cp.y.push_back(carried);
      subdivide(s, R(0), R(1), carried, cp, 0);
      per_segment_.push_back(std::move(cp));
    }
  }

  C at(size_t seg, R t, const C& x) const {
    const C s = sqrt_of(legendre_f(lambda_, x));
    const Checkpoints& cp = per_segment_[seg];
    auto it = std::upper_bound(cp.t.begin(), cp.t.end(), t);
    size_t idx = (it == cp.t.begin()) ? 0 : (it - cp.t.begin() - 1);
    const C ref = cp.y[idx];
    return (abs_of(s - ref) <= abs_of(s + ref)) ? s : -s;
  }

 private:
  struct Checkpoints {
    std::vector<R> t;
    std::vector<C> y;
  };

  void subdivide(size_t seg, R t0, R t1, C& carried, Checkpoints& cp, int depth) {
    using std::fabs;
    const Segment<C>& s = path_->segments[seg];
    const C y1_raw = sqrt_of(legendre_f(lambda_, s.point(t1)));
    const C y1 = (abs_of(y1_raw - carried) <= abs_of(y1_raw + carried)) ? y1_raw : -y1_raw;
    if (abs_of(y1) == R(0)) throw std::domain_error("SqrtBranch: path hits a branch point");
    // closed loops return to the starting value; force angular refinement
    const bool wide_arc = s.kind == Segment<C>::Kind::Arc &&
                          fabs(s.theta1 - s.theta0) * (t1 - t0) > R(0.5);
    if (depth < 40 && (wide_arc || abs_of(y1 - carried) > R(0.25) * abs_of(carried))) {
      const R tm = (t0 + t1) / 2;
      subdivide(seg, t0, tm, carried, cp, depth + 1);
      subdivide(seg, tm, t1, carried, cp, depth + 1);
      return;
    }
    carried = y1;
    cp.t.push_back(t1);
    cp.y.push_back(carried);
  }

  const PathSpec<C>* path_;
  C lambda_;
  std::vector<Checkpoints> per_segment_;
};

// Root x(t) of f(x) = y(t)^2 continued along a t-plane path (y = -t^{-3}),
// Newton-polished to working precision at every query.
template <class C>
class FiberRoot {
 public:
  using R = real_t<C>;

  FiberRoot(const PathSpec<C>& path, const C& lambda, const C& x_start)
      : path_(&path), lambda_(lambda) {
    C carried = polish(path.start(), x_start);
    for (size_t s = 0; s < path.segments.size(); ++s) {
      Checkpoints cp;
      cp.t.push_back(R(0));
      cp.x.push_back(carried);
      subdivide(s, R(0), R(1), carried, cp, 0);
      per_segment_.push_back(std::move(cp));
    }
  }

  C at(size_t seg, R t) const {
    const Checkpoints& cp = per_segment_[seg];
    auto it = std::upper_bound(cp.t.begin(), cp.t.end(), t);
    size_t idx = (it == cp.t.begin()) ? 0 : (it - cp.t.begin() - 1);
    return polish(path_->segments[seg].point(t), cp.x[idx]);
  }

  static C y_of_t(const C& t) { return C(-1) / (t * t * t); }

 private:
  struct Checkpoints {
    std::vector<R> t;
    std::vector<C> x;
  };

  C polish(const C& t, C x) const {
    const C y = y_of_t(t);
    const C y2 = y * y;
    const R eps = scalar_traits<C>::epsilon();
    for (int it = 0; it < 60; ++it) {
      const C g = legendre_f(lambda_, x) - y2;
      const C gp = legendre_fprime(lambda_, x);
      if (abs_of(gp) == R(0)) throw std::domain_error("FiberRoot: degenerate fiber");
      const C dx = g / gp;
      x -= dx;
      if (abs_of(dx) <= eps * 8 * (R(1) + abs_of(x))) return x;
    }
    throw std::domain_error("FiberRoot: Newton continuation failed");
  }

  void subdivide(size_t seg, R t0, R t1, C& carried, Checkpoints& cp, int depth) {
    using std::fabs;
    const Segment<C>& s = path_->segments[seg];
    const C x1 = polish(s.point(t1), carried);
    const bool wide_arc = s.kind == Segment<C>::Kind::Arc &&
                          fabs(s.theta1 - s.theta0) * (t1 - t0) > R(0.5);
    if (depth < 40 &&
        (wide_arc || abs_of(x1 - carried) > R(0.15) * (abs_of(carried) + abs_of(x1)) / 2)) {
      const R tm = (t0 + t1) / 2;
      subdivide(seg, t0, tm, carried, cp, depth + 1);
      subdivide(seg, tm, t1, carried, cp, depth + 1);
      return;
    }
    carried = x1;
    cp.t.push_back(t1);
    cp.x.push_back(carried);
  }

  const PathSpec<C>* path_;
  C lambda_;
  std::vector<Checkpoints> per_segment_;
};

struct DirectCurveOptions {
  double loop_margin = 0.35;  // loop radius = half-gap + margin * (room)
  double base_radius = 0.6;   // |t| of the chain base point and arcs
};

template <class C>
struct DirectCurveResult {
  Mat<C> periods;             // rows: cycles, columns: forms
  C determinant{};
  real_t<C> det_error{};
  Mat<C> stokes;              // rows: cycles, columns: 8 potentials
  real_t<C> stokes_max{};     // max |stokes| / scale
  real_t<C> scale{};          // max |period entry|
  C closed_form{};            // reference value in lambda
  C ratio{};                  // determinant / closed_form
  real_t<C> tail_bound{};     // certified decay-ray truncation remainder
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

// 12 rows per node: 4 period forms then 8 exactness residuals for the
// potentials x^a y^b, (a,b) in {0..3} x {0,1}.
template <class C>
Eigen::Matrix<C, 12, 1> direct_rows(const C& x, const C& y, const C& xp, const C& yp) {
  Eigen::Matrix<C, 12, 1> out;
  const C ey = exp_of(y);
  out(0) = ey * xp / y;
  out(1) = ey * x * xp / y;
  out(2) = ey * xp;
  out(3) = ey * x * xp;
  const C xpow[4] = {C(1), x, x * x, x * x * x};
  const C ypow[2] = {C(1), y};
  int row = 4;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 2; ++b) {
      // d(x^a y^b) + x^a y^b dy, evaluated against the parametrization
      C v = xpow[a] * ypow[b] * yp;
      if (a > 0) v += C(a) * xpow[a - 1] * ypow[b] * xp;
      if (b > 0) v += xpow[a] * yp;  // b == 1 only
      out(row++) = ey * v;
    }
  return out;
}

}  // namespace detail

template <class C>
DirectCurveResult<C> direct_curve_period(const CriticalData<C>& cd,
                                         const QuadratureSettings<real_t<C>>& qs,
                                         DirectCurveOptions opts = {}) {
  using R = real_t<C>;
  using Col = Eigen::Matrix<C, 12, 1>;
  const C lambda = cd.lambda;
  const R pi = scalar_traits<C>::pi();

  DirectCurveResult<C> res;
  res.periods = Mat<C>::Zero(4, 4);
  res.stokes = Mat<C>::Zero(4, 8);
  Mat<C> errors = Mat<C>::Zero(4, 4);

  // --- compact loops in the x-plane -----------------------------------
  const C branch_pts[3] = {C(0), C(1), lambda};
  auto make_loop = [&](int i, int j, int k) {
    const C center = (branch_pts[i] + branch_pts[j]) / C(2);
    const R half_gap = abs_of(branch_pts[j] - branch_pts[i]) / 2;
    const R room = abs_of(branch_pts[k] - center);
    if (!(room > half_gap))
      throw std::domain_error("direct_curve_period: branch points not separable by a circle");
    const R radius = half_gap + R(opts.loop_margin) * (room - half_gap);
    return circle_path(center, radius);
  };
  const PathSpec<C> loops[2] = {make_loop(0, 1, 2), make_loop(1, 2, 0)};

  for (int cyc = 0; cyc < 2; ++cyc) {
    SqrtBranch<C> ybr(loops[cyc], lambda);
    auto f = [&](const NodePoint<C>& node) -> Col {
      const C x = node.z;
      const C y = ybr.at(node.segment_index, node.xi, x);
      // in the x parametrization: dx weight is applied by the framework,
      // dy = f'(x)/(2y) dx
      const C yp = legendre_fprime(lambda, x) / (C(2) * y);
      return detail::direct_rows(x, y, C(1), yp);
    };
    auto r = integrate_path(f, loops[cyc], qs);
    for (int col = 0; col < 4; ++col) {
      res.periods(cyc, col) = r.value(col);
      errors(cyc, col) = C(r.error);
    }
    for (int col = 0; col < 8; ++col) res.stokes(cyc, col) = r.value(4 + col);
    res.evaluations += r.evaluations;
    res.converged = res.converged && r.converged;
  }

  // --- rapid-decay chains in the t-plane (y = -t^{-3}) ----------------
  const R rp = R(opts.base_radius);
  if (!(rp > R(0)) || rp * rp * rp * std::max(abs_of(cd.s1), abs_of(cd.s2)) > R(0.8))
    throw std::domain_error("direct_curve_period: base radius too large for root tracking");
  const C t_base = C(rp) * exp_of(C(R(0), pi / 3));
  const R y_base_mag = 1 / (rp * rp * rp);

  auto trunc = decay_truncation(C(-y_base_mag), C(-1), 3, R(50), qs.rel_tol * R(qs.tail_safety));
  res.tail_bound = trunc.tail_bound;
  using std::pow;
  const R r_min = pow(y_base_mag + trunc.length, -R(1) / 3);

  // base lift: the fiber root asymptotic to t^{-2}
  const C y_base = FiberRoot<C>::y_of_t(t_base);
  C x_base;
  {
    const C guess = C(1) / (t_base * t_base) + (lambda + C(1)) / C(3);
    auto roots = detail::fiber_roots(lambda, y_base);
    x_base = roots[0];
    for (const C& r0 : roots)
      if (abs_of(r0 - guess) < abs_of(x_base - guess)) x_base = r0;
  }

  // chain i: arc |t| = rp from arg pi/3 to the sector center 2(i-1)pi/3,
  // then a ray inward to r_min (y -> -infinity along the real axis).
  auto make_chain = [&](int i) {
    const R th0 = pi / 3;
    const R th1 = 2 * R(i - 1) * pi / 3;
    PathSpec<C> path;
    if (th0 != th1) path.segments.push_back(Segment<C>::arc(C(0), rp, th0, th1));
    const C outer = C(rp) * exp_of(C(R(0), th1));
    const C inner = C(r_min) * exp_of(C(R(0), th1));
    path.segments.push_back(Segment<C>::line(outer, inner));
    return path;
  };

  std::vector<Col> chain_values;
  for (int i = 1; i <= 3; ++i) {
    PathSpec<C> chain = make_chain(i);
    FiberRoot<C> xroot(chain, lambda, x_base);
    auto f = [&](const NodePoint<C>& node) -> Col {
      const C t = node.z;
      const C y = FiberRoot<C>::y_of_t(t);
      const C x = xroot.at(node.segment_index, node.xi);
      const C yp = C(3) / (t * t * t * t);
      const C xp = C(2) * y * yp / legendre_fprime(lambda, x);
      return detail::direct_rows(x, y, xp, yp);
    };
    auto r = integrate_path(f, chain, qs);
    chain_values.push_back(r.value);
    res.evaluations += r.evaluations;
    res.converged = res.converged && r.converged;
    for (int cyc = 2; cyc < 4; ++cyc)
      for (int col = 0; col < 4; ++col) errors(cyc, col) += C(r.error + res.tail_bound);
  }
  for (int d = 0; d < 2; ++d) {
    const Col diff = chain_values[d + 1] - chain_values[d];
    for (int col = 0; col < 4; ++col) res.periods(2 + d, col) = diff(col);
    for (int col = 0; col < 8; ++col) res.stokes(2 + d, col) = diff(4 + col);
  }

  res.scale = res.periods.cwiseAbs().maxCoeff();
  res.stokes_max = res.stokes.cwiseAbs().maxCoeff() / res.scale;

  PeriodMatrix<C> pm;
  pm.entries = res.periods;
  detail::finish_period_matrix(pm, errors);
  res.determinant = pm.determinant;
  res.det_error = pm.det_error;

  // reference value in lambda alone (principal branch of the half power)
  const C d2 = cd.disc();
  const C lam2 = lambda * lambda;
  const C om2 = (lambda - C(1)) * (lambda - C(1));
  res.closed_form = C(-pi * pi) * exp_of(C(12) * log_of(C(3)) - C(6) * log_of(C(2))) * lam2 *
                    om2 * exp_of(C(R(-19) / 2) * log_of(d2));
  res.ratio = res.determinant / res.closed_form;
  return res;
}

}  // namespace irrper
