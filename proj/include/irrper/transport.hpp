#pragma once

// Flat-section continuation. Dual flat sections of a connection d + A(y)dy
// satisfy s*' = A(y)^T s* along a path; the fundamental transport matrix
// T(u) with T(0) = I is integrated with an adaptive embedded Runge-Kutta
// pair (Dormand-Prince 5(4)) on the path parameter and cached at every
// queried position, so non-monotone node sweeps only ever integrate short
// gaps. A fiberwise branch-tracking oracle provides an independent exact
// transport for the direct-image connection.

#include <Eigen/Dense>
#include <map>
#include <stdexcept>

#include "irrper/connection.hpp"
#include "irrper/curve.hpp"
#include "irrper/path.hpp"
#include "irrper/scalar.hpp"

namespace irrper {

template <class C>
struct TransportSettings {
  real_t<C> rel_tol = real_t<C>(1e-12);
  real_t<C> abs_tol = real_t<C>(1e-14);
  double max_steps = 2e6;

  static TransportSettings defaults() {
    TransportSettings s;
    if constexpr (std::numeric_limits<real_t<C>>::digits10 > 20) {
      s.rel_tol = real_t<C>("1e-28");
      s.abs_tol = real_t<C>("1e-30");
    }
    return s;
  }
};

namespace detail {

// One adaptive RK45 integration of M' = A^T(z(t)) M z'(t) over [t0, t1] of a
// single segment (t0 > t1 allowed).
template <class C>
void rk_transport_segment(const LogConnection<C>& conn, const Segment<C>& seg, real_t<C> t0,
                          real_t<C> t1, Mat<C>& m, const TransportSettings<C>& settings) {
  using R = real_t<C>;
  using std::fabs;
  using std::max;
  using std::min;
  using std::pow;
  if (t0 == t1) return;

  auto rhs = [&](R t, const Mat<C>& state) -> Mat<C> {
    const C z = seg.point(t);
    return conn.coefficient(z).transpose() * state * seg.derivative(t);
  };
  auto nearest_pole = [&](R t) -> R {
    const C z = seg.point(t);
    R best = std::numeric_limits<double>::infinity();
    for (const auto& p : conn.points) best = min(best, abs_of(z - p.location));
    return best;
  };

  // Dormand-Prince coefficients, as exact ratios in the working precision
  // (double-rounded coefficients break the order conditions at ~1e-17 and
  // stall the controller at tight extended-precision tolerances).
  auto q = [](long n, long d) { return R(n) / R(d); };
  const R a21 = q(1, 5);
  const R a31 = q(3, 40), a32 = q(9, 40);
  const R a41 = q(44, 45), a42 = q(-56, 15), a43 = q(32, 9);
  const R a51 = q(19372, 6561), a52 = q(-25360, 2187), a53 = q(64448, 6561),
          a54 = q(-212, 729);
  const R a61 = q(9017, 3168), a62 = q(-355, 33), a63 = q(46732, 5247), a64 = q(49, 176),
          a65 = q(-5103, 18656);
  const R b1 = q(35, 384), b3 = q(500, 1113), b4 = q(125, 192), b5 = q(-2187, 6784),
          b6 = q(11, 84);
  const R e1 = q(5179, 57600), e3 = q(7571, 16695), e4 = q(393, 640),
          e5 = q(-92097, 339200), e6 = q(187, 2100), e7 = q(1, 40);
  const R c2 = q(1, 5), c3 = q(3, 10), c4 = q(4, 5), c5 = q(8, 9);

  const R dir = (t1 > t0) ? R(1) : R(-1);
  const R span = fabs(t1 - t0);
  const R seg_speed = seg.length_estimate() + R(1e-30);
  R t = t0;
  R h = dir * min(span, R(0.05));
  long steps = 0;
  while (dir * (t1 - t) > R(0)) {
    if (++steps > (long)settings.max_steps)
      throw std::runtime_error("transport: step limit exceeded");
    // keep steps short relative to the distance to the nearest pole
    const R pole_cap = R(0.4) * nearest_pole(t) / seg_speed;
    if (fabs(h) > pole_cap && pole_cap > R(0)) h = dir * pole_cap;
    if (dir * (t + h - t1) > R(0)) h = t1 - t;

    const Mat<C> k1 = rhs(t, m);
    const Mat<C> k2 = rhs(t + R(c2) * h, Mat<C>(m + C(h) * (C(a21) * k1)));
    const Mat<C> k3 = rhs(t + R(c3) * h, Mat<C>(m + C(h) * (C(a31) * k1 + C(a32) * k2)));
    const Mat<C> k4 =
        rhs(t + R(c4) * h, Mat<C>(m + C(h) * (C(a41) * k1 + C(a42) * k2 + C(a43) * k3)));
    const Mat<C> k5 = rhs(
        t + R(c5) * h,
        Mat<C>(m + C(h) * (C(a51) * k1 + C(a52) * k2 + C(a53) * k3 + C(a54) * k4)));
    const Mat<C> k6 =
        rhs(t + h, Mat<C>(m + C(h) * (C(a61) * k1 + C(a62) * k2 + C(a63) * k3 +
                                      C(a64) * k4 + C(a65) * k5)));
    const Mat<C> m5 =
        m + C(h) * (C(b1) * k1 + C(b3) * k3 + C(b4) * k4 + C(b5) * k5 + C(b6) * k6);
    const Mat<C> k7 = rhs(t + h, m5);
    const Mat<C> m4 = m + C(h) * (C(e1) * k1 + C(e3) * k3 + C(e4) * k4 + C(e5) * k5 +
                                  C(e6) * k6 + C(e7) * k7);
    const R err = (m5 - m4).norm();
    const R tol = settings.abs_tol + settings.rel_tol * m5.norm();
    if (err <= tol || fabs(h) < R(1e-14) * span) {
      t += h;
      m = m5;
    }
    const R ratio = (err > R(0)) ? pow(tol / err, R(0.2)) : R(5);
    h *= min(R(5), max(R(0.2), R(0.9) * ratio));
    if (fabs(h) < R(1e-16) * span) h = dir * R(1e-16) * span;
  }
}

}  // namespace detail

// Transport of the dual fundamental matrix along a path, with memoized
// checkpoints keyed by (segment, parameter) so repeated non-monotone queries
// (tanh-sinh node order) integrate only the gap from the nearest cached
// position.
template <class C>
class TransportCache {
 public:
  using R = real_t<C>;

  TransportCache(const LogConnection<C>& conn, const PathSpec<C>& path,
                 TransportSettings<C> settings = TransportSettings<C>::defaults())
      : conn_(&conn), path_(&path), settings_(settings) {
    cache_[0.0] = Mat<C>::Identity(conn.rank, conn.rank);
  }

  // Fundamental matrix T at global position u = segment_index + t in-segment,
  // with T = I at the path start.
  const Mat<C>& at(size_t seg, R t) {
    const double u = static_cast<double>(seg) + to_double(t);
    auto it = cache_.lower_bound(u);
    if (it != cache_.end() && it->first == u) return it->second;
    // nearest cached position before u: integrating forward only keeps the
    // transport stable towards singular path ends (backing out of a pole
    // amplifies the decayed solution by the growing local exponents)
    auto pick = std::prev(it);
    Mat<C> m = pick->second;
    advance(m, pick->first, u);
    auto [ins, ok] = cache_.emplace(u, std::move(m));
    (void)ok;
    return ins->second;
  }

  const Mat<C>& at_end() {
    return at(path_->segments.size() - 1, R(1));
  }

 private:
  void advance(Mat<C>& m, double u_from, double u_to) const {
    // walk segment by segment between the two global positions
    const int nseg = static_cast<int>(path_->segments.size());
    double u = u_from;
    while (u != u_to) {
      int seg;
      double target;
      if (u_to > u) {
        seg = std::min(static_cast<int>(std::floor(u)), nseg - 1);
        target = std::min(u_to, double(seg + 1));
      } else {
        seg = std::min(static_cast<int>(std::floor(u)), nseg - 1);
        if (double(seg) == u && seg > 0) seg -= 1;  // on a boundary, step back
        target = std::max(u_to, double(seg));
      }
      detail::rk_transport_segment(*conn_, path_->segments[seg], R(u - seg), R(target - seg),
                                   m, settings_);
      u = target;
    }
  }

  const LogConnection<C>* conn_;
  const PathSpec<C>* path_;
  TransportSettings<C> settings_;
  std::map<double, Mat<C>> cache_;
};

// One-shot transport of an initial dual vector/matrix along a whole path.
template <class C>
Mat<C> continue_solution(const LogConnection<C>& conn, const PathSpec<C>& path,
                         const Mat<std::type_identity_t<C>>& initial,
                         TransportSettings<C> settings = TransportSettings<C>::defaults()) {
  TransportCache<C> cache(conn, path, settings);
  return cache.at_end() * initial;
}

// Transport matrix around a counterclockwise circle; eigenvalues must be
// {exp(2 pi i mu)} over the residue eigenvalues mu of the enclosed point.
template <class C>
Mat<C> loop_monodromy(const LogConnection<C>& conn, const C& center, real_t<C> radius,
                      TransportSettings<C> settings = TransportSettings<C>::defaults()) {
  int inside = 0;
  for (const auto& p : conn.points)
    if (abs_of(p.location - center) < radius) ++inside;
  if (inside > 1) throw std::invalid_argument("loop_monodromy: several singularities in disk");
  PathSpec<C> loop = circle_path(center, radius);
  return continue_solution(conn, loop, Mat<C>::Identity(conn.rank, conn.rank), settings);
}

// ---------------------------------------------------------------------------
// Fiberwise oracle for the direct-image rank-2 connection: the evaluation
// functionals at the three roots x_k(y) of f(x) = y^2 are dual flat
// sections; in the frame (v1, v2) their coordinate vectors are
// (v1(x_k), v2(x_k)). Continuing the roots along a y-path and re-reading the
// covectors yields the exact dual transport, independent of the ODE.
// ---------------------------------------------------------------------------

template <class C>
class FiberTracker {
 public:
  using R = real_t<C>;

  FiberTracker(const C& lambda, const PathSpec<C>& path) : lambda_(lambda), path_(&path) {
    roots_ = detail::fiber_roots(lambda, path.start());
    pos_seg_ = 0;
    pos_t_ = R(0);
  }

  // Continue the three roots to (seg, t); steps are subdivided until every
  // root moves by less than a fraction of the minimal root separation.
  const std::array<C, 3>& roots_at(size_t seg, R t) {
    walk(seg, t);
    return roots_;
  }

  // Dual frame matrix Phi(y) with columns (v1(x_k), v2(x_k)) for k = 0, 1.
  Eigen::Matrix<C, 2, 2> dual_frame(size_t seg, R t) {
    walk(seg, t);
    Eigen::Matrix<C, 2, 2> phi;
    for (int k = 0; k < 2; ++k) {
      phi(0, k) = detail::frame_v1(lambda_, roots_[k]);
      phi(1, k) = detail::frame_v2(lambda_, roots_[k]);
    }
    return phi;
  }

 private:
  void walk(size_t seg, R t) {
    // move forward or backward along the path in small parameter steps
    double u = double(pos_seg_) + to_double(pos_t_);
    const double target = double(seg) + to_double(t);
    const double dir = (target >= u) ? 1.0 : -1.0;
    while (u != target) {
      double step = std::min(0.02, std::fabs(target - u));
      double next = u + dir * step;
      if (!advance_to(next)) {
        // root nearly collided: subdivide
        step /= 8;
        next = u + dir * step;
        if (!advance_to(next))
          throw std::runtime_error("FiberTracker: root collision along path");
      }
      u = next;
    }
    pos_seg_ = std::min(static_cast<size_t>(u), path_->segments.size() - 1);
    pos_t_ = R(u - double(pos_seg_));
  }

  bool advance_to(double u) {
    const size_t seg = std::min(static_cast<size_t>(u), path_->segments.size() - 1);
    const R t = R(u - double(seg));
    const C y = path_->segments[seg].point(t);
    std::array<C, 3> next = roots_;
    for (C& r : next) {
      for (int it = 0; it < 40; ++it) {
        const C f = legendre_f(lambda_, r) - y * y;
        const C fp = legendre_fprime(lambda_, r);
        if (abs_of(fp) == R(0)) return false;
        const C d = f / fp;
        r -= d;
        if (abs_of(d) < R(1e-30) + scalar_traits<C>::epsilon() * 100 * (R(1) + abs_of(r)))
          break;
      }
    }
    // reject if continuation lost injectivity (two roots converged)
    R sep = std::numeric_limits<double>::infinity();
    R moved(0);
    for (int i = 0; i < 3; ++i) {
      moved = std::max(moved, abs_of(next[i] - roots_[i]));
      for (int j = i + 1; j < 3; ++j) sep = std::min(sep, abs_of(next[i] - next[j]));
    }
    if (!(moved < R(0.45) * sep)) return false;
    roots_ = next;
    return true;
  }

  C lambda_;
  const PathSpec<C>* path_;
  std::array<C, 3> roots_;
  size_t pos_seg_;
  R pos_t_;
};

// Exact dual transport along a path for the direct-image connection,
// obtained from the fiber frame: T = Phi(end) * Phi(start)^{-1}.
template <class C>
Mat<C> fiber_oracle_transport(const C& lambda, const PathSpec<C>& path) {
  FiberTracker<C> tracker(lambda, path);
  Eigen::Matrix<C, 2, 2> phi0 = tracker.dual_frame(0, real_t<C>(0));
  Eigen::Matrix<C, 2, 2> phi1 =
      tracker.dual_frame(path.segments.size() - 1, real_t<C>(1));
  Mat<C> out(2, 2);
  out = phi1 * phi0.inverse();
  return out;
}

}  // namespace irrper
