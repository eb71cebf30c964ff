#pragma once

// Complex contour quadrature over PathSpec segments using a tanh-sinh node
// transform per segment. The double-exponential clustering absorbs algebraic
// endpoint singularities (x - a)^{s-1} with Re s > 0 without special-casing,
// and the node set is a fixed deterministic function of the settings.
// Integrands may be scalar or Eigen-vector/matrix valued (all components
// share one node sweep).

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "irrper/path.hpp"
#include "irrper/scalar.hpp"

namespace irrper {

template <class R>
struct QuadratureSettings {
  R rel_tol = R(1e-10);
  int max_level = 12;
  int min_level = 4;
  double tail_safety = 0.01;  // decay tails truncated below tail_safety * rel_tol

  static QuadratureSettings defaults() {
    QuadratureSettings s;
    if constexpr (std::numeric_limits<R>::digits10 > 20)
      s.rel_tol = R("1e-25");
    else
      s.rel_tol = R(1e-10);
    return s;
  }
};

template <class V, class R>
struct IntegResultG {
  V value{};
  R error{};
  long evaluations = 0;
  int level = 0;
  bool converged = false;
};

template <class C>
using IntegResult = IntegResultG<C, real_t<C>>;

inline double accum_norm(const cplx64& z) { return std::abs(z); }
inline real50 accum_norm(const cplx50& z) { return abs(z); }
template <class D>
auto accum_norm(const Eigen::MatrixBase<D>& m) {
  return m.norm();
}

// Evaluation point handed to integrands. xi runs over (0,1) along the
// segment; xic = 1 - xi is carried separately so that positions double-
// exponentially close to an endpoint keep full relative accuracy.
template <class C>
struct NodePoint {
  C z;
  const Segment<C>* segment = nullptr;
  size_t segment_index = 0;
  real_t<C> xi{}, xic{};

  // z - w, computed against the segment parametrization when w is an
  // endpoint of a line segment (exact match), stable arbitrarily close in.
  C delta_to(const C& w) const {
    if (segment->kind == Segment<C>::Kind::Line) {
      if (w == segment->a) return (segment->b - segment->a) * C(xi);
      if (w == segment->b) return -(segment->b - segment->a) * C(xic);
    }
    return z - w;
  }
};

namespace detail {

template <class T, class = void>
struct plain_value {
  using type = T;
};
template <class T>
struct plain_value<T, std::void_t<typename T::PlainObject>> {
  using type = typename T::PlainObject;
};

// One tanh-sinh pass over a single segment. The integrand callback returns
// f(z) (scalar or Eigen value); the weight dz/dxi is applied here.
template <class C, class F>
auto tanh_sinh_segment(F&& f, const PathSpec<C>& path, size_t seg_index,
                       const QuadratureSettings<real_t<C>>& settings) {
  using R = real_t<C>;
  using std::cosh;
  using std::exp;
  using std::fabs;
  using std::sinh;
  using Raw = std::decay_t<decltype(f(std::declval<const NodePoint<C>&>()))>;
  using V = typename plain_value<Raw>::type;

  const Segment<C>& seg = path.segments[seg_index];
  const R pi = scalar_traits<C>::pi();
  const R eps = scalar_traits<C>::epsilon();

  IntegResultG<V, R> res;

  auto eval_at_u = [&](R u) -> V {
    // xi(u) = 1/(1 + e^{-pi sinh u}), weight dxi/du = (pi/2) cosh(u) * q
    // with q = e^{-pi sinh|u|}/(1+e^{-pi sinh|u|})^2 evaluated stably.
    const R su = sinh(u);
    const R e = exp(-pi * fabs(su));
    const R denom = 1 + e;
    const R near_val = e / denom;  // distance to the nearer endpoint
    const R far_val = 1 / denom;   // distance to the farther endpoint
    NodePoint<C> pt;
    pt.segment = &seg;
    pt.segment_index = seg_index;
    if (u >= R(0)) {
      pt.xi = far_val;
      pt.xic = near_val;
    } else {
      pt.xi = near_val;
      pt.xic = far_val;
    }
    pt.z = (seg.kind == Segment<C>::Kind::Line)
               ? seg.a + (seg.b - seg.a) * C(pt.xi)
               : seg.point(pt.xi);
    const C dz = seg.derivative(pt.xi);
    const R w = pi * cosh(u) * near_val / denom;
    return f(pt) * (dz * C(w));
  };

  using std::pow;
  const R endpoint_floor = pow(std::numeric_limits<R>::min(), R(0.8));

  const R h0 = R(1);
  V sum = eval_at_u(R(0));
  ++res.evaluations;
  R scale = accum_norm(sum);  // running magnitude scale for truncation

  // Outward sweep at step h, adding only nodes not present at coarser levels.
  auto sweep = [&](R h, bool odd_only) {
    V acc = V(sum * C(0));
    for (int sgn : {1, -1}) {
      int consecutive_small = 0;
      for (int k = 1; k < 100000; ++k) {
        if (odd_only && k % 2 == 0) continue;
        const R u = sgn * k * h;
        // Stop before the endpoint complement gets so small that integrand
        // factors like 1/(z - endpoint) overflow (integrands may be singular
        // there); the skipped double-exponential tail is negligible.
        if (pi * sinh(fabs(u)) > R(1400)) break;
        if (exp(-pi * sinh(fabs(u))) < endpoint_floor) break;
        const V term = eval_at_u(u);
        ++res.evaluations;
        acc += term;
        const R mag = accum_norm(term);
        if (mag < eps * eps * (scale + accum_norm(acc))) {
          if (++consecutive_small >= 3) break;
        } else {
          consecutive_small = 0;
        }
      }
    }
    return acc;
  };

  sum += sweep(h0, false);
  V integral = V(sum * C(h0));
  R err = accum_norm(integral);
  R h = h0;
  V prev = integral;
  for (int level = 1; level <= settings.max_level; ++level) {
    h /= 2;
    sum += sweep(h, true);
    integral = V(sum * C(h));
    scale = accum_norm(integral);
    err = accum_norm(V(integral - prev));
    prev = integral;
    res.level = level;
    if (level >= settings.min_level &&
        err <= settings.rel_tol * (scale + R(1e-300))) {
      res.converged = true;
      break;
    }
  }
  res.value = integral;
  res.error = err + eps * scale * 4;
  return res;
}

}  // namespace detail

// Integral of f(z) dz over the whole path.
template <class C, class F>
auto integrate_path(F&& f, const PathSpec<C>& path,
                    const QuadratureSettings<real_t<C>>& settings) {
  auto total = detail::tanh_sinh_segment(f, path, 0, settings);
  for (size_t s = 1; s < path.segments.size(); ++s) {
    auto part = detail::tanh_sinh_segment(f, path, s, settings);
    total.value += part.value;
    total.error += part.error;
    total.evaluations += part.evaluations;
    total.level = std::max(total.level, part.level);
    total.converged = total.converged && part.converged;
  }
  return total;
}

// Convenience: integrate a plain function of z over the straight segment
// [a, b].
template <class C, class F>
auto integrate_segment(F&& f, const C& a, const C& b,
                       const QuadratureSettings<real_t<C>>& settings) {
  PathSpec<C> path;
  path.segments.push_back(Segment<C>::line(a, b));
  return integrate_path([&](const NodePoint<C>& pt) { return f(pt); }, path, settings);
}

// Truncation length T for a decay ray y = y0 + T*dir (Re dir < 0) such that
// |e^y| * bound * (1+T)^deg falls below tol * tail_safety; the certified
// remainder estimate is returned alongside.
template <class C>
struct DecayTruncation {
  real_t<C> length;
  real_t<C> tail_bound;
};

template <class C>
DecayTruncation<C> decay_truncation(const C& y0, const C& dir, int poly_degree,
                                    real_t<C> coeff_bound, real_t<C> tol) {
  using R = real_t<C>;
  using std::exp;
  using std::log;
  using std::pow;
  const R rate = -dir.real() / abs_of(dir);
  if (rate <= R(0)) throw std::invalid_argument("decay_truncation: direction does not decay");
  R T(1);
  const R base = exp(y0.real());
  auto tail_at = [&](R t) {
    // integral envelope bound: int_t^inf c e^{-r u} (1+u)^d du
    return coeff_bound * base * exp(-rate * t) * pow(R(1) + t, R(poly_degree)) *
           (R(1) + R(poly_degree) / rate) / rate;
  };
  for (int it = 0; it < 200; ++it) {
    const R tail = tail_at(T);
    if (tail < tol) break;
    T = T + (log(tail / tol) + 1) / rate;
  }
  return {T, tail_at(T)};
}

}  // namespace irrper
