#pragma once

// Piecewise paths in the complex plane: straight segments joined by circular
// detours around singular points, plus continuous-argument tracking of
// log(z - w) along a path (the branch data every multivalued weight and tame
// symbol is resolved against).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "irrper/scalar.hpp"

namespace irrper {

template <class C>
struct Segment {
  enum class Kind { Line, Arc };
  using R = real_t<C>;

  Kind kind = Kind::Line;
  C a, b;          // line endpoints
  C center;        // arc data
  R radius{};
  R theta0{}, theta1{};  // arc traversed from theta0 to theta1 (signed)

  static Segment line(const C& a, const C& b) {
    Segment s;
    s.kind = Kind::Line;
    s.a = a;
    s.b = b;
    return s;
  }
  static Segment arc(const C& center, R radius, R theta0, R theta1) {
    Segment s;
    s.kind = Kind::Arc;
    s.center = center;
    s.radius = radius;
    s.theta0 = theta0;
    s.theta1 = theta1;
    s.a = s.point(R(0));
    s.b = s.point(R(1));
    return s;
  }

  C point(R t) const {
    using std::cos;
    using std::sin;
    if (kind == Kind::Line) return a + (b - a) * C(t);
    const R th = theta0 + (theta1 - theta0) * t;
    return center + C(radius) * C(cos(th), sin(th));
  }
  // d z / d t
  C derivative(R t) const {
    using std::cos;
    using std::sin;
    if (kind == Kind::Line) return b - a;
    const R th = theta0 + (theta1 - theta0) * t;
    return C(radius) * C(theta1 - theta0) * C(-sin(th), cos(th));
  }
  R length_estimate() const {
    using std::abs;
    if (kind == Kind::Line) return abs_of(b - a);
    return radius * abs(theta1 - theta0);
  }
};

template <class C>
struct EndpointClass {
  enum class Kind { Regular, Singular, Decay };
  Kind kind = Kind::Regular;
  C exponent{};   // Singular: local exponent (Re > 0 for integrability)
  C location{};   // Singular: the singular point
  C direction{};  // Decay: unit direction of the truncated ray
};

template <class C>
struct PathSpec {
  std::vector<Segment<C>> segments;
  EndpointClass<C> start_class, end_class;

  C start() const { return segments.front().a; }
  C end() const { return segments.back().b; }

  void append(const PathSpec& other) {
    segments.insert(segments.end(), other.segments.begin(), other.segments.end());
    end_class = other.end_class;
  }

  PathSpec reversed() const {
    PathSpec out;
    out.start_class = end_class;
    out.end_class = start_class;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
      Segment<C> s = *it;
      if (s.kind == Segment<C>::Kind::Line) {
        std::swap(s.a, s.b);
      } else {
        std::swap(s.theta0, s.theta1);
        std::swap(s.a, s.b);
      }
      out.segments.push_back(s);
    }
    return out;
  }
};

namespace detail {

template <class C>
real_t<C> min_pairwise_distance(std::span<const C> pts) {
  using R = real_t<C>;
  R best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, abs_of(pts[i] - pts[j]));
  return best;
}

}  // namespace detail

// Straight path from `from` to `to`, with counterclockwise circular detours
// of radius rho = detour_factor * (min pairwise distance of `singulars`)
// around every singular point closer than rho to the segment. Points equal
// to an endpoint are not detoured (they are the declared destination).
template <class C>
PathSpec<C> build_path(const C& from, const C& to, std::span<const C> singulars,
                       double detour_factor = 0.25) {
  using R = real_t<C>;
  using std::atan2;
  using std::sqrt;
  PathSpec<C> path;
  const C dir = to - from;
  const R len = abs_of(dir);
  if (len == R(0)) throw std::invalid_argument("build_path: zero-length path");

  R rho;
  if (singulars.size() >= 2) {
    rho = R(detour_factor) * detail::min_pairwise_distance(singulars);
  } else {
    rho = R(detour_factor) * len;
  }

  struct Detour {
    R t_in, t_out;
    C p;
  };
  std::vector<Detour> detours;
  for (const C& p : singulars) {
    if (abs_of(p - from) < rho / 1000 || abs_of(p - to) < rho / 1000) continue;
    // distance of p to the segment and intersection parameters
    const C rel = (p - from) / dir;  // segment is t in [0,1] in this frame
    const R u = rel.real(), v = rel.imag();
    const R dist2 = v * v * len * len;
    const R r_over = rho / len;
    if (u <= R(0) || u >= R(1)) continue;            // projection outside
    if (dist2 >= rho * rho) continue;                // far from segment
    const R half = sqrt(r_over * r_over - v * v);    // half-width in t
    const R t_in = u - half, t_out = u + half;
    if (t_out <= R(0) || t_in >= R(1)) continue;
    detours.push_back({std::max(t_in, R(0)), std::min(t_out, R(1)), p});
  }
  std::sort(detours.begin(), detours.end(), [](const Detour& a, const Detour& b) {
    return a.t_in < b.t_in;
  });

  C cursor = from;
  for (const Detour& d : detours) {
    const C zin = from + dir * C(d.t_in);
    const C zout = from + dir * C(d.t_out);
    if (abs_of(zin - cursor) > R(0)) path.segments.push_back(Segment<C>::line(cursor, zin));
    const C win = zin - d.p, wout = zout - d.p;
    // the detour passes on the +Im side of the point, so that for real
    // configurations the tracked branch ends principal on both sides;
    // angles are taken in (-pi/2, 3pi/2) and swept monotonically
    const R pi = scalar_traits<C>::pi();
    auto upper_angle = [&](const C& w) {
      R th = atan2(w.imag(), w.real());
      if (th <= -pi / 2) th += 2 * pi;
      return th;
    };
    const R th0 = upper_angle(win);
    const R th1 = upper_angle(wout);
    path.segments.push_back(Segment<C>::arc(d.p, abs_of(win), th0, th1));
    cursor = path.segments.back().b;
    // close the tiny gap from arc endpoint rounding
    if (abs_of(cursor - zout) > R(0)) {
      path.segments.push_back(Segment<C>::line(cursor, zout));
      cursor = zout;
    }
  }
  if (abs_of(cursor - to) > R(0)) path.segments.push_back(Segment<C>::line(cursor, to));
  return path;
}

template <class C>
PathSpec<C> circle_path(const C& center, real_t<C> radius, bool counterclockwise = true) {
  using R = real_t<C>;
  const R two_pi = 2 * scalar_traits<C>::pi();
  PathSpec<C> path;
  path.segments.push_back(
      Segment<C>::arc(center, radius, R(0), counterclockwise ? two_pi : -two_pi));
  return path;
}

// Continuous branch of log(z - w) along a path, queryable at any position.
// Starts from the principal branch at the path start. Checkpoints are spaced
// so that adjacent points subtend less than ~pi/2 at w.
template <class C>
class BranchTracker {
 public:
  using R = real_t<C>;

  BranchTracker(const PathSpec<C>& path, const C& w) : path_(&path), w_(w) {
    R carried = arg_of(path.start() - w);  // principal at start
    for (size_t s = 0; s < path.segments.size(); ++s) {
      Checkpoints cp;
      cp.t.push_back(R(0));
      cp.arg.push_back(carried);
      subdivide(s, R(0), R(1), carried, cp, 0);
      per_segment_.push_back(std::move(cp));
    }
    end_arg_ = carried;
  }

  // tracked log(z(seg, t) - w)
  C log_at(size_t seg, R t) const {
    using std::log;
    const C delta = path_->segments[seg].point(t) - w_;
    return C(log(abs_of(delta)), arg_at(seg, t, delta));
  }

  R arg_at(size_t seg, R t, const C& delta) const {
    const Checkpoints& cp = per_segment_[seg];
    auto it = std::upper_bound(cp.t.begin(), cp.t.end(), t);
    size_t idx = (it == cp.t.begin()) ? 0 : (it - cp.t.begin() - 1);
    const C ref = path_->segments[seg].point(cp.t[idx]) - w_;
    return cp.arg[idx] + arg_of(delta / ref);
  }

  C log_at_end() const {
    using std::log;
    return C(log(abs_of(path_->end() - w_)), end_arg_);
  }

  R total_winding() const {
    return end_arg_ - arg_of(path_->start() - w_);
  }

 private:
  struct Checkpoints {
    std::vector<R> t;
    std::vector<R> arg;
  };

  void subdivide(size_t seg, R t0, R t1, R& carried, Checkpoints& cp, int depth) {
    const Segment<C>& s = path_->segments[seg];
    const C z0 = s.point(t0) - w_;
    const C z1 = s.point(t1) - w_;
    if (abs_of(z0) == R(0) || abs_of(z1) == R(0)) {
      // only the path's own endpoints may sit on the branch point; an
      // interior hit means the path genuinely crosses it
      const bool at_start = abs_of(z0) == R(0) && seg == 0 && t0 == R(0);
      const bool at_end = abs_of(z1) == R(0) && seg + 1 == path_->segments.size() && t1 == R(1);
      if (!at_start && !at_end)
        throw std::invalid_argument("branch tracking: path passes through the point");
      // a path endpoint sitting exactly on the branch point: drill towards it
      // and stop recording checkpoints (queries only ever approach it)
      if (depth >= 48) return;
      const R tm = (t0 + t1) / 2;
      subdivide(seg, t0, tm, carried, cp, depth + 1);
      subdivide(seg, tm, t1, carried, cp, depth + 1);
      return;
    }
    using std::fabs;
    // closed or wide arcs have short chords; force angular refinement
    const bool wide_arc = s.kind == Segment<C>::Kind::Arc &&
                          fabs(s.theta1 - s.theta0) * (t1 - t0) > R(0.7);
    if (depth < 48 && (wide_arc || abs_of(z1 - z0) > abs_of(z0) * R(0.5))) {
      const R tm = (t0 + t1) / 2;
      subdivide(seg, t0, tm, carried, cp, depth + 1);
      subdivide(seg, tm, t1, carried, cp, depth + 1);
      return;
    }
    carried += arg_of(z1 / z0);
    cp.t.push_back(t1);
    cp.arg.push_back(carried);
  }

  const PathSpec<C>* path_;
  C w_;
  std::vector<Checkpoints> per_segment_;
  R end_arg_;
};

}  // namespace irrper
