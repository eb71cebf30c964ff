#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "irrper/path.hpp"
#include "irrper/scalar.hpp"

using namespace irrper;

TEST_CASE("segments and reversal") {
  auto line = Segment<cplx64>::line(cplx64(0.0), cplx64(2.0, 2.0));
  CHECK(std::abs(line.point(0.5) - cplx64(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(line.derivative(0.3) - cplx64(2.0, 2.0)) < 1e-15);

  auto arc = Segment<cplx64>::arc(cplx64(0.0), 1.0, 0.0, 3.141592653589793);
  CHECK(std::abs(arc.a - cplx64(1.0)) < 1e-15);
  CHECK(std::abs(arc.b - cplx64(-1.0)) < 1e-12);

  PathSpec<cplx64> p;
  p.segments = {line, Segment<cplx64>::line(line.b, cplx64(5.0))};
  auto r = p.reversed();
  CHECK(std::abs(r.start() - p.end()) < 1e-15);
  CHECK(std::abs(r.end() - p.start()) < 1e-15);
}

TEST_CASE("build_path detours keep clearance") {
  std::vector<cplx64> sing = {cplx64(0.5), cplx64(3.0), cplx64(-1.0, 0.01)};
  auto path = build_path<cplx64>(cplx64(-2.0), cplx64(1.0), sing);
  CHECK(std::abs(path.start() - cplx64(-2.0)) < 1e-15);
  CHECK(std::abs(path.end() - cplx64(1.0)) < 1e-15);
  // sample densely; the path never gets close to an interior singular point
  for (const auto& seg : path.segments)
    for (int k = 0; k <= 100; ++k) {
      const cplx64 z = seg.point(k / 100.0);
      CHECK(std::abs(z - cplx64(0.5)) > 0.05);
      CHECK(std::abs(z - cplx64(-1.0, 0.01)) > 0.05);
    }
  // continuity across segment joints
  for (size_t s = 0; s + 1 < path.segments.size(); ++s)
    CHECK(std::abs(path.segments[s].b - path.segments[s + 1].a) < 1e-12);
}

TEST_CASE("branch tracking: straight path stays principal") {
  auto path = build_path<cplx64>(cplx64(1.0), cplx64(5.0, 2.0), std::vector<cplx64>{});
  BranchTracker<cplx64> tr(path, cplx64(0.0, -3.0));
  const cplx64 got = tr.log_at_end();
  const cplx64 want = std::log(cplx64(5.0, 2.0) - cplx64(0.0, -3.0));
  CHECK(std::abs(got - want) < 1e-12);
  CHECK(std::abs(tr.total_winding()) < 1.0);
}

TEST_CASE("branch tracking: full circle winds by 2 pi") {
  const double pi = 3.141592653589793238462643383279502884;
  auto loop = circle_path(cplx64(0.3, 0.1), 1.0);
  BranchTracker<cplx64> tr(loop, cplx64(0.3, 0.1));
  CHECK(std::abs(tr.total_winding() - 2 * pi) < 1e-10);
  // a point outside the loop picks up no winding
  BranchTracker<cplx64> tr2(loop, cplx64(4.0));
  CHECK(std::abs(tr2.total_winding()) < 1e-10);
}

TEST_CASE("branch tracking: detour around a point on the segment") {
  // path 0 -> 4 with a singular point at 2: counterclockwise detour passes
  // above, so arg(z - 2) at the end is 0 and the tracked branch is principal
  std::vector<cplx64> sing = {cplx64(2.0), cplx64(9.0)};
  auto path = build_path<cplx64>(cplx64(0.0), cplx64(4.0), sing);
  CHECK(path.segments.size() >= 2);
  BranchTracker<cplx64> tr(path, cplx64(2.0));
  const cplx64 got = tr.log_at_end();
  CHECK(std::abs(got - std::log(cplx64(2.0))) < 1e-12);
}

TEST_CASE("branch tracking rejects a path through the point") {
  auto path = build_path<cplx64>(cplx64(-1.0), cplx64(1.0), std::vector<cplx64>{});
  CHECK_THROWS(BranchTracker<cplx64>(path, cplx64(0.0)));
}

TEST_CASE("extended precision tracking") {
  using C = cplx50;
  auto loop = circle_path(make_cplx<C>(0.0, 0.0), real50(1));
  BranchTracker<C> tr(loop, make_cplx<C>(0.1, 0.0));
  const auto two_pi = 2 * scalar_traits<C>::pi();
  CHECK(to_double(abs_of(C(tr.total_winding()) - C(two_pi))) < 1e-28);
}
