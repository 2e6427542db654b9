#include "doctest.h"

#include "eknot/curve.hpp"
#include "eknot/error.hpp"
#include "eknot/families.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace eknot;
using std::numbers::pi;

namespace {

Curve circle(double radius, std::size_t n, double phase = 0.0) {
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n) + phase;
    pts[i] = radius * Vec3(std::cos(a), std::sin(a), 0.0);
  }
  return make_polyline(std::move(pts));
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eknot::Error");
  return Errc::UsageError;
}

Curve random_loop(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = Vec3(std::cos(a), std::sin(a), 0.3 * std::sin(2 * a)) + 0.05 * Vec3(normal(rng), normal(rng), normal(rng));
  }
  return rescale_to_unit(resample_arclength(make_polyline(std::move(pts)), n));
}

double distance_to_trace(const Curve& c, const Vec3& p) {
  double best = INFINITY;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 d = c.edge(i);
    const double t = std::clamp((p - c[i]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (c[i] + t * d - p).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("make_polyline keeps the given vertices") {
  const Curve tri = make_polyline({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}});
  CHECK(tri.size() == 3);
  CHECK(tri.closed());
  CHECK(tri.length() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(code_of([] { make_polyline({{0, 0, 0}, {1, 0, 0}}); }) == Errc::TooFewPoints);
  CHECK(code_of([] { make_polyline({{0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 1, 0}}); }) == Errc::DegenerateEdge);
  CHECK(code_of([] { make_polyline({{0, 0, 0}, {1, 0, 0}, {0, 0, 0}}); }) == Errc::DegenerateEdge);
  CHECK(code_of([] { make_polyline({{0, 0, 0}, {1, 0, 0}, {0, NAN, 0}}); }) == Errc::DegenerateEdge);
}

TEST_CASE("cyclic access and tangents") {
  const Curve sq = make_polyline({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  CHECK(sq.at(-1) == sq[3]);
  CHECK(sq.at(5) == sq[1]);
  CHECK(sq.edge(3) == Vec3(0, -1, 0));
  const auto t = sq.tangents();
  CHECK((t[0] - Vec3(1, -1, 0).normalized()).norm() < 1e-15);
}

TEST_CASE("resample_arclength of the unit square hits the midpoints") {
  const Curve sq = make_polyline({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const Curve r = resample_arclength(sq, 8);
  REQUIRE(r.size() == 8);
  for (double e : r.edge_lengths()) CHECK(e == doctest::Approx(0.5).epsilon(1e-14));
  CHECK((r[1] - Vec3(0.5, 0, 0)).norm() < 1e-14);
  CHECK((r[4] - Vec3(1, 1, 0)).norm() < 1e-14);
  CHECK(code_of([&] { resample_arclength(sq, 7); }) == Errc::TooFewPoints);
}

TEST_CASE("resampled edges are equal and the trace is kept") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::normal_distribution<double> normal;
    std::vector<Vec3> pts(37);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double a = 2.0 * pi * static_cast<double>(i) / 37.0;
      pts[i] = Vec3(std::cos(a), std::sin(a), 0.0) + 0.1 * Vec3(normal(rng), normal(rng), normal(rng));
    }
    const Curve c = make_polyline(pts);
    const Curve r = resample_arclength(c, 200);
    CHECK(edge_nonuniformity(r) < 1e-12);
    // Equal chords cut corners, so length can only shrink.
    CHECK(r.length() <= c.length() * (1.0 + 1e-12));
    for (const auto& v : r.vertices()) CHECK(distance_to_trace(c, v) < 1e-12);
  }
}

TEST_CASE("resampling a fine circle stays within the sagitta bound") {
  const Curve c64 = circle(1.0, 64);
  const Curve r = resample_arclength(c64, 256);
  const double sagitta = std::pow(2.0 * pi / 64.0, 2) / 8.0;
  double worst = 0.0;
  for (const auto& v : r.vertices()) worst = std::max(worst, std::abs(v.norm() - 1.0));
  CHECK(worst <= sagitta);
  // The length of an inscribed polygon is preserved when resampling at a multiple.
  CHECK(r.length() == doctest::Approx(c64.length()).epsilon(1e-9));
}

TEST_CASE("resampling is idempotent on uniform curves") {
  const Curve c = circle(0.3, 128, 0.1);
  const Curve r = resample_arclength(c, 128);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK((r[i] - c[i]).norm() < 1e-12);
  std::mt19937_64 rng(3);
  const Curve loop = random_loop(rng, 96);
  const Curve again = resample_arclength(loop, 96);
  for (std::size_t i = 0; i < loop.size(); ++i) CHECK((again[i] - loop[i]).norm() < 1e-12);
}

TEST_CASE("rescale_to_unit") {
  const Curve c = rescale_to_unit(circle(1.0, 64));
  CHECK(c.length() == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / (64.0 * 2.0 * std::sin(pi / 64.0));
  CHECK(c[0].norm() == doctest::Approx(r).epsilon(1e-14));
  CHECK(c[0].norm() == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-3));
  const Curve twice = rescale_to_unit(c);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK((twice[i] - c[i]).norm() < 1e-12);
}

TEST_CASE("unit-loop tangents times n times the edge length are one") {
  const Curve c = rescale_to_unit(circle(2.0, 100));
  const auto edges = c.edge_lengths();
  for (double e : edges) CHECK(100.0 * e == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& t : c.tangents()) CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("c1_distance basics") {
  std::mt19937_64 rng(11);
  const Curve a = random_loop(rng, 64);
  CHECK(c1_distance(a, a) == doctest::Approx(0.0));
  const Mat3 rot = Eigen::AngleAxisd(pi / 2, Vec3(0.3, -1.0, 0.2).normalized()).toRotationMatrix();
  const Curve b = transformed(a, rot, Vec3(0.4, 0.1, -2.0));
  CHECK(c1_distance(a, b) < 1e-9);
  CHECK(c1_distance(a, shifted(reversed(b), 17)) < 1e-9);

  AlignmentOptions fixed;
  fixed.allow_rotation = fixed.allow_translation = fixed.allow_reflection = false;
  CHECK(c1_distance(a, b, fixed) > 0.1);

  const Curve mirror = transformed(a, Vec3(1, 1, -1).asDiagonal().toDenseMatrix());
  AlignmentOptions proper;
  proper.allow_reflection = false;
  CHECK(c1_distance(a, mirror) < 1e-9);
  CHECK(c1_distance(a, mirror, proper) > 1e-3);

  CHECK(code_of([&] { c1_distance(a, random_loop(rng, 32)); }) == Errc::MismatchedSampleCount);
}

TEST_CASE("c1_alignment reports the realizing transform") {
  std::mt19937_64 rng(5);
  const Curve a = random_loop(rng, 48);
  const Mat3 rot = Eigen::AngleAxisd(0.7, Vec3::UnitZ()).toRotationMatrix();
  const Curve b = shifted(transformed(a, rot, Vec3(1, 2, 3)), 5);
  const auto al = c1_align(a, b);
  CHECK(al.distance < 1e-9);
  CHECK_FALSE(al.reversed);
  CHECK(al.shift == 48 - 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 mapped = al.rotation * b[(al.shift + i) % 48] + al.translation;
    CHECK((mapped - a[i]).norm() < 1e-9);
  }
}

TEST_CASE("c1_distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 4; ++trial) {
    const Curve a = random_loop(rng, 40);
    const Curve b = random_loop(rng, 40);
    const Curve c = random_loop(rng, 40);
    const double ab = c1_distance(a, b), ba = c1_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
    CHECK(c1_distance(a, c) <= ab + c1_distance(b, c) + 1e-12);
  }
}

TEST_CASE("circle against the doubly covered circle") {
  const Curve one = covered_circle(1, 256);
  const Curve two = covered_circle(2, 256);
  const double d = c1_distance(one, two);
  CHECK(d > 0.0);
  // Antipodal circle vertices map onto one point of the double cover, so
  // one of them is at least a circle radius away.
  CHECK(d >= 1.0 / (2.0 * pi));
}
