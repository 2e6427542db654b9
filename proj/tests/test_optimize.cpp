#include "doctest.h"

#include "eknot/energy.hpp"
#include "eknot/error.hpp"
#include "eknot/families.hpp"
#include "eknot/optimize.hpp"

#include <cmath>
#include <numbers>

using namespace eknot;
using std::numbers::pi;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eknot::Error");
  return Errc::UsageError;
}

Curve wobbly_loop(std::size_t n) {
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2 * pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = Vec3(std::cos(a) + 0.2 * std::cos(3 * a), std::sin(a), 0.15 * std::sin(2 * a));
  }
  return project_constraints(make_polyline(std::move(pts)));
}

}  // namespace

TEST_CASE("project_constraints") {
  const Curve w = wobbly_loop(128);
  CHECK(w.length() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(edge_nonuniformity(w) < 1e-12);
  const Curve again = project_constraints(w);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK((again[i] - w[i]).norm() < 1e-12);
  const Curve tiny = transformed(w, 1e-11 * Mat3::Identity());
  CHECK(code_of([&] { project_constraints(tiny); }) == Errc::DegenerateCurve);
}

TEST_CASE("objective matches total_energy for ropelength repulsion") {
  const Curve k = torus_knot({2, 3, 0.1, 256});
  OptimizeOptions o;
  o.repulsion = Repulsion::ropelength;
  CHECK(objective(k, 0.01, o) == doctest::Approx(total_energy(k, 0.01).total).epsilon(1e-12));
  o.repulsion = Repulsion::moebius;
  o.lambda = 2.0;
  const double expected = bending_energy(k) + 0.01 * 2.0 * moebius_energy(k);
  CHECK(objective(k, 0.01, o) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero steps return the start") {
  const Curve k = torus_knot({2, 3, 0.1, 128});
  OptimizeOptions o;
  o.max_steps = 0;
  const auto r = minimize(k, 0.0, o);
  for (std::size_t i = 0; i < k.size(); ++i) CHECK(r.curve[i] == k[i]);
  CHECK(r.steps_taken == 0);
  CHECK(r.report.bending == doctest::Approx(bending_energy(k)).epsilon(1e-14));
}

TEST_CASE("the circle is stationary") {
  const Curve c = covered_circle(1, 128);
  OptimizeOptions o;
  o.repulsion = Repulsion::ropelength;
  o.max_steps = 50;
  const auto r = minimize(c, 0.1, o);
  CHECK(std::abs(r.report.total - (4 * pi * pi + 0.2 * pi)) <= 0.01 * (4 * pi * pi + 0.2 * pi));
  CHECK(r.report.total <= total_energy(c, 0.1).total + 1e-12);
  CHECK(c1_distance(r.curve, c) < 1e-3);
}

TEST_CASE("gradient descent lowers the energy monotonically") {
  const Curve w = wobbly_loop(128);
  OptimizeOptions o;
  o.repulsion = Repulsion::ropelength;
  o.max_steps = 60;
  const auto r = minimize(w, 0.01, o);
  REQUIRE(r.energy_trace.size() >= 2);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
    CHECK(r.energy_trace[i].second <= r.energy_trace[i - 1].second);
    CHECK(r.energy_trace[i].first > r.energy_trace[i - 1].first);
  }
  CHECK(r.report.total < objective(w, 0.01, o));
  CHECK(r.report.thickness.thickness > 0.0);
  CHECK(r.accepted_moves > 0);
}

TEST_CASE("annealing a trefoil lowers bending and keeps it knotted") {
  const Curve k = torus_knot({2, 3, 0.25, 256});
  OptimizeOptions o;
  o.method = Method::anneal;
  o.repulsion = Repulsion::ropelength;
  o.max_steps = 2000;
  o.anneal.move_amplitude = 1e-4;
  o.anneal.t_start = 1e-5;
  o.seed = 42;
  const auto r = minimize(k, 1e-3, o);
  CHECK(r.report.total < objective(k, 1e-3, o));
  CHECK(r.report.bending < bending_energy(k));
  CHECK(r.report.total_curvature >= 4 * pi - 0.01);
  CHECK(r.accepted_moves > 0);

  const auto again = minimize(k, 1e-3, o);
  REQUIRE(again.curve.size() == r.curve.size());
  for (std::size_t i = 0; i < r.curve.size(); ++i) CHECK(again.curve[i] == r.curve[i]);
  CHECK(again.report.total == r.report.total);
}

TEST_CASE("option validation") {
  const Curve c = covered_circle(1, 64);
  auto with = [&](auto&& tweak, double theta = 0.1) {
    OptimizeOptions o;
    o.max_steps = 1;
    tweak(o);
    return code_of([&] { minimize(c, theta, o); });
  };
  CHECK(with([](OptimizeOptions&) {}, -1.0) == Errc::InvalidSpec);
  CHECK(with([](OptimizeOptions&) {}, INFINITY) == Errc::InvalidSpec);
  CHECK(with([](OptimizeOptions& o) { o.step_size = 0; }) == Errc::InvalidSpec);
  CHECK(with([](OptimizeOptions& o) { o.lambda = -1; }) == Errc::InvalidSpec);
  CHECK(with([](OptimizeOptions& o) { o.anneal.t_end = o.anneal.t_start; }) == Errc::InvalidSpec);
  CHECK(with([](OptimizeOptions& o) { o.anneal.move_amplitude = 0.25; }) == Errc::InvalidSpec);
  CHECK(with([](OptimizeOptions& o) { o.anneal.moves_per_temp = 0; }) == Errc::InvalidSpec);
  OptimizeOptions o;
  o.repulsion = Repulsion::ropelength;
  CHECK(code_of([&] { minimize(tangential_pair({1.0, 64}), 0.1, o); }) == Errc::NonFiniteEnergy);
}

TEST_CASE("theta sweep on the unknot") {
  const Curve w = wobbly_loop(96);
  OptimizeOptions o;
  o.repulsion = Repulsion::ropelength;
  o.max_steps = 150;
  std::vector<Curve> mins;
  const auto rows = theta_sweep(w, {1e-1, 1e-2}, o, ComparisonKnot{2, 3}, &mins);
  REQUIRE(rows.size() == 2);
  REQUIRE(mins.size() == 2);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].total == doctest::Approx(rows[k].bending + rows[k].theta * rows[k].ropelength));
    CHECK(std::abs(rows[k].bending - 4 * pi * pi) <= 0.01 * 4 * pi * pi);
    CHECK(rows[k].bending == doctest::Approx(bending_energy(mins[k])).epsilon(1e-12));
    CHECK(std::isfinite(rows[k].comparison_total));
    CHECK(rows[k].total < rows[k].comparison_total);
  }
  const auto plain = theta_sweep(w, {1e-1}, o);
  CHECK(std::isnan(plain[0].comparison_total));

  CHECK(code_of([&] { theta_sweep(w, {}, o); }) == Errc::InvalidSpec);
  CHECK(code_of([&] { theta_sweep(w, {1e-2, 1e-1}, o); }) == Errc::InvalidSpec);
  CHECK(code_of([&] { theta_sweep(w, {1e-2, 0.0}, o); }) == Errc::InvalidSpec);
}
