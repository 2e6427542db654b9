#include "support/twisted_pair.hpp"

#include "eknot/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace eknot::testing {

namespace {

using std::numbers::pi;

double offset(double xi) { return (1.0 - std::cos(std::asin(4.0 * pi * xi))) / (4.0 * pi); }

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

Curve twisted_pair(double phi, int k, double zeta, std::size_t n) {
  const double eta = std::sqrt(zeta / (8.0 * pi));
  const double half = 0.5 * eta;
  const Vec3 e1 = Vec3::UnitX();
  const Vec3 e2 = Vec3::UnitY();
  const Vec3 nu2(std::cos(phi), 0.0, std::sin(phi));
  const double gap = (nu2 - e1).norm();

  // Strand through t = 0 runs from the nu2 side (xi < 0) to the e1 side.
  auto strand = [&](double xi, bool first) {
    const double c = offset(xi);
    const Vec3 mid = -xi * e2 + 0.5 * c * (e1 + nu2);
    const double beta = 0.5 * pi + k * pi * smoothstep((xi + half) / eta);
    const double mag = gap * offset(std::max(std::abs(xi), half));
    const Vec3 a = mag * Vec3(std::cos(beta + 0.5 * phi), 0.0, std::sin(beta + 0.5 * phi));
    return first ? Vec3(mid + 0.5 * a) : Vec3(mid - 0.5 * a);
  };

  const std::size_t dense = 64 * n;
  std::vector<Vec3> pts(dense);
  for (std::size_t i = 0; i < dense; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(dense);
    Vec3 p = tangential_pair_point(phi, t);
    const double xi = -p.y();
    // Only the two strands through the double point; the far sides of the
    // circles also cross x2 = 0.
    const double from_double_point = std::min({t, 1.0 - t, std::abs(t - 0.5)});
    if (std::abs(xi) < half && from_double_point < 0.1) {
      const bool near_start = t < 0.25 || t > 0.75;
      p = strand(xi, near_start);
    }
    pts[i] = p;
  }
  return rescale_to_unit(resample_arclength(Curve(std::move(pts)), n));
}

Mat3 bisector_reflection(double phi) {
  const Vec3 normal(-std::sin(0.5 * phi), 0.0, std::cos(0.5 * phi));
  return Mat3::Identity() - 2.0 * normal * normal.transpose();
}

}  // namespace eknot::testing
