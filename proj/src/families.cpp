#include "eknot/families.hpp"

#include "eknot/error.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace eknot {

namespace {

using std::numbers::pi;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_panel(F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) sum += kGaussWeights[k] * f(mid + half * kGaussNodes[k]);
  return sum * half;
}

template <class F>
double gauss_composite(F&& f, double lo, double hi, std::size_t panels) {
  double sum = 0.0;
  const double w = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) sum += gauss_panel(f, lo + w * p, lo + w * (p + 1));
  return sum;
}

void validate(const TorusKnotSpec& s) {
  if (s.a < 2 || std::abs(s.b) < 2) {
    throw Error(Errc::InvalidSpec, "torus knot needs a >= 2 and |b| >= 2");
  }
  if (std::gcd(s.a, std::abs(s.b)) != 1) {
    throw Error(Errc::InvalidSpec, "torus knot needs gcd(a, |b|) = 1, got a=" +
                                       std::to_string(s.a) + " b=" + std::to_string(s.b));
  }
  if (!(s.rho > 0.0 && s.rho < 1.0)) {
    throw Error(Errc::InvalidSpec, "torus knot needs 0 < rho < 1");
  }
  if (s.n < 8) throw Error(Errc::InvalidSpec, "torus knot needs n >= 8");
}

struct TorusDerivatives {
  Vec3 d1;
  Vec3 d2;
};

TorusDerivatives torus_derivatives(int ai, int bi, double rho, double t) {
  const double a = ai, b = bi;
  const double ca = std::cos(a * t), sa = std::sin(a * t);
  const double cb = std::cos(b * t), sb = std::sin(b * t);
  const double r = 1.0 + rho * cb;
  TorusDerivatives d;
  d.d1 = Vec3(-b * rho * sb * ca - a * r * sa, -b * rho * sb * sa + a * r * ca, b * rho * cb);
  const double radial = a * a + (a * a + b * b) * rho * cb;
  d.d2 = -Vec3(radial * ca - 2.0 * a * b * rho * sb * sa, radial * sa + 2.0 * a * b * rho * sb * ca,
               b * b * rho * sb);
  return d;
}

double torus_curvature(int a, int b, double rho, double t) {
  const auto d = torus_derivatives(a, b, rho, t);
  const double s = d.d1.norm();
  return d.d2.cross(d.d1).norm() / (s * s * s);
}

double torus_bending_density(int a, int b, double rho, double t) {
  const auto d = torus_derivatives(a, b, rho, t);
  const double s = d.d1.norm();
  return d.d2.cross(d.d1).squaredNorm() / std::pow(s, 5);
}

}  // namespace

double TorusKnotSpec::estimate_rho_max() const {
  return static_cast<double>(a) / (4.0 * std::hypot(static_cast<double>(a), static_cast<double>(b)));
}

Vec3 torus_knot_point(int a, int b, double rho, double t) {
  const double r = 1.0 + rho * std::cos(b * t);
  return {r * std::cos(a * t), r * std::sin(a * t), rho * std::sin(b * t)};
}

double torus_knot_speed(int a, int b, double rho, double t) {
  const double r = 1.0 + rho * std::cos(b * t);
  return std::sqrt(b * b * rho * rho + a * a * r * r);
}

Curve torus_knot_raw(const TorusKnotSpec& spec) {
  validate(spec);
  const int a = spec.a, b = spec.b;
  const double rho = spec.rho;
  auto speed = [&](double t) { return torus_knot_speed(a, b, rho, t); };

  const std::size_t panels = std::max<std::size_t>(256, 8 * spec.n);
  const double width = 2.0 * pi / static_cast<double>(panels);
  std::vector<double> cumulative(panels + 1, 0.0);
  for (std::size_t p = 0; p < panels; ++p) {
    cumulative[p + 1] = cumulative[p] + gauss_panel(speed, width * p, width * (p + 1));
  }
  const double total = cumulative.back();

  std::vector<Vec3> pts(spec.n);
  for (std::size_t k = 0; k < spec.n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(spec.n);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t p = std::min<std::size_t>(panels - 1, static_cast<std::size_t>(it - cumulative.begin()) - 1);
    const double t0 = width * p;
    double t = t0 + (target - cumulative[p]) / speed(t0);
    for (int iter = 0; iter < 8; ++iter) {
      const double s = cumulative[p] + gauss_panel(speed, t0, t);
      const double step = (s - target) / speed(t);
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    pts[k] = torus_knot_point(a, b, rho, t);
  }
  return resample_arclength(Curve(std::move(pts)), spec.n);
}

Curve torus_knot(const TorusKnotSpec& spec) { return rescale_to_unit(torus_knot_raw(spec)); }

Vec3 tangential_pair_point(double phi, double t) {
  t -= std::floor(t);
  const Vec3 e1(1.0, 0.0, 0.0), e2(0.0, 1.0, 0.0);
  const bool first = t < 0.5;
  const double angle = 4.0 * pi * (first ? t : t - 0.5);
  const Vec3 dir = first ? e1 : Vec3(std::cos(phi), 0.0, std::sin(phi));
  return (dir * (1.0 - std::cos(angle)) - e2 * std::sin(angle)) / (4.0 * pi);
}

Curve tangential_pair(const TangentialPairSpec& spec) {
  if (!(spec.phi >= 0.0 && spec.phi <= pi)) {
    throw Error(Errc::InvalidSpec, "tangential pair needs phi in [0, pi]");
  }
  if (spec.n < 8 || spec.n % 2 != 0) {
    throw Error(Errc::InvalidSpec, "tangential pair needs an even n >= 8");
  }
  const std::size_t half = spec.n / 2;
  std::vector<Vec3> pts(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t local = i % half;
    const double t = static_cast<double>(local) / static_cast<double>(spec.n) + (i < half ? 0.0 : 0.5);
    pts[i] = tangential_pair_point(spec.phi, t);
  }
  pts[0] = Vec3::Zero();
  pts[half] = Vec3::Zero();
  return rescale_to_unit(Curve(std::move(pts)));
}

Curve covered_circle(int k, std::size_t n) {
  if (k < 1) throw Error(Errc::InvalidSpec, "covered circle needs k >= 1");
  if (n < 8 * static_cast<std::size_t>(k)) {
    throw Error(Errc::InvalidSpec, "covered circle needs n >= 8 k");
  }
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Reduce the angle per turn so repeated covers land on identical vertices.
    const std::size_t phase = (static_cast<std::size_t>(k) * i) % n;
    const double angle = 2.0 * pi * static_cast<double>(phase) / static_cast<double>(n);
    pts[i] = Vec3(std::cos(angle), std::sin(angle), 0.0);
  }
  return rescale_to_unit(Curve(std::move(pts)));
}

TorusKnotPrediction torus_knot_predictions(int a, int b, double rho) {
  TorusKnotSpec spec{a, b, rho, 8};
  validate(spec);
  if (!spec.in_estimate_range()) {
    throw Error(Errc::InvalidSpec, "rho outside the bending-estimate range (0, " +
                                       std::to_string(spec.estimate_rho_max()) + "]");
  }
  auto speed = [&](double t) { return torus_knot_speed(a, b, rho, t); };
  auto density = [&](double t) { return torus_bending_density(a, b, rho, t); };

  std::size_t panels = 64;
  double length = gauss_composite(speed, 0.0, 2.0 * pi, panels);
  double bending = gauss_composite(density, 0.0, 2.0 * pi, panels);
  for (;;) {
    const double length2 = gauss_composite(speed, 0.0, 2.0 * pi, 2 * panels);
    const double bending2 = gauss_composite(density, 0.0, 2.0 * pi, 2 * panels);
    const bool agree = std::abs(length2 - length) <= 1e-10 * std::abs(length2) &&
                       std::abs(bending2 - bending) <= 1e-10 * std::abs(bending2);
    length = length2;
    bending = bending2;
    panels *= 2;
    if (agree) break;
    if (panels > 8192) {
      throw Error(Errc::InvalidSpec, "torus knot quadrature did not converge");
    }
  }

  TorusKnotPrediction out;
  out.length = length;
  out.bending = bending;
  out.bending_of_unit_rescale = bending * length;

  // Sampled at equal parameter steps; arclength from per-interval quadrature.
  constexpr std::size_t kSamples = 4096;
  const double dt = 2.0 * pi / kSamples;
  std::vector<Vec3> pts(kSamples);
  std::vector<double> arc(kSamples + 1, 0.0);
  double kappa0 = 0.0;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double t = dt * i;
    pts[i] = torus_knot_point(a, b, rho, t) / length;
    arc[i + 1] = arc[i] + gauss_panel(speed, t, t + dt) / length;
    // Fine scan for the curvature maximum.
    for (int s = 0; s < 4; ++s) {
      kappa0 = std::max(kappa0, torus_curvature(a, b, rho, t + 0.25 * s * dt) * length);
    }
  }
  const double separation = 1.0 / (10.0 * kappa0);
  double far = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kSamples; ++i) {
    for (std::size_t j = i + 1; j < kSamples; ++j) {
      const double along = arc[j] - arc[i];
      if (std::min(along, 1.0 - along) < separation) continue;
      far = std::min(far, (pts[i] - pts[j]).norm());
    }
  }
  out.max_curvature = kappa0;
  out.far_distance = far;
  out.thickness_lower_bound = std::min(0.5 * far, 1.0 / kappa0);
  out.thickness_lower_bound_coeff = out.thickness_lower_bound / rho;
  return out;
}

}  // namespace eknot
