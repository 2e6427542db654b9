#pragma once

#include "eknot/curve.hpp"

#include <cstddef>

namespace eknot {

/// (a, b)-torus knot on the torus of core radius 1 and tube radius rho.
struct TorusKnotSpec {
  int a = 2;
  int b = 3;
  double rho = 0.1;
  std::size_t n = 1024;

  /// Upper end of the rho range on which the (2 pi a)^2 + C rho^2 bending
  /// estimate holds: a / (4 sqrt(a^2 + b^2)).
  double estimate_rho_max() const;
  bool in_estimate_range() const { return rho > 0.0 && rho <= estimate_rho_max(); }
};

struct TangentialPairSpec {
  double phi = 0.0;  // opening angle in [0, pi]
  std::size_t n = 1024;  // even
};

/// Point of the raw (unscaled) torus knot at parameter t in [0, 2 pi).
Vec3 torus_knot_point(int a, int b, double rho, double t);
/// |d/dt torus_knot_point|.
double torus_knot_speed(int a, int b, double rho, double t);

/// Raw torus knot sampled at n points of equal smooth arclength starting at
/// t = 0, then made chord-uniform. Not rescaled. Throws InvalidSpec unless
/// a >= 2, |b| >= 2, gcd(a, |b|) = 1, 0 < rho < 1.
Curve torus_knot_raw(const TorusKnotSpec& spec);

/// torus_knot_raw rescaled to a unit loop.
Curve torus_knot(const TorusKnotSpec& spec);

/// Two circles of radius ~1/(4 pi) meeting tangentially at the origin with
/// opening angle phi, sampled n/2 vertices per circle so that vertices 0
/// and n/2 are the exact double point. Unit polygonal length.
Curve tangential_pair(const TangentialPairSpec& spec);

/// Point of the smooth tangential pair at t in [0, 1).
Vec3 tangential_pair_point(double phi, double t);

/// Unit loop running k times around a circle centred at the origin.
/// Requires n >= 8 k.
Curve covered_circle(int k, std::size_t n);

struct TorusKnotPrediction {
  double length = 0.0;                  // length of the raw torus knot
  double bending = 0.0;                 // bending energy of the raw torus knot
  double bending_of_unit_rescale = 0.0; // bending * length
  double max_curvature = 0.0;           // of the unit rescale
  double far_distance = 0.0;            // min distance at arc separation >= 1/(10 kappa0), unit rescale
  double thickness_lower_bound = 0.0;   // min(far_distance / 2, 1 / max_curvature)
  double thickness_lower_bound_coeff = 0.0;  // thickness_lower_bound / rho
};

/// Quadrature of the closed-form speed and curvature integrands, independent
/// of the polygon pipeline. Throws InvalidSpec outside the estimate range or
/// when refinement disagrees by more than 1e-10 relative.
TorusKnotPrediction torus_knot_predictions(int a, int b, double rho);

}  // namespace eknot
