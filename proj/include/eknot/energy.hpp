#pragma once

#include "eknot/curve.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace eknot {

enum class ThicknessMethod { triples, litherland };
enum class Repulsion { ropelength, moebius };

/// Thickness of a closed polygon together with its two characterizations:
/// the global minimum circumradius over vertex triples, and the local
/// curvature radius against half the doubly critical self-distance.
/// Fields not computed by the chosen method are +inf.
struct ThicknessReport {
  double thickness = 0.0;
  double min_circumradius = 0.0;
  double min_radius_of_curvature = 0.0;
  double half_dcsd = 0.0;
  std::vector<std::size_t> realizer;
  ThicknessMethod method = ThicknessMethod::litherland;
};

struct EnergyReport {
  double bending = 0.0;
  double total_curvature = 0.0;
  double ropelength = 0.0;  // +inf for non-embedded curves
  std::optional<double> moebius;
  double theta = 0.0;
  double lambda = 1.0;
  double total = 0.0;
  Repulsion repulsion = Repulsion::ropelength;
  ThicknessReport thickness;
};

/// Relative edge-length tolerance accepted as "uniform arclength".
inline constexpr double kUniformTolerance = 1e-6;
/// Distance below which two non-adjacent vertices count as coincident.
inline constexpr double kCoincidenceTolerance = 1e-12;
/// Pairs closer than this many edges (intrinsically) are skipped by the
/// self-distance and Moebius sums.
inline constexpr std::size_t kPairWindow = 4;

/// Exterior (turning) angles psi_i at each vertex, in [0, pi].
std::vector<double> turning_angles(const Curve& c);

/// Discrete curvature 2 tan(psi_i / 2) / h at each vertex, h the mean edge length.
std::vector<double> vertex_curvatures(const Curve& c);

/// Sum of kappa_i^2 h with kappa_i = 2 tan(psi_i / 2) / h. Throws
/// NonUniformSampling if edge lengths deviate from their mean by more than
/// kUniformTolerance.
double bending_energy(const Curve& c);

/// Sum of turning angles (polygonal total curvature).
double total_curvature(const Curve& c);

/// Radius of the circle through three points, +inf when collinear.
/// Throws CoincidentPoints if two inputs are equal.
double circumradius(const Vec3& x, const Vec3& y, const Vec3& z);

ThicknessReport thickness(const Curve& c, ThicknessMethod method = ThicknessMethod::litherland);

/// length / thickness; +inf at zero thickness.
double ropelength(const Curve& c, ThicknessMethod method = ThicknessMethod::litherland);

/// Discrete Moebius energy, sum over pairs of (|x_i - x_j|^-2 - d_ij^-2) h^2
/// with d_ij the intrinsic distance, pairs with d_ij < kPairWindow * h skipped.
/// Throws SelfIntersection for coincident non-adjacent vertices.
double moebius_energy(const Curve& c);

EnergyReport total_energy(const Curve& c, double theta, Repulsion repulsion = Repulsion::ropelength,
                          double lambda = 1.0,
                          ThicknessMethod method = ThicknessMethod::litherland);

/// Smooth vertex-level versions used by the optimizer. They agree with
/// bending_energy / moebius_energy on uniform curves but are defined (and
/// differentiable) for arbitrary polygons: the bending term uses the dual
/// edge length (|e_{i-1}| + |e_i|) / 2 in place of h, the Moebius term uses
/// h = length / n.
namespace detail {
double bending_energy_free(std::span<const Vec3> v);
double bending_gradient(std::span<const Vec3> v, std::span<Vec3> grad);
double moebius_energy_free(std::span<const Vec3> v);
double moebius_gradient(std::span<const Vec3> v, std::span<Vec3> grad);
}  // namespace detail

}  // namespace eknot
