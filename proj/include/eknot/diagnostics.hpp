#pragma once

#include "eknot/curve.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace eknot {

/// Fary-Milnor acceptance threshold 4 pi - 0.01.
double fary_milnor_threshold();

/// Number of strict local maxima of i -> <v_i, nu> over the cyclic index.
/// Throws DegenerateDirection when two consecutive vertices have equal
/// height (an edge perpendicular to nu).
int crookedness(const Curve& c, const Vec3& nu);

struct CrookednessReport {
  std::size_t directions_sampled = 0;
  std::size_t degenerate_resampled = 0;
  std::map<int, std::size_t> mu_histogram;
  int mu_min = 0;
  double tc_estimate = 0.0;       // 2 pi mean(mu)
  double fraction_mu_ge_3 = 0.0;
};

/// Fibonacci-lattice directions, randomly rotated by `seed`.
std::vector<Vec3> sphere_directions(std::size_t count, std::uint64_t seed);

CrookednessReport milnor_tc(const Curve& c, std::size_t n_directions, std::uint64_t seed);

struct FaryMilnorRecord {
  double tc = 0.0;
  std::optional<bool> passes;  // only evaluated for claimed knots
};

FaryMilnorRecord fary_milnor_check(const Curve& c, bool claimed_knotted);

struct TangentialPairFit {
  double phi = 0.0;
  double c1_dist = 0.0;
};

/// Relative slack on the fitted distance within which angles count as tied.
inline constexpr double kFitResolution = 1e-3;

/// argmin over phi in [0, pi] of c1_distance(c, tangential_pair(phi)) with
/// full alignment: coarse grid, then golden-section refinement. Among angles
/// whose distance is within kFitResolution of the minimum, the smallest wins.
TangentialPairFit fit_tangential_pair(const Curve& c);

/// Closeness bound min(eps / 42, 1 / (16 pi)) for the local graph representation.
double graph_delta(double eps);
/// min(zeta / 64 * sin(phi / 2), sqrt(zeta / (8 pi)) / 20).
double handle_epsilon(double zeta, double phi);
/// Largest admissible cylinder radius 1 / (96 pi).
double max_cylinder_radius();

struct CylinderOptions {
  /// Enforce C1 closeness graph_delta(handle_epsilon(zeta, phi_ref)). When
  /// false, only C0 closeness 1 / (16 pi) is required and the graph
  /// structure is verified directly on every fibre.
  bool strict_alignment = false;
  /// Fibre count across [-eta, eta]; 0 picks one from the sample spacing.
  std::size_t fibres = 0;
};

struct CylinderDiagnostic {
  double zeta = 0.0;
  double eta = 0.0;
  double phi_ref = 0.0;
  std::vector<std::pair<double, double>> beta_samples;  // (xi, beta(xi))
  double delta_beta = 0.0;
  long b = 0;
  bool strands_ok = false;
  double c1_dist_to_ref = 0.0;
  double c0_dist_to_ref = 0.0;
  double alignment_bound = 0.0;  // the bound that was enforced
};

/// Two-braid signature of a curve sitting C1-close to tangential_pair(phi_ref)
/// (double point at the origin, common tangent along e2). The cylinder of
/// radius zeta and half-height eta = sqrt(zeta / (8 pi)) is cut into fibres
/// x2 = -xi; the inter-strand vector a_xi is tracked continuously and
/// b = round((beta(eta) - beta(-eta)) / pi).
CylinderDiagnostic two_braid_signature(const Curve& c, double phi_ref, double zeta,
                                       const CylinderOptions& opts = {});

struct Crossing {
  std::size_t edge_a = 0;  // edge_a < edge_b
  std::size_t edge_b = 0;
  double s_a = 0.0;        // position on each edge in [0, 1]
  double s_b = 0.0;
  std::size_t over_edge = 0;
  int sign = 0;            // sign of nu . (d_over x d_under)
};

/// Crossings of the projection onto the plane orthogonal to nu. Throws
/// DegenerateDirection on vertex hits, tangential overlaps or true
/// intersections.
std::vector<Crossing> crossing_signs(const Curve& c, const Vec3& nu);

struct SphericityReport {
  Vec3 best_sphere_center = Vec3::Zero();
  double best_sphere_radius = 0.0;
  double rms_residual = 0.0;
  Vec3 plane_normal = Vec3::UnitZ();
  double planar_rms_residual = 0.0;
};

SphericityReport sphericity(const Curve& c);

}  // namespace eknot
