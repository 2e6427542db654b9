#pragma once

#include "eknot/curve.hpp"
#include "eknot/energy.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace eknot {

enum class Method { gradient, anneal, hybrid };
enum class Cooling { geometric };

struct AnnealSchedule {
  double t_start = 1e-4;
  double t_end = 1e-7;
  Cooling cooling = Cooling::geometric;
  std::size_t moves_per_temp = 100;
  /// Standard deviation of a move as a fraction of the current thickness.
  /// Displacements are capped at thickness / 4 regardless.
  double move_amplitude = 2e-4;
};

struct OptimizeOptions {
  Method method = Method::gradient;
  Repulsion repulsion = Repulsion::moebius;
  double lambda = 1.0;
  /// Gradient steps, or anneal moves. Hybrid runs max_steps anneal moves
  /// followed by polish_steps gradient steps.
  std::size_t max_steps = 500;
  std::size_t polish_steps = 200;
  double step_size = 1e-3;
  /// Stop when the relative decrease over `window` accepted steps is below this.
  double tolerance = 1e-10;
  std::size_t window = 20;
  std::uint64_t seed = 0;
  AnnealSchedule anneal;
  /// Smooth the gradient with (I + alpha D^4)^-1 before stepping, D the
  /// periodic second difference. Plain gradient when false.
  bool precondition = true;
};

struct MinimizeResult {
  Curve curve;
  EnergyReport report;
  std::size_t steps_taken = 0;
  std::size_t accepted_moves = 0;
  std::vector<std::pair<std::size_t, double>> energy_trace;
  std::size_t knot_guard_triggers = 0;
};

/// Rescale to length 1 about the origin and resample to uniform arclength at
/// the same n. Throws DegenerateCurve for length below 1e-9.
Curve project_constraints(const Curve& c);

/// The objective minimized by `minimize`: bending + theta * ropelength, or
/// bending + theta * lambda * moebius.
double objective(const Curve& c, double theta, const OptimizeOptions& opts);

MinimizeResult minimize(const Curve& start, double theta, const OptimizeOptions& opts);

struct SweepRow {
  double theta = 0.0;
  double bending = 0.0;
  double ropelength = 0.0;
  double total = 0.0;  // bending + theta * ropelength
  double total_curvature = 0.0;
  double phi_fit = 0.0;
  double c1_dist_to_fit = 0.0;
  double comparison_total = 0.0;  // NaN when no comparison knot is given
};

struct ComparisonKnot {
  int a = 2;
  int b = 3;
};

/// Warm-started continuation over strictly decreasing thetas. The
/// comparison column holds E_theta of the (a, b) torus knot with
/// rho = theta^(1/3), sampled at the start's n.
std::vector<SweepRow> theta_sweep(const Curve& start, const std::vector<double>& thetas,
                                  const OptimizeOptions& opts,
                                  std::optional<ComparisonKnot> comparison = std::nullopt,
                                  std::vector<Curve>* minimizers = nullptr);

}  // namespace eknot
