#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace eknot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Closed polygonal space curve. Stores vertices only; tangents, edge lengths
/// and curvatures are always recomputed. Consecutive vertices (including the
/// closing edge) are guaranteed distinct.
class Curve {
 public:
  /// Validating constructor, see make_polyline.
  explicit Curve(std::vector<Vec3> vertices);

  std::size_t size() const noexcept { return vertices_.size(); }
  bool closed() const noexcept { return true; }
  const Vec3& operator[](std::size_t i) const { return vertices_[i]; }
  std::span<const Vec3> vertices() const noexcept { return vertices_; }

  /// Vertex with cyclic index wrap, i may be negative.
  const Vec3& at(long i) const;

  /// Edge i runs from vertex i to vertex i+1 (mod n).
  Vec3 edge(std::size_t i) const;
  std::vector<double> edge_lengths() const;
  double length() const;

  /// Normalized central differences (v[i+1] - v[i-1]) / |v[i+1] - v[i-1]|.
  std::vector<Vec3> tangents() const;

 private:
  std::vector<Vec3> vertices_;
};

struct AlignmentOptions {
  bool allow_rotation = true;
  bool allow_translation = true;
  bool allow_reflection = true;
  bool allow_parameter_shift = true;
  bool allow_orientation_reversal = true;
};

/// Result of a C1 alignment search: the distance and the transform that
/// realizes it, mapping b onto a as a[i] ~ rotation * b[shift -/+ i] + translation.
struct C1Alignment {
  double distance = 0.0;
  std::size_t shift = 0;
  bool reversed = false;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Throws TooFewPoints for fewer than 3 points, DegenerateEdge for a
/// zero-length edge (last->first included).
Curve make_polyline(std::vector<Vec3> points);

/// n vertices on the trace of c, starting at c[0], with all chords equal.
/// Requires n >= 8.
Curve resample_arclength(const Curve& c, std::size_t n);

/// Uniform scaling about the origin to polygonal length 1.
Curve rescale_to_unit(const Curve& c);

Curve scaled(const Curve& c, double factor);
Curve translated(const Curve& c, const Vec3& offset);
Curve transformed(const Curve& c, const Mat3& linear, const Vec3& offset = Vec3::Zero());
Curve reversed(const Curve& c);
/// Cyclic relabeling: vertex i of the result is vertex (i + k) of c.
Curve shifted(const Curve& c, std::size_t k);

/// Largest relative deviation of the edge lengths from their mean.
double edge_nonuniformity(const Curve& c);

/// max over samples of |a - b| + |ta - tb|, minimized over the transforms
/// allowed by opts. Rigid motions are fitted per shift by orthogonal
/// Procrustes; shifts are searched exhaustively. Ties go to the smallest
/// shift, forward orientation first.
C1Alignment c1_align(const Curve& a, const Curve& b, const AlignmentOptions& opts = {});
double c1_distance(const Curve& a, const Curve& b, const AlignmentOptions& opts = {});

}  // namespace eknot
