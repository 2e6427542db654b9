#include "eknot/curve.hpp"

#include "eknot/error.hpp"
#include "eknot/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace eknot {

namespace {

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

// Walks along the closed polygon `poly` from its first vertex, emitting a
// point every time the Euclidean distance to the previous emitted point
// reaches `chord`. Returns the unwrapped arclength of the n-th point, which
// equals the polygon length exactly when the n chords close up.
struct ChordMarch {
  const std::vector<Vec3>& poly;
  const std::vector<double>& cumulative;  // size m + 1
  double total;

  double run(double chord, std::size_t n, std::vector<Vec3>* out, std::vector<double>* params = nullptr) const {
    const std::size_t m = poly.size();
    Vec3 p = poly[0];
    if (out) {
      out->clear();
      out->push_back(p);
    }
    if (params) {
      params->clear();
      params->push_back(0.0);
    }
    std::size_t edge = 0;   // unwrapped edge counter
    double lambda = 0.0;    // position on the current edge in [0, 1]
    double arclength = 0.0;
    const std::size_t edge_limit = 3 * m;
    for (std::size_t k = 1; k <= n; ++k) {
      for (;;) {
        if (edge >= edge_limit) return std::numeric_limits<double>::infinity();
        const Vec3& a0 = poly[edge % m];
        const Vec3& b = poly[(edge + 1) % m];
        const Vec3 d = b - a0;
        const Vec3 a = a0 + lambda * d;
        if ((b - p).norm() >= chord) {
          // Segment a->b leaves the sphere |x - p| = chord exactly once.
          const Vec3 ap = a - p;
          const double qa = d.squaredNorm();
          const double qb = 2.0 * ap.dot(d);
          const double qc = ap.squaredNorm() - chord * chord;
          const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
          // Larger root of qa x^2 + qb x + qc = 0 (qc <= 0), stable form.
          const double mu = qb >= 0.0 ? (-2.0 * qc) / (qb + std::sqrt(disc))
                                      : (-qb + std::sqrt(disc)) / (2.0 * qa);
          lambda = std::clamp(lambda + mu, lambda, 1.0);
          p = a0 + lambda * d;
          const std::size_t loops = edge / m;
          arclength = static_cast<double>(loops) * total + cumulative[edge % m] +
                      lambda * (cumulative[edge % m + 1] - cumulative[edge % m]);
          break;
        }
        ++edge;
        lambda = 0.0;
      }
      if (out && k < n) out->push_back(p);
      if (params && k < n) params->push_back(arclength);
    }
    return arclength;
  }

  // Point and unit direction of the trace at unwrapped arclength s.
  std::pair<Vec3, Vec3> locate(double s) const {
    const std::size_t m = poly.size();
    double r = std::fmod(s, total);
    if (r < 0.0) r += total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    std::size_t e = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cumulative.begin() - 1));
    e = std::min(e, m - 1);
    const Vec3 d = poly[(e + 1) % m] - poly[e];
    const double len = cumulative[e + 1] - cumulative[e];
    const double lambda = std::clamp((r - cumulative[e]) / len, 0.0, 1.0);
    return {poly[e] + lambda * d, d / len};
  }
};

double chord_spread(const std::vector<Vec3>& pts) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double c = (pts[(i + 1) % pts.size()] - pts[i]).norm();
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return (hi - lo) / hi;
}

double chord_misfit(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> c(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = (pts[(i + 1) % n] - pts[i]).norm();
    mean += c[i];
  }
  mean /= static_cast<double>(n);
  double sq = 0.0;
  for (double x : c) sq += (x - mean) * (x - mean);
  return sq / (mean * mean);
}

// Where the march jumps past a sharp turn of the trace no chord closes up
// exactly. Newton on the arclength parameters s_1..s_{n-1} and the common
// chord d then equalizes the chords; the system is cyclic bidiagonal and is
// solved in O(n) by sweeping with d as the free unknown.
void equalize_chords(const ChordMarch& march, std::vector<double>& s, std::vector<Vec3>& pts) {
  const std::size_t n = s.size();
  std::vector<Vec3> tan(n), next_pts(n);
  std::vector<double> chord(n), alpha(n), beta(n), p(n + 1), q(n + 1), trial(n);
  double misfit = chord_misfit(pts);
  for (int it = 0; it < 100 && chord_spread(pts) > 1e-14; ++it) {
    for (std::size_t i = 0; i < n; ++i) tan[i] = march.locate(s[i]).second;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 u = pts[(i + 1) % n] - pts[i];
      chord[i] = u.norm();
      mean += chord[i];
      alpha[i] = tan[i].dot(u) / chord[i];
      beta[i] = tan[(i + 1) % n].dot(u) / chord[i];
    }
    mean /= static_cast<double>(n);
    p[0] = q[0] = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::abs(beta[i]) > 1e-3)) {
        ok = false;
        break;
      }
      p[i + 1] = (mean - chord[i] + alpha[i] * p[i]) / beta[i];
      q[i + 1] = (1.0 + alpha[i] * q[i]) / beta[i];
    }
    if (!ok || !(std::abs(q[n]) > 0.0)) return;
    const double dd = -p[n] / q[n];
    double step = 1.0;
    bool improved = false;
    for (int half = 0; half < 30 && !improved; ++half, step *= 0.5) {
      bool monotone = true;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = i == 0 ? s[0] : s[i] + step * (p[i] + q[i] * dd);
        if (i > 0 && !(trial[i] > trial[i - 1])) monotone = false;
      }
      if (!monotone || !(trial[n - 1] < s[0] + march.total)) continue;
      for (std::size_t i = 0; i < n; ++i) next_pts[i] = march.locate(trial[i]).first;
      const double next = chord_misfit(next_pts);
      if (next < misfit) {
        improved = true;
        misfit = next;
        s.swap(trial);
        pts.swap(next_pts);
      }
    }
    if (!improved) return;
  }
}

}  // namespace

Curve::Curve(std::vector<Vec3> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(Errc::TooFewPoints,
                "a closed curve needs at least 3 vertices, got " + std::to_string(vertices_.size()));
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec3& a = vertices_[i];
    const Vec3& b = vertices_[(i + 1) % vertices_.size()];
    if (!a.allFinite()) throw Error(Errc::DegenerateEdge, "non-finite vertex " + std::to_string(i));
    if (a == b) {
      throw Error(Errc::DegenerateEdge, "zero-length edge at vertex " + std::to_string(i));
    }
  }
}

const Vec3& Curve::at(long i) const { return vertices_[wrap(i, vertices_.size())]; }

Vec3 Curve::edge(std::size_t i) const { return vertices_[(i + 1) % size()] - vertices_[i]; }

std::vector<double> Curve::edge_lengths() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = edge(i).norm();
  return out;
}

double Curve::length() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += edge(i).norm();
  return sum;
}

std::vector<Vec3> Curve::tangents() const {
  std::vector<Vec3> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec3 d = at(static_cast<long>(i) + 1) - at(static_cast<long>(i) - 1);
    const double len = d.norm();
    out[i] = len > 0.0 ? Vec3(d / len) : Vec3(edge(i).normalized());
  }
  return out;
}

Curve make_polyline(std::vector<Vec3> points) { return Curve(std::move(points)); }

namespace {

// Equal-chord polygon inscribed in `poly` starting at its first vertex.
std::vector<Vec3> march_closed(const std::vector<Vec3>& poly, std::size_t n) {
  std::vector<double> cumulative(poly.size() + 1, 0.0);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    cumulative[i + 1] = cumulative[i] + (poly[(i + 1) % poly.size()] - poly[i]).norm();
  }
  const double total = cumulative.back();
  const ChordMarch march{poly, cumulative, total};

  // f(chord) = arclength of the n-th point - total; increasing in chord.
  auto f = [&](double chord) { return march.run(chord, n, nullptr) - total; };
  double hi = total / static_cast<double>(n);
  double f_hi = f(hi);
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * total;
  double root = hi;
  if (std::abs(f_hi) > tol) {
    double lo = 0.5 * hi;
    double f_lo = f(lo);
    for (int i = 0; i < 60 && f_lo >= 0.0; ++i) {
      lo *= 0.5;
      f_lo = f(lo);
    }
    // Illinois variant of regula falsi.
    int side = 0;
    root = lo;
    for (int it = 0; it < 200; ++it) {
      double x = (std::isfinite(f_hi) && std::isfinite(f_lo))
                     ? (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
                     : 0.5 * (lo + hi);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double fx = f(x);
      root = x;
      if (std::abs(fx) <= tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
      if (fx < 0.0) {
        lo = x;
        f_lo = fx;
        if (side == -1) f_hi *= 0.5;
        side = -1;
      } else {
        hi = x;
        f_hi = fx;
        if (side == 1) f_lo *= 0.5;
        side = 1;
      }
    }
  }
  std::vector<Vec3> out;
  std::vector<double> params;
  out.reserve(n);
  march.run(root, n, &out, &params);
  if (chord_spread(out) > 1e-14) equalize_chords(march, params, out);
  return out;
}

}  // namespace

Curve resample_arclength(const Curve& c, std::size_t n) {
  if (n < 8) {
    throw Error(Errc::TooFewPoints, "resampling needs n >= 8, got " + std::to_string(n));
  }
  std::vector<Vec3> poly(c.vertices().begin(), c.vertices().end());
  std::vector<Vec3> best = march_closed(poly, n);
  double best_spread = chord_spread(best);
  // The march can jump past a sharp turn so that no chord closes up from the
  // first vertex. Other starting points on the trace move the jump.
  const std::size_t m = poly.size();
  const double total = c.length();
  constexpr int kStarts = 64;
  for (int j = 1; j < kStarts && best_spread > 1e-12; ++j) {
    double s0 = total * j / kStarts;
    std::size_t e = 0;
    while (e + 1 < m && s0 > c.edge(e).norm()) {
      s0 -= c.edge(e).norm();
      ++e;
    }
    const double lambda = std::clamp(s0 / c.edge(e).norm(), 0.0, 1.0);
    if (lambda <= 0.0 || lambda >= 1.0) continue;
    std::vector<Vec3> rotated;
    rotated.reserve(m + 1);
    rotated.push_back(poly[e] + lambda * c.edge(e));
    for (std::size_t k = 1; k <= m; ++k) rotated.push_back(poly[(e + k) % m]);
    std::vector<Vec3> trial = march_closed(rotated, n);
    const double spread = chord_spread(trial);
    if (spread < best_spread) {
      best_spread = spread;
      best.swap(trial);
    }
  }
  if (best_spread > 1e-12) {
    // Last resort: Newton from equal arclength spacing, which skips no spike.
    std::vector<double> cumulative(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cumulative[i + 1] = cumulative[i] + c.edge(i).norm();
    const ChordMarch march{poly, cumulative, cumulative.back()};
    std::vector<double> params(n);
    std::vector<Vec3> trial(n);
    for (std::size_t i = 0; i < n; ++i) {
      params[i] = cumulative.back() * static_cast<double>(i) / static_cast<double>(n);
      trial[i] = march.locate(params[i]).first;
    }
    equalize_chords(march, params, trial);
    if (chord_spread(trial) < best_spread) best.swap(trial);
  }
  return Curve(std::move(best));
}

Curve scaled(const Curve& c, double factor) {
  std::vector<Vec3> v(c.vertices().begin(), c.vertices().end());
  for (auto& p : v) p *= factor;
  return Curve(std::move(v));
}

Curve translated(const Curve& c, const Vec3& offset) {
  std::vector<Vec3> v(c.vertices().begin(), c.vertices().end());
  for (auto& p : v) p += offset;
  return Curve(std::move(v));
}

Curve transformed(const Curve& c, const Mat3& linear, const Vec3& offset) {
  std::vector<Vec3> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = linear * c[i] + offset;
  return Curve(std::move(v));
}

Curve reversed(const Curve& c) {
  std::vector<Vec3> v(c.vertices().rbegin(), c.vertices().rend());
  return Curve(std::move(v));
}

Curve shifted(const Curve& c, std::size_t k) {
  std::vector<Vec3> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[(i + k) % c.size()];
  return Curve(std::move(v));
}

Curve rescale_to_unit(const Curve& c) {
  const double len = c.length();
  if (!(len > 0.0)) throw Error(Errc::DegenerateCurve, "curve has zero length");
  return scaled(c, 1.0 / len);
}

double edge_nonuniformity(const Curve& c) {
  const auto lengths = c.edge_lengths();
  double mean = 0.0;
  for (double l : lengths) mean += l;
  mean /= static_cast<double>(lengths.size());
  double worst = 0.0;
  for (double l : lengths) worst = std::max(worst, std::abs(l - mean) / mean);
  return worst;
}

C1Alignment c1_align(const Curve& a, const Curve& b, const AlignmentOptions& opts) {
  const std::size_t n = a.size();
  if (b.size() != n) {
    throw Error(Errc::MismatchedSampleCount, "c1_distance needs equal sample counts (" +
                                                 std::to_string(n) + " vs " +
                                                 std::to_string(b.size()) + ")");
  }
  const auto ta = a.tangents();
  const auto tb = b.tangents();

  Vec3 ca = Vec3::Zero();
  Vec3 cb = Vec3::Zero();
  if (opts.allow_translation) {
    for (std::size_t i = 0; i < n; ++i) {
      ca += a[i];
      cb += b[i];
    }
    ca /= static_cast<double>(n);
    cb /= static_cast<double>(n);
  }

  const std::size_t shifts = opts.allow_parameter_shift ? n : 1;
  const std::size_t orientations = opts.allow_orientation_reversal ? 2 : 1;
  const std::size_t candidates = shifts * orientations;

  auto evaluate = [&](std::size_t candidate) {
    C1Alignment out;
    out.reversed = candidate >= shifts;
    out.shift = candidate % shifts;
    auto index = [&](std::size_t i) {
      return out.reversed ? (out.shift + n - i) % n : (out.shift + i) % n;
    };
    const double sign = out.reversed ? -1.0 : 1.0;

    Mat3 rot = Mat3::Identity();
    if (opts.allow_rotation) {
      Mat3 h = Mat3::Zero();
      for (std::size_t i = 0; i < n; ++i) h += (b[index(i)] - cb) * (a[i] - ca).transpose();
      Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Mat3 v = svd.matrixV();
      rot = v * svd.matrixU().transpose();
      if (rot.determinant() < 0.0 && !opts.allow_reflection) {
        v.col(2) *= -1.0;
        rot = v * svd.matrixU().transpose();
      }
    }
    const Vec3 trans = opts.allow_translation ? Vec3(ca - rot * cb) : Vec3::Zero();

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = index(i);
      const double d = (a[i] - rot * b[j] - trans).norm() + (ta[i] - sign * (rot * tb[j])).norm();
      worst = std::max(worst, d);
    }
    out.distance = worst;
    out.rotation = rot;
    out.translation = trans;
    return out;
  };

  const std::size_t chunks = std::min<std::size_t>(64, candidates);
  std::vector<C1Alignment> best(chunks);
  for_each_chunk(candidates, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    C1Alignment local;
    local.distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = begin; k < end; ++k) {
      C1Alignment cand = evaluate(k);
      if (cand.distance < local.distance) local = cand;
    }
    best[chunk] = local;
  });
  C1Alignment result;
  result.distance = std::numeric_limits<double>::infinity();
  for (const auto& cand : best) {
    if (cand.distance < result.distance) result = cand;
  }
  return result;
}

double c1_distance(const Curve& a, const Curve& b, const AlignmentOptions& opts) {
  return c1_align(a, b, opts).distance;
}

}  // namespace eknot
