#include "eknot/energy.hpp"

#include "eknot/error.hpp"
#include "eknot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace eknot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t cyclic_gap(std::size_t i, std::size_t j, std::size_t n) {
  const std::size_t d = i > j ? i - j : j - i;
  return std::min(d, n - d);
}

double turning_angle(const Vec3& u, const Vec3& w) {
  return std::atan2(u.cross(w).norm(), u.dot(w));
}

double mean_edge(const Curve& c) { return c.length() / static_cast<double>(c.size()); }

// First pair of non-adjacent vertices closer than kCoincidenceTolerance.
std::optional<std::pair<std::size_t, std::size_t>> find_coincidence(const Curve& c) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (cyclic_gap(i, j, n) < 2) continue;
      if ((c[i] - c[j]).norm() < kCoincidenceTolerance) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

ThicknessReport zero_thickness(std::pair<std::size_t, std::size_t> pair, ThicknessMethod method) {
  ThicknessReport r;
  r.method = method;
  r.thickness = 0.0;
  r.min_circumradius = method == ThicknessMethod::triples ? 0.0 : kInf;
  r.min_radius_of_curvature = kInf;
  r.half_dcsd = method == ThicknessMethod::litherland ? 0.0 : kInf;
  r.realizer = {pair.first, pair.second};
  return r;
}

ThicknessReport thickness_triples(const Curve& c) {
  const std::size_t n = c.size();
  struct Best {
    double radius = kInf;
    std::size_t i = 0, j = 0, k = 0;
  };
  const std::size_t chunks = std::min<std::size_t>(256, n);
  std::vector<Best> best(chunks);
  for_each_chunk(n, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Best local;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3 a = c[j] - c[i];
        const double la = a.norm();
        // Every circle through x_i and x_j has radius >= |x_i - x_j| / 2.
        if (0.5 * la >= local.radius) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
          const Vec3 b = c[k] - c[i];
          const double cross = a.cross(b).norm();
          if (cross == 0.0) continue;
          const double r = la * b.norm() * (c[k] - c[j]).norm() / (2.0 * cross);
          if (r < local.radius) local = {r, i, j, k};
        }
      }
    }
    best[chunk] = local;
  });
  Best overall;
  for (const auto& b : best) {
    if (b.radius < overall.radius) overall = b;
  }
  ThicknessReport r;
  r.method = ThicknessMethod::triples;
  r.thickness = overall.radius;
  r.min_circumradius = overall.radius;
  r.min_radius_of_curvature = kInf;
  r.half_dcsd = kInf;
  r.realizer = {overall.i, overall.j, overall.k};
  return r;
}

ThicknessReport thickness_litherland(const Curve& c) {
  const std::size_t n = c.size();
  ThicknessReport r;
  r.method = ThicknessMethod::litherland;
  r.min_circumradius = kInf;

  const auto kappa = vertex_curvatures(c);
  const auto max_it = std::max_element(kappa.begin(), kappa.end());
  r.min_radius_of_curvature = *max_it > 0.0 ? 1.0 / *max_it : kInf;
  const std::size_t kappa_vertex = static_cast<std::size_t>(max_it - kappa.begin());

  const auto t = c.tangents();
  // Derivative proxy of |x_i - x_j|^2 / 2 with respect to the parameter at i.
  auto g = [&](long i, std::size_t j) {
    const Vec3& xi = c.at(i);
    const std::size_t ii = static_cast<std::size_t>(((i % static_cast<long>(n)) + n) % n);
    return (xi - c[j]).dot(t[ii]);
  };
  auto critical = [&](std::size_t i, std::size_t j) {
    const long li = static_cast<long>(i);
    const double gm = g(li - 1, j);
    const double g0 = g(li, j);
    const double gp = g(li + 1, j);
    return gm * gp <= 0.0 && std::abs(g0) <= std::min(std::abs(gm), std::abs(gp));
  };

  struct Best {
    double dist = kInf;
    std::size_t i = 0, j = 0;
  };
  const std::size_t chunks = std::min<std::size_t>(64, n);
  std::vector<Best> best(chunks);
  for_each_chunk(n, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Best local;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (cyclic_gap(i, j, n) < kPairWindow) continue;
        const double d = (c[i] - c[j]).norm();
        if (d >= local.dist) continue;
        if (critical(i, j) && critical(j, i)) local = {d, i, j};
      }
    }
    best[chunk] = local;
  });
  Best overall;
  for (const auto& b : best) {
    if (b.dist < overall.dist) overall = b;
  }
  r.half_dcsd = 0.5 * overall.dist;
  if (r.min_radius_of_curvature <= r.half_dcsd) {
    r.thickness = r.min_radius_of_curvature;
    r.realizer = {kappa_vertex};
  } else {
    r.thickness = r.half_dcsd;
    r.realizer = {overall.i, overall.j};
  }
  return r;
}

}  // namespace

std::vector<double> turning_angles(const Curve& c) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = turning_angle(c.edge((i + c.size() - 1) % c.size()), c.edge(i));
  }
  return out;
}

std::vector<double> vertex_curvatures(const Curve& c) {
  const double h = mean_edge(c);
  auto out = turning_angles(c);
  for (double& k : out) k = 2.0 * std::tan(0.5 * k) / h;
  return out;
}

double bending_energy(const Curve& c) {
  const double dev = edge_nonuniformity(c);
  if (dev > kUniformTolerance) {
    throw Error(Errc::NonUniformSampling,
                "bending energy needs uniform arclength samples (edge deviation " +
                    std::to_string(dev) + ")");
  }
  const double h = mean_edge(c);
  double sum = 0.0;
  for (double psi : turning_angles(c)) {
    const double k = 2.0 * std::tan(0.5 * psi) / h;
    sum += k * k * h;
  }
  return sum;
}

double total_curvature(const Curve& c) {
  double sum = 0.0;
  for (double psi : turning_angles(c)) sum += psi;
  return sum;
}

double circumradius(const Vec3& x, const Vec3& y, const Vec3& z) {
  if (x == y || y == z || x == z) {
    throw Error(Errc::CoincidentPoints, "circumradius of coincident points");
  }
  const Vec3 a = y - x;
  const Vec3 b = z - x;
  const double cross = a.cross(b).norm();
  if (cross == 0.0) return kInf;
  return a.norm() * b.norm() * (z - y).norm() / (2.0 * cross);
}

ThicknessReport thickness(const Curve& c, ThicknessMethod method) {
  if (auto pair = find_coincidence(c)) return zero_thickness(*pair, method);
  return method == ThicknessMethod::triples ? thickness_triples(c) : thickness_litherland(c);
}

double ropelength(const Curve& c, ThicknessMethod method) {
  const double t = thickness(c, method).thickness;
  return t > 0.0 ? c.length() / t : kInf;
}

double moebius_energy(const Curve& c) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (cyclic_gap(i, j, n) < 2) continue;
      if ((c[i] - c[j]).norm() < kCoincidenceTolerance) {
        throw Error(Errc::SelfIntersection, "vertices " + std::to_string(i) + " and " +
                                                std::to_string(j) + " coincide");
      }
    }
  }
  return detail::moebius_energy_free(c.vertices());
}

EnergyReport total_energy(const Curve& c, double theta, Repulsion repulsion, double lambda,
                          ThicknessMethod method) {
  if (!(theta >= 0.0)) throw Error(Errc::InvalidSpec, "theta must be nonnegative");
  if (!(lambda > 0.0)) throw Error(Errc::InvalidSpec, "lambda must be positive");
  EnergyReport r;
  r.theta = theta;
  r.lambda = lambda;
  r.repulsion = repulsion;
  r.bending = bending_energy(c);
  r.total_curvature = total_curvature(c);
  r.thickness = thickness(c, method);
  r.ropelength = r.thickness.thickness > 0.0 ? c.length() / r.thickness.thickness : kInf;
  if (r.thickness.thickness > 0.0) {
    try {
      r.moebius = moebius_energy(c);
    } catch (const Error& e) {
      if (e.code() != Errc::SelfIntersection) throw;
    }
  }
  if (repulsion == Repulsion::ropelength) {
    r.total = theta == 0.0 ? r.bending : r.bending + theta * r.ropelength;
  } else {
    if (!r.moebius) throw Error(Errc::SelfIntersection, "Moebius energy of a non-embedded curve");
    r.total = r.bending + theta * lambda * *r.moebius;
  }
  return r;
}

namespace detail {

namespace {

// 4 tan^2(psi/2) / l at one vertex, with u, w the incoming and outgoing
// edges and l their mean length; optionally accumulates derivatives.
double bending_term(const Vec3& u, const Vec3& w, Vec3* du, Vec3* dw) {
  const double lu = u.norm();
  const double lw = w.norm();
  const double ell = 0.5 * (lu + lw);
  const double c = std::clamp(u.dot(w) / (lu * lw), -1.0, 1.0);
  const double f = (1.0 - c) / (1.0 + c);
  if (du && dw) {
    const double dfdc = -2.0 / ((1.0 + c) * (1.0 + c));
    const Vec3 dcdu = w / (lu * lw) - c * u / (lu * lu);
    const Vec3 dcdw = u / (lu * lw) - c * w / (lw * lw);
    *du = 4.0 * (dfdc * dcdu / ell - f / (ell * ell) * 0.5 * u / lu);
    *dw = 4.0 * (dfdc * dcdw / ell - f / (ell * ell) * 0.5 * w / lw);
  }
  return 4.0 * f / ell;
}

}  // namespace

double bending_energy_free(std::span<const Vec3> v) {
  const std::size_t n = v.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 u = v[i] - v[(i + n - 1) % n];
    const Vec3 w = v[(i + 1) % n] - v[i];
    sum += bending_term(u, w, nullptr, nullptr);
  }
  return sum;
}

double bending_gradient(std::span<const Vec3> v, std::span<Vec3> grad) {
  const std::size_t n = v.size();
  for (auto& g : grad) g.setZero();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    Vec3 du, dw;
    sum += bending_term(v[i] - v[prev], v[next] - v[i], &du, &dw);
    grad[prev] -= du;
    grad[i] += du - dw;
    grad[next] += dw;
  }
  return sum;
}

namespace {

struct MoebiusParts {
  double h = 0.0;
  double inverse_square_sum = 0.0;  // S = sum over ordered pairs of 1/r^2
  double intrinsic_sum = 0.0;       // K = sum over ordered pairs of 1/m^2
};

MoebiusParts moebius_parts(std::span<const Vec3> v, std::span<Vec3> pair_grad) {
  const std::size_t n = v.size();
  MoebiusParts parts;
  double length = 0.0;
  for (std::size_t i = 0; i < n; ++i) length += (v[(i + 1) % n] - v[i]).norm();
  parts.h = length / static_cast<double>(n);
  for (std::size_t gap = kPairWindow; gap <= n / 2; ++gap) {
    const double pairs = (2 * gap == n) ? 1.0 : 2.0;  // gap and n - gap per vertex
    parts.intrinsic_sum += static_cast<double>(n) * pairs / static_cast<double>(gap * gap);
  }
  const bool want_grad = !pair_grad.empty();
  const std::size_t chunks = std::min<std::size_t>(64, n);
  std::vector<double> partial(chunks, 0.0);
  for_each_chunk(n, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    double local = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      Vec3 gi = Vec3::Zero();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || cyclic_gap(i, j, n) < kPairWindow) continue;
        const Vec3 d = v[i] - v[j];
        const double r2 = d.squaredNorm();
        local += 1.0 / r2;
        if (want_grad) gi -= 4.0 * d / (r2 * r2);
      }
      if (want_grad) pair_grad[i] = gi;
    }
    partial[chunk] = local;
  });
  for (double p : partial) parts.inverse_square_sum += p;
  return parts;
}

}  // namespace

double moebius_energy_free(std::span<const Vec3> v) {
  const auto parts = moebius_parts(v, {});
  return parts.h * parts.h * parts.inverse_square_sum - parts.intrinsic_sum;
}

double moebius_gradient(std::span<const Vec3> v, std::span<Vec3> grad) {
  const std::size_t n = v.size();
  const auto parts = moebius_parts(v, grad);
  const double h2 = parts.h * parts.h;
  // d(h^2 S) = 2 h S dh + h^2 dS, with dh = dL / n.
  std::vector<Vec3> edge_dir(n);
  for (std::size_t i = 0; i < n; ++i) edge_dir[i] = (v[(i + 1) % n] - v[i]).normalized();
  const double scale = 2.0 * parts.h * parts.inverse_square_sum / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 dl = edge_dir[(k + n - 1) % n] - edge_dir[k];
    grad[k] = h2 * grad[k] + scale * dl;
  }
  return h2 * parts.inverse_square_sum - parts.intrinsic_sum;
}

}  // namespace detail

}  // namespace eknot
