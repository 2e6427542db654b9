#include "eknot/diagnostics.hpp"

#include "eknot/energy.hpp"
#include "eknot/error.hpp"
#include "eknot/families.hpp"
#include "eknot/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace eknot {

namespace {

using std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return q.toRotationMatrix();
}

std::size_t cyclic_distance(std::size_t i, std::size_t j, std::size_t n) {
  const std::size_t d = i > j ? i - j : j - i;
  return std::min(d, n - d);
}

}  // namespace

double fary_milnor_threshold() { return 4.0 * pi - 0.01; }

int crookedness(const Curve& c, const Vec3& nu) {
  const std::size_t n = c.size();
  std::vector<double> height(n);
  for (std::size_t i = 0; i < n; ++i) height[i] = c[i].dot(nu);
  int maxima = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = height[(i + n - 1) % n];
    const double next = height[(i + 1) % n];
    if (height[i] == next) {
      throw Error(Errc::DegenerateDirection,
                  "edge " + std::to_string(i) + " is perpendicular to the direction");
    }
    if (height[i] > prev && height[i] > next) ++maxima;
  }
  return maxima;
}

std::vector<Vec3> sphere_directions(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Mat3 rot = random_rotation(rng);
  const double golden = pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double angle = golden * static_cast<double>(k);
    out[k] = rot * Vec3(r * std::cos(angle), r * std::sin(angle), z);
  }
  return out;
}

CrookednessReport milnor_tc(const Curve& c, std::size_t n_directions, std::uint64_t seed) {
  if (n_directions < 100) throw Error(Errc::InvalidSpec, "milnor_tc needs at least 100 directions");
  const auto dirs = sphere_directions(n_directions, seed);
  std::vector<int> mu(n_directions, 0);
  std::vector<std::size_t> retries(n_directions, 0);
  const std::size_t chunks = std::min<std::size_t>(64, n_directions);
  for_each_chunk(n_directions, chunks, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Vec3 nu = dirs[k];
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(k)));
      std::normal_distribution<double> normal;
      for (int attempt = 0;; ++attempt) {
        try {
          mu[k] = crookedness(c, nu);
          break;
        } catch (const Error& e) {
          if (e.code() != Errc::DegenerateDirection || attempt > 50) throw;
          ++retries[k];
          nu = (nu + 1e-6 * Vec3(normal(rng), normal(rng), normal(rng))).normalized();
        }
      }
    }
  });
  CrookednessReport r;
  r.directions_sampled = n_directions;
  r.mu_min = std::numeric_limits<int>::max();
  double sum = 0.0;
  std::size_t ge3 = 0;
  for (std::size_t k = 0; k < n_directions; ++k) {
    r.mu_histogram[mu[k]] += 1;
    r.mu_min = std::min(r.mu_min, mu[k]);
    sum += mu[k];
    if (mu[k] >= 3) ++ge3;
    r.degenerate_resampled += retries[k];
  }
  r.tc_estimate = 2.0 * pi * sum / static_cast<double>(n_directions);
  r.fraction_mu_ge_3 = static_cast<double>(ge3) / static_cast<double>(n_directions);
  return r;
}

FaryMilnorRecord fary_milnor_check(const Curve& c, bool claimed_knotted) {
  FaryMilnorRecord r;
  r.tc = total_curvature(c);
  if (claimed_knotted) r.passes = r.tc >= fary_milnor_threshold();
  return r;
}

TangentialPairFit fit_tangential_pair(const Curve& input) {
  const Curve c = input.size() % 2 == 0 ? input : resample_arclength(input, input.size() + 1);
  const std::size_t n = c.size();
  auto distance = [&](double phi) { return c1_distance(c, tangential_pair({phi, n})); };

  constexpr int kGrid = 16;
  std::vector<double> grid(kGrid + 1);
  std::size_t best = 0;
  for (int k = 0; k <= kGrid; ++k) {
    grid[k] = distance(pi * k / kGrid);
    if (grid[k] < grid[best]) best = k;
  }
  TangentialPairFit fit{pi * static_cast<double>(best) / kGrid, grid[best]};

  double lo = pi * std::max<double>(0.0, static_cast<double>(best) - 1.0) / kGrid;
  double hi = pi * std::min<double>(kGrid, static_cast<double>(best) + 1.0) / kGrid;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = distance(x1);
  double f2 = distance(x2);
  while (hi - lo > 1e-8) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = distance(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = distance(x2);
    }
  }
  const double phi = f1 <= f2 ? x1 : x2;
  const double d = std::min(f1, f2);
  if (d < fit.c1_dist) fit = {phi, d};

  // The distance is flat near its minimum far below its own discretization
  // error, so report the smallest angle that is within kFitResolution of it.
  const double accept = fit.c1_dist * (1.0 + kFitResolution);
  double left = pi * std::max<double>(0.0, static_cast<double>(best) - 1.0) / kGrid;
  const double d_left = distance(left);
  if (d_left <= accept) return {left, d_left};
  double right = fit.phi;
  double d_right = fit.c1_dist;
  while (right - left > 1e-8) {
    const double mid = 0.5 * (left + right);
    const double d_mid = distance(mid);
    if (d_mid <= accept) {
      right = mid;
      d_right = d_mid;
    } else {
      left = mid;
    }
  }
  return {right, d_right};
}

double graph_delta(double eps) { return std::min(eps / 42.0, 1.0 / (16.0 * pi)); }

double handle_epsilon(double zeta, double phi) {
  return std::min(zeta / 64.0 * std::sin(0.5 * phi), std::sqrt(zeta / (8.0 * pi)) / 20.0);
}

double max_cylinder_radius() { return 1.0 / (96.0 * pi); }

CylinderDiagnostic two_braid_signature(const Curve& c, double phi_ref, double zeta,
                                       const CylinderOptions& opts) {
  if (!(zeta > 0.0 && zeta <= max_cylinder_radius())) {
    throw Error(Errc::InvalidSpec, "cylinder radius must lie in (0, 1/(96 pi)]");
  }
  if (!(phi_ref >= 0.0 && phi_ref <= pi)) {
    throw Error(Errc::InvalidSpec, "reference angle must lie in [0, pi]");
  }
  const std::size_t n = c.size();
  CylinderDiagnostic out;
  out.zeta = zeta;
  out.eta = std::sqrt(zeta / (8.0 * pi));
  out.phi_ref = phi_ref;

  // Closeness to the reference pair, in place (shift and orientation only).
  {
    std::vector<Vec3> ref(n);
    for (std::size_t i = 0; i < n; ++i) {
      ref[i] = tangential_pair_point(phi_ref, static_cast<double>(i) / static_cast<double>(n));
    }
    const Curve reference(std::move(ref));
    AlignmentOptions in_place;
    in_place.allow_rotation = false;
    in_place.allow_translation = false;
    in_place.allow_reflection = false;
    const auto align = c1_align(c, reference, in_place);
    out.c1_dist_to_ref = align.distance;
    double c0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = align.reversed ? (align.shift + n - i) % n : (align.shift + i) % n;
      c0 = std::max(c0, (c[i] - reference[j]).norm());
    }
    out.c0_dist_to_ref = c0;
    if (opts.strict_alignment) {
      out.alignment_bound = graph_delta(handle_epsilon(zeta, phi_ref));
      if (out.c1_dist_to_ref > out.alignment_bound) {
        throw Error(Errc::AlignmentError,
                    "C1 distance " + std::to_string(out.c1_dist_to_ref) +
                        " to the reference pair exceeds " + std::to_string(out.alignment_bound));
      }
    } else {
      out.alignment_bound = 1.0 / (16.0 * pi);
      if (out.c0_dist_to_ref > out.alignment_bound) {
        throw Error(Errc::AlignmentError,
                    "C0 distance " + std::to_string(out.c0_dist_to_ref) +
                        " to the reference pair exceeds " + std::to_string(out.alignment_bound));
      }
    }
  }

  const double h = c.length() / static_cast<double>(n);
  const std::size_t fibres =
      opts.fibres > 0 ? opts.fibres
                      : std::max<std::size_t>(129, static_cast<std::size_t>(std::ceil(8.0 * out.eta / h)) + 1);
  const double min_axial = std::sin(5.0 * pi / 180.0);

  struct Hit {
    std::size_t edge;
    Vec3 point;
  };
  std::size_t strand_a = 0, strand_b = 0;
  double beta_prev = 0.0;
  for (std::size_t f = 0; f < fibres; ++f) {
    const double xi = -out.eta + 2.0 * out.eta * static_cast<double>(f) / static_cast<double>(fibres - 1);
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = c[i];
      const Vec3& q = c[(i + 1) % n];
      const double yp = p.y() + xi;
      const double yq = q.y() + xi;
      if (!((yp <= 0.0 && yq > 0.0) || (yq <= 0.0 && yp > 0.0))) continue;
      const double lambda = yp / (yp - yq);
      const Vec3 x = p + lambda * (q - p);
      if (x.x() * x.x() + x.z() * x.z() > zeta * zeta) continue;
      const Vec3 dir = (q - p).normalized();
      if (std::abs(dir.y()) < min_axial) {
        throw Error(Errc::TransversalityError,
                    "edge " + std::to_string(i) + " is within 5 degrees of the fibre at xi=" +
                        std::to_string(xi));
      }
      hits.push_back({i, x});
    }
    if (hits.size() != 2) {
      throw Error(Errc::StrandCountError, "fibre at xi=" + std::to_string(xi) + " is met " +
                                              std::to_string(hits.size()) + " times");
    }
    if (f == 0) {
      strand_a = hits[0].edge;
      strand_b = hits[1].edge;
    } else if (cyclic_distance(hits[0].edge, strand_a, n) + cyclic_distance(hits[1].edge, strand_b, n) >
               cyclic_distance(hits[1].edge, strand_a, n) + cyclic_distance(hits[0].edge, strand_b, n)) {
      std::swap(hits[0], hits[1]);
    }
    strand_a = hits[0].edge;
    strand_b = hits[1].edge;

    const Vec3 a = hits[0].point - hits[1].point;
    const double raw = std::atan2(a.z(), a.x()) - 0.5 * phi_ref;
    double beta;
    if (f == 0) {
      beta = std::fmod(raw, 2.0 * pi);
      if (beta < 0.0) beta += 2.0 * pi;
    } else {
      const double jump = std::remainder(raw - beta_prev, 2.0 * pi);
      if (std::abs(jump) > 0.5 * pi) {
        throw Error(Errc::StrandCountError,
                    "inter-strand angle jumps by " + std::to_string(jump) + " at xi=" + std::to_string(xi));
      }
      beta = beta_prev + jump;
    }
    out.beta_samples.emplace_back(xi, beta);
    beta_prev = beta;
  }
  out.delta_beta = out.beta_samples.back().second - out.beta_samples.front().second;
  out.b = std::lround(out.delta_beta / pi);
  out.strands_ok = true;
  return out;
}

std::vector<Crossing> crossing_signs(const Curve& c, const Vec3& nu_in) {
  const std::size_t n = c.size();
  const Vec3 nu = nu_in.normalized();
  Vec3 helper = Vec3::UnitX();
  if (std::abs(nu.x()) > 0.6) helper = Vec3::UnitY();
  const Vec3 u = nu.cross(helper).normalized();
  const Vec3 w = nu.cross(u);

  std::vector<Eigen::Vector2d> p(n);
  std::vector<double> height(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = {c[i].dot(u), c[i].dot(w)};
    height[i] = c[i].dot(nu);
    scale = std::max(scale, c[i].norm());
  }
  const double tol = 1e-12 * std::max(scale, 1e-300);
  auto cross2 = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); };

  std::vector<Crossing> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a0 = p[i];
    const Eigen::Vector2d da = p[(i + 1) % n] - a0;
    const Eigen::Vector2d amin = a0.cwiseMin(a0 + da), amax = a0.cwiseMax(a0 + da);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const Eigen::Vector2d b0 = p[j];
      const Eigen::Vector2d db = p[(j + 1) % n] - b0;
      const Eigen::Vector2d bmin = b0.cwiseMin(b0 + db), bmax = b0.cwiseMax(b0 + db);
      if ((amax.array() < bmin.array()).any() || (bmax.array() < amin.array()).any()) continue;
      const double denom = cross2(da, db);
      const Eigen::Vector2d r = b0 - a0;
      if (std::abs(denom) <= 1e-14 * da.norm() * db.norm()) {
        if (std::abs(cross2(r, da)) <= tol * da.norm()) {
          throw Error(Errc::DegenerateDirection, "collinear edges in projection");
        }
        continue;
      }
      const double s = cross2(r, db) / denom;
      const double t = cross2(r, da) / denom;
      if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) continue;
      const double slack = 1e-12;
      if (s < slack || s > 1.0 - slack || t < slack || t > 1.0 - slack) {
        throw Error(Errc::DegenerateDirection, "projection passes through a vertex");
      }
      const double za = height[i] + s * (height[(i + 1) % n] - height[i]);
      const double zb = height[j] + t * (height[(j + 1) % n] - height[j]);
      if (std::abs(za - zb) <= tol) {
        throw Error(Errc::DegenerateDirection, "edges " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " intersect");
      }
      const Vec3 ea = c.edge(i);
      const Vec3 eb = c.edge(j);
      const bool a_over = za > zb;
      const Vec3 over = a_over ? ea : eb;
      const Vec3 under = a_over ? eb : ea;
      Crossing x;
      x.edge_a = i;
      x.edge_b = j;
      x.s_a = s;
      x.s_b = t;
      x.over_edge = a_over ? i : j;
      x.sign = nu.dot(over.cross(under)) > 0.0 ? 1 : -1;
      out.push_back(x);
    }
  }
  return out;
}

SphericityReport sphericity(const Curve& c) {
  const std::size_t n = c.size();
  SphericityReport r;

  // Algebraic fit: |x|^2 = 2 c.x + k, k = r^2 - |c|^2.
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.row(i) << 2.0 * c[i].x(), 2.0 * c[i].y(), 2.0 * c[i].z(), 1.0;
    rhs(i) = c[i].squaredNorm();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector4d sol = svd.solve(rhs);
  Vec3 center = sol.head<3>();
  double radius = std::sqrt(std::max(0.0, sol(3) + center.squaredNorm()));

  // Gauss-Newton on geometric residuals |x - c| - r.
  Eigen::VectorXd res(n);
  for (int iter = 0; iter < 20; ++iter) {
    Eigen::MatrixXd jac(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 d = c[i] - center;
      const double len = d.norm();
      res(i) = len - radius;
      const Vec3 g = len > 0.0 ? Vec3(-d / len) : Vec3::Zero();
      jac.row(i) << g.x(), g.y(), g.z(), -1.0;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> gn(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Vector4d step = gn.solve(-res);
    center += step.head<3>();
    radius += step(3);
    if (step.norm() <= 1e-15 * std::max(1.0, radius)) break;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = (c[i] - center).norm() - radius;
    sq += e * e;
  }
  r.best_sphere_center = center;
  r.best_sphere_radius = radius;
  r.rms_residual = std::sqrt(sq / static_cast<double>(n));

  Vec3 centroid = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) centroid += c[i];
  centroid /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) cov += (c[i] - centroid) * (c[i] - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  r.plane_normal = eig.eigenvectors().col(0);
  double psq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = (c[i] - centroid).dot(r.plane_normal);
    psq += e * e;
  }
  r.planar_rms_residual = std::sqrt(psq / static_cast<double>(n));
  return r;
}

}  // namespace eknot
