#include "eknot/optimize.hpp"

#include "eknot/diagnostics.hpp"
#include "eknot/error.hpp"
#include "eknot/families.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace eknot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Eval {
  double total = kInf;
  double thickness = 0.0;
};

Eval evaluate(const Curve& c, double theta, const OptimizeOptions& opts) {
  Eval e;
  e.thickness = thickness(c).thickness;
  const double bend = bending_energy(c);
  if (theta == 0.0) {
    e.total = bend;
  } else if (opts.repulsion == Repulsion::ropelength) {
    e.total = e.thickness > 0.0 ? bend + theta * c.length() / e.thickness : kInf;
  } else {
    e.total = e.thickness > 0.0 ? bend + theta * opts.lambda * detail::moebius_energy_free(c.vertices()) : kInf;
  }
  return e;
}

void validate(const OptimizeOptions& o, double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw Error(Errc::InvalidSpec, "theta must be a finite nonnegative number");
  if (!(o.step_size > 0.0)) throw Error(Errc::InvalidSpec, "step_size must be positive");
  if (!(o.lambda > 0.0)) throw Error(Errc::InvalidSpec, "lambda must be positive");
  if (!(o.anneal.t_start > o.anneal.t_end && o.anneal.t_end > 0.0)) {
    throw Error(Errc::InvalidSpec, "anneal schedule needs t_start > t_end > 0");
  }
  if (!(o.anneal.move_amplitude > 0.0 && o.anneal.move_amplitude < 0.25)) {
    throw Error(Errc::InvalidSpec, "move_amplitude must lie in (0, 1/4)");
  }
  if (o.anneal.moves_per_temp == 0) throw Error(Errc::InvalidSpec, "moves_per_temp must be positive");
}

// (I + alpha D^4)^-1 applied coordinatewise, D the periodic second difference.
// Modes with wavenumber below two pass nearly unchanged.
std::vector<Vec3> smooth_gradient(const std::vector<Vec3>& g) {
  const std::size_t n = g.size();
  const double alpha = std::pow(static_cast<double>(n) / (4.0 * std::numbers::pi), 4);
  Eigen::FFT<double> fft;
  std::vector<Vec3> out(n);
  std::vector<double> in(n), back;
  std::vector<std::complex<double>> spec;
  for (int d = 0; d < 3; ++d) {
    for (std::size_t i = 0; i < n; ++i) in[i] = g[i](d);
    fft.fwd(spec, in);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double lap = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
      spec[k] /= 1.0 + alpha * lap * lap;
    }
    fft.inv(back, spec);
    for (std::size_t i = 0; i < n; ++i) out[i](d) = back[i];
  }
  return out;
}

class Runner {
 public:
  Runner(const Curve& start, double theta, const OptimizeOptions& opts)
      : opts_(opts), theta_(theta), cur_(start), best_(start), rng_(opts.seed) {
    const Eval e = evaluate(cur_, theta_, opts_);
    if (!std::isfinite(e.total)) throw Error(Errc::NonFiniteEnergy, "objective is not finite at the start curve");
    energy_ = best_energy_ = e.total;
    thick_ = e.thickness;
    trace_.emplace_back(0, energy_);
  }

  void anneal(std::size_t moves, bool low_temperature) {
    const auto& s = opts_.anneal;
    const std::size_t levels = std::max<std::size_t>(1, (moves + s.moves_per_temp - 1) / s.moves_per_temp);
    std::uniform_int_distribution<std::size_t> pick(0, cur_.size() - 1);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    for (std::size_t k = 0; k < moves; ++k) {
      double temp = s.t_end;
      if (!low_temperature && levels > 1) {
        const double frac = static_cast<double>(k / s.moves_per_temp) / static_cast<double>(levels - 1);
        temp = s.t_start * std::pow(s.t_end / s.t_start, frac);
      }
      const std::size_t n = cur_.size();
      const std::size_t i = pick(rng_);
      Vec3 delta(normal(rng_), normal(rng_), normal(rng_));
      delta *= s.move_amplitude * thick_;
      const double cap = 0.25 * thick_;
      if (delta.norm() > cap) delta *= cap / delta.norm();
      const double u = unit(rng_);
      ++steps_;

      std::vector<Vec3> v(cur_.vertices().begin(), cur_.vertices().end());
      v[i] += delta;
      v[(i + 1) % n] += 0.5 * delta;
      v[(i + n - 1) % n] += 0.5 * delta;
      std::optional<Curve> trial;
      try {
        trial = project_constraints(Curve(std::move(v)));
      } catch (const Error&) {
        continue;
      }
      const Eval e = evaluate(*trial, theta_, opts_);
      if (e.thickness < 0.5 / static_cast<double>(n)) {
        ++guard_;
        continue;
      }
      const double diff = e.total - energy_;
      // Shakes inside the gradient method only take downhill moves.
      const bool ok = low_temperature ? diff < 0.0 : (diff <= 0.0 || u < std::exp(-diff / temp));
      if (!ok) continue;
      cur_ = std::move(*trial);
      energy_ = e.total;
      thick_ = e.thickness;
      ++accepted_;
      note_best();
      if (steps_ % s.moves_per_temp == 0) trace_.emplace_back(steps_, energy_);
    }
    if (trace_.back().first != steps_) trace_.emplace_back(steps_, energy_);
  }

  void gradient(std::size_t max_steps) {
    double step = opts_.step_size;
    int failures = 0;
    std::vector<double> history{energy_};
    for (std::size_t it = 0; it < max_steps; ++it) {
      ++steps_;
      const std::size_t n = cur_.size();
      std::vector<Vec3> grad(n), rep(n);
      detail::bending_gradient(cur_.vertices(), grad);
      if (theta_ > 0.0) {
        detail::moebius_gradient(cur_.vertices(), rep);
        for (std::size_t i = 0; i < n; ++i) grad[i] += theta_ * opts_.lambda * rep[i];
      }
      const std::vector<Vec3> dir = opts_.precondition ? smooth_gradient(grad) : grad;
      double max_dir = 0.0;
      for (const auto& d : dir) max_dir = std::max(max_dir, d.norm());
      if (!(max_dir > 0.0) || !std::isfinite(max_dir)) break;

      bool accepted = false;
      double s = std::min(step, 0.25 * thick_ / max_dir);
      for (int tries = 0; tries < 40; ++tries, s *= 0.5) {
        std::vector<Vec3> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = cur_[i] - s * dir[i];
        std::optional<Curve> trial;
        try {
          trial = project_constraints(Curve(std::move(v)));
        } catch (const Error&) {
          continue;
        }
        const Eval e = evaluate(*trial, theta_, opts_);
        if (e.thickness < 0.5 / static_cast<double>(n)) {
          ++guard_;
          continue;
        }
        if (e.total < energy_) {
          cur_ = std::move(*trial);
          energy_ = e.total;
          thick_ = e.thickness;
          accepted = true;
          break;
        }
      }
      if (accepted) {
        ++accepted_;
        failures = 0;
        step = 2.0 * s;
        trace_.emplace_back(steps_, energy_);
        note_best();
        history.push_back(energy_);
        if (history.size() > opts_.window) {
          const double old = history[history.size() - 1 - opts_.window];
          if ((old - energy_) <= opts_.tolerance * std::abs(old)) break;
        }
      } else if (++failures >= 3) {
        // Stagnation: shake with a short low-temperature anneal, then resume
        // from wherever it left the current iterate.
        anneal(100, true);
        failures = 0;
        step = opts_.step_size;
      } else {
        step = s;
      }
    }
  }

  MinimizeResult finish() {
    const Curve& out = best_;
    if (!(thickness(out).thickness > 0.0)) {
      throw Error(Errc::KnotGuardViolation, "final curve is not embedded");
    }
    MinimizeResult r{out, total_energy(out, theta_, opts_.repulsion, opts_.lambda), steps_, accepted_,
                     std::move(trace_), guard_};
    if (!std::isfinite(r.report.total)) throw Error(Errc::NonFiniteEnergy, "final energy is not finite");
    return r;
  }

 private:
  void note_best() {
    if (energy_ < best_energy_) {
      best_energy_ = energy_;
      best_ = cur_;
    }
  }

  const OptimizeOptions& opts_;
  double theta_;
  Curve cur_;
  Curve best_;
  double energy_ = kInf;
  double best_energy_ = kInf;
  double thick_ = 0.0;
  std::mt19937_64 rng_;
  std::size_t steps_ = 0;
  std::size_t accepted_ = 0;
  std::size_t guard_ = 0;
  std::vector<std::pair<std::size_t, double>> trace_;
};

}  // namespace

Curve project_constraints(const Curve& c) {
  if (!(c.length() >= 1e-9)) throw Error(Errc::DegenerateCurve, "curve length below 1e-9");
  return rescale_to_unit(resample_arclength(c, c.size()));
}

double objective(const Curve& c, double theta, const OptimizeOptions& opts) {
  return evaluate(c, theta, opts).total;
}

MinimizeResult minimize(const Curve& start, double theta, const OptimizeOptions& opts) {
  validate(opts, theta);
  Runner run(start, theta, opts);
  switch (opts.method) {
    case Method::gradient:
      run.gradient(opts.max_steps);
      break;
    case Method::anneal:
      run.anneal(opts.max_steps, false);
      break;
    case Method::hybrid:
      run.anneal(opts.max_steps, false);
      run.gradient(opts.polish_steps);
      break;
  }
  return run.finish();
}

std::vector<SweepRow> theta_sweep(const Curve& start, const std::vector<double>& thetas,
                                  const OptimizeOptions& opts, std::optional<ComparisonKnot> comparison,
                                  std::vector<Curve>* minimizers) {
  if (thetas.empty()) throw Error(Errc::InvalidSpec, "theta list is empty");
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    if (!(thetas[k] > 0.0)) throw Error(Errc::InvalidSpec, "thetas must be positive");
    if (k > 0 && !(thetas[k] < thetas[k - 1])) throw Error(Errc::InvalidSpec, "thetas must be strictly decreasing");
  }
  std::vector<SweepRow> rows;
  Curve cur = start;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    OptimizeOptions o = opts;
    o.seed = opts.seed + k;
    const double theta = thetas[k];
    MinimizeResult res = minimize(cur, theta, o);
    cur = res.curve;
    SweepRow row;
    row.theta = theta;
    row.bending = res.report.bending;
    row.ropelength = res.report.ropelength;
    row.total = row.bending + theta * row.ropelength;
    row.total_curvature = res.report.total_curvature;
    const auto fit = fit_tangential_pair(cur);
    row.phi_fit = fit.phi;
    row.c1_dist_to_fit = fit.c1_dist;
    row.comparison_total = std::numeric_limits<double>::quiet_NaN();
    if (comparison) {
      const Curve knot = torus_knot({comparison->a, comparison->b, std::cbrt(theta), cur.size()});
      row.comparison_total = total_energy(knot, theta).total;
    }
    rows.push_back(row);
    if (minimizers) minimizers->push_back(cur);
  }
  return rows;
}

}  // namespace eknot
