#pragma once

// Time-dependent generators. The drift semigroup is replaced by the
// time-ordered propagator V(s, t) = T exp(int_s^t J(u) du), approximated by a
// truncated Dyson series on a uniform grid, and the jump superoperator is
// sampled at each quadrature node.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lindblad/channel.hpp"
#include "lindblad/duhamel.hpp"
#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"
#include "lindblad/model.hpp"

namespace lindblad {

struct GeneratorSample {
  Matrix hamiltonian;
  std::vector<Matrix> jumps;
};

using GeneratorSampler = std::function<GeneratorSample(double)>;

/// Sampler plus sup-norm bounds alpha_0 >= |H(t)|, alpha_j >= |L_j(t)| and
/// jdot >= |dJ/dt| over the horizon. The sampler must be pure in t.
class TimeDependentLindbladian {
 public:
  TimeDependentLindbladian(GeneratorSampler sampler, Eigen::Index dim,
                           std::size_t num_jumps, double alpha0,
                           std::vector<double> alphas, double derivative_bound)
      : sampler_(std::move(sampler)),
        dim_(dim),
        num_jumps_(num_jumps),
        alpha0_(alpha0),
        alphas_(std::move(alphas)),
        jdot_(derivative_bound) {
    if (dim_ < 2) throw ModelError("dimension must be at least 2");
    if (alphas_.size() != num_jumps_) {
      throw ModelError("alphas length does not match the number of jumps");
    }
    if (!(alpha0_ >= 0.0) || !(jdot_ >= 0.0)) {
      throw ModelError("norm and derivative bounds must be nonnegative");
    }
    for (double a : alphas_) {
      if (!(a >= 0.0)) throw ModelError("alpha_j must be nonnegative");
    }
  }

  /// A constant generator; the derivative bound is zero.
  static TimeDependentLindbladian constant(const Lindbladian& l) {
    GeneratorSample s{l.hamiltonian(), l.jumps()};
    return {[s](double) { return s; }, l.dim(), l.num_jumps(), l.alpha0(),
            l.alphas(), 0.0};
  }

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t num_jumps() const noexcept { return num_jumps_; }
  double alpha0() const noexcept { return alpha0_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double derivative_bound() const noexcept { return jdot_; }

  double be_norm() const { return lindblad::be_norm(alpha0_, alphas_); }
  double jump_weight() const {
    double s = 0.0;
    for (double a : alphas_) s += a * a;
    return s;
  }

  /// Raw sample without validation.
  GeneratorSample raw(double t) const { return sampler_(t); }

  /// Sample checked for shape, Hermiticity and the declared norm bounds.
  GeneratorSample sample(double t) const {
    GeneratorSample s = sampler_(t);
    const auto& h = s.hamiltonian;
    if (h.rows() != dim_ || h.cols() != dim_) {
      throw ModelError("sampled Hamiltonian has the wrong dimension");
    }
    if (s.jumps.size() != num_jumps_) {
      throw ModelError("sampler returned the wrong number of jumps");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermiticity_residual(h) > kHermitianTolerance * scale) {
      throw ModelError("sampled Hamiltonian is not Hermitian at t = " +
                       std::to_string(t));
    }
    if (spectral_norm(h) > alpha0_ * (1.0 + 1e-12) + 1e-12) {
      throw ModelError("|H(t)| exceeds alpha0 at t = " + std::to_string(t));
    }
    for (std::size_t j = 0; j < num_jumps_; ++j) {
      const auto& l = s.jumps[j];
      if (l.rows() != dim_ || l.cols() != dim_) {
        throw ModelError("sampled jump operator has the wrong dimension");
      }
      if (spectral_norm(l) > alphas_[j] * (1.0 + 1e-12) + 1e-12) {
        throw ModelError("|L_" + std::to_string(j) +
                         "(t)| exceeds its alpha at t = " + std::to_string(t));
      }
    }
    return s;
  }

  /// J(t) = -i H(t) - (1/2) sum_j L_j(t)^+ L_j(t).
  Matrix generator(double t) const {
    const GeneratorSample s = sampler_(t);
    return effective_generator(s.hamiltonian, s.jumps);
  }

  /// Lindbladian frozen at time t, validated.
  Lindbladian at(double t) const {
    GeneratorSample s = sample(t);
    return Lindbladian::make(std::move(s.hamiltonian), std::move(s.jumps),
                             alpha0_, alphas_);
  }

 private:
  GeneratorSampler sampler_;
  Eigen::Index dim_;
  std::size_t num_jumps_;
  double alpha0_;
  std::vector<double> alphas_;
  double jdot_;
};

/// Generator interpolated linearly between operators tabulated at strictly
/// increasing times and held constant outside the table. Norms of affine
/// families are convex and dJ/dt is affine on each cell, so the sup bounds
/// are attained at table entries and are computed exactly. A declared
/// derivative bound below the exact one is rejected.
inline TimeDependentLindbladian piecewise_linear(
    std::vector<double> times, std::vector<Matrix> hamiltonians,
    std::vector<std::vector<Matrix>> jumps,
    std::optional<double> declared_derivative_bound = std::nullopt) {
  const std::size_t n = times.size();
  if (n < 1 || hamiltonians.size() != n) {
    throw ModelError("time table and Hamiltonian table must have equal length");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ModelError("tabulated times must be strictly increasing");
    }
  }
  for (const auto& series : jumps) {
    if (series.size() != n) {
      throw ModelError("each jump table must match the time table length");
    }
  }
  const Eigen::Index d = hamiltonians.front().rows();
  double alpha0 = 0.0;
  std::vector<double> alphas(jumps.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix& h = hamiltonians[i];
    if (h.rows() != d || h.cols() != d) {
      throw ModelError("tabulated Hamiltonians must share one dimension");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermiticity_residual(h) > kHermitianTolerance * scale) {
      throw ModelError("tabulated Hamiltonian " + std::to_string(i) +
                       " is not Hermitian");
    }
    alpha0 = std::max(alpha0, spectral_norm(h));
    for (std::size_t j = 0; j < jumps.size(); ++j) {
      const Matrix& l = jumps[j][i];
      if (l.rows() != d || l.cols() != d) {
        throw ModelError("tabulated jump dimension does not match H");
      }
      alphas[j] = std::max(alphas[j], spectral_norm(l));
    }
  }

  double jdot = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = times[i + 1] - times[i];
    const Matrix dh = (hamiltonians[i + 1] - hamiltonians[i]) / dt;
    for (std::size_t end = i; end <= i + 1; ++end) {
      Matrix dj = -kI * dh;
      for (const auto& series : jumps) {
        const Matrix dl = (series[i + 1] - series[i]) / dt;
        dj -= 0.5 * (dl.adjoint() * series[end] + series[end].adjoint() * dl);
      }
      jdot = std::max(jdot, spectral_norm(dj));
    }
  }
  if (declared_derivative_bound) {
    if (*declared_derivative_bound < jdot * (1.0 - 1e-12)) {
      throw ModelError("declared derivative bound " +
                       std::to_string(*declared_derivative_bound) +
                       " is below the tabulated sup |dJ/dt| = " +
                       std::to_string(jdot));
    }
    jdot = *declared_derivative_bound;
  }

  auto sampler = [times = std::move(times), hs = std::move(hamiltonians),
                  js = std::move(jumps)](double t) {
    const std::size_t n = times.size();
    std::size_t i = 0;
    double f = 0.0;
    if (n > 1 && t > times.front()) {
      if (t >= times.back()) {
        i = n - 2;
        f = 1.0;
      } else {
        i = static_cast<std::size_t>(
                std::upper_bound(times.begin(), times.end(), t) -
                times.begin()) -
            1;
        f = (t - times[i]) / (times[i + 1] - times[i]);
      }
    }
    auto lerp = [&](const std::vector<Matrix>& m) -> Matrix {
      if (n == 1) return m.front();
      return (1.0 - f) * m[i] + f * m[i + 1];
    };
    GeneratorSample s;
    s.hamiltonian = lerp(hs);
    for (const auto& series : js) s.jumps.push_back(lerp(series));
    return s;
  };
  const std::size_t m = alphas.size();
  return {std::move(sampler), d, m, alpha0, std::move(alphas), jdot};
}

struct DysonConfig {
  int order = 0;  // truncation order K_d
  int grid = 1;   // M grid points per interval
};

/// Truncated discretized Dyson series for V(s, t): the degree <= K_d part of
/// prod_{j=M-1}^{0} exp(h J(t_j)), h = (t - s) / M, t_j = s + j h. Expanding
/// the product gives sum_k h^k / k! sum over all M^k index tuples of the
/// time-ordered products J(t_(k)) ... J(t_(1)).
inline Matrix ordered_propagator(const TimeDependentLindbladian& tl, double s,
                                 double t, const DysonConfig& cfg) {
  if (!(s <= t)) throw ArgumentError("ordered_propagator: requires s <= t");
  if (cfg.order < 0) throw ArgumentError("Dyson order must be >= 0");
  if (cfg.grid < 1) throw ArgumentError("Dyson grid count must be >= 1");
  const Eigen::Index d = tl.dim();
  const int K = cfg.order;
  if (s == t || K == 0) return identity(d);
  const double h = (t - s) / cfg.grid;

  std::vector<Matrix> by_degree(K + 1, Matrix::Zero(d, d));
  by_degree[0] = identity(d);
  Matrix step(d, d);
  Matrix acc(d, d);
  Matrix tmp(d, d);
  for (int j = 0; j < cfg.grid; ++j) {
    step = h * tl.generator(s + j * h);
    // P_n += sum_{r=1}^{n} step^r / r! P_{n-r}, highest degree first so the
    // lower degrees still hold their previous values.
    for (int n = K; n >= 1; --n) {
      acc = by_degree[0];
      for (int r = n; r >= 2; --r) {
        tmp.noalias() = step * acc;
        acc = by_degree[n - r + 1] + tmp / static_cast<double>(r);
      }
      tmp.noalias() = step * acc;
      by_degree[n] += tmp;
    }
  }
  Matrix out = by_degree[0];
  for (int n = 1; n <= K; ++n) out += by_degree[n];
  return out;
}

/// e^{b D} (b D)^{K+1} / (K+1)! + D^2 jdot / M, with b the be-norm bound on
/// |J| and D = t - s.
inline double dyson_error_bound(const TimeDependentLindbladian& tl, double s,
                                double t, const DysonConfig& cfg) {
  const double delta = t - s;
  const double x = tl.be_norm() * delta;
  double trunc = 0.0;
  if (x > 0.0) {
    trunc = std::exp(x + (cfg.order + 1) * std::log(x) -
                     std::lgamma(cfg.order + 2.0));
  }
  return trunc + delta * delta * tl.derivative_bound() / cfg.grid;
}

struct TdOptions {
  std::optional<int> dyson_order;  // default: the Taylor order K'
  std::optional<int> grid;         // default: sized from the budget
  unsigned workers = 1;
  WeightSumConvention convention = WeightSumConvention::kConservative;
};

struct TdReport {
  double total_time = 0.0;
  double eps = 0.0;
  int segments = 0;
  double segment_time = 0.0;
  TruncationConfig config;
  DysonConfig dyson;
  double bound_duhamel = 0.0;
  double bound_quadrature = 0.0;
  double bound_dyson = 0.0;
  double bound_total = 0.0;
};

struct TdResult {
  Matrix rho;
  TdReport report;
};

/// Segment superoperator on [start, start + tau] for a time-dependent
/// generator. Jump superoperators are validated as they are sampled.
inline Superoperator td_segment(const TimeDependentLindbladian& tl,
                                double start, double tau,
                                const TruncationConfig& cfg,
                                const DysonConfig& dyson,
                                unsigned workers = 1) {
  auto drift = [&](double a, double b) -> Matrix {
    return Superoperator::kraus(
               ordered_propagator(tl, start + a, start + b, dyson))
        .matrix();
  };
  auto jump = [&](double x) -> Matrix {
    const GeneratorSample s = tl.sample(start + x);
    return jump_superoperator(tl.dim(), s.jumps).matrix();
  };
  return duhamel_quadrature_sum(tl.dim(), tau, cfg.K, cfg.q, drift, jump,
                                workers);
}

/// Same segmented pipeline as simulate(). The per-segment budget eps / n is
/// split evenly over Duhamel truncation, quadrature, Dyson truncation and the
/// Dyson grid; a generator with zero derivative bound has no grid error and
/// hands its share back to the other three.
inline TdResult td_simulate(const TimeDependentLindbladian& tl,
                            const Matrix& rho0, double t, double eps,
                            const TdOptions& opts = {}) {
  validate_density_matrix(rho0, tl.dim());
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ArgumentError("td_simulate: t must be finite and >= 0");
  }
  if (!(eps > 0.0)) throw ArgumentError("td_simulate: eps must be > 0");
  if (opts.dyson_order && *opts.dyson_order < 0) {
    throw ArgumentError("Dyson order must be >= 0");
  }
  if (opts.grid && *opts.grid < 1) {
    throw ArgumentError("Dyson grid count must be >= 1");
  }

  TdResult res;
  res.report.total_time = t;
  res.report.eps = eps;
  if (t == 0.0) {
    res.rho = rho0;
    return res;
  }
  const double be = tl.be_norm();
  const double t_star =
      segment_time(be, tl.jump_weight(), t, opts.convention);
  const int n = segment_count(t, t_star);
  const double tau = t / n;
  const double eps_seg = eps / n;
  const bool has_grid_error = tl.derivative_bound() > 0.0;
  const double order_budget = has_grid_error ? 0.75 * eps_seg : eps_seg;

  TruncationConfig cfg =
      choose_orders(be, tl.num_jumps() > 0, tau, order_budget);
  cfg.num_segments = n;
  DysonConfig dyson;
  dyson.order = opts.dyson_order.value_or(cfg.Kp);
  if (opts.grid) {
    dyson.grid = *opts.grid;
  } else if (has_grid_error) {
    const double m =
        std::ceil(tau * tau * tl.derivative_bound() / (0.25 * eps_seg));
    if (m > 1e7) {
      throw ResourceLimitError("Dyson grid would exceed 1e7 points");
    }
    dyson.grid = std::max(1, static_cast<int>(m));
  }

  // Norm bounds are also checked on a fixed grid covering the horizon.
  for (int i = 0; i <= 64 * n; ++i) tl.sample(t * i / (64.0 * n));

  Vector v = vec(rho0);
  for (int i = 0; i < n; ++i) {
    const Superoperator seg =
        td_segment(tl, i * tau, tau, cfg, dyson, opts.workers);
    v = (seg.matrix() * v).eval();
  }
  res.rho = unvec(v, tl.dim());

  auto& rep = res.report;
  rep.segments = n;
  rep.segment_time = tau;
  rep.config = cfg;
  rep.dyson = dyson;
  rep.bound_duhamel =
      tl.num_jumps() > 0 ? bound_duhamel(cfg.K, tau, be) : 0.0;
  rep.bound_quadrature = bound_quadrature_total(cfg.K, cfg.q, tau, be);
  rep.bound_dyson = dyson_error_bound(tl, 0.0, tau, dyson);
  rep.bound_total =
      n * (rep.bound_duhamel + rep.bound_quadrature + rep.bound_dyson);
  return res;
}

}  // namespace lindblad
