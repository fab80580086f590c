#pragma once

// Higher-order Duhamel expansion of exp(tL) into a completely positive map.
//
// With L = L_D + L_J, L_D(rho) = J rho + rho J^+ and L_J(rho) = sum L_j rho
// L_j^+, iterating Duhamel's formula K times gives
//
//   G_K(t) = K[e^{Jt}] + sum_{k=1}^{K} int_{0<=s_1<=...<=s_k<=t} F_k(s) ds,
//   F_k(s) = K[e^{J(t-s_k)}] L_J K[e^{J(s_k-s_{k-1})}] ... L_J K[e^{J s_1}],
//
// whose remainder is bounded by (2 beta t)^{K+1} / (K+1)!, beta = |L|_be.
// The simplex integrals are discretized with the nested Gauss-Legendre grid
// of quadrature.hpp and each drift exponential is replaced by its order-K'
// Taylor polynomial, which yields explicit Kraus operators A_j.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindblad/channel.hpp"
#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"
#include "lindblad/model.hpp"
#include "lindblad/parallel.hpp"
#include "lindblad/quadrature.hpp"

namespace lindblad {

inline constexpr int kMaxOrder = 40;
inline constexpr std::uint64_t kMaxMaterializedKrausTerms = 1'000'000;

struct TruncationConfig {
  int K = 0;   // Duhamel order
  int Kp = 0;  // Taylor order of the drift
  int q = 1;   // quadrature order
  double segment_time = 0.0;
  int num_segments = 1;
};

/// sum_{l=0}^{Kp} (J s)^l / l!.
inline Matrix taylor_series(const Matrix& j, double s, int kp) {
  if (kp < 0) throw ArgumentError("taylor order must be >= 0");
  Matrix sum = identity(j.rows());
  Matrix term = sum;
  for (int l = 1; l <= kp; ++l) {
    term = (term * j) * (s / l);
    sum += term;
  }
  return sum;
}

inline Matrix taylor_drift(const Lindbladian& l, double s, int kp) {
  if (!(s >= 0.0)) throw ArgumentError("taylor_drift: s must be >= 0");
  return taylor_series(effective_generator(l), s, kp);
}

/// F_k(s_k, ..., s_1) with exact drift exponentials. `s` holds s_1 <= ... <=
/// s_k; an empty `s` gives K[e^{Jt}].
inline Superoperator f_k(const Lindbladian& l, double t,
                         std::span<const double> s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = i == 0 ? 0.0 : s[i - 1];
    if (!(s[i] >= lo) || s[i] > t) {
      throw ArgumentError("f_k: times must satisfy 0 <= s_1 <= ... <= s_k <= t");
    }
  }
  const Matrix j = effective_generator(l);
  const Matrix lj = jump_superoperator(l).matrix();
  auto drift = [&](double a, double b) {
    return Superoperator::kraus(expm((b - a) * j)).matrix();
  };
  Matrix out = drift(0.0, s.empty() ? t : s[0]);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double upper = i + 1 < s.size() ? s[i + 1] : t;
    out = (drift(s[i], upper) * lj * out).eval();
  }
  return {l.dim(), std::move(out)};
}

namespace detail {

inline double count_tree_nodes(int k_max, int q) {
  double total = 0.0;
  double level = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    level *= q;
    total += level;
  }
  return total;
}

// Depth-first accumulation of sum_k sum_tuples w(tuple) F_k(tuple). A node at
// depth l holds the prefix
//   D(x_1, tau) J(x_1) D(x_2, x_1) J(x_2) ... D(x_l, x_{l-1}) J(x_l)
// in local time, and closes it with D(0, x_l) to form one F_l term. The
// prefixes do not depend on the final order k, so one tree of depth K serves
// every order at once.
template <class Drift, class Jump>
class DuhamelTree {
 public:
  DuhamelTree(const QuadratureRule& rule, int k_max, Drift& drift, Jump& jump,
              Eigen::Index n)
      : rule_(rule), k_max_(k_max), drift_(drift), jump_(jump), n_(n) {}

  Matrix branch(int j) {
    prefix_.assign(k_max_ + 1, Matrix());
    prefix_[0] = Matrix::Identity(n_, n_);
    acc_ = Matrix::Zero(n_, n_);
    visit(0, j, rule_.interval_length, 1.0);
    return acc_;
  }

 private:
  void visit(int level, int j, double parent, double weight) {
    const double tau = rule_.interval_length;
    const double x = rescale(rule_.nodes[j], parent, tau);
    const double w = weight * rescale(rule_.weights[j], parent, tau);
    tmp_.noalias() = prefix_[level] * drift_(x, parent);
    {
      const auto& jm = jump_(x);
      prefix_[level + 1].noalias() = tmp_ * jm;
    }
    tmp_.noalias() = prefix_[level + 1] * drift_(0.0, x);
    acc_ += w * tmp_;
    if (level + 1 < k_max_) {
      for (int c = 0; c < rule_.order; ++c) visit(level + 1, c, x, w);
    }
  }

  const QuadratureRule& rule_;
  int k_max_;
  Drift& drift_;
  Jump& jump_;
  Eigen::Index n_;
  std::vector<Matrix> prefix_;
  Matrix acc_;
  Matrix tmp_;
};

}  // namespace detail

/// Quadrature-discretized Duhamel sum over [0, tau] for generic drift
/// propagators drift(a, b) (superoperator matrix from local time a to b) and
/// jump superoperators jump(x). Branches below the first level are evaluated
/// independently and summed in index order, so the result does not depend on
/// `workers`.
template <class Drift, class Jump>
Superoperator duhamel_quadrature_sum(Eigen::Index dim, double tau, int k_max,
                                     int q, Drift&& drift, Jump&& jump,
                                     unsigned workers = 1) {
  if (k_max < 0) throw ArgumentError("Duhamel order must be >= 0");
  if (!(tau > 0.0)) {
    if (tau == 0.0) return Superoperator::identity(dim);
    throw ArgumentError("segment time must be >= 0");
  }
  Matrix total = drift(0.0, tau);
  if (k_max == 0) return {dim, std::move(total)};
  if (detail::count_tree_nodes(k_max, q) > kMaxGridTerms) {
    throw ResourceLimitError("Duhamel quadrature tree exceeds 1e8 nodes");
  }
  const QuadratureRule rule = canonical_rule(q, tau);
  const Eigen::Index n = dim * dim;
  auto branches = parallel_map(
      static_cast<std::size_t>(q), workers, [&](std::size_t j) {
        detail::DuhamelTree<std::remove_reference_t<Drift>,
                            std::remove_reference_t<Jump>>
            tree(rule, k_max, drift, jump, n);
        return tree.branch(static_cast<int>(j));
      });
  for (const auto& b : branches) total += b;
  return {dim, std::move(total)};
}

/// Quadrature discretization of G_K(t) with exact drift exponentials.
inline Superoperator g_K_quadrature(const Lindbladian& l, double t, int K,
                                    int q, unsigned workers = 1) {
  const Matrix j = effective_generator(l);
  const Matrix lj = jump_superoperator(l).matrix();
  auto drift = [&](double a, double b) -> Matrix {
    return Superoperator::kraus(expm((b - a) * j)).matrix();
  };
  auto jump = [&](double) -> const Matrix& { return lj; };
  return duhamel_quadrature_sum(l.dim(), t, K, q, drift, jump, workers);
}

/// The channel approximant with Taylor-truncated drift: the superoperator of
/// the full Kraus family A_0, A_j. Summing over jump labels inside L_J makes
/// this route cost q^K rather than (mq)^K.
inline Superoperator approximant_superoperator(const Lindbladian& l, double t,
                                               int K, int Kp, int q,
                                               unsigned workers = 1) {
  const Matrix j = effective_generator(l);
  const Matrix lj = jump_superoperator(l).matrix();
  auto drift = [&](double a, double b) -> Matrix {
    return Superoperator::kraus(taylor_series(j, b - a, Kp)).matrix();
  };
  auto jump = [&](double) -> const Matrix& { return lj; };
  return duhamel_quadrature_sum(l.dim(), t, K, q, drift, jump, workers);
}

// ---------------------------------------------------------------------------
// Explicit Kraus operators.

/// One Kraus operator coefficient * matrix. `ells` and `js` are ordered from
/// the earliest jump (l_1, j_1) to the latest (l_k, j_k); all indices are
/// zero-based.
struct KrausTerm {
  int k = 0;
  std::vector<int> ells;
  std::vector<int> js;
  double coefficient = 1.0;  // sqrt of the nested weight product
  Matrix matrix;             // A_j without the coefficient
  double normalizer = 0.0;   // coefficient * e^{beta t} * prod alpha_l

  Matrix kraus_operator() const { return coefficient * matrix; }
};

struct CPMapApprox {
  Eigen::Index dim = 0;
  double time = 0.0;
  TruncationConfig config;
  std::vector<KrausTerm> terms;

  Superoperator as_superoperator() const {
    Superoperator s = Superoperator::zero(dim);
    for (const auto& term : terms) {
      const Matrix a = term.kraus_operator();
      s.matrix() += kron(a.conjugate(), a);
    }
    return s;
  }
};

/// 1 + sum_{k=1}^{K} (m q)^k, saturating at the uint64 maximum.
inline std::uint64_t kraus_term_count(std::size_t m, int q, int K) {
  const long double mq = static_cast<long double>(m) * q;
  long double total = 1.0L;
  long double level = 1.0L;
  for (int k = 1; k <= K; ++k) {
    level *= mq;
    total += level;
  }
  if (total >= static_cast<long double>(
                   std::numeric_limits<std::uint64_t>::max())) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(total);
}

/// Visits every Kraus term in order: k ascending, then lexicographic over
/// (j_k, l_k, j_{k-1}, l_{k-1}, ..., j_1, l_1). Only one term is alive at a
/// time.
template <class F>
void for_each_kraus_term(const Lindbladian& l, double t,
                         const TruncationConfig& cfg, F&& visit) {
  if (!(t > 0.0)) throw ArgumentError("Kraus enumeration needs t > 0");
  const std::size_t m = l.num_jumps();
  if (cfg.K > 0 && m == 0) {
    throw ArgumentError("Kraus terms with k >= 1 need at least one jump");
  }
  if (static_cast<double>(kraus_term_count(m, cfg.q, cfg.K)) > kMaxGridTerms) {
    throw ResourceLimitError("Kraus term count exceeds 1e8");
  }
  const Matrix j = effective_generator(l);
  const double ebt = std::exp(be_norm(l) * t);
  const auto taylor = [&](double s) { return taylor_series(j, s, cfg.Kp); };

  KrausTerm term;
  term.matrix = taylor(t);
  term.normalizer = ebt;
  visit(static_cast<const KrausTerm&>(term));
  if (cfg.K == 0) return;

  const QuadratureRule rule = canonical_rule(cfg.q, t);
  for (int k = 1; k <= cfg.K; ++k) {
    term.k = k;
    term.ells.assign(k, 0);
    term.js.assign(k, 0);
    std::vector<Matrix> prefix(k + 1);
    prefix[0] = identity(l.dim());
    // level 0 chooses (j_k, l_k), level k-1 chooses (j_1, l_1).
    std::function<void(int, double, double, double)> rec =
        [&](int level, double parent, double weight, double alpha_prod) {
          const int slot = k - 1 - level;
          for (int jj = 0; jj < cfg.q; ++jj) {
            const double x = rescale(rule.nodes[jj], parent, t);
            const double w = weight * rescale(rule.weights[jj], parent, t);
            const Matrix drift = prefix[level] * taylor(parent - x);
            for (std::size_t ll = 0; ll < m; ++ll) {
              prefix[level + 1].noalias() = drift * l.jumps()[ll];
              term.js[slot] = jj;
              term.ells[slot] = static_cast<int>(ll);
              const double a = alpha_prod * l.alphas()[ll];
              if (level + 1 == k) {
                term.coefficient = std::sqrt(w);
                term.matrix = prefix[level + 1] * taylor(x);
                term.normalizer = term.coefficient * ebt * a;
                visit(static_cast<const KrausTerm&>(term));
              } else {
                rec(level + 1, x, w, a);
              }
            }
          }
        };
    rec(0, t, 1.0, 1.0);
  }
}

/// Materializes the Kraus family of the approximant on [0, t].
inline CPMapApprox enumerate_kraus(const Lindbladian& l, double t,
                                   const TruncationConfig& cfg) {
  const std::uint64_t count = kraus_term_count(l.num_jumps(), cfg.q, cfg.K);
  if (count > kMaxMaterializedKrausTerms) {
    throw ResourceLimitError("enumerate_kraus: " + std::to_string(count) +
                             " terms exceed the materialization limit");
  }
  CPMapApprox cp{l.dim(), t, cfg, {}};
  cp.terms.reserve(count);
  for_each_kraus_term(l, t, cfg,
                      [&](const KrausTerm& term) { cp.terms.push_back(term); });
  return cp;
}

/// sum_j s_j^2 over the enumerated terms, A_0 included.
inline double normalizer_sum_squares(const CPMapApprox& cp) {
  CompensatedSum s;
  for (const auto& term : cp.terms) s.add(term.normalizer * term.normalizer);
  return s.value();
}

/// e^{2 beta t} sum_{k=0}^{K} (sum alpha_j^2)^k W_k, W_k the nested weight
/// total of depth k.
inline double normalizer_sum_squares_closed_form(const Lindbladian& l,
                                                 double t, int K, int q) {
  const double s = l.jump_weight();
  CompensatedSum acc;
  double sk = 1.0;
  for (int k = 0; k <= K; ++k) {
    acc.add(sk * nested_weight_sum(k, q, t));
    sk *= s;
  }
  return std::exp(2.0 * be_norm(l) * t) * acc.value();
}

// ---------------------------------------------------------------------------
// Segment budget.

/// Which closed form of the nested weight total sizes the segments.
enum class WeightSumConvention {
  /// t^k / (k-1)!: bound e^{2bt} + t S e^{2bt} e^{tS} (the conservative one).
  kConservative,
  /// t^k / k!: bound e^{2bt} e^{tS}.
  kExact,
};

inline double segment_budget_expression(double beta, double jump_weight,
                                        double t,
                                        WeightSumConvention conv =
                                            WeightSumConvention::kConservative) {
  const double e2 = std::exp(2.0 * beta * t);
  if (conv == WeightSumConvention::kExact) {
    return e2 * std::exp(t * jump_weight);
  }
  return e2 + t * jump_weight * e2 * std::exp(t * jump_weight);
}

/// Largest t with budget expression <= 2 (so the LCU success probability of
/// one segment is at least 1/2 before dilution), capped at `cap`.
inline double segment_time(double beta, double jump_weight, double cap,
                           WeightSumConvention conv =
                               WeightSumConvention::kConservative) {
  if (beta <= 0.0) return cap;
  auto f = [&](double t) {
    return segment_budget_expression(beta, jump_weight, t, conv);
  };
  double lo = 0.0;
  double hi = 1.0 / beta;
  while (f(hi) <= 2.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 2.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::min(lo, cap);
}

inline double segment_time(const Lindbladian& l, double cap,
                           WeightSumConvention conv =
                               WeightSumConvention::kConservative) {
  return segment_time(be_norm(l), l.jump_weight(), cap, conv);
}

/// Number of equal segments covering [0, t] with each at most t_star long.
inline int segment_count(double t, double t_star) {
  return std::max(1, static_cast<int>(std::ceil(t / t_star - 1e-12)));
}

// ---------------------------------------------------------------------------
// Error bounds. All are evaluated in log space to survive large orders.

/// (2 beta t)^{K+1} / (K+1)!.
inline double bound_duhamel(int K, double t, double be) {
  const double x = 2.0 * be * t;
  if (x == 0.0) return 0.0;
  return std::exp((K + 1) * std::log(x) - std::lgamma(K + 2.0));
}

/// 8 e^{beta t} (beta t)^{K'+1} / (K'+1)!.
inline double bound_taylor(int Kp, double t, double be) {
  const double x = be * t;
  if (x == 0.0) return 0.0;
  return 8.0 * std::exp(x + (Kp + 1) * std::log(x) - std::lgamma(Kp + 2.0));
}

/// 8 e^{beta t} beta^{K'+1} / (K'+1)! (2 beta)^k 2^k t^{K'+1}.
inline double bound_composite(int k, int Kp, double t, double be) {
  return bound_taylor(Kp, t, be) * std::pow(4.0 * be, k);
}

/// (2t)^{k-1} 2^{k+1} beta^k beta^{2q} t^{2q+1} q / ((k-1)! (2q)!) with unit
/// leading constant, using |J| <= beta.
inline double bound_quadrature(int k, int q, double t, double be) {
  if (k < 1) return 0.0;
  if (be == 0.0 || t == 0.0) return 0.0;
  const double log_val = (k - 1) * std::log(2.0 * t) + (k + 1) * std::log(2.0) +
                         (k + 2.0 * q) * std::log(be) +
                         (2.0 * q + 1.0) * std::log(t) + std::log(q) -
                         std::lgamma(k) - std::lgamma(2.0 * q + 1.0);
  return std::exp(log_val);
}

inline double bound_quadrature_total(int K, int q, double t, double be) {
  double s = 0.0;
  for (int k = 1; k <= K; ++k) s += bound_quadrature(k, q, t, be);
  return s;
}

/// Accumulated Taylor-drift error of all k >= 1 terms:
/// 32 e^{5 beta t} beta^{K'+2} t^{K'+2} / (K'+1)!.
inline double bound_taylor_jump_terms(int K, int Kp, double t, double be) {
  if (K < 1) return 0.0;
  const double x = be * t;
  if (x == 0.0) return 0.0;
  return 32.0 * std::exp(5.0 * x + (Kp + 2) * std::log(x) - std::lgamma(Kp + 2.0));
}

/// Taylor budget of a segment: the A_0 drift plus every jump term.
inline double bound_taylor_total(int K, int Kp, double t, double be) {
  return bound_taylor(Kp, t, be) + bound_taylor_jump_terms(K, Kp, t, be);
}

struct OrderBounds {
  double duhamel = 0.0;
  double quadrature = 0.0;
  double taylor = 0.0;
  double total() const { return duhamel + quadrature + taylor; }
};

inline OrderBounds segment_bounds(double be, double t,
                                  const TruncationConfig& cfg,
                                  bool has_jumps = true) {
  OrderBounds b;
  b.duhamel = has_jumps ? bound_duhamel(cfg.K, t, be) : 0.0;
  b.quadrature = bound_quadrature_total(cfg.K, cfg.q, t, be);
  b.taylor = bound_taylor_total(cfg.K, cfg.Kp, t, be);
  return b;
}

/// Smallest orders meeting eps/3 for each error source on a segment of
/// length t with be-norm `be`. The Taylor order must also satisfy
/// (K'+1)! >= 8 e^{beta t} (beta t)^{K'+1}.
inline TruncationConfig choose_orders(double be, bool has_jumps,
                                      double segment_t, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("choose_orders: eps must be > 0");
  if (!(segment_t >= 0.0)) {
    throw ArgumentError("choose_orders: segment time must be >= 0");
  }
  const double budget = eps / 3.0;
  TruncationConfig cfg;
  cfg.segment_time = segment_t;
  cfg.num_segments = 1;

  if (has_jumps) {
    int K = 0;
    while (K <= kMaxOrder && bound_duhamel(K, segment_t, be) > budget) ++K;
    if (K > kMaxOrder) {
      throw InfeasiblePrecisionError("no Duhamel order <= 40 reaches eps");
    }
    cfg.K = K;
    int q = 1;
    while (q <= kMaxOrder &&
           bound_quadrature_total(K, q, segment_t, be) > budget) {
      ++q;
    }
    if (q > kMaxOrder) {
      throw InfeasiblePrecisionError("no quadrature order <= 40 reaches eps");
    }
    cfg.q = q;
  }
  const double x = be * segment_t;
  int Kp = 0;
  auto ok = [&](int kp) {
    const bool hypothesis =
        x == 0.0 || std::lgamma(kp + 2.0) >=
                        std::log(8.0) + x + (kp + 1) * std::log(x);
    return hypothesis && bound_taylor_total(cfg.K, kp, segment_t, be) <= budget;
  };
  while (Kp <= kMaxOrder && !ok(Kp)) ++Kp;
  if (Kp > kMaxOrder) {
    throw InfeasiblePrecisionError("no Taylor order <= 40 reaches eps");
  }
  cfg.Kp = Kp;
  return cfg;
}

inline TruncationConfig choose_orders(const Lindbladian& l, double segment_t,
                                      double eps) {
  return choose_orders(be_norm(l), l.num_jumps() > 0, segment_t, eps);
}

// ---------------------------------------------------------------------------
// Multi-segment simulation.

struct SimulateOptions {
  unsigned workers = 1;
  bool verify = false;
  WeightSumConvention convention = WeightSumConvention::kConservative;
};

struct SimulationReport {
  double total_time = 0.0;
  double eps = 0.0;
  int segments = 0;
  double segment_time = 0.0;
  TruncationConfig config;
  std::uint64_t kraus_terms = 0;
  OrderBounds segment_bound;
  double bound_total = 0.0;
  double normalizer_sum_squares = 0.0;
  std::optional<DiamondInterval> measured_choi_error;
};

struct SimulationResult {
  Matrix rho;
  SimulationReport report;
};

/// Checks that rho is a unit-trace PSD matrix of dimension d.
inline void validate_density_matrix(const Matrix& rho, Eigen::Index d,
                                    double tol = 1e-10) {
  if (rho.rows() != d || rho.cols() != d) {
    throw ModelError("density matrix dimension does not match the model");
  }
  if (!all_finite(rho)) throw ModelError("density matrix is not finite");
  if (hermiticity_residual(rho) > tol) {
    throw ModelError("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) {
    throw ModelError("density matrix does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho + rho.adjoint()),
                                            Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw ModelError("density matrix is not positive semidefinite");
  }
}

/// Splits [0, t] into ceil(t / t*) equal segments, each run at precision
/// eps / segments, and applies the composed approximant to rho0.
inline SimulationResult simulate(const Lindbladian& l, const Matrix& rho0,
                                 double t, double eps,
                                 const SimulateOptions& opts = {}) {
  validate_density_matrix(rho0, l.dim());
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ArgumentError("simulate: t must be finite and >= 0");
  }
  if (!(eps > 0.0)) throw ArgumentError("simulate: eps must be > 0");

  SimulationResult res;
  res.report.total_time = t;
  res.report.eps = eps;
  if (t == 0.0) {
    res.rho = rho0;
    res.report.kraus_terms = 1;
    res.report.normalizer_sum_squares = 1.0;
    if (opts.verify) res.report.measured_choi_error = DiamondInterval{};
    return res;
  }

  const double be = be_norm(l);
  const double t_star = segment_time(l, t, opts.convention);
  const int n = segment_count(t, t_star);
  const double tau = t / n;
  TruncationConfig cfg = choose_orders(l, tau, eps / n);
  cfg.num_segments = n;

  const Superoperator seg =
      approximant_superoperator(l, tau, cfg.K, cfg.Kp, cfg.q, opts.workers);
  Vector v = vec(rho0);
  for (int i = 0; i < n; ++i) v = (seg.matrix() * v).eval();
  res.rho = unvec(v, l.dim());

  auto& rep = res.report;
  rep.segments = n;
  rep.segment_time = tau;
  rep.config = cfg;
  rep.kraus_terms = kraus_term_count(l.num_jumps(), cfg.q, cfg.K);
  rep.segment_bound = segment_bounds(be, tau, cfg, l.num_jumps() > 0);
  rep.bound_total = n * rep.segment_bound.total();
  rep.normalizer_sum_squares =
      normalizer_sum_squares_closed_form(l, tau, cfg.K, cfg.q);
  if (opts.verify) {
    Superoperator total = seg;
    for (int i = 1; i < n; ++i) total = seg * total;
    rep.measured_choi_error = diamond_sandwich(exact_channel(l, t), total);
  }
  return res;
}

}  // namespace lindblad
