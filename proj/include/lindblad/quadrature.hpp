#pragma once

// Gauss-Legendre rules and the nested, rescaled grids that discretize the
// simplex 0 <= s_1 <= ... <= s_k <= t level by level.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "lindblad/errors.hpp"

namespace lindblad {

inline constexpr int kMaxQuadratureOrder = 64;
inline constexpr double kMaxGridTerms = 1e8;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2
};

namespace detail {

// Returns {P_q(x), P_q'(x)} via the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int q, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (q == 0) return {1.0, 0.0};
  for (int n = 1; n < q; ++n) {
    const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  const double dp = q * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

/// Gauss-Legendre nodes and weights on [-1, 1].
inline GaussRule legendre_rule(int q) {
  if (q < 1 || q > kMaxQuadratureOrder) {
    throw ArgumentError("legendre_rule: order must be in [1, 64], got " +
                        std::to_string(q));
  }
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    // Chebyshev-angle seed for the (i+1)-th largest root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = detail::legendre_with_derivative(q, x);
      dp = d;
      const double step = p / d;
      x -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    dp = detail::legendre_with_derivative(q, x).second;
    // Roots come out descending; store ascending.
    rule.nodes[q - 1 - i] = x;
    rule.weights[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  return rule;
}

/// Gauss-Legendre rule mapped to [0, t].
struct QuadratureRule {
  int order = 0;
  double interval_length = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  /// sum_j w_j s_j^ell.
  double moment(int ell) const {
    CompensatedSum s;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      s.add(weights[j] * std::pow(nodes[j], ell));
    }
    return s.value();
  }
};

inline QuadratureRule canonical_rule(int q, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ArgumentError("canonical_rule: t must be positive");
  }
  const GaussRule g = legendre_rule(q);
  QuadratureRule r{q, t, {}, {}};
  r.nodes.reserve(q);
  r.weights.reserve(q);
  for (int j = 0; j < q; ++j) {
    r.nodes.push_back(0.5 * t * (g.nodes[j] + 1.0));
    r.weights.push_back(0.5 * t * g.weights[j]);
  }
  return r;
}

/// value * parent / t, exact when parent == t.
inline double rescale(double value, double parent, double t) {
  return parent == t ? value : parent * value / t;
}

/// One tuple (j_k, ..., j_1) of a nested grid. Entry 0 of every vector is the
/// outermost level j_k; entry k-1 is the innermost j_1.
struct GridPoint {
  std::vector<int> indices;
  std::vector<double> nodes;    // x_(j_k), x_(j_k, j_{k-1}), ...
  std::vector<double> weights;  // w_(j_k), w_(j_k, j_{k-1}), ...
  double weight_product = 1.0;

  /// Times s_1 <= ... <= s_k.
  std::vector<double> ascending_times() const {
    return {nodes.rbegin(), nodes.rend()};
  }
};

/// Lazily enumerated grid of q^k nested nodes and weights. Level l+1 is
/// obtained from level l by x -> x s_j / t and w -> x w_j / t. Tuples are
/// ordered lexicographically over (j_k, ..., j_1).
class NestedGrid {
 public:
  NestedGrid(int depth, int q, double t) : depth_(depth), rule_(canonical_rule(q, t)) {
    if (depth < 1) throw ArgumentError("NestedGrid: depth must be >= 1");
    const double terms = std::pow(static_cast<double>(q), depth);
    if (terms > kMaxGridTerms) {
      throw ResourceLimitError("NestedGrid: q^k = " + std::to_string(terms) +
                               " exceeds the 1e8 term limit");
    }
    size_ = 1;
    for (int i = 0; i < depth; ++i) size_ *= static_cast<std::uint64_t>(q);
  }

  int depth() const noexcept { return depth_; }
  int order() const noexcept { return rule_.order; }
  double interval_length() const noexcept { return rule_.interval_length; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  std::uint64_t size() const noexcept { return size_; }

  GridPoint point(std::uint64_t linear) const {
    std::vector<int> idx(depth_);
    for (int level = depth_ - 1; level >= 0; --level) {
      idx[level] = static_cast<int>(linear % rule_.order);
      linear /= rule_.order;
    }
    return from_indices(idx);
  }

  GridPoint from_indices(const std::vector<int>& idx) const {
    GridPoint p;
    p.indices = idx;
    p.nodes.resize(depth_);
    p.weights.resize(depth_);
    const double t = rule_.interval_length;
    double parent = t;
    for (int level = 0; level < depth_; ++level) {
      const int j = idx[level];
      p.nodes[level] = rescale(rule_.nodes[j], parent, t);
      p.weights[level] = rescale(rule_.weights[j], parent, t);
      p.weight_product *= p.weights[level];
      parent = p.nodes[level];
    }
    return p;
  }

  template <class F>
  void for_each_range(std::uint64_t begin, std::uint64_t end, F&& f) const {
    for (std::uint64_t i = begin; i < end && i < size_; ++i) f(point(i));
  }

  template <class F>
  void for_each(F&& f) const {
    for_each_range(0, size_, std::forward<F>(f));
  }

 private:
  int depth_;
  QuadratureRule rule_;
  std::uint64_t size_ = 0;
};

inline NestedGrid nested_grid(int k, int q, double t) { return {k, q, t}; }

/// Sum over all tuples of the nested weight products. The sum factorizes into
/// prod_{i<k} sum_j w_j (s_j / t)^i, which is t^k / k! whenever q >= k/2.
inline double nested_weight_sum(int k, int q, double t) {
  if (k < 0) throw ArgumentError("nested_weight_sum: k must be >= 0");
  if (k == 0) return 1.0;
  const QuadratureRule r = canonical_rule(q, t);
  double prod = 1.0;
  for (int i = 0; i < k; ++i) {
    CompensatedSum s;
    for (int j = 0; j < q; ++j) {
      s.add(r.weights[j] * std::pow(r.nodes[j] / t, i));
    }
    prod *= s.value();
  }
  return prod;
}

/// Error bound f2q * t^(2q+1) * q / ((2q)! 2^(4q-1)) for a q-point rule on
/// [0, t], where f2q bounds |f^(2q)|.
inline double quadrature_error_bound(int q, double t, double f2q_bound) {
  if (q < 1) throw ArgumentError("quadrature_error_bound: q must be >= 1");
  const double log_val = (2.0 * q + 1.0) * std::log(t) + std::log(q) -
                         std::lgamma(2.0 * q + 1.0) -
                         (4.0 * q - 1.0) * std::log(2.0);
  return f2q_bound * std::exp(log_val);
}

}  // namespace lindblad
