#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lindblad/quadrature.hpp"
#include "support/oracles.hpp"

using namespace lindblad;

TEST(LegendreRule, RejectsOutOfRange) {
  EXPECT_THROW(legendre_rule(0), ArgumentError);
  EXPECT_THROW(legendre_rule(65), ArgumentError);
}

TEST(LegendreRule, ClosedForms) {
  const GaussRule r1 = legendre_rule(1);
  EXPECT_EQ(r1.nodes[0], 0.0);
  EXPECT_NEAR(r1.weights[0], 2.0, 1e-15);
  const GaussRule r2 = legendre_rule(2);
  EXPECT_NEAR(r2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(r2.weights[1], 1.0, 1e-15);
}

TEST(LegendreRule, IntegratesDegreeEightExactly) {
  const GaussRule r = legendre_rule(5);
  double s = 0.0;
  for (int j = 0; j < 5; ++j) s += r.weights[j] * std::pow(r.nodes[j], 8);
  EXPECT_NEAR(s, 2.0 / 9.0, 1e-14);
}

TEST(LegendreRule, NodesInteriorAndWeightsPositiveUpTo64) {
  for (int q = 1; q <= kMaxQuadratureOrder; ++q) {
    const GaussRule r = legendre_rule(q);
    double sum = 0.0;
    for (int j = 0; j < q; ++j) {
      EXPECT_GT(r.nodes[j], -1.0);
      EXPECT_LT(r.nodes[j], 1.0);
      EXPECT_GT(r.weights[j], 0.0);
      if (j > 0) EXPECT_GT(r.nodes[j], r.nodes[j - 1]);
      sum += r.weights[j];
    }
    EXPECT_NEAR(sum, 2.0, 1e-13) << "q=" << q;
  }
}

TEST(CanonicalRule, RejectsNonPositiveInterval) {
  EXPECT_THROW(canonical_rule(2, 0.0), ArgumentError);
  EXPECT_THROW(canonical_rule(2, -1.0), ArgumentError);
}

TEST(CanonicalRule, Examples) {
  const QuadratureRule r = canonical_rule(1, 1.0);
  EXPECT_NEAR(r.nodes[0], 0.5, 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(canonical_rule(2, 1.0).moment(1), 0.5, 1e-15);
  EXPECT_NEAR(canonical_rule(3, 2.0).moment(2), 8.0 / 3.0, 1e-14);
}

TEST(CanonicalRule, MomentIdentity) {
  for (int q = 1; q <= 16; ++q)
    for (double t : {0.1, 1.0, 7.0}) {
      const QuadratureRule r = canonical_rule(q, t);
      for (int ell = 0; ell <= 2 * q - 1; ++ell) {
        const double exact = std::pow(t, ell + 1) / (ell + 1);
        EXPECT_LE(std::abs(r.moment(ell) - exact), 1e-12 * exact)
            << "q=" << q << " t=" << t << " ell=" << ell;
      }
    }
}

TEST(CanonicalRule, ScalingCovariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int q = 1 + trial % 12;
    double t = u(rng), s = u(rng);
    if (s > t) std::swap(s, t);
    const QuadratureRule rt = canonical_rule(q, t);
    const QuadratureRule rs = canonical_rule(q, s);
    for (int j = 0; j < q; ++j) {
      EXPECT_NEAR(rs.nodes[j], rt.nodes[j] * s / t, 1e-14 * t);
      EXPECT_NEAR(rs.weights[j], rt.weights[j] * s / t, 1e-14 * t);
    }
  }
}

TEST(NestedGrid, DepthOneIsCanonicalRule) {
  const NestedGrid g = nested_grid(1, 4, 0.8);
  const QuadratureRule r = canonical_rule(4, 0.8);
  ASSERT_EQ(g.size(), 4u);
  for (int j = 0; j < 4; ++j) {
    const GridPoint p = g.point(j);
    EXPECT_EQ(p.nodes[0], r.nodes[j]);
    EXPECT_EQ(p.weights[0], r.weights[j]);
  }
}

TEST(NestedGrid, DepthTwoUnrolled) {
  const NestedGrid g = nested_grid(2, 2, 1.0);
  const QuadratureRule r = canonical_rule(2, 1.0);
  for (int j2 = 0; j2 < 2; ++j2)
    for (int j1 = 0; j1 < 2; ++j1) {
      const GridPoint p = g.point(j2 * 2 + j1);
      EXPECT_EQ(p.indices, (std::vector<int>{j2, j1}));
      EXPECT_NEAR(p.nodes[1], r.nodes[j2] * r.nodes[j1], 1e-15);
      EXPECT_NEAR(p.weights[1], r.nodes[j2] * r.weights[j1], 1e-15);
    }
}

TEST(NestedGrid, SimplexOrderingAndPositivity) {
  const NestedGrid g = nested_grid(3, 4, 0.7);
  std::uint64_t count = 0;
  g.for_each([&](const GridPoint& p) {
    ++count;
    const auto s = p.ascending_times();
    EXPECT_GE(s[0], 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i - 1], s[i]);
    EXPECT_LE(s.back(), 0.7);
    for (double w : p.weights) EXPECT_GT(w, 0.0);
  });
  EXPECT_EQ(count, 64u);
}

TEST(NestedGrid, ResourceLimit) {
  EXPECT_THROW(nested_grid(9, 8, 1.0), ResourceLimitError);
  EXPECT_NO_THROW(nested_grid(8, 10, 1.0));
}

TEST(NestedWeightSum, Examples) {
  EXPECT_NEAR(nested_weight_sum(1, 5, 0.37), 0.37, 1e-15);
  EXPECT_NEAR(nested_weight_sum(2, 2, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(nested_weight_sum(3, 3, 2.0), 8.0 / 6.0, 1e-14);
  EXPECT_NEAR(oracle::simplex_volume_mc(3, 2.0, 50'000'000, 5), 8.0 / 6.0, 1e-3);
}

TEST(NestedWeightSum, FactorialLaw) {
  for (int k = 1; k <= 6; ++k)
    for (int q = (k + 1) / 2; q <= 8; ++q)
      for (double t : {0.3, 1.0, 2.5}) {
        const double exact = std::pow(t, k) / std::tgamma(k + 1.0);
        EXPECT_LE(std::abs(nested_weight_sum(k, q, t) - exact), 1e-10 * exact);
      }
}

TEST(NestedWeightSum, MatchesExplicitEnumeration) {
  for (int k = 1; k <= 4; ++k) {
    const NestedGrid g = nested_grid(k, 3, 1.3);
    CompensatedSum s;
    g.for_each([&](const GridPoint& p) { s.add(p.weight_product); });
    EXPECT_NEAR(s.value(), nested_weight_sum(k, 3, 1.3), 1e-14);
  }
}

TEST(QuadratureErrorBound, PlugIn) {
  EXPECT_NEAR(quadrature_error_bound(1, 1.0, 1.0), 0.0625, 1e-16);
}

TEST(QuadratureErrorBound, DominatesActualError) {
  const QuadratureRule r = canonical_rule(4, 1.0);
  double approx = 0.0;
  for (int j = 0; j < 4; ++j) approx += r.weights[j] * std::exp(r.nodes[j]);
  const double actual = std::abs(approx - (std::exp(1.0) - 1.0));
  EXPECT_LE(actual, quadrature_error_bound(4, 1.0, std::exp(1.0)));
  EXPECT_GT(actual, 0.0);
}

TEST(QuadratureErrorBound, PolynomialsAreExact) {
  const QuadratureRule r = canonical_rule(3, 2.0);
  double approx = 0.0;
  for (int j = 0; j < 3; ++j) approx += r.weights[j] * (1.0 - 2.0 * std::pow(r.nodes[j], 5));
  EXPECT_NEAR(approx, 2.0 - 2.0 * 64.0 / 6.0, 1e-12);
}
