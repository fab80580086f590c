#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lindblad/channel.hpp"
#include "lindblad/duhamel.hpp"
#include "lindblad/random.hpp"
#include "lindblad/time_dependent.hpp"
#include "support/oracles.hpp"

using namespace lindblad;

namespace {

Matrix pauli(char c) {
  Matrix m(2, 2);
  if (c == 'X') m << 0, 1, 1, 0;
  if (c == 'Z') m << 1, 0, 0, -1;
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

/// H(t) = Z + 0.3 cos(t) X, one jump sqrt(1/2) sigma_-.
GeneratorSample driven_sample(double t) {
  return {pauli('Z') + 0.3 * std::cos(t) * pauli('X'), {std::sqrt(0.5) * sigma_minus()}};
}

TimeDependentLindbladian driven_qubit() {
  const double alpha0 = std::sqrt(1.0 + 0.09);
  return {driven_sample, 2, 1, alpha0, {std::sqrt(0.5)}, 0.3};
}

oracle::Generator driven_generator(double t) {
  const GeneratorSample s = driven_sample(t);
  return {s.hamiltonian, s.jumps};
}

Matrix driven_j(double t) {
  return oracle::elementwise_j(driven_generator(t));
}

}  // namespace

TEST(OrderedPropagator, RejectsReversedInterval) {
  EXPECT_THROW(ordered_propagator(driven_qubit(), 1.0, 0.5, {4, 4}), ArgumentError);
  EXPECT_THROW(ordered_propagator(driven_qubit(), 0.0, 0.5, {4, 0}), ArgumentError);
}

TEST(OrderedPropagator, ConstantGeneratorIsTaylor) {
  Rng rng(81);
  for (int trial = 0; trial < 5; ++trial) {
    const Lindbladian l = random_lindbladian(rng, 2 + trial % 2, 2, 1.0);
    const TimeDependentLindbladian tl = TimeDependentLindbladian::constant(l);
    const double delta = 0.2 + 0.15 * trial;
    for (int grid : {1, 7}) {
      const Matrix v = ordered_propagator(tl, 0.3, 0.3 + delta, {6, grid});
      EXPECT_LT((v - taylor_drift(l, delta, 6)).cwiseAbs().maxCoeff(), 1e-12)
          << "grid=" << grid;
    }
  }
}

TEST(OrderedPropagator, CommutingFamilyClosedForm) {
  // J(t) = -i cos(t) Z integrates to -i sin(t) Z.
  const TimeDependentLindbladian tl(
      [](double t) { return GeneratorSample{std::cos(t) * pauli('Z'), {}}; }, 2, 0, 1.0,
      {}, 1.0);
  const double s = 0.2, t = 1.1;
  const Matrix exact = (-kI * (std::sin(t) - std::sin(s)) * pauli('Z')).exp();
  for (int grid : {64, 512}) {
    const DysonConfig cfg{16, grid};
    const double err = spectral_norm(ordered_propagator(tl, s, t, cfg) - exact);
    EXPECT_LE(err, dyson_error_bound(tl, s, t, cfg)) << "grid=" << grid;
  }
}

TEST(OrderedPropagator, DrivenQubitAgainstRungeKutta) {
  const TimeDependentLindbladian tl = driven_qubit();
  const Matrix ref = oracle::rk4_propagator(driven_j, 0.0, 1.0, 100000);
  for (int grid : {16, 64, 256}) {
    const DysonConfig cfg{14, grid};
    const double err = spectral_norm(ordered_propagator(tl, 0.0, 1.0, cfg) - ref);
    EXPECT_LE(err, dyson_error_bound(tl, 0.0, 1.0, cfg)) << "grid=" << grid;
  }
}

TEST(OrderedPropagator, GridErrorIsFirstOrder) {
  const TimeDependentLindbladian tl = driven_qubit();
  const Matrix ref = oracle::rk4_propagator(driven_j, 0.0, 1.0, 100000);
  double prev = 0.0;
  for (int grid = 16; grid <= 256; grid *= 2) {
    const double err = spectral_norm(ordered_propagator(tl, 0.0, 1.0, {16, grid}) - ref);
    if (prev > 0.0) {
      EXPECT_LE(err, prev);
      EXPECT_GE(prev / err, 1.5) << "grid=" << grid;
      EXPECT_LE(prev / err, 2.5) << "grid=" << grid;
    }
    prev = err;
  }
}

TEST(OrderedPropagator, Composition) {
  const TimeDependentLindbladian tl = driven_qubit();
  const double s = 0.1, t = 0.9;
  for (double u : {0.1, 0.35, 0.5, 0.9}) {
    // Both halves use the same step as the whole interval.
    const int per_unit = 400;
    const DysonConfig whole{14, static_cast<int>(std::lround((t - s) * per_unit))};
    const DysonConfig left{14, std::max(1, static_cast<int>(std::lround((u - s) * per_unit)))};
    const DysonConfig right{14, std::max(1, static_cast<int>(std::lround((t - u) * per_unit)))};
    const Matrix lhs = ordered_propagator(tl, u, t, right) * ordered_propagator(tl, s, u, left);
    const double tol = dyson_error_bound(tl, s, t, whole) + dyson_error_bound(tl, s, u, left) +
                       dyson_error_bound(tl, u, t, right);
    EXPECT_LE(spectral_norm(lhs - ordered_propagator(tl, s, t, whole)), tol) << "u=" << u;
  }
}

TEST(TdSimulate, ConstantMatchesSimulate) {
  Rng rng(82);
  for (int trial = 0; trial < 3; ++trial) {
    const Lindbladian l = random_lindbladian(rng, 2, 1 + trial % 2, 1.0);
    const Matrix rho = random_density(rng, 2);
    const SimulationResult a = simulate(l, rho, 1.3, 1e-6);
    const TdResult b = td_simulate(TimeDependentLindbladian::constant(l), rho, 1.3, 1e-6);
    EXPECT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(b.report.dyson.grid, 1);
  }
}

TEST(TdSimulate, NoJumpsPreservesPurity) {
  const TimeDependentLindbladian tl(
      [](double t) {
        return GeneratorSample{pauli('Z') + 0.5 * std::sin(2 * t) * pauli('X'), {}};
      },
      2, 0, std::sqrt(1.25), {}, 1.0);
  Rng rng(83);
  const Vector psi = random_state(rng, 2);
  // The grid product of exact exponentials is unitary, so only the Dyson
  // truncation moves purity; a fixed grid keeps the tight eps affordable.
  TdOptions opts;
  opts.grid = 64;
  const TdResult r = td_simulate(tl, psi * psi.adjoint(), 1.0, 1e-10, opts);
  EXPECT_NEAR((r.rho * r.rho).trace().real(), 1.0, 1e-9);
}

TEST(TdSimulate, DrivenDampedQubitMatchesRungeKutta) {
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(1, 1) = 1.0;
  const TdResult r = td_simulate(driven_qubit(), rho0, 1.0, 1e-4);
  const Matrix ref = oracle::rk4_density(driven_generator, rho0, 0.0, 1.0, 100000);
  EXPECT_LE(trace_distance(r.rho, ref), 1e-4);
  EXPECT_GT(r.report.dyson.grid, 1);
}

TEST(TdSimulate, OutputIsDensityMatrix) {
  Rng rng(84);
  const TdResult r = td_simulate(driven_qubit(), random_density(rng, 2), 0.8, 1e-3);
  EXPECT_LE(hermiticity_residual(r.rho), 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (r.rho + r.rho.adjoint()));
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
  EXPECT_LE(std::abs(r.rho.trace().real() - 1.0), r.report.bound_total);
}

TEST(TdSimulate, DetectsBoundViolationWhileSampling) {
  // |H(t)| grows past the declared alpha0 after t = 0.5.
  const TimeDependentLindbladian tl(
      [](double t) { return GeneratorSample{(0.5 + t) * pauli('Z'), {sigma_minus()}}; }, 2,
      1, 1.0, {1.0}, 1.0);
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;
  EXPECT_THROW(td_simulate(tl, rho0, 1.0, 1e-3), ModelError);
  EXPECT_NO_THROW(td_simulate(tl, rho0, 0.4, 1e-3));
}

TEST(PiecewiseLinear, InterpolatesAndHolds) {
  const TimeDependentLindbladian tl = piecewise_linear(
      {0.0, 1.0}, {Matrix::Zero(2, 2), Matrix(pauli('X'))}, {{sigma_minus(), sigma_minus()}});
  EXPECT_LT((tl.sample(0.5).hamiltonian - 0.5 * pauli('X')).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((tl.sample(3.0).hamiltonian - pauli('X')).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((tl.sample(-1.0).hamiltonian).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(tl.alpha0(), 1.0, 1e-15);
  EXPECT_NEAR(tl.alphas()[0], 1.0, 1e-15);
  EXPECT_NEAR(tl.derivative_bound(), 1.0, 1e-15);
}

TEST(PiecewiseLinear, DerivativeBoundDominatesFiniteDifferences) {
  Rng rng(85);
  std::vector<double> times{0.0, 0.4, 1.0, 1.5};
  std::vector<Matrix> hs;
  std::vector<Matrix> ls;
  for (std::size_t i = 0; i < times.size(); ++i) {
    hs.push_back(random_hermitian(rng, 2));
    ls.push_back(random_matrix(rng, 2, 2));
  }
  const TimeDependentLindbladian tl = piecewise_linear(times, hs, {ls});
  const double h = 1e-6;
  double worst = 0.0;
  for (double t = 0.01; t < 1.5; t += 0.01) {
    worst = std::max(worst, spectral_norm(tl.generator(t + h) - tl.generator(t - h)) / (2 * h));
  }
  EXPECT_LE(worst, tl.derivative_bound() * (1 + 1e-6));
  EXPECT_GE(worst, 0.9 * tl.derivative_bound());
}

TEST(PiecewiseLinear, RejectsBadTables) {
  const Matrix z = Matrix::Zero(2, 2);
  EXPECT_THROW(piecewise_linear({0.0, 0.0}, {z, z}, {}), ModelError);
  EXPECT_THROW(piecewise_linear({0.0, 1.0}, {z}, {}), ModelError);
  Matrix bad = z;
  bad(0, 1) = 1.0;
  EXPECT_THROW(piecewise_linear({0.0, 1.0}, {z, bad}, {}), ModelError);
  EXPECT_THROW(piecewise_linear({0.0, 1.0}, {z, Matrix(pauli('X'))}, {}, 0.5), ModelError);
  EXPECT_NEAR(piecewise_linear({0.0, 1.0}, {z, Matrix(pauli('X'))}, {}, 2.0).derivative_bound(),
              2.0, 0.0);
}
