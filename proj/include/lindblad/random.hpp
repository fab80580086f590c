#pragma once

// Seeded random test instances.

#include <cstdint>
#include <random>
#include <vector>

#include "lindblad/linalg.hpp"
#include "lindblad/model.hpp"

namespace lindblad {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline Vector random_state(Rng& rng, Eigen::Index d) {
  Vector v = random_matrix(rng, d, 1).col(0);
  return v / v.norm();
}

inline Matrix random_hermitian(Rng& rng, Eigen::Index d) {
  const Matrix a = random_matrix(rng, d, d);
  return 0.5 * (a + a.adjoint());
}

/// Full-rank density matrix G G^+ / tr.
inline Matrix random_density(Rng& rng, Eigen::Index d) {
  const Matrix g = random_matrix(rng, d, d);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// Random Lindbladian scaled so that its be-norm equals `be`. Operator norms
/// are used as the normalizing factors.
inline Lindbladian random_lindbladian(Rng& rng, Eigen::Index d,
                                      std::size_t num_jumps, double be = 1.0) {
  Matrix h = random_hermitian(rng, d);
  std::vector<Matrix> jumps;
  for (std::size_t j = 0; j < num_jumps; ++j) {
    jumps.push_back(random_matrix(rng, d, d));
  }
  double h_norm = spectral_norm(h);
  double s = 0.0;
  for (const auto& l : jumps) {
    const double n = spectral_norm(l);
    s += n * n;
  }
  // be(c) = c h_norm + c^2 s / 2 is increasing in c; solve be(c) = be.
  double c = be / h_norm;
  if (s > 0.0) {
    c = (-h_norm + std::sqrt(h_norm * h_norm + 2.0 * s * be)) / s;
  }
  h *= c;
  for (auto& l : jumps) l *= c;
  return Lindbladian::make(std::move(h), std::move(jumps));
}

}  // namespace lindblad
