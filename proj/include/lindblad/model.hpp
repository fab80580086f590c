#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"

namespace lindblad {

inline constexpr double kHermitianTolerance = 1e-12;

/// Lindblad generator L(rho) = -i[H, rho] + sum_j (L_j rho L_j^+ -
/// {L_j^+ L_j, rho}/2) together with the block-encoding normalizing factors
/// alpha_0 >= |H| and alpha_j >= |L_j|.
class Lindbladian {
 public:
  /// Validates and stores a model. H is symmetrized after the Hermiticity
  /// check. Missing normalizing factors default to spectral norms.
  static Lindbladian make(Matrix hamiltonian, std::vector<Matrix> jumps,
                          std::optional<double> alpha0 = std::nullopt,
                          std::optional<std::vector<double>> alphas =
                              std::nullopt) {
    const Eigen::Index d = hamiltonian.rows();
    if (hamiltonian.cols() != d) {
      throw ModelError("Hamiltonian must be square");
    }
    if (d < 2) throw ModelError("dimension must be at least 2");
    if (!all_finite(hamiltonian)) {
      throw ModelError("Hamiltonian has non-finite entries");
    }
    const double scale =
        std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
    const double herm = hermiticity_residual(hamiltonian);
    if (herm > kHermitianTolerance * scale) {
      throw ModelError("Hamiltonian is not Hermitian (residual " +
                       std::to_string(herm) + ")");
    }
    hamiltonian = 0.5 * (hamiltonian + hamiltonian.adjoint()).eval();

    for (const auto& l : jumps) {
      if (l.rows() != d || l.cols() != d) {
        throw ModelError("jump operator dimension does not match H");
      }
      if (!all_finite(l)) {
        throw ModelError("jump operator has non-finite entries");
      }
    }

    const double h_norm = spectral_norm(hamiltonian);
    Lindbladian out;
    out.alpha0_ = alpha0.value_or(h_norm);
    if (!(out.alpha0_ >= 0.0) || !std::isfinite(out.alpha0_)) {
      throw ModelError("alpha0 must be a finite nonnegative number");
    }
    if (h_norm > out.alpha0_ * (1.0 + 1e-12) + 1e-12) {
      throw ModelError("|H| = " + std::to_string(h_norm) +
                       " exceeds alpha0 = " + std::to_string(out.alpha0_));
    }
    if (alphas && alphas->size() != jumps.size()) {
      throw ModelError("alphas length does not match the number of jumps");
    }
    for (std::size_t j = 0; j < jumps.size(); ++j) {
      const double n = spectral_norm(jumps[j]);
      const double a = alphas ? (*alphas)[j] : n;
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw ModelError("alpha_j must be finite and nonnegative");
      }
      if (n > a * (1.0 + 1e-12) + 1e-12) {
        throw ModelError("|L_" + std::to_string(j) + "| = " +
                         std::to_string(n) + " exceeds its alpha " +
                         std::to_string(a));
      }
      out.alphas_.push_back(a);
    }
    out.hamiltonian_ = std::move(hamiltonian);
    out.jumps_ = std::move(jumps);
    return out;
  }

  Eigen::Index dim() const noexcept { return hamiltonian_.rows(); }
  std::size_t num_jumps() const noexcept { return jumps_.size(); }
  const Matrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<Matrix>& jumps() const noexcept { return jumps_; }
  double alpha0() const noexcept { return alpha0_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }

  /// Sum of alpha_j^2.
  double jump_weight() const noexcept {
    double s = 0.0;
    for (double a : alphas_) s += a * a;
    return s;
  }

 private:
  Lindbladian() = default;

  Matrix hamiltonian_;
  std::vector<Matrix> jumps_;
  double alpha0_ = 0.0;
  std::vector<double> alphas_;
};

inline double be_norm(double alpha0, std::span<const double> alphas) {
  double s = alpha0;
  for (double a : alphas) s += 0.5 * a * a;
  return s;
}

/// alpha_0 + (1/2) sum_j alpha_j^2.
inline double be_norm(const Lindbladian& l) {
  return be_norm(l.alpha0(), l.alphas());
}

/// J = -i H_eff = -i H - (1/2) sum_j L_j^+ L_j.
inline Matrix effective_generator(const Matrix& hamiltonian,
                                  std::span<const Matrix> jumps) {
  Matrix j = -kI * hamiltonian;
  for (const auto& l : jumps) j.noalias() -= 0.5 * l.adjoint() * l;
  return j;
}

inline Matrix effective_generator(const Lindbladian& l) {
  return effective_generator(l.hamiltonian(), l.jumps());
}

/// rho -> J rho + rho J^+.
inline Superoperator drift_generator(const Matrix& j) {
  const Eigen::Index d = j.rows();
  return {d, kron(identity(d), j) + kron(j.conjugate(), identity(d))};
}

/// rho -> sum_j L_j rho L_j^+.
inline Superoperator jump_superoperator(Eigen::Index d,
                                        std::span<const Matrix> jumps) {
  Superoperator s = Superoperator::zero(d);
  for (const auto& l : jumps) s.matrix() += kron(l.conjugate(), l);
  return s;
}

inline Superoperator jump_superoperator(const Lindbladian& l) {
  return jump_superoperator(l.dim(), l.jumps());
}

inline Superoperator liouvillian_matrix(const Matrix& hamiltonian,
                                        std::span<const Matrix> jumps) {
  const Eigen::Index d = hamiltonian.rows();
  const Matrix id = identity(d);
  Matrix m = -kI * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  for (const auto& l : jumps) {
    const Matrix ldl = l.adjoint() * l;
    m += kron(l.conjugate(), l);
    m -= 0.5 * kron(id, ldl);
    m -= 0.5 * kron(ldl.transpose(), id);
  }
  return {d, std::move(m)};
}

inline Superoperator liouvillian_matrix(const Lindbladian& l) {
  return liouvillian_matrix(l.hamiltonian(), l.jumps());
}

/// exp(t L) via scaling and squaring.
inline Superoperator exact_channel(const Lindbladian& l, double t) {
  if (!(t >= 0.0)) throw ArgumentError("exact_channel: t must be >= 0");
  return {l.dim(), expm(t * liouvillian_matrix(l).matrix())};
}

/// K[exp(t J)], the semigroup generated by the drift part.
inline Superoperator drift_semigroup(const Lindbladian& l, double t) {
  if (!(t >= 0.0)) throw ArgumentError("drift_semigroup: t must be >= 0");
  return Superoperator::kraus(expm(t * effective_generator(l)));
}

}  // namespace lindblad
