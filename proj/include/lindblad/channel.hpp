#pragma once

// Choi representation and the trace-norm machinery used to certify channel
// distances. The Choi matrix is (Phi kron id) applied to the unnormalized
// projector onto sum_i |i>|i>, with the output system as the first factor.

#include <algorithm>
#include <utility>
#include <vector>

#include "lindblad/linalg.hpp"

namespace lindblad {

class ChoiMatrix {
 public:
  ChoiMatrix(Eigen::Index dim, Matrix m) : dim_(dim), m_(std::move(m)) {
    if (m_.rows() != dim_ * dim_ || m_.cols() != dim_ * dim_) {
      throw ArgumentError("ChoiMatrix: matrix must be d^2 x d^2");
    }
  }

  Eigen::Index dim() const noexcept { return dim_; }
  const Matrix& matrix() const noexcept { return m_; }

  /// Trace over the output factor.
  Matrix partial_trace_output() const {
    Matrix r = Matrix::Zero(dim_, dim_);
    for (Eigen::Index a = 0; a < dim_; ++a) {
      r += m_.block(a * dim_, a * dim_, dim_, dim_);
    }
    return r;
  }

 private:
  Eigen::Index dim_;
  Matrix m_;
};

/// Reshuffle C[(a,i),(b,j)] = S[a + d b, i + d j].
inline ChoiMatrix choi(const Superoperator& s) {
  const Eigen::Index d = s.dim();
  Matrix c(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index j = 0; j < d; ++j)
          c(a * d + i, b * d + j) = s.matrix()(a + d * b, i + d * j);
  return {d, std::move(c)};
}

/// Inverse of choi().
inline Superoperator from_choi(const ChoiMatrix& c) {
  const Eigen::Index d = c.dim();
  Matrix s(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index j = 0; j < d; ++j)
          s(a + d * b, i + d * j) = c.matrix()(a * d + i, b * d + j);
  return {d, std::move(s)};
}

/// Kraus operators from the eigendecomposition of a PSD Choi matrix:
/// A[a, i] = sqrt(lambda) v[a d + i]. Eigenvalues at or below `cutoff` are
/// dropped; eigenvalues below -1e-10 are rejected.
inline std::vector<Matrix> kraus_from_choi(const ChoiMatrix& c,
                                           double cutoff = 1e-14) {
  const Eigen::Index d = c.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      0.5 * (c.matrix() + c.matrix().adjoint()));
  std::vector<Matrix> out;
  for (Eigen::Index k = eig.eigenvalues().size() - 1; k >= 0; --k) {
    const double lambda = eig.eigenvalues()(k);
    if (lambda < -1e-10) {
      throw ArgumentError("kraus_from_choi: Choi matrix is not PSD");
    }
    if (lambda <= cutoff) continue;
    Matrix a(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index i = 0; i < d; ++i)
        a(r, i) = std::sqrt(lambda) * eig.eigenvectors()(r * d + i, k);
    out.push_back(std::move(a));
  }
  return out;
}

struct DiamondInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Sandwich for |S1 - S2|_diamond: |C|_1 / d <= |.|_diamond <= |C|_1, where C
/// is the Choi matrix of the difference. The upper bound assumes the
/// difference preserves Hermiticity, which holds for differences of
/// Hermiticity-preserving maps.
inline DiamondInterval diamond_sandwich(const Superoperator& s1,
                                        const Superoperator& s2) {
  if (s1.dim() != s2.dim()) {
    throw ArgumentError("diamond_sandwich: dimension mismatch");
  }
  const double tn = trace_norm(choi(s1 - s2).matrix());
  return {tn / static_cast<double>(s1.dim()), tn};
}

struct CptpDiagnostics {
  double min_choi_eigenvalue = 0.0;
  double trace_preservation_residual = 0.0;
  double hermiticity_residual = 0.0;
};

inline CptpDiagnostics cptp_report(const Superoperator& s) {
  const ChoiMatrix c = choi(s);
  CptpDiagnostics r;
  r.hermiticity_residual = hermiticity_residual(c.matrix());
  const Matrix h = 0.5 * (c.matrix() + c.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  r.min_choi_eigenvalue = eig.eigenvalues().minCoeff();
  r.trace_preservation_residual =
      spectral_norm(c.partial_trace_output() - identity(s.dim()));
  return r;
}

/// (1/2) |rho - sigma|_1.
inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
  return 0.5 * trace_norm(rho - sigma);
}

}  // namespace lindblad
