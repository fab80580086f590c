#pragma once

// Dense complex linear algebra shared by every module. Density matrices are
// vectorized by column stacking, so vec(A X B) = (B^T kron A) vec(X) and the
// Kraus map X -> A X A^dagger is represented by conj(A) kron A.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>

#include "lindblad/errors.hpp"

namespace lindblad {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

inline Vector vec(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) {
    throw ArgumentError("unvec: vector length does not match dimension");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline RealVector singular_values(const Matrix& a) {
  if (a.rows() <= 16) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues();
  }
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

inline Matrix expm(const Matrix& a) { return a.exp(); }

inline double hermiticity_residual(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

/// Square root of a Hermitian PSD matrix. Eigenvalues in [-1e-12, 0) are
/// treated as zero; anything more negative is rejected.
inline Matrix psd_sqrt(const Matrix& a, double clamp = 1e-12) {
  Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  RealVector ev = eig.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -clamp) {
      throw ArgumentError("psd_sqrt: eigenvalue " + std::to_string(ev(i)) +
                          " is below the clamping threshold");
    }
    ev(i) = ev(i) < 0.0 ? 0.0 : std::sqrt(ev(i));
  }
  return eig.eigenvectors() * ev.cast<Complex>().asDiagonal() *
         eig.eigenvectors().adjoint();
}

/// Trace norm (sum of singular values).
inline double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ArgumentError("trace_norm: matrix must be square");
  }
  if (m.size() == 0) return 0.0;
  return singular_values(m).sum();
}

/// Linear map on d x d matrices stored as its d^2 x d^2 matrix acting on
/// column-stacked vectors.
class Superoperator {
 public:
  Superoperator() = default;

  Superoperator(Eigen::Index dim, Matrix m) : dim_(dim), m_(std::move(m)) {
    if (m_.rows() != dim_ * dim_ || m_.cols() != dim_ * dim_) {
      throw ArgumentError("Superoperator: matrix must be d^2 x d^2");
    }
  }

  static Superoperator identity(Eigen::Index d) {
    return {d, Matrix::Identity(d * d, d * d)};
  }

  static Superoperator zero(Eigen::Index d) {
    return {d, Matrix::Zero(d * d, d * d)};
  }

  /// X -> A X A^dagger.
  static Superoperator kraus(const Matrix& a) {
    return {a.rows(), kron(a.conjugate(), a)};
  }

  Eigen::Index dim() const noexcept { return dim_; }
  const Matrix& matrix() const noexcept { return m_; }
  Matrix& matrix() noexcept { return m_; }

  Matrix apply(const Matrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
      throw ArgumentError("Superoperator::apply: dimension mismatch");
    }
    return unvec(m_ * vec(rho), dim_);
  }

  Superoperator& operator+=(const Superoperator& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  Superoperator& operator-=(const Superoperator& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  Superoperator& operator*=(Complex c) {
    m_ *= c;
    return *this;
  }

  friend Superoperator operator+(Superoperator a, const Superoperator& b) {
    return a += b;
  }
  friend Superoperator operator-(Superoperator a, const Superoperator& b) {
    return a -= b;
  }
  friend Superoperator operator*(Complex c, Superoperator a) { return a *= c; }
  friend Superoperator operator*(double c, Superoperator a) {
    return a *= Complex(c, 0.0);
  }

  /// Composition: (a * b)(X) = a(b(X)).
  friend Superoperator operator*(const Superoperator& a,
                                 const Superoperator& b) {
    a.check_same(b);
    return {a.dim_, a.m_ * b.m_};
  }

  double max_abs_diff(const Superoperator& o) const {
    check_same(o);
    if (m_.size() == 0) return 0.0;
    return (m_ - o.m_).cwiseAbs().maxCoeff();
  }

 private:
  void check_same(const Superoperator& o) const {
    if (dim_ != o.dim_) {
      throw ArgumentError("Superoperator: dimension mismatch");
    }
  }

  Eigen::Index dim_ = 0;
  Matrix m_;
};

}  // namespace lindblad
