#pragma once

// Dense-matrix realizations of block-encodings, linear combinations of
// block-encodings, the LCU construction for completely positive maps, and
// oblivious amplitude amplification. Registers are tensor factors of dense
// vectors; the leftmost factor is the most recently added register.
//
// Layout of an LCU-for-channels state: [dilution] (x) index (x) ancilla (x)
// system, with every register except the system starting in |0>.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "lindblad/duhamel.hpp"
#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"

namespace lindblad {

/// U on ancilla (x) system with alpha * <0^b| U |0^b> = target up to epsilon.
struct BlockEncoding {
  Matrix unitary;
  double alpha = 1.0;
  int ancilla_qubits = 0;
  Matrix target;
  double epsilon = 0.0;

  Eigen::Index system_dim() const { return target.rows(); }

  Matrix top_left() const {
    return unitary.topLeftCorner(system_dim(), system_dim());
  }

  double unitarity_residual() const {
    return spectral_norm(unitary.adjoint() * unitary -
                         identity(unitary.rows()));
  }

  double extraction_error() const {
    return spectral_norm(target - alpha * top_left());
  }
};

namespace detail {

inline int index_qubits_for(std::size_t count) {
  int b = 0;
  while ((std::size_t{1} << b) < count) ++b;
  return std::max(1, b);
}

}  // namespace detail

/// Unitary whose first column is the unit vector v (Householder reflection
/// with a phase fix on the first coordinate).
inline Matrix unitary_with_first_column(const Vector& v) {
  const Eigen::Index n = v.size();
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw ArgumentError("state preparation vector must have unit norm");
  }
  const Complex phase =
      std::abs(v(0)) > 0.0 ? v(0) / std::abs(v(0)) : Complex(1.0, 0.0);
  Vector w = -v;
  w(0) += phase;
  Matrix b = identity(n);
  const double ww = w.squaredNorm();
  if (ww > 1e-30) b -= (2.0 / ww) * (w * w.adjoint());
  b.col(0) *= phase;
  return b;
}

/// One-ancilla unitary completion of A / alpha.
inline BlockEncoding dilate(const Matrix& a, double alpha) {
  if (a.rows() != a.cols()) throw ArgumentError("dilate: A must be square");
  if (!(alpha > 0.0)) throw ArgumentError("dilate: alpha must be positive");
  const double n = spectral_norm(a);
  if (n > alpha * (1.0 + 1e-12)) {
    throw ArgumentError("dilate: |A| = " + std::to_string(n) +
                        " exceeds alpha = " + std::to_string(alpha));
  }
  // One SVD B = P S Q^+ serves both square roots, so the complementary
  // singular values sqrt(1 - s^2) pair with s exactly even when |A| = alpha.
  const Eigen::Index d = a.rows();
  const Matrix b = a / alpha;
  const Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix& p = svd.matrixU();
  const Matrix& q = svd.matrixV();
  Eigen::VectorXd c(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double s = std::min(1.0, svd.singularValues()(i));
    c(i) = std::sqrt((1.0 - s) * (1.0 + s));
  }
  const Eigen::VectorXd sv = svd.singularValues().cwiseMin(1.0);
  Matrix u(2 * d, 2 * d);
  u.topLeftCorner(d, d) = p * sv.asDiagonal() * q.adjoint();
  u.topRightCorner(d, d) = p * c.asDiagonal() * p.adjoint();
  u.bottomLeftCorner(d, d) = q * c.asDiagonal() * q.adjoint();
  u.bottomRightCorner(d, d) = -q * sv.asDiagonal() * p.adjoint();
  return {std::move(u), alpha, 1, a, 0.0};
}

/// Block-encoding of sum_j y_j A_j with normalizer s = sum_j y_j alpha_j,
/// realized as (B^+ (x) I) Select (B (x) I) where B prepares
/// sum_j sqrt(alpha_j y_j / s) |j>.
inline BlockEncoding lcu_sum(std::span<const BlockEncoding> encodings,
                             std::span<const double> y) {
  if (encodings.empty()) throw ArgumentError("lcu_sum: no encodings");
  if (encodings.size() != y.size()) {
    throw ArgumentError("lcu_sum: weights do not match encodings");
  }
  const Eigen::Index d = encodings.front().system_dim();
  const int b = encodings.front().ancilla_qubits;
  for (const auto& e : encodings) {
    if (e.ancilla_qubits != b) {
      throw ArgumentError("lcu_sum: inconsistent ancilla counts");
    }
    if (e.system_dim() != d) {
      throw ArgumentError("lcu_sum: inconsistent system dimensions");
    }
  }
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!(y[j] > 0.0)) throw ArgumentError("lcu_sum: weights must be positive");
    s += y[j] * encodings[j].alpha;
  }
  const int c = detail::index_qubits_for(encodings.size());
  const Eigen::Index nidx = Eigen::Index{1} << c;
  const Eigen::Index block = (Eigen::Index{1} << b) * d;

  Vector prep = Vector::Zero(nidx);
  for (std::size_t j = 0; j < y.size(); ++j) {
    prep(static_cast<Eigen::Index>(j)) = std::sqrt(encodings[j].alpha * y[j] / s);
  }
  const Matrix bprep = unitary_with_first_column(prep);
  Matrix select = Matrix::Identity(nidx * block, nidx * block);
  for (std::size_t j = 0; j < encodings.size(); ++j) {
    const auto o = static_cast<Eigen::Index>(j) * block;
    select.block(o, o, block, block) = encodings[j].unitary;
  }
  const Matrix bfull = kron(bprep, identity(block));
  BlockEncoding out;
  out.unitary = bfull.adjoint() * select * bfull;
  out.alpha = s;
  out.ancilla_qubits = c + b;
  out.target = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < encodings.size(); ++j) {
    out.target += y[j] * encodings[j].target;
    out.epsilon += y[j] * encodings[j].epsilon;
  }
  return out;
}

// ---------------------------------------------------------------------------
// The |mu> state over Kraus terms.

struct MuRegisters {
  int k = 0;
  std::vector<int> ells;  // l_1 .. l_k
  std::vector<int> js;    // j_1 .. j_k
};

/// Amplitudes s_j / sqrt(sum s^2) in Kraus enumeration order, together with
/// per-register factors: amplitude = norm^{-1} e^{beta t} unary[k]
/// prod_i ell[l_i] prod_i node[i-1][j_i].
struct MuState {
  std::vector<double> amplitudes;
  std::vector<MuRegisters> registers;
  double norm = 0.0;  // sqrt(sum_j s_j^2)
  double common_factor = 1.0;
  std::vector<double> unary_factor;              // k = 0..K
  std::vector<double> ell_factor;                // jump label
  std::vector<std::vector<double>> node_factor;  // level i-1, node j
  double formula_residual = 0.0;

  /// Amplitude rebuilt from the register factors.
  double factorized_amplitude(std::size_t term) const {
    const auto& r = registers[term];
    double a = common_factor * unary_factor[r.k];
    for (int i = 0; i < r.k; ++i) {
      a *= ell_factor[r.ells[i]] * node_factor[i][r.js[i]];
    }
    return a / norm;
  }

  double factorization_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
      worst = std::max(worst, std::abs(amplitudes[i] - factorized_amplitude(i)));
    }
    return worst;
  }
};

inline MuState mu_coefficients(const CPMapApprox& cp,
                               std::span<const double> alphas, double be) {
  MuState mu;
  CompensatedSum ss;
  for (const auto& t : cp.terms) ss.add(t.normalizer * t.normalizer);
  mu.norm = std::sqrt(ss.value());
  mu.common_factor = std::exp(be * cp.time);
  const int K = cp.config.K;
  const double t = cp.time;
  for (int k = 0; k <= K; ++k) {
    mu.unary_factor.push_back(std::pow(t, -0.25 * k * (k - 1)));
  }
  mu.ell_factor.assign(alphas.begin(), alphas.end());
  if (K > 0) {
    const QuadratureRule rule = canonical_rule(cp.config.q, t);
    for (int i = 1; i <= K; ++i) {
      std::vector<double> h(cp.config.q);
      for (int j = 0; j < cp.config.q; ++j) {
        h[j] = std::sqrt(rule.weights[j] * std::pow(rule.nodes[j], i - 1));
      }
      mu.node_factor.push_back(std::move(h));
    }
  }
  for (const auto& term : cp.terms) {
    mu.amplitudes.push_back(term.normalizer / mu.norm);
    mu.registers.push_back({term.k, term.ells, term.js});
  }
  mu.formula_residual = mu.factorization_residual();
  return mu;
}

inline MuState mu_coefficients(const CPMapApprox& cp, const Lindbladian& l) {
  return mu_coefficients(cp, l.alphas(), be_norm(l));
}

// ---------------------------------------------------------------------------
// LCU for completely positive maps.

struct LcuLayout {
  int dilution_qubits = 0;
  int index_qubits = 1;
  int ancilla_qubits = 1;
  Eigen::Index system_dim = 2;

  Eigen::Index index_dim() const { return Eigen::Index{1} << index_qubits; }
  Eigen::Index ancilla_dim() const { return Eigen::Index{1} << ancilla_qubits; }
  Eigen::Index total_dim() const {
    return (Eigen::Index{1} << dilution_qubits) * index_dim() * ancilla_dim() *
           system_dim;
  }
};

/// Projector onto the success subspace: dilution and ancilla in |0>.
inline Matrix success_projector(const LcuLayout& l) {
  Matrix p = Matrix::Zero(l.total_dim(), l.total_dim());
  const Eigen::Index inner = l.ancilla_dim() * l.system_dim;
  for (Eigen::Index j = 0; j < l.index_dim(); ++j) {
    const Eigen::Index o = j * inner;
    p.block(o, o, l.system_dim, l.system_dim) = identity(l.system_dim);
  }
  return p;
}

/// Projector onto the input subspace: every register but the system in |0>.
inline Matrix input_projector(const LcuLayout& l) {
  Matrix p = Matrix::Zero(l.total_dim(), l.total_dim());
  p.topLeftCorner(l.system_dim, l.system_dim) = identity(l.system_dim);
  return p;
}

/// |0...0> (x) psi in the given layout.
inline Vector embed_input(const LcuLayout& l, const Vector& psi) {
  Vector v = Vector::Zero(l.total_dim());
  v.head(l.system_dim) = psi;
  return v;
}

namespace detail {

inline LcuLayout validate_terms(std::span<const BlockEncoding> terms) {
  if (terms.empty()) throw ArgumentError("lcu_channel: no terms");
  LcuLayout layout;
  layout.ancilla_qubits = terms.front().ancilla_qubits;
  layout.system_dim = terms.front().system_dim();
  layout.index_qubits = index_qubits_for(terms.size());
  for (const auto& t : terms) {
    if (t.ancilla_qubits != layout.ancilla_qubits) {
      throw ArgumentError("lcu_channel: inconsistent ancilla counts");
    }
    if (t.system_dim() != layout.system_dim) {
      throw ArgumentError("lcu_channel: inconsistent system dimensions");
    }
  }
  return layout;
}

inline Vector mu_vector(std::span<const BlockEncoding> terms,
                        const LcuLayout& layout, const MuState* mu) {
  double ss = 0.0;
  for (const auto& t : terms) ss += t.alpha * t.alpha;
  Vector v = Vector::Zero(layout.index_dim());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    v(static_cast<Eigen::Index>(j)) = terms[j].alpha / std::sqrt(ss);
  }
  if (mu != nullptr) {
    if (mu->amplitudes.size() != terms.size()) {
      throw ArgumentError("lcu_channel: amplitude count does not match terms");
    }
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (std::abs(mu->amplitudes[j] - v(static_cast<Eigen::Index>(j)).real()) >
          1e-12) {
        throw ArgumentError(
            "lcu_channel: normalizers do not match the supplied amplitudes");
      }
    }
  }
  return v;
}

}  // namespace detail

/// Unitary W = Select (Prep_mu (x) I) for Kraus encodings with normalizers
/// s_j = alpha_j, Select = sum_j |j><j| (x) U_j.
inline Matrix lcu_channel_unitary(std::span<const BlockEncoding> terms,
                                  const MuState* mu = nullptr) {
  const LcuLayout layout = detail::validate_terms(terms);
  const Matrix prep =
      unitary_with_first_column(detail::mu_vector(terms, layout, mu));
  const Eigen::Index block = layout.ancilla_dim() * layout.system_dim;
  Matrix select = Matrix::Identity(layout.total_dim(), layout.total_dim());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto o = static_cast<Eigen::Index>(j) * block;
    select.block(o, o, block, block) = terms[j].unitary;
  }
  return select * kron(prep, identity(block));
}

inline LcuLayout lcu_layout(std::span<const BlockEncoding> terms) {
  return detail::validate_terms(terms);
}

struct LcuChannelResult {
  LcuLayout layout;
  Vector projected;  // index (x) system, ancilla projected on |0>
  Vector expected;   // (sum s^2)^{-1/2} sum_j |j> A_j |psi>
  double norm_sum_squares = 0.0;
  double residual = 0.0;
  double residual_bound = 0.0;  // m * max eps_j / sqrt(sum s^2)
  double success_amplitude = 0.0;

  /// Success branch traced over the index register, normalized.
  Matrix output_state() const {
    const Eigen::Index d = layout.system_dim;
    Matrix rho = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < layout.index_dim(); ++j) {
      const Vector b = projected.segment(j * d, d);
      rho += b * b.adjoint();
    }
    return rho / rho.trace().real();
  }
};

/// Applies Select to |mu>|0>|psi> and projects the ancilla on |0>.
inline LcuChannelResult lcu_channel(std::span<const BlockEncoding> terms,
                                    const Vector& psi,
                                    const MuState* mu = nullptr) {
  LcuChannelResult r;
  r.layout = detail::validate_terms(terms);
  const Eigen::Index d = r.layout.system_dim;
  if (psi.size() != d) throw ArgumentError("lcu_channel: psi dimension mismatch");
  const Vector mu_v = detail::mu_vector(terms, r.layout, mu);
  const Eigen::Index block = r.layout.ancilla_dim() * d;

  Vector full = Vector::Zero(r.layout.total_dim());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto o = static_cast<Eigen::Index>(j) * block;
    full.segment(o, block) =
        mu_v(static_cast<Eigen::Index>(j)) * (terms[j].unitary.leftCols(d) * psi);
  }

  double ss = 0.0;
  double eps_max = 0.0;
  for (const auto& t : terms) {
    ss += t.alpha * t.alpha;
    eps_max = std::max(eps_max, t.epsilon);
  }
  r.norm_sum_squares = ss;
  r.projected = Vector::Zero(r.layout.index_dim() * d);
  r.expected = Vector::Zero(r.layout.index_dim() * d);
  for (Eigen::Index j = 0; j < r.layout.index_dim(); ++j) {
    r.projected.segment(j * d, d) = full.segment(j * block, d);
  }
  for (std::size_t j = 0; j < terms.size(); ++j) {
    r.expected.segment(static_cast<Eigen::Index>(j) * d, d) =
        terms[j].target * psi / std::sqrt(ss);
  }
  r.residual = (r.projected - r.expected).norm();
  r.residual_bound =
      static_cast<double>(terms.size()) * eps_max / std::sqrt(ss);
  r.success_amplitude = r.projected.norm();
  return r;
}

/// Kraus encodings of an enumerated approximant: A_j dilated at s_j.
inline std::vector<BlockEncoding> kraus_encodings(const CPMapApprox& cp) {
  std::vector<BlockEncoding> out;
  out.reserve(cp.terms.size());
  for (const auto& t : cp.terms) {
    out.push_back(dilate(t.kraus_operator(), t.normalizer));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dilution and oblivious amplitude amplification.

struct Dilution {
  double theta = 0.0;
  Matrix rotation;  // [[cos, -sin], [sin, cos]]
};

/// Rotation that lowers a success amplitude a in [1/2, 1] to exactly 1/2.
inline Dilution dilute(double success_amp) {
  if (!(success_amp * success_amp >= 0.25 - 1e-15) ||
      success_amp > 1.0 + 1e-12) {
    throw ArgumentError("dilute: success amplitude must lie in [1/2, 1]");
  }
  const double c = std::min(1.0, 1.0 / (2.0 * success_amp));
  Dilution out;
  out.theta = std::acos(c);
  const double s = std::sin(out.theta);
  out.rotation = Matrix(2, 2);
  out.rotation << c, -s, s, c;
  return out;
}

/// R(theta) (x) W on a layout with one extra leading register.
inline Matrix dilute(const Matrix& w, double success_amp, LcuLayout& layout) {
  const Dilution dil = dilute(success_amp);
  layout.dilution_qubits += 1;
  return kron(dil.rotation, w);
}

/// -W (I - 2 P1) W^+ (I - 2 P0) W |psi_hat>, where P0 projects on the good
/// subspace of W's output and P1 on the input subspace. Requires the good
/// amplitude |P0 W psi_hat| to equal 1/2.
inline Vector oaa_step(const Matrix& w, const Matrix& p0, const Matrix& p1,
                       const Vector& psi_hat) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n || p0.rows() != n || p1.rows() != n ||
      psi_hat.size() != n) {
    throw ArgumentError("oaa_step: dimension mismatch");
  }
  const Vector first = w * psi_hat;
  const double a = (p0 * first).norm();
  if (std::abs(a - 0.5) > 1e-6) {
    throw ContractError("oaa_step: good-subspace amplitude is " +
                            std::to_string(a) + ", expected 1/2",
                        a);
  }
  const Matrix id = identity(n);
  Vector v = (id - 2.0 * p0) * first;
  v = w.adjoint() * v;
  v = (id - 2.0 * p1) * v;
  return -(w * v);
}

}  // namespace lindblad
