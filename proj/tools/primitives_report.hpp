#pragma once

// Pass/fail matrix for the block-encoding, LCU and amplification contracts,
// evaluated on seeded instances.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lindblad/lindblad.hpp"

namespace lindblad::cli {

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline Check at_most(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, measured <= tol};
}

inline Check at_least(std::string name, double measured, double floor) {
  return {std::move(name), measured, floor, measured >= floor};
}

/// Kraus operators of exp(t L) with their spectral norms as normalizers.
inline std::vector<BlockEncoding> exact_kraus_encodings(const Lindbladian& l,
                                                        double t) {
  std::vector<BlockEncoding> out;
  for (const Matrix& a : kraus_from_choi(choi(exact_channel(l, t)))) {
    out.push_back(dilate(a, spectral_norm(a)));
  }
  return out;
}

}  // namespace detail

inline std::vector<Check> primitive_checks(std::uint64_t seed) {
  using detail::at_least;
  using detail::at_most;
  Rng rng(seed);
  std::vector<Check> checks;

  {
    const Matrix a = random_matrix(rng, 4, 4);
    const BlockEncoding be = dilate(a, spectral_norm(a));
    checks.push_back(at_most("dilate.unitarity", be.unitarity_residual(), 1e-11));
    checks.push_back(at_most("dilate.extraction", be.extraction_error(), 1e-12));
  }
  {
    Matrix x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    const std::vector<BlockEncoding> encs{dilate(x, 1.0), dilate(z, 1.0)};
    const std::vector<double> y{1.0, 1.0};
    const BlockEncoding sum = lcu_sum(encs, y);
    checks.push_back(at_most("lcu_sum.unitarity", sum.unitarity_residual(), 1e-11));
    checks.push_back(
        at_most("lcu_sum.extraction", spectral_norm((x + z) / 2.0 - sum.top_left()),
                1e-12));
  }
  {
    const Lindbladian l = random_lindbladian(rng, 2, 1, 1.0);
    const double be = be_norm(l);
    const double t = 0.3;
    const int kp = 6;
    const Matrix j = effective_generator(l);
    std::vector<BlockEncoding> encs;
    std::vector<double> y;
    Matrix power = identity(2);
    double factorial = 1.0;
    for (int p = 0; p <= kp; ++p) {
      if (p > 0) factorial *= p;
      encs.push_back(dilate(power, std::pow(be, p)));
      y.push_back(std::pow(t, p) / factorial);
      power = power * j;
    }
    const BlockEncoding sum = lcu_sum(encs, y);
    double expected = 0.0;
    for (int p = 0; p <= kp; ++p) expected += y[p] * std::pow(be, p);
    checks.push_back(at_most("lcu_sum.taylor_normalizer",
                             std::abs(sum.alpha - expected), 1e-12 * expected));
    checks.push_back(at_most("lcu_sum.taylor_normalizer_below_exp",
                             sum.alpha - std::exp(be * t), 0.0));
    checks.push_back(at_most(
        "lcu_sum.taylor_extraction",
        spectral_norm(taylor_series(j, t, kp) - sum.alpha * sum.top_left()),
        1e-11));
  }
  for (double eps : {0.0, 1e-8, 1e-6}) {
    const Vector psi = random_state(rng, 2);
    std::vector<BlockEncoding> encs;
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    for (const Matrix& a : {Matrix(identity(2) / std::sqrt(2.0)),
                            Matrix(x / std::sqrt(2.0))}) {
      Matrix e = random_matrix(rng, 2, 2);
      if (eps > 0.0) {
        e *= eps / spectral_norm(e);
      } else {
        e.setZero();
      }
      const Matrix noisy = a + e;
      BlockEncoding be = dilate(noisy, spectral_norm(a) + eps);
      be.target = a;
      be.epsilon = eps;
      encs.push_back(std::move(be));
    }
    const LcuChannelResult r = lcu_channel(encs, psi);
    char label[64];
    std::snprintf(label, sizeof label, "lcu_channel.residual_eps_%g", eps);
    checks.push_back(at_most(label, r.residual, r.residual_bound + 1e-15));
  }
  {
    const Lindbladian l = random_lindbladian(rng, 2, 1, 1.0);
    const double t = segment_time(l, 10.0);
    TruncationConfig cfg = choose_orders(l, t, 1e-3);
    const CPMapApprox cp = enumerate_kraus(l, t, cfg);
    const auto encs = kraus_encodings(cp);
    const Vector psi = random_state(rng, 2);
    const LcuChannelResult r = lcu_channel(encs, psi);
    const Matrix rho = psi * psi.adjoint();
    Matrix direct = cp.as_superoperator().apply(rho);
    direct /= direct.trace().real();
    checks.push_back(at_most("lcu_channel.channel_equivalence",
                             (r.output_state() - direct).cwiseAbs().maxCoeff(),
                             1e-9));
    checks.push_back(at_least("lcu_channel.budgeted_success_probability",
                              r.success_amplitude * r.success_amplitude, 0.25));
    const MuState mu = mu_coefficients(cp, l);
    checks.push_back(at_most("mu.factorization", mu.formula_residual, 1e-12));
  }
  {
    // W = dilate(U, 2): top-left block U / 2 for every input.
    const Matrix g = random_matrix(rng, 2, 2);
    const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
    const Matrix w = dilate(u, 2.0).unitary;
    Matrix p = Matrix::Zero(4, 4);
    p.topLeftCorner(2, 2) = identity(2);
    const Vector psi = random_state(rng, 2);
    Vector psi_hat = Vector::Zero(4);
    psi_hat.head(2) = psi;
    Vector phi_hat = Vector::Zero(4);
    phi_hat.head(2) = u * psi;
    const Vector out = oaa_step(w, p, p, psi_hat);
    checks.push_back(at_most("oaa.synthetic", (out - phi_hat).norm(), 1e-10));
  }
  {
    const Lindbladian l = random_lindbladian(rng, 2, 1, 1.0);
    const auto encs = detail::exact_kraus_encodings(l, 0.4);
    LcuLayout layout = lcu_layout(encs);
    const Matrix w = lcu_channel_unitary(encs);
    const Vector psi = random_state(rng, 2);
    const LcuChannelResult r = lcu_channel(encs, psi);
    const Matrix wd = dilute(w, r.success_amplitude, layout);
    const Vector psi_hat = embed_input(layout, psi);
    const Matrix p0 = success_projector(layout);
    const Vector first = wd * psi_hat;
    checks.push_back(at_most("dilute.amplitude",
                             std::abs((p0 * first).norm() - 0.5), 1e-12));
    const Vector phi_hat = 2.0 * (p0 * first);
    const Vector out = oaa_step(wd, p0, input_projector(layout), psi_hat);
    checks.push_back(at_most("oaa.diluted_channel", (out - phi_hat).norm(), 1e-10));
  }
  {
    const Matrix g = random_matrix(rng, 2, 2);
    const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
    const Matrix w = dilate(u, 1.0 / 0.6).unitary;
    Matrix p = Matrix::Zero(4, 4);
    p.topLeftCorner(2, 2) = identity(2);
    Vector psi_hat = Vector::Zero(4);
    psi_hat.head(2) = random_state(rng, 2);
    double measured = 0.0;
    bool raised = false;
    try {
      oaa_step(w, p, p, psi_hat);
    } catch (const ContractError& e) {
      raised = true;
      measured = e.measured();
    }
    checks.push_back({"oaa.premise_violation_detected", measured, 0.6,
                      raised && std::abs(measured - 0.6) < 1e-12});
  }
  return checks;
}

inline nlohmann::json checks_to_json(std::uint64_t seed,
                                     const std::vector<Check>& checks) {
  nlohmann::json j;
  j["seed"] = seed;
  j["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"measured", c.measured},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
    all = all && c.pass;
  }
  j["all_pass"] = all;
  return j;
}

}  // namespace lindblad::cli
