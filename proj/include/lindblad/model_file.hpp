#pragma once

// JSON model files. Complex numbers are [re, im] pairs and matrices are
// row-major nested arrays. An operator is either {"dense": [[[re, im], ...],
// ...]} or {"pauli": "<expression>"}.
//
//   {
//     "name": "amplitude_damping",            optional
//     "n_qubits": 1,
//     "hamiltonian": <operator>,
//     "jumps": [<operator>, ...],
//     "alphas": {"alpha0": a0, "jumps": [...]},  optional
//     "time_dependence": {                     optional
//       "times": [t_0, ...],
//       "hamiltonian": [<operator>, ...],
//       "jumps": [[<operator>, ...], ...],     one table per jump
//       "derivative_bound": b                  optional
//     }
//   }
//
// Parsed files keep each operator's original form so serialization round
// trips.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "lindblad/errors.hpp"
#include "lindblad/linalg.hpp"
#include "lindblad/model.hpp"
#include "lindblad/pauli.hpp"
#include "lindblad/time_dependent.hpp"

namespace lindblad {

using Json = nlohmann::json;

struct OperatorSpec {
  std::variant<Matrix, PauliSumExpr> repr;

  Matrix materialize() const {
    if (const auto* m = std::get_if<Matrix>(&repr)) return *m;
    return lindblad::materialize(std::get<PauliSumExpr>(repr));
  }
};

struct TimeDependenceSpec {
  std::vector<double> times;
  std::vector<OperatorSpec> hamiltonian;
  std::vector<std::vector<OperatorSpec>> jumps;
  std::optional<double> derivative_bound;
};

struct ModelFile {
  std::string name;
  int n_qubits = 1;
  OperatorSpec hamiltonian;
  std::vector<OperatorSpec> jumps;
  std::optional<double> alpha0;
  std::optional<std::vector<double>> alphas;
  std::optional<TimeDependenceSpec> time_dependence;
};

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ModelError(where + ": complex entries must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ModelError(where + ": matrix must be a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ModelError(where + ": rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ModelError(where + ": ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], where);
    }
  }
  return m;
}

inline Json operator_to_json(const OperatorSpec& op) {
  if (const auto* m = std::get_if<Matrix>(&op.repr)) {
    return Json{{"dense", matrix_to_json(*m)}};
  }
  return Json{{"pauli", std::get<PauliSumExpr>(op.repr).to_string()}};
}

inline OperatorSpec operator_from_json(const Json& j, int n_qubits,
                                       const std::string& where) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  if (!j.is_object()) {
    throw ModelError(where + ": operator must be an object");
  }
  if (j.contains("dense") == j.contains("pauli")) {
    throw ModelError(where + ": operator needs exactly one of dense or pauli");
  }
  if (j.contains("pauli")) {
    if (!j["pauli"].is_string()) {
      throw ModelError(where + ": pauli must be a string");
    }
    return {parse_pauli_sum(j["pauli"].get<std::string>(), n_qubits)};
  }
  Matrix m = matrix_from_json(j["dense"], where);
  if (m.rows() != d || m.cols() != d) {
    throw ModelError(where + ": expected a " + std::to_string(d) + "x" +
                     std::to_string(d) + " matrix for " +
                     std::to_string(n_qubits) + " qubits");
  }
  return {std::move(m)};
}

inline ModelFile model_from_json(const Json& j) {
  if (!j.is_object()) throw ModelError("model must be a JSON object");
  ModelFile mf;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ModelError("name must be a string");
    mf.name = j["name"].get<std::string>();
  }
  if (!j.contains("n_qubits") || !j["n_qubits"].is_number_integer()) {
    throw ModelError("n_qubits must be an integer");
  }
  mf.n_qubits = j["n_qubits"].get<int>();
  if (mf.n_qubits < 1 || mf.n_qubits > 10) {
    throw ModelError("n_qubits must be in [1, 10]");
  }
  if (!j.contains("hamiltonian")) throw ModelError("missing hamiltonian");
  mf.hamiltonian = operator_from_json(j["hamiltonian"], mf.n_qubits, "hamiltonian");
  if (j.contains("jumps")) {
    if (!j["jumps"].is_array()) throw ModelError("jumps must be an array");
    for (std::size_t i = 0; i < j["jumps"].size(); ++i) {
      mf.jumps.push_back(operator_from_json(j["jumps"][i], mf.n_qubits,
                                            "jumps[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("alphas")) {
    const Json& a = j["alphas"];
    if (!a.is_object()) throw ModelError("alphas must be an object");
    if (a.contains("alpha0")) {
      if (!a["alpha0"].is_number()) throw ModelError("alpha0 must be a number");
      mf.alpha0 = a["alpha0"].get<double>();
    }
    if (a.contains("jumps")) {
      if (!a["jumps"].is_array()) throw ModelError("alphas.jumps must be an array");
      std::vector<double> v;
      for (const auto& x : a["jumps"]) {
        if (!x.is_number()) throw ModelError("alphas.jumps entries must be numbers");
        v.push_back(x.get<double>());
      }
      mf.alphas = std::move(v);
    }
  }
  if (j.contains("time_dependence")) {
    const Json& td = j["time_dependence"];
    if (!td.is_object()) throw ModelError("time_dependence must be an object");
    TimeDependenceSpec spec;
    if (!td.contains("times") || !td["times"].is_array()) {
      throw ModelError("time_dependence.times must be an array");
    }
    for (const auto& x : td["times"]) {
      if (!x.is_number()) throw ModelError("time_dependence.times must be numbers");
      spec.times.push_back(x.get<double>());
    }
    if (!td.contains("hamiltonian") || !td["hamiltonian"].is_array()) {
      throw ModelError("time_dependence.hamiltonian must be an array");
    }
    for (std::size_t i = 0; i < td["hamiltonian"].size(); ++i) {
      spec.hamiltonian.push_back(operator_from_json(
          td["hamiltonian"][i], mf.n_qubits,
          "time_dependence.hamiltonian[" + std::to_string(i) + "]"));
    }
    if (td.contains("jumps")) {
      if (!td["jumps"].is_array()) {
        throw ModelError("time_dependence.jumps must be an array");
      }
      for (std::size_t a = 0; a < td["jumps"].size(); ++a) {
        const Json& series = td["jumps"][a];
        if (!series.is_array()) {
          throw ModelError("time_dependence.jumps entries must be arrays");
        }
        std::vector<OperatorSpec> ops;
        for (std::size_t i = 0; i < series.size(); ++i) {
          ops.push_back(operator_from_json(
              series[i], mf.n_qubits,
              "time_dependence.jumps[" + std::to_string(a) + "][" +
                  std::to_string(i) + "]"));
        }
        spec.jumps.push_back(std::move(ops));
      }
    }
    if (spec.jumps.size() != mf.jumps.size()) {
      throw ModelError("time_dependence.jumps must have one table per jump");
    }
    if (td.contains("derivative_bound")) {
      if (!td["derivative_bound"].is_number()) {
        throw ModelError("derivative_bound must be a number");
      }
      spec.derivative_bound = td["derivative_bound"].get<double>();
    }
    mf.time_dependence = std::move(spec);
  }
  return mf;
}

inline Json model_to_json(const ModelFile& mf) {
  Json j;
  if (!mf.name.empty()) j["name"] = mf.name;
  j["n_qubits"] = mf.n_qubits;
  j["hamiltonian"] = operator_to_json(mf.hamiltonian);
  j["jumps"] = Json::array();
  for (const auto& op : mf.jumps) j["jumps"].push_back(operator_to_json(op));
  if (mf.alpha0 || mf.alphas) {
    Json a = Json::object();
    if (mf.alpha0) a["alpha0"] = *mf.alpha0;
    if (mf.alphas) a["jumps"] = *mf.alphas;
    j["alphas"] = std::move(a);
  }
  if (mf.time_dependence) {
    const auto& td = *mf.time_dependence;
    Json t;
    t["times"] = td.times;
    t["hamiltonian"] = Json::array();
    for (const auto& op : td.hamiltonian) t["hamiltonian"].push_back(operator_to_json(op));
    t["jumps"] = Json::array();
    for (const auto& series : td.jumps) {
      Json s = Json::array();
      for (const auto& op : series) s.push_back(operator_to_json(op));
      t["jumps"].push_back(std::move(s));
    }
    if (td.derivative_bound) t["derivative_bound"] = *td.derivative_bound;
    j["time_dependence"] = std::move(t);
  }
  return j;
}

/// Parses JSON text; syntax errors carry the byte offset.
inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ModelFile parse_model_text(const std::string& text) {
  return model_from_json(parse_json_text(text));
}

inline ModelFile load_model(const std::string& path) {
  return parse_model_text(read_text_file(path));
}

inline Lindbladian build_lindbladian(const ModelFile& mf) {
  std::vector<Matrix> jumps;
  for (const auto& op : mf.jumps) jumps.push_back(op.materialize());
  return Lindbladian::make(mf.hamiltonian.materialize(), std::move(jumps),
                           mf.alpha0, mf.alphas);
}

/// Tabulated models become piecewise-linear generators; static models become
/// constant ones.
inline TimeDependentLindbladian build_time_dependent(const ModelFile& mf) {
  if (!mf.time_dependence) {
    return TimeDependentLindbladian::constant(build_lindbladian(mf));
  }
  const auto& td = *mf.time_dependence;
  std::vector<Matrix> hs;
  for (const auto& op : td.hamiltonian) hs.push_back(op.materialize());
  std::vector<std::vector<Matrix>> js;
  for (const auto& series : td.jumps) {
    std::vector<Matrix> s;
    for (const auto& op : series) s.push_back(op.materialize());
    js.push_back(std::move(s));
  }
  TimeDependentLindbladian tl =
      piecewise_linear(td.times, std::move(hs), std::move(js), td.derivative_bound);
  if (mf.alpha0 || mf.alphas) {
    const double a0 = mf.alpha0.value_or(tl.alpha0());
    const std::vector<double> as = mf.alphas.value_or(tl.alphas());
    if (a0 < tl.alpha0() * (1.0 - 1e-12) || as.size() != tl.alphas().size()) {
      throw ModelError("declared alphas do not dominate the tabulated norms");
    }
    for (std::size_t j = 0; j < as.size(); ++j) {
      if (as[j] < tl.alphas()[j] * (1.0 - 1e-12)) {
        throw ModelError("declared alphas do not dominate the tabulated norms");
      }
    }
    return {[tl](double t) { return tl.raw(t); }, tl.dim(), tl.num_jumps(), a0,
            as, tl.derivative_bound()};
  }
  return tl;
}

/// Initial state: {"dense": matrix}, {"state": [[re, im], ...]} (a pure state,
/// normalized on load), or a bare matrix.
inline Matrix density_from_json(const Json& j, Eigen::Index d) {
  Matrix rho;
  if (j.is_object() && j.contains("state")) {
    const Json& s = j["state"];
    if (!s.is_array() || static_cast<Eigen::Index>(s.size()) != d) {
      throw ModelError("rho0 state vector must have " + std::to_string(d) +
                       " entries");
    }
    Vector psi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      psi(i) = complex_from_json(s[static_cast<std::size_t>(i)], "rho0.state");
    }
    const double n = psi.norm();
    if (!(n > 0.0)) throw ModelError("rho0 state vector is zero");
    psi /= n;
    rho = psi * psi.adjoint();
  } else if (j.is_object() && j.contains("dense")) {
    rho = matrix_from_json(j["dense"], "rho0");
  } else if (j.is_array()) {
    rho = matrix_from_json(j, "rho0");
  } else {
    throw ModelError("rho0 must be {\"dense\": ...}, {\"state\": ...} or a matrix");
  }
  if (rho.rows() != d || rho.cols() != d) {
    throw ModelError("rho0 dimension does not match the model");
  }
  return rho;
}

/// |0...0><0...0|.
inline Matrix ground_state(Eigen::Index d) {
  Matrix rho = Matrix::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

}  // namespace lindblad
