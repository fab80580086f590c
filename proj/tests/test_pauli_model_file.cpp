#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "lindblad/model_file.hpp"
#include "lindblad/pauli.hpp"
#include "lindblad/random.hpp"
#include "support/oracles.hpp"

using namespace lindblad;

namespace {

const std::string kModels = LINDBLAD_MODELS_DIR;

std::size_t parse_error_position(const std::string& text, int n) {
  try {
    parse_pauli_sum(text, n);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no parse error for '" << text << "'";
  return std::string::npos;
}

std::string random_word(std::mt19937_64& rng, int n) {
  static constexpr char kLetters[] = "IXYZ";
  std::uniform_int_distribution<int> pick(0, 3);
  std::string w;
  for (int i = 0; i < n; ++i) w += kLetters[pick(rng)];
  return w;
}

}  // namespace

// --- Parsing ----------------------------------------------------------------

TEST(ParsePauliSum, TwoTerms) {
  const PauliSumExpr e = parse_pauli_sum("0.5*XX + 1.0*ZI", 2);
  ASSERT_EQ(e.terms.size(), 2u);
  EXPECT_EQ(e.terms[0], (PauliTerm{0.5, "XX"}));
  EXPECT_EQ(e.terms[1], (PauliTerm{1.0, "ZI"}));
}

TEST(ParsePauliSum, CancellationLeavesEmptyList) {
  EXPECT_TRUE(parse_pauli_sum("XX - XX", 2).terms.empty());
  EXPECT_TRUE(parse_pauli_sum("0.25*YZ + 0.5 * Y Z - 0.75*YZ", 2).terms.empty());
}

TEST(ParsePauliSum, MergesAndOrders) {
  const PauliSumExpr e = parse_pauli_sum("-Z + 2*X - 0.5*X + Y", 1);
  ASSERT_EQ(e.terms.size(), 3u);
  EXPECT_EQ(e.terms[0], (PauliTerm{1.5, "X"}));
  EXPECT_EQ(e.terms[1], (PauliTerm{1.0, "Y"}));
  EXPECT_EQ(e.terms[2], (PauliTerm{-1.0, "Z"}));
}

TEST(ParsePauliSum, WhitespaceInsensitive) {
  EXPECT_EQ(parse_pauli_sum("0.5*XX+1e-1*IZ", 2),
            parse_pauli_sum("  0.5 * X X   +\t1e-1*I Z ", 2));
}

TEST(ParsePauliSum, ErrorsCarryPosition) {
  EXPECT_EQ(parse_error_position("1.5*XYZ", 2), 4u);
  EXPECT_EQ(parse_error_position("0.5*XA", 2), 5u);
  EXPECT_EQ(parse_error_position("XX + ", 2), 5u);
  EXPECT_EQ(parse_error_position("XX + + ZZ", 2), 5u);
  EXPECT_THROW(parse_pauli_sum("", 1), ParseError);
  EXPECT_THROW(parse_pauli_sum("0.5 XX", 2), ParseError);
}

TEST(ParsePauliSum, CanonicalTextRoundTrips) {
  std::mt19937_64 rng(91);
  std::normal_distribution<double> coef;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    std::string text;
    for (int t = 0; t < 4; ++t) {
      const double c = coef(rng);
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g*", std::abs(c));
      text += (c < 0 ? " - " : " + ") + std::string(buf) + random_word(rng, n);
    }
    const PauliSumExpr e = parse_pauli_sum(text, n);
    EXPECT_EQ(parse_pauli_sum(e.to_string(), n), e) << text;
  }
  EXPECT_EQ(parse_pauli_sum(PauliSumExpr{2, {}}.to_string(), 2), (PauliSumExpr{2, {}}));
}

// --- Materialization --------------------------------------------------------

TEST(Materialize, ZI) {
  const Matrix m = materialize(parse_pauli_sum("ZI", 2));
  Eigen::VectorXcd diag(4);
  diag << 1, 1, -1, -1;
  EXPECT_LT((m - Matrix(diag.asDiagonal())).cwiseAbs().maxCoeff(), 1e-300);
}

TEST(Materialize, XIPlusIXOnZeroState) {
  const Matrix m = materialize(parse_pauli_sum("XI + IX", 2));
  Vector zero = Vector::Zero(4);
  zero(0) = 1.0;
  Vector expected = Vector::Zero(4);
  expected(1) = 1.0;  // |01>
  expected(2) = 1.0;  // |10>
  EXPECT_LT((m * zero - expected).norm(), 1e-15);
}

TEST(Materialize, MatchesEntrywiseOracle) {
  std::mt19937_64 rng(92);
  std::normal_distribution<double> coef;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    PauliSumExpr e{n, {}};
    Matrix ref = Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    std::string text;
    for (int t = 0; t < 5; ++t) {
      const double c = coef(rng);
      const std::string w = random_word(rng, n);
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g*", std::abs(c));
      text += (c < 0 ? " - " : " + ") + std::string(buf) + w;
      ref += oracle::naive_pauli(w, c);
    }
    const Matrix m = materialize(parse_pauli_sum(text, n));
    EXPECT_LT((m - ref).cwiseAbs().maxCoeff(), 1e-14) << text;
    EXPECT_LT(hermiticity_residual(m), 1e-15);
  }
}

// --- Model files ------------------------------------------------------------

TEST(ModelFile, ShippedModelsLoadAndRoundTrip) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kModels)) {
    const std::string path = entry.path().string();
    const Json raw = parse_json_text(read_text_file(path));
    if (!raw.contains("n_qubits")) continue;  // initial states
    ++count;
    const ModelFile mf = load_model(path);
    const Json once = model_to_json(mf);
    const Json twice = model_to_json(model_from_json(once));
    EXPECT_EQ(once, twice) << path;
    if (mf.time_dependence) {
      EXPECT_NO_THROW(build_time_dependent(mf)) << path;
    } else {
      EXPECT_NO_THROW(build_lindbladian(mf)) << path;
    }
  }
  EXPECT_GE(count, 4);
}

TEST(ModelFile, DenseAndPauliFormsAgree) {
  const ModelFile mf = parse_model_text(R"({
    "n_qubits": 1,
    "hamiltonian": {"dense": [[[0.5, 0], [0.1, -0.2]], [[0.1, 0.2], [-0.5, 0]]]},
    "jumps": [{"pauli": "0.1*X + 0.2*Y + 0.5*Z"}]
  })");
  const Lindbladian l = build_lindbladian(mf);
  const Matrix h = materialize(parse_pauli_sum("0.1*X + 0.2*Y + 0.5*Z", 1));
  EXPECT_LT((l.hamiltonian() - h).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_LT((l.jumps()[0] - h).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(ModelFile, RandomDenseModelsRoundTrip) {
  Rng rng(93);
  for (int trial = 0; trial < 10; ++trial) {
    const Lindbladian l = random_lindbladian(rng, 4, 1 + trial % 3, 1.0);
    ModelFile mf;
    mf.name = "random";
    mf.n_qubits = 2;
    mf.hamiltonian.repr = l.hamiltonian();
    for (const auto& j : l.jumps()) mf.jumps.push_back({j});
    const Json j1 = model_to_json(mf);
    const ModelFile back = parse_model_text(j1.dump());
    EXPECT_EQ(model_to_json(back), j1);
    EXPECT_EQ(build_lindbladian(back).hamiltonian(), l.hamiltonian());
  }
}

TEST(ModelFile, ValidationErrors) {
  EXPECT_THROW(parse_model_text("{\"n_qubits\": 1,"), ParseError);
  EXPECT_THROW(parse_model_text(R"({"hamiltonian": {"pauli": "Z"}})"), ModelError);
  EXPECT_THROW(parse_model_text(R"({"n_qubits": 2, "hamiltonian": {"pauli": "Z"}})"),
               ParseError);
  EXPECT_THROW(build_lindbladian(parse_model_text(
                   R"({"n_qubits": 1, "hamiltonian": {"dense": [[[0,0],[1,0]],[[0,0],[0,0]]]}})")),
               ModelError);
  EXPECT_THROW(load_model(kModels + "/does_not_exist.json"), ArgumentError);
}

TEST(ModelFile, InitialStates) {
  const Matrix excited = density_from_json(
      parse_json_text(read_text_file(kModels + "/excited_state.json")), 2);
  EXPECT_EQ(excited(1, 1), Complex(1.0));
  EXPECT_EQ(excited(0, 0), Complex(0.0));
  const Matrix plus = density_from_json(
      parse_json_text(read_text_file(kModels + "/plus_state.json")), 2);
  EXPECT_NEAR(plus(0, 1).real(), 0.5, 1e-15);
  EXPECT_EQ(ground_state(4)(0, 0), Complex(1.0));
  EXPECT_THROW(density_from_json(parse_json_text("[[1]]"), 2), ModelError);
}

TEST(ModelFile, TabulatedDrivenQubitMatchesFormula) {
  const TimeDependentLindbladian tl =
      build_time_dependent(load_model(kModels + "/driven_damped_qubit.json"));
  const Matrix x = oracle::naive_pauli("X", 1.0), z = oracle::naive_pauli("Z", 1.0);
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    const Matrix expected = 0.3 * std::cos(t) * x + z;
    EXPECT_LT((tl.sample(t).hamiltonian - expected).cwiseAbs().maxCoeff(), 1e-14) << t;
  }
  // Linear interpolation of cos on a 0.05 grid is within h^2 / 8 of it.
  const Matrix mid = tl.sample(0.525).hamiltonian;
  EXPECT_NEAR(mid(0, 1).real(), 0.3 * std::cos(0.525), 0.3 * 0.05 * 0.05 / 8);
}
