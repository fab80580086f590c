#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid input or usage,
// 3 infeasible precision, 1 anything else.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lindblad/lindblad.hpp"
#include "primitives_report.hpp"

namespace lindblad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfeasible = 3;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline nlohmann::json report_to_json(const SimulationReport& r) {
  nlohmann::json j;
  j["total_time"] = r.total_time;
  j["eps"] = r.eps;
  j["segments"] = r.segments;
  j["segment_time"] = r.segment_time;
  j["K"] = r.config.K;
  j["Kp"] = r.config.Kp;
  j["q"] = r.config.q;
  j["kraus_terms"] = r.kraus_terms;
  j["bound_duhamel"] = r.segment_bound.duhamel;
  j["bound_quadrature"] = r.segment_bound.quadrature;
  j["bound_taylor"] = r.segment_bound.taylor;
  j["bound_total"] = r.bound_total;
  j["normalizer_sum_squares"] = r.normalizer_sum_squares;
  if (r.measured_choi_error) {
    j["measured_choi_error"] = r.measured_choi_error->lower;
    j["measured_choi_error_upper"] = r.measured_choi_error->upper;
  } else {
    j["measured_choi_error"] = nullptr;
  }
  return j;
}

inline nlohmann::json td_report_to_json(const TdReport& r) {
  nlohmann::json j;
  j["total_time"] = r.total_time;
  j["eps"] = r.eps;
  j["segments"] = r.segments;
  j["segment_time"] = r.segment_time;
  j["K"] = r.config.K;
  j["Kp"] = r.config.Kp;
  j["q"] = r.config.q;
  j["dyson_order"] = r.dyson.order;
  j["dyson_grid"] = r.dyson.grid;
  j["bound_duhamel"] = r.bound_duhamel;
  j["bound_quadrature"] = r.bound_quadrature;
  j["bound_dyson"] = r.bound_dyson;
  j["bound_total"] = r.bound_total;
  return j;
}

namespace detail {

/// Writes to --out when given, otherwise to `out`.
inline void emit(const std::string& text, const std::string& path,
                 std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot write '" + path + "'");
  f << text;
}

inline std::string model_label(const ModelFile& mf, const std::string& path) {
  if (!mf.name.empty()) return mf.name;
  return std::filesystem::path(path).stem().string();
}

inline Matrix load_rho0(const std::string& path, Eigen::Index d) {
  if (path.empty()) return ground_state(d);
  return density_from_json(parse_json_text(read_text_file(path)), d);
}

inline WeightSumConvention parse_convention(const std::string& s) {
  if (s == "conservative") return WeightSumConvention::kConservative;
  if (s == "exact") return WeightSumConvention::kExact;
  throw ArgumentError("--weight-sum must be 'conservative' or 'exact'");
}

struct SimulateArgs {
  std::string model;
  std::string rho0;
  double time = 0.0;
  double eps = 0.0;
  std::string out;
  bool verify = false;
  unsigned workers = 1;
  std::string weight_sum = "conservative";
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const ModelFile mf = load_model(a.model);
  const Lindbladian l = build_lindbladian(mf);
  if (a.verify && mf.n_qubits > 3) {
    throw ArgumentError("--verify is limited to at most 3 qubits");
  }
  const Matrix rho0 = load_rho0(a.rho0, l.dim());
  SimulateOptions opts;
  opts.workers = a.workers;
  opts.verify = a.verify;
  opts.convention = parse_convention(a.weight_sum);
  const SimulationResult res = simulate(l, rho0, a.time, a.eps, opts);
  nlohmann::json j;
  j["model"] = model_label(mf, a.model);
  j["rho"] = matrix_to_json(res.rho);
  j["report"] = report_to_json(res.report);
  emit(j.dump(2) + "\n", a.out, out);
  return kExitOk;
}

struct AnalyzeArgs {
  std::vector<std::string> models;
  std::vector<double> times{0.1, 0.5};
  std::vector<int> K{1, 2, 3, 4};
  std::vector<int> Kp{2, 4, 6, 8};
  std::vector<int> q{1, 2, 3, 4};
  std::string out;
  unsigned workers = 1;
  bool timing = false;
};

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  struct Row {
    std::string model;
    double t;
    int K, Kp, q;
    std::size_t model_index;
  };
  std::vector<std::pair<std::string, Lindbladian>> models;
  for (const auto& path : a.models) {
    const ModelFile mf = load_model(path);
    if (mf.n_qubits > 3) {
      throw ArgumentError("analyze-error is limited to at most 3 qubits");
    }
    models.emplace_back(model_label(mf, path), build_lindbladian(mf));
  }
  for (double t : a.times) {
    if (!(t > 0.0)) throw ArgumentError("--times entries must be positive");
  }
  std::vector<Row> rows;
  for (std::size_t m = 0; m < models.size(); ++m)
    for (double t : a.times)
      for (int k : a.K)
        for (int kp : a.Kp)
          for (int q : a.q) rows.push_back({models[m].first, t, k, kp, q, m});
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.model, x.t, x.K, x.Kp, x.q) <
           std::tie(y.model, y.t, y.K, y.Kp, y.q);
  });

  auto lines = parallel_map(rows.size(), a.workers, [&](std::size_t i) {
    const Row& r = rows[i];
    const Lindbladian& l = models[r.model_index].second;
    const auto start = std::chrono::steady_clock::now();
    const Superoperator approx = approximant_superoperator(l, r.t, r.K, r.Kp, r.q);
    const DiamondInterval err = diamond_sandwich(exact_channel(l, r.t), approx);
    const double ms =
        a.timing ? std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count()
                 : 0.0;
    const double be = be_norm(l);
    const bool jumps = l.num_jumps() > 0;
    std::ostringstream line;
    line << r.model << ',' << format_double(r.t) << ',' << r.K << ',' << r.Kp
         << ',' << r.q << ','
         << format_double(jumps ? bound_duhamel(r.K, r.t, be) : 0.0) << ','
         << format_double(bound_quadrature_total(r.K, r.q, r.t, be)) << ','
         << format_double(bound_taylor_total(r.K, r.Kp, r.t, be)) << ','
         << format_double(err.lower) << ',' << format_double(err.upper) << ','
         << format_double(ms) << '\n';
    return line.str();
  });
  std::string text =
      "model,t,K,Kp,q,bound_duhamel,bound_quadrature,bound_taylor,choi_lower,"
      "choi_upper,runtime_ms\n";
  for (const auto& line : lines) text += line;
  emit(text, a.out, out);
  return kExitOk;
}

struct QuadratureArgs {
  std::vector<int> q{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> times{0.1, 1.0, 7.0};
  bool table = false;
  std::string out;
};

inline int cmd_quadrature(const QuadratureArgs& a, std::ostream& out) {
  std::string text;
  if (a.table) {
    text = "q,t,j,node,weight\n";
    for (int q : a.q)
      for (double t : a.times) {
        const QuadratureRule r = canonical_rule(q, t);
        for (int j = 0; j < q; ++j) {
          text += std::to_string(q) + ',' + format_double(t) + ',' +
                  std::to_string(j) + ',' + format_double(r.nodes[j]) + ',' +
                  format_double(r.weights[j]) + '\n';
        }
      }
  } else {
    text = "q,t,ell,moment_lhs,moment_rhs,residual\n";
    for (int q : a.q)
      for (double t : a.times) {
        const QuadratureRule r = canonical_rule(q, t);
        for (int ell = 0; ell <= 2 * q - 1; ++ell) {
          const double lhs = r.moment(ell);
          const double rhs = std::pow(t, ell + 1) / (ell + 1);
          text += std::to_string(q) + ',' + format_double(t) + ',' +
                  std::to_string(ell) + ',' + format_double(lhs) + ',' +
                  format_double(rhs) + ',' +
                  format_double(std::abs(lhs - rhs) / std::abs(rhs)) + '\n';
        }
      }
  }
  emit(text, a.out, out);
  return kExitOk;
}

struct KrausDumpArgs {
  std::string model;
  double time = 0.0;
  std::optional<double> eps;
  std::optional<int> K, Kp, q;
  std::string out;
};

inline std::string join_indices(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

inline int cmd_kraus_dump(const KrausDumpArgs& a, std::ostream& out) {
  const ModelFile mf = load_model(a.model);
  const Lindbladian l = build_lindbladian(mf);
  TruncationConfig cfg;
  if (a.eps) {
    cfg = choose_orders(l, a.time, *a.eps);
  } else if (!a.K || !a.Kp || !a.q) {
    throw ArgumentError("kraus-dump needs --eps or all of --K, --Kp, --q");
  }
  if (a.K) cfg.K = *a.K;
  if (a.Kp) cfg.Kp = *a.Kp;
  if (a.q) cfg.q = *a.q;
  cfg.segment_time = a.time;
  if (kraus_term_count(l.num_jumps(), cfg.q, cfg.K) > kMaxMaterializedKrausTerms) {
    throw ResourceLimitError("kraus-dump: too many terms to list");
  }
  std::string text = "index,k,ells,js,coefficient,normalizer,operator_norm\n";
  std::size_t index = 0;
  for_each_kraus_term(l, a.time, cfg, [&](const KrausTerm& t) {
    text += std::to_string(index++) + ',' + std::to_string(t.k) + ',' +
            join_indices(t.ells) + ',' + join_indices(t.js) + ',' +
            format_double(t.coefficient) + ',' + format_double(t.normalizer) +
            ',' + format_double(spectral_norm(t.kraus_operator())) + '\n';
  });
  emit(text, a.out, out);
  return kExitOk;
}

struct TdArgs {
  std::string model;
  std::string rho0;
  double time = 0.0;
  double eps = 0.0;
  std::optional<int> dyson_order;
  std::optional<int> grid;
  std::string out;
  unsigned workers = 1;
};

inline int cmd_td(const TdArgs& a, std::ostream& out) {
  const ModelFile mf = load_model(a.model);
  const TimeDependentLindbladian tl = build_time_dependent(mf);
  const Matrix rho0 = load_rho0(a.rho0, tl.dim());
  TdOptions opts;
  opts.dyson_order = a.dyson_order;
  opts.grid = a.grid;
  opts.workers = a.workers;
  const TdResult res = td_simulate(tl, rho0, a.time, a.eps, opts);
  nlohmann::json j;
  j["model"] = model_label(mf, a.model);
  j["rho"] = matrix_to_json(res.rho);
  j["report"] = td_report_to_json(res.report);
  emit(j.dump(2) + "\n", a.out, out);
  return kExitOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Higher-order Duhamel-series Lindblad simulator"};
  app.name("lindblad");
  app.require_subcommand(1);

  detail::SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the segmented simulation");
  sim_cmd->add_option("--model", sim.model, "Model JSON file")->required();
  sim_cmd->add_option("--rho0", sim.rho0, "Initial state JSON (default |0..0>)");
  sim_cmd->add_option("--time", sim.time, "Evolution time")->required();
  sim_cmd->add_option("--eps", sim.eps, "Target diamond-norm error")->required();
  sim_cmd->add_option("--out", sim.out, "Output JSON path (default stdout)");
  sim_cmd->add_flag("--verify", sim.verify, "Compare with the exact channel");
  sim_cmd->add_option("--workers", sim.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--weight-sum", sim.weight_sum,
                      "Segment sizing: conservative or exact");

  detail::AnalyzeArgs an;
  auto* an_cmd =
      app.add_subcommand("analyze-error", "Sweep truncation orders against the exact channel");
  an_cmd->add_option("--model", an.models, "Model JSON file (repeatable)")->required();
  an_cmd->add_option("--times", an.times, "Comma-separated times")->delimiter(',');
  an_cmd->add_option("--K", an.K, "Duhamel orders")->delimiter(',');
  an_cmd->add_option("--Kp", an.Kp, "Taylor orders")->delimiter(',');
  an_cmd->add_option("--q", an.q, "Quadrature orders")->delimiter(',');
  an_cmd->add_option("--out", an.out, "Output CSV path (default stdout)");
  an_cmd->add_option("--workers", an.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  an_cmd->add_flag("--timing", an.timing, "Fill runtime_ms with wall time");

  detail::QuadratureArgs qa;
  auto* q_cmd = app.add_subcommand("quadrature", "Gauss-Legendre moment residuals");
  q_cmd->add_option("--q", qa.q, "Quadrature orders")->delimiter(',');
  q_cmd->add_option("--times", qa.times, "Interval lengths")->delimiter(',');
  q_cmd->add_flag("--table", qa.table, "Emit nodes and weights instead");
  q_cmd->add_option("--out", qa.out, "Output CSV path (default stdout)");

  std::uint64_t seed = 7;
  std::string prim_out;
  auto* p_cmd = app.add_subcommand("primitives-verify",
                                   "Check block-encoding, LCU and amplification contracts");
  p_cmd->add_option("--seed", seed, "Seed for the random instances");
  p_cmd->add_option("--out", prim_out, "Output JSON path (default stdout)");

  detail::KrausDumpArgs kd;
  auto* k_cmd = app.add_subcommand("kraus-dump", "List Kraus terms of one segment");
  k_cmd->add_option("--model", kd.model, "Model JSON file")->required();
  k_cmd->add_option("--time", kd.time, "Segment length")->required();
  k_cmd->add_option("--eps", kd.eps, "Choose orders for this precision");
  k_cmd->add_option("--K", kd.K, "Duhamel order");
  k_cmd->add_option("--Kp", kd.Kp, "Taylor order");
  k_cmd->add_option("--q", kd.q, "Quadrature order");
  k_cmd->add_option("--out", kd.out, "Output CSV path (default stdout)");

  detail::TdArgs td;
  auto* td_cmd =
      app.add_subcommand("td-simulate", "Simulate a time-dependent model");
  td_cmd->add_option("--model", td.model, "Model JSON file")->required();
  td_cmd->add_option("--rho0", td.rho0, "Initial state JSON (default |0..0>)");
  td_cmd->add_option("--time", td.time, "Evolution time")->required();
  td_cmd->add_option("--eps", td.eps, "Target error")->required();
  td_cmd->add_option("--dyson-order", td.dyson_order, "Dyson truncation order");
  td_cmd->add_option("--grid", td.grid, "Dyson grid points per interval");
  td_cmd->add_option("--out", td.out, "Output JSON path (default stdout)");
  td_cmd->add_option("--workers", td.workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*sim_cmd) return detail::cmd_simulate(sim, out);
    if (*an_cmd) return detail::cmd_analyze(an, out);
    if (*q_cmd) return detail::cmd_quadrature(qa, out);
    if (*p_cmd) {
      const auto checks = primitive_checks(seed);
      const auto j = checks_to_json(seed, checks);
      detail::emit(j.dump(2) + "\n", prim_out, out);
      return j["all_pass"].get<bool>() ? kExitOk : kExitFailure;
    }
    if (*k_cmd) return detail::cmd_kraus_dump(kd, out);
    if (*td_cmd) return detail::cmd_td(td, out);
  } catch (const InfeasiblePrecisionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace lindblad::cli
