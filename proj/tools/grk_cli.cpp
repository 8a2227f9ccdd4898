// grk: command-line front end for the greedy Kaczmarz solvers.
//
//   grk gen      write a random consistent problem as Matrix Market files
//   grk solve    run one solver and write its per-iteration trace
//   grk bench    multi-trial, multi-method experiment
//   grk bound    print convergence constants for a matrix or for given norms
//   grk certify  re-check a stored trace against the pathwise bounds
//
// Exit codes: 0 success, 1 usage error, 2 numerical or certification failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grk/grk.hpp"

namespace {

using namespace grk;

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemArgs {
  std::string matrix, rhs;
  Index m = 0, n = 0, rank = 0;
  double kappa = 10.0;
  std::uint64_t problem_seed = 0;

  void add(CLI::App* app) {
    app->add_option("--matrix", matrix, "Matrix Market file");
    app->add_option("--rhs", rhs, "right-hand side (Matrix Market vector)");
    app->add_option("--m", m, "rows of a random problem");
    app->add_option("--n", n, "columns of a random problem");
    app->add_option("--rank", rank, "rank of a random problem (default min(m, n))");
    app->add_option("--kappa", kappa, "singular values drawn from [1, kappa]");
    app->add_option("--problem-seed", problem_seed, "seed of the problem generator");
  }

  ProblemSource source() const {
    if (!matrix.empty()) return FileProblemSpec{matrix, rhs, problem_seed};
    if (m == 0 || n == 0) throw UsageError("give --matrix or both --m and --n");
    return RandomProblemSpec{m, n, rank == 0 ? std::min(m, n) : rank, kappa, problem_seed};
  }
};

struct SolverArgs {
  std::string method = "grk", gamma_mode, prob;
  std::optional<double> alpha, beta, theta, rse_tol;
  std::optional<Index> max_iters;
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool single_method) {
    if (single_method)
      app->add_option("--method", method, "cyclic, rk, grk or mgrk")->check(CLI::IsMember({"cyclic", "rk", "grk", "mgrk"}));
    app->add_option("--alpha", alpha, "step size");
    app->add_option("--beta", beta, "momentum weight");
    app->add_option("--theta", theta, "greedy threshold weight in [0, 1]");
    app->add_option("--gamma-mode", gamma_mode, "exact, lastrow or frobenius")
        ->check(CLI::IsMember({"exact", "lastrow", "frobenius"}));
    app->add_option("--prob", prob, "residual or uniform")->check(CLI::IsMember({"residual", "uniform"}));
    app->add_option("--seed", seed, "solver seed (base seed for bench)");
    app->add_option("--rse-tol", rse_tol, "relative solution error tolerance");
    app->add_option("--max-iters", max_iters, "iteration cap");
  }

  SolverConfig base() const {
    SolverConfig c;
    if (alpha) c.alpha = *alpha;
    if (beta) c.beta = *beta;
    if (theta) c.theta = *theta;
    if (!gamma_mode.empty()) c.gamma_mode = parse_gamma_mode(gamma_mode);
    if (!prob.empty()) c.prob_rule = parse_probability_rule(prob);
    if (rse_tol) c.rse_tol = *rse_tol;
    if (max_iters) c.max_iters = *max_iters;
    c.seed = seed;
    return c;
  }

  SolverConfig config() const {
    SolverConfig c = base();
    c.variant = parse_variant(method);
    return c;
  }
};

int cmd_gen(const ProblemArgs& pa, const std::string& out) {
  if (pa.m == 0 || pa.n == 0) throw UsageError("gen needs --m and --n");
  if (out.empty()) throw UsageError("gen needs --out <prefix>");
  const RandomProblemSpec spec{pa.m, pa.n, pa.rank == 0 ? std::min(pa.m, pa.n) : pa.rank, pa.kappa,
                               pa.problem_seed};
  const Problem p = gen_random_problem(spec);
  write_matrix_market(out + "_A.mtx", p.a);
  write_matrix_market_vector(out + "_b.mtx", p.b);
  write_matrix_market_vector(out + "_xstar.mtx", *p.x_star);
  std::cout << "wrote " << out << "_A.mtx, " << out << "_b.mtx, " << out << "_xstar.mtx\n";
  return 0;
}

int cmd_solve(const ProblemArgs& pa, const SolverArgs& sa, const std::string& out, bool certify) {
  const PreparedProblem pp = prepare_problem(pa.source());
  const SolverConfig cfg = sa.config();
  const Trace t = run(pp.problem, cfg);
  if (out.empty() || out == "-")
    write_trace_csv(std::cout, t);
  else
    write_trace_csv(out, t);
  std::cerr << to_string(cfg.variant) << ": " << t.iterations() << " iterations, "
            << to_string(t.termination) << ", " << t.seconds() << " s\n";
  int rc = t.termination == Termination::MaxIters ? kExitFailure : 0;
  if (certify) {
    if (!pp.sigma_min_sq) throw UsageError("certification needs the dense oracle (matrix too large)");
    const Certification c = certify_trace(t, *pp.sigma_min_sq);
    std::cerr << "certification: " << to_string(c.status) << (c.reason.empty() ? "" : " (" + c.reason + ")")
              << '\n';
    if (c.status == CertificationStatus::Violation) rc = kExitFailure;
  }
  return rc;
}

int cmd_bench(const ProblemArgs& pa, const SolverArgs& sa, const std::vector<std::string>& methods,
              const std::string& config, Index trials, Index jobs, bool certify, const std::string& out,
              const std::string& format) {
  ExperimentSpec spec;
  if (!config.empty()) {
    spec = parse_experiment_config(config);
  } else {
    spec.source = pa.source();
    spec.trials = trials;
    spec.base_seed = sa.seed;
    for (const auto& m : methods.empty() ? std::vector<std::string>{"grk"} : methods)
      spec.methods.push_back(parse_method_spec(m, sa.base()));
  }
  if (jobs) spec.jobs = jobs;
  if (certify) spec.certify = true;
  const ExperimentResult r = run_experiment(spec);
  const OutputFormat f = parse_output_format(format);
  if (out.empty() || out == "-") {
    if (f == OutputFormat::Csv)
      write_results_csv(std::cout, r);
    else
      std::cout << to_json(r).dump(2) << '\n';
  } else {
    emit_results(r, f, out);
  }
  for (const auto& m : r.methods)
    std::cerr << m.label << ": mean Iter " << m.mean_iters << ", mean CPU " << m.mean_seconds << " s"
              << (m.max_iter_hits ? ", " + std::to_string(m.max_iter_hits) + " trials hit max_iters" : "")
              << '\n';
  for (const auto& m : r.methods)
    for (const auto& t : m.trials)
      if (t.certified == CertificationStatus::Violation) return kExitFailure;
  return 0;
}

struct Norms {
  double sigma_min_sq, frob_sq, gamma;
};

Norms norms_from(const std::string& matrix, std::optional<double> sigma_sq, std::optional<double> frob_sq,
                 std::optional<double> gamma) {
  if (!matrix.empty()) {
    const RowAccessMatrix a = read_matrix_market(matrix);
    const double s = sigma_sq ? *sigma_sq : std::pow(smallest_nonzero_singular_value(a), 2);
    return {s, a.frobenius_sq(), gamma ? *gamma : gamma_leaveout(a)};
  }
  if (!sigma_sq || !frob_sq) throw UsageError("give --matrix or both --sigma-min-sq and --frob-sq");
  return {*sigma_sq, *frob_sq, gamma ? *gamma : *frob_sq};
}

int cmd_bound(const Norms& nm, double alpha, double beta, double err0, double eps_rel, double rho,
              const std::string& format) {
  nlohmann::json j;
  j["sigma_min_sq"] = nm.sigma_min_sq;
  j["frob_sq"] = nm.frob_sq;
  j["gamma"] = nm.gamma;
  if (nm.gamma < nm.frob_sq) {
    const RateReport rr = rate_report(nm.sigma_min_sq, nm.frob_sq, nm.gamma);
    j["rate"] = {{"grk_expectation_factor", rr.grk_expectation_factor},
                 {"igrk_factor", rr.igrk_factor},
                 {"first_step_factor", rr.first_step_factor}};
  }
  const MomentumReport mr = momentum_factors(alpha, beta, nm.sigma_min_sq, nm.frob_sq);
  j["momentum"] = {{"alpha", mr.alpha},   {"beta", mr.beta},         {"gamma1", mr.gamma1},
                   {"gamma2", mr.gamma2}, {"q", mr.q},               {"delta", mr.delta},
                   {"feasible", mr.feasible}, {"beta_upper", std::isnan(mr.beta_upper) ? nlohmann::json() : nlohmann::json(mr.beta_upper)}};
  const ComplexityReport cr = iteration_complexity(nm.sigma_min_sq, nm.frob_sq, err0, eps_rel * err0, rho);
  j["complexity"] = {{"k1", cr.k1}, {"k2", cr.k2}, {"epsilon", cr.epsilon}, {"rho", cr.rho}};
  if (format == "json") {
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "sigma_min^2        " << nm.sigma_min_sq << "\n||A||_F^2          " << nm.frob_sq
            << "\ngamma              " << nm.gamma << '\n';
  if (j.contains("rate"))
    std::cout << "GRK factor         " << j["rate"]["grk_expectation_factor"].get<double>()
              << "\niGRK factor        " << j["rate"]["igrk_factor"].get<double>() << '\n';
  std::cout << "gamma1             " << mr.gamma1 << "\ngamma2             " << mr.gamma2
            << "\nq                  " << mr.q << "\ndelta              " << mr.delta
            << "\nfeasible           " << (mr.feasible ? "yes" : "no") << '\n';
  if (!std::isnan(mr.beta_upper)) std::cout << "beta upper         " << mr.beta_upper << '\n';
  std::cout << "K1                 " << cr.k1 << "\nK2                 " << cr.k2 << '\n';
  return 0;
}

int cmd_certify(const std::string& trace_path, const SolverArgs& sa, const Norms& nm, bool global) {
  Trace t;
  t.config = sa.config();
  t.frobenius_sq = nm.frob_sq;
  t.records = read_trace_csv(trace_path);
  const Certification c = global ? certify_global_bound(t, nm.sigma_min_sq, nm.gamma)
                                 : certify_trace(t, nm.sigma_min_sq);
  std::cout << to_string(c.status) << ": " << c.checked << " iterates checked, worst err/bound "
            << c.worst_ratio << (c.reason.empty() ? "" : ", " + c.reason) << '\n';
  return c.status == CertificationStatus::Violation ? kExitFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"greedy randomized Kaczmarz solvers"};
  app.require_subcommand(1);

  ProblemArgs pa;
  SolverArgs sa;
  std::string out, format = "csv", config, trace_path, matrix;
  std::vector<std::string> methods;
  Index trials = 20, jobs = 0;
  bool certify = false, global = false;
  std::optional<double> sigma_sq, frob_sq, gamma;
  double b_alpha = 1.0, b_beta = 0.0, err0 = 1.0, eps_rel = 1e-10, rho = 0.5;

  auto* gen = app.add_subcommand("gen", "write a random problem (<out>_A.mtx, _b.mtx, _xstar.mtx)");
  pa.add(gen);
  gen->add_option("--seed", pa.problem_seed, "problem seed");
  gen->add_option("--out", out, "output prefix")->required();

  auto* solve = app.add_subcommand("solve", "run one solver and write its trace CSV");
  pa.add(solve);
  sa.add(solve, true);
  solve->add_option("--out", out, "trace CSV path (default stdout)");
  solve->add_flag("--certify", certify, "check the pathwise bound on the trace");

  auto* bench = app.add_subcommand("bench", "multi-trial experiment");
  pa.add(bench);
  sa.add(bench, false);
  bench->add_option("--method", methods, "method, optionally name:key=value,... (repeatable)");
  bench->add_option("--config", config, "key = value experiment file");
  bench->add_option("--trials", trials, "trials per method");
  bench->add_option("--jobs", jobs, "worker threads");
  bench->add_flag("--certify", certify, "certify every trace");
  bench->add_option("--out", out, "results path (default stdout)");
  bench->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* bound = app.add_subcommand("bound", "print convergence constants");
  bound->add_option("--matrix", matrix, "Matrix Market file");
  bound->add_option("--sigma-min-sq", sigma_sq, "sigma_min(A)^2");
  bound->add_option("--frob-sq", frob_sq, "||A||_F^2");
  bound->add_option("--gamma", gamma, "leave-one-out norm (default from the matrix)");
  bound->add_option("--alpha", b_alpha, "step size");
  bound->add_option("--beta", b_beta, "momentum weight");
  bound->add_option("--err0", err0, "initial squared error");
  bound->add_option("--eps", eps_rel, "target error relative to --err0");
  bound->add_option("--rho", rho, "failure probability for K1");
  bound->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json", "csv"}));

  auto* cert = app.add_subcommand("certify", "re-check a stored trace");
  cert->add_option("--trace", trace_path, "trace CSV from 'grk solve'")->required();
  cert->add_option("--matrix", matrix, "Matrix Market file of the solved system");
  cert->add_option("--sigma-min-sq", sigma_sq, "sigma_min(A)^2");
  cert->add_option("--frob-sq", frob_sq, "||A||_F^2");
  cert->add_option("--gamma", gamma, "leave-one-out norm for --global");
  cert->add_flag("--global", global, "check the k-step bound instead of the per-step one");
  sa.add(cert, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(pa, out);
    if (*solve) return cmd_solve(pa, sa, out, certify);
    if (*bench) return cmd_bench(pa, sa, methods, config, trials, jobs, certify, out, format);
    if (*bound) return cmd_bound(norms_from(matrix, sigma_sq, frob_sq, gamma), b_alpha, b_beta, err0, eps_rel, rho, format);
    if (*cert) return cmd_certify(trace_path, sa, norms_from(matrix, sigma_sq, frob_sq, gamma), global);
  } catch (const NumericalError& e) {
    std::cerr << "grk: numerical failure: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "grk: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "grk: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
