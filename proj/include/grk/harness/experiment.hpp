#ifndef GRK_HARNESS_EXPERIMENT_HPP
#define GRK_HARNESS_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "grk/analysis.hpp"
#include "grk/harness/matrix_market.hpp"
#include "grk/harness/random_problem.hpp"
#include "grk/linalg.hpp"
#include "grk/solvers.hpp"

namespace grk {

/// Largest min(m, n) for which the dense SVD oracle is used on file problems.
inline constexpr Index kDenseOracleLimit = 2000;

struct FileProblemSpec {
  std::string matrix_path;
  std::string rhs_path;  // empty: b = A x_true with Gaussian x_true
  std::uint64_t seed = 0;

  bool operator==(const FileProblemSpec&) const = default;
};

using ProblemSource = std::variant<RandomProblemSpec, FileProblemSpec>;

struct MethodSpec {
  std::string label;
  SolverConfig config;
};

struct ExperimentSpec {
  ProblemSource source;
  std::vector<MethodSpec> methods;
  Index trials = 20;
  std::uint64_t base_seed = 0;
  bool certify = false;
  bool keep_traces = false;
  Index jobs = 1;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("experiment: trials must be at least 1");
    if (methods.empty()) throw std::invalid_argument("experiment: no methods given");
    std::set<std::string> seen;
    for (const auto& m : methods) {
      if (m.label.empty()) throw std::invalid_argument("experiment: empty method label");
      if (!seen.insert(m.label).second)
        throw std::invalid_argument("experiment: duplicate method label '" + m.label + "'");
      m.config.validate();
    }
  }
};

struct TrialResult {
  Index trial = 0;
  std::uint64_t seed = 0;
  Index iters = 0;
  double seconds = 0.0;
  std::optional<double> final_rse;
  CertificationStatus certified = CertificationStatus::NotApplicable;
  Termination termination = Termination::MaxIters;
  std::optional<Trace> trace;

  bool operator==(const TrialResult& o) const {
    return trial == o.trial && seed == o.seed && iters == o.iters && seconds == o.seconds &&
           final_rse == o.final_rse && certified == o.certified && termination == o.termination;
  }
};

struct MethodResult {
  std::string label;
  SolverConfig config;
  std::vector<TrialResult> trials;
  double mean_iters = 0.0;
  double mean_seconds = 0.0;
  Index max_iter_hits = 0;

  bool operator==(const MethodResult&) const = default;
};

struct ExperimentResult {
  Index trials = 0;
  std::optional<double> sigma_min_sq;
  std::vector<MethodResult> methods;

  bool operator==(const ExperimentResult&) const = default;

  const MethodResult& method(const std::string& label) const {
    for (const auto& m : methods)
      if (m.label == label) return m;
    throw std::out_of_range("no method labelled '" + label + "'");
  }
};

/// Problem plus the spectral data the analysis layer needs (when computable).
struct PreparedProblem {
  Problem problem;
  std::optional<double> sigma_min_sq;
};

inline PreparedProblem prepare_problem(const ProblemSource& source) {
  if (const auto* rs = std::get_if<RandomProblemSpec>(&source)) {
    RowAccessMatrix a = random_matrix(*rs);
    const SpectralOracle oracle(a);
    const Vector x_true = gaussian_vector(rs->n, rs->seed ^ kSolutionStreamSalt);
    Vector b = a.multiply(x_true);
    Vector xs = min_norm_solution(oracle, a, b);
    const double s = oracle.sigma_min_nonzero();
    return {Problem(std::move(a), std::move(b), std::move(xs)), s * s};
  }
  const auto& fs = std::get<FileProblemSpec>(source);
  RowAccessMatrix a = read_matrix_market(fs.matrix_path);
  Vector b = fs.rhs_path.empty() ? a.multiply(gaussian_vector(a.cols(), fs.seed))
                                 : read_matrix_market_vector(fs.rhs_path);
  if (std::min(a.rows(), a.cols()) > kDenseOracleLimit) return {Problem(std::move(a), std::move(b)), {}};
  const SpectralOracle oracle(a);
  Vector xs = min_norm_solution(oracle, a, b);
  const double s = oracle.sigma_min_nonzero();
  return {Problem(std::move(a), std::move(b), std::move(xs)), s * s};
}

inline TrialResult run_trial(const PreparedProblem& pp, SolverConfig config, Index trial,
                             std::uint64_t seed, bool certify, bool keep_trace) {
  config.seed = seed;
  Trace t = run(pp.problem, config);
  TrialResult r;
  r.trial = trial;
  r.seed = seed;
  r.iters = t.iterations();
  r.seconds = t.seconds();
  r.termination = t.termination;
  if (pp.problem.x_star) {
    const double xs = norm_sq(*pp.problem.x_star);
    const double e = t.records.back().err_sq;
    r.final_rse = xs > 0.0 ? e / xs : e;
  }
  if (certify && pp.sigma_min_sq) r.certified = certify_trace(t, *pp.sigma_min_sq).status;
  if (keep_trace) r.trace = std::move(t);
  return r;
}

/// Each method runs `trials` solves with seeds base_seed + t on one shared problem.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const PreparedProblem& pp) {
  spec.validate();
  ExperimentResult res;
  res.trials = spec.trials;
  res.sigma_min_sq = pp.sigma_min_sq;
  res.methods.resize(spec.methods.size());
  for (Index mi = 0; mi < spec.methods.size(); ++mi) {
    res.methods[mi].label = spec.methods[mi].label;
    res.methods[mi].config = spec.methods[mi].config;
    res.methods[mi].trials.resize(spec.trials);
  }

  const Index tasks = spec.methods.size() * spec.trials;
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index task; (task = next++) < tasks;) {
      const Index mi = task / spec.trials, t = task % spec.trials;
      res.methods[mi].trials[t] = run_trial(pp, spec.methods[mi].config, t, spec.base_seed + t,
                                            spec.certify, spec.keep_traces);
    }
  };
  const Index jobs = std::clamp<Index>(spec.jobs, 1, tasks);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (Index j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (auto& m : res.methods) {
    double it = 0.0, sec = 0.0;
    for (const auto& t : m.trials) {
      it += static_cast<double>(t.iters);
      sec += t.seconds;
      if (t.termination == Termination::MaxIters) ++m.max_iter_hits;
    }
    m.mean_iters = it / static_cast<double>(m.trials.size());
    m.mean_seconds = sec / static_cast<double>(m.trials.size());
  }
  return res;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  return run_experiment(spec, prepare_problem(spec.source));
}

}  // namespace grk

#endif  // GRK_HARNESS_EXPERIMENT_HPP
