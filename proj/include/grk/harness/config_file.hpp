#ifndef GRK_HARNESS_CONFIG_FILE_HPP
#define GRK_HARNESS_CONFIG_FILE_HPP

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "grk/harness/experiment.hpp"
#include "grk/solvers.hpp"

namespace grk {

namespace cfg_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

}  // namespace cfg_detail

/// Sets one solver option by name. Accepted keys: method, alpha, beta, theta,
/// gamma_mode, prob, seed, max_iters, rse_tol, residual_tol.
inline void apply_solver_option(SolverConfig& c, const std::string& key, const std::string& value) {
  if (key == "method") c.variant = parse_variant(value);
  else if (key == "alpha") c.alpha = std::stod(value);
  else if (key == "beta") c.beta = std::stod(value);
  else if (key == "theta") c.theta = std::stod(value);
  else if (key == "gamma_mode" || key == "gamma-mode") c.gamma_mode = parse_gamma_mode(value);
  else if (key == "prob") c.prob_rule = parse_probability_rule(value);
  else if (key == "seed") c.seed = std::stoull(value);
  else if (key == "max_iters" || key == "max-iters") c.max_iters = std::stoull(value);
  else if (key == "rse_tol" || key == "rse-tol") c.rse_tol = std::stod(value);
  else if (key == "residual_tol") c.residual_tol = std::stod(value);
  else throw std::invalid_argument("unknown solver option '" + key + "'");
}

/// "name" or "name:key=value,key=value" where name is a method; the label is
/// the whole string unless a label=... option is given.
inline MethodSpec parse_method_spec(const std::string& text, const SolverConfig& base) {
  MethodSpec ms;
  ms.config = base;
  const auto colon = text.find(':');
  ms.config.variant = parse_variant(text.substr(0, colon));
  ms.label = text;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    for (std::string kv; std::getline(ss, kv, ',');) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("method option '" + kv + "' lacks '='");
      const std::string key = cfg_detail::trim(kv.substr(0, eq)), value = cfg_detail::trim(kv.substr(eq + 1));
      if (key == "label")
        ms.label = value;
      else
        apply_solver_option(ms.config, key, value);
    }
  }
  return ms;
}

/// Plain `key = value` experiment description; '#' starts a comment.
///
///   m = 1000            # random problem (m, n, rank, kappa, problem_seed)
///   matrix = ash958.mtx # or a Matrix Market file (optional rhs = b.mtx)
///   trials = 20
///   seed = 0            # base seed; trial t uses seed + t
///   certify = true
///   jobs = 4
///   max_iters = 200000  # applies to every method defined after it
///   method = grk
///   method = mgrk:beta=0.4,label=mgrk_b04
inline ExperimentSpec parse_experiment_config(std::istream& in) {
  ExperimentSpec spec;
  RandomProblemSpec rs;
  FileProblemSpec fs;
  bool have_file = false;
  SolverConfig base;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = cfg_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = cfg_detail::trim(line.substr(0, eq));
    const std::string value = cfg_detail::trim(line.substr(eq + 1));
    try {
      if (key == "m") rs.m = std::stoull(value);
      else if (key == "n") rs.n = std::stoull(value);
      else if (key == "rank") rs.rank = std::stoull(value);
      else if (key == "kappa") rs.kappa = std::stod(value);
      else if (key == "problem_seed") rs.seed = fs.seed = std::stoull(value);
      else if (key == "matrix") { fs.matrix_path = value; have_file = true; }
      else if (key == "rhs") fs.rhs_path = value;
      else if (key == "trials") spec.trials = std::stoull(value);
      else if (key == "seed") spec.base_seed = std::stoull(value);
      else if (key == "certify") spec.certify = cfg_detail::parse_bool(value);
      else if (key == "keep_traces") spec.keep_traces = cfg_detail::parse_bool(value);
      else if (key == "jobs") spec.jobs = std::stoull(value);
      else if (key == "method") spec.methods.push_back(parse_method_spec(value, base));
      else apply_solver_option(base, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (have_file) {
    spec.source = fs;
  } else {
    if (rs.rank == 0) rs.rank = std::min(rs.m, rs.n);
    rs.validate();
    spec.source = rs;
  }
  return spec;
}

inline ExperimentSpec parse_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return parse_experiment_config(in);
}

}  // namespace grk

#endif  // GRK_HARNESS_CONFIG_FILE_HPP
