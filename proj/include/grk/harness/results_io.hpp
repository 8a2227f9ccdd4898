#ifndef GRK_HARNESS_RESULTS_IO_HPP
#define GRK_HARNESS_RESULTS_IO_HPP

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "grk/analysis.hpp"
#include "grk/harness/experiment.hpp"
#include "grk/solvers.hpp"

namespace grk {

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw std::invalid_argument("unknown output format '" + s + "'");
}

namespace io_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline Termination parse_termination(const std::string& s) {
  for (auto t : {Termination::RseTolerance, Termination::ResidualTolerance,
                 Termination::ExactSolution, Termination::MaxIters})
    if (s == to_string(t)) return t;
  throw std::invalid_argument("unknown termination '" + s + "'");
}

inline CertificationStatus parse_certification(const std::string& s) {
  for (auto c : {CertificationStatus::Pass, CertificationStatus::Violation,
                 CertificationStatus::NotApplicable})
    if (s == to_string(c)) return c;
  throw std::invalid_argument("unknown certification status '" + s + "'");
}

}  // namespace io_detail

inline constexpr const char* kResultCsvHeader =
    "method,trial,seed,iters,seconds,final_rse,certified,termination";

/// One row per (method, trial), then one summary row per method with
/// trial = "mean" and termination = "max_iters_hits=<count>".
inline void write_results_csv(std::ostream& out, const ExperimentResult& r) {
  using io_detail::num;
  out << kResultCsvHeader << '\n';
  for (const auto& m : r.methods)
    for (const auto& t : m.trials)
      out << m.label << ',' << t.trial << ',' << t.seed << ',' << t.iters << ',' << num(t.seconds)
          << ',' << (t.final_rse ? num(*t.final_rse) : "") << ',' << to_string(t.certified) << ','
          << to_string(t.termination) << '\n';
  for (const auto& m : r.methods) {
    Index passed = 0;
    for (const auto& t : m.trials) passed += t.certified == CertificationStatus::Pass;
    out << m.label << ",mean,," << num(m.mean_iters) << ',' << num(m.mean_seconds) << ",,"
        << passed << '/' << m.trials.size() << ",max_iters_hits=" << m.max_iter_hits << '\n';
  }
}

inline nlohmann::json to_json(const SolverConfig& c) {
  return {{"method", to_string(c.variant)},    {"alpha", c.alpha},
          {"beta", c.beta},                    {"theta", c.theta},
          {"gamma_mode", to_string(c.gamma_mode)}, {"prob", to_string(c.prob_rule)},
          {"seed", c.seed},                    {"max_iters", c.max_iters},
          {"rse_tol", c.rse_tol},              {"residual_tol", c.residual_tol},
          {"residual_floor_scale", c.residual_floor_scale},
          {"refresh_interval", c.refresh_interval},
          {"gram_cache_rows", c.gram_cache_rows}};
}

inline SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  c.variant = parse_variant(j.at("method").get<std::string>());
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.theta = j.at("theta").get<double>();
  c.gamma_mode = parse_gamma_mode(j.at("gamma_mode").get<std::string>());
  c.prob_rule = parse_probability_rule(j.at("prob").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_iters = j.at("max_iters").get<Index>();
  c.rse_tol = j.at("rse_tol").get<double>();
  c.residual_tol = j.at("residual_tol").get<double>();
  c.residual_floor_scale = j.at("residual_floor_scale").get<double>();
  c.refresh_interval = j.at("refresh_interval").get<Index>();
  c.gram_cache_rows = j.at("gram_cache_rows").get<Index>();
  return c;
}

inline nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : r.methods) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : m.trials)
      trials.push_back({{"trial", t.trial},
                        {"seed", t.seed},
                        {"iters", t.iters},
                        {"seconds", t.seconds},
                        {"final_rse", t.final_rse ? nlohmann::json(*t.final_rse) : nlohmann::json()},
                        {"certified", to_string(t.certified)},
                        {"termination", to_string(t.termination)}});
    methods.push_back({{"label", m.label},
                       {"config", to_json(m.config)},
                       {"mean_iters", m.mean_iters},
                       {"mean_seconds", m.mean_seconds},
                       {"max_iter_hits", m.max_iter_hits},
                       {"trials", trials}});
  }
  return {{"trials", r.trials},
          {"sigma_min_sq", r.sigma_min_sq ? nlohmann::json(*r.sigma_min_sq) : nlohmann::json()},
          {"methods", methods}};
}

inline ExperimentResult experiment_result_from_json(const nlohmann::json& j) {
  ExperimentResult r;
  r.trials = j.at("trials").get<Index>();
  if (!j.at("sigma_min_sq").is_null()) r.sigma_min_sq = j.at("sigma_min_sq").get<double>();
  for (const auto& jm : j.at("methods")) {
    MethodResult m;
    m.label = jm.at("label").get<std::string>();
    m.config = solver_config_from_json(jm.at("config"));
    m.mean_iters = jm.at("mean_iters").get<double>();
    m.mean_seconds = jm.at("mean_seconds").get<double>();
    m.max_iter_hits = jm.at("max_iter_hits").get<Index>();
    for (const auto& jt : jm.at("trials")) {
      TrialResult t;
      t.trial = jt.at("trial").get<Index>();
      t.seed = jt.at("seed").get<std::uint64_t>();
      t.iters = jt.at("iters").get<Index>();
      t.seconds = jt.at("seconds").get<double>();
      if (!jt.at("final_rse").is_null()) t.final_rse = jt.at("final_rse").get<double>();
      t.certified = io_detail::parse_certification(jt.at("certified").get<std::string>());
      t.termination = io_detail::parse_termination(jt.at("termination").get<std::string>());
      m.trials.push_back(std::move(t));
    }
    r.methods.push_back(std::move(m));
  }
  return r;
}

inline void emit_results(const ExperimentResult& r, OutputFormat format, const std::string& path) {
  auto out = io_detail::open_out(path);
  if (format == OutputFormat::Csv)
    write_results_csv(out, r);
  else
    out << to_json(r).dump(2) << '\n';
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline constexpr const char* kTraceCsvHeader = "k,i_k,set_size,gamma_k,err_sq,res_sq";

/// Per-iteration trace for plotting. i_k is 0-based, -1 on the terminal
/// record; err_sq is empty when x* is unknown.
inline void write_trace_csv(std::ostream& out, const Trace& t) {
  using io_detail::num;
  out << kTraceCsvHeader << '\n';
  for (const auto& r : t.records) {
    out << r.k << ',';
    if (r.index == kNoIndex)
      out << -1;
    else
      out << r.index;
    out << ',' << r.set_size << ',' << num(r.gamma) << ',' << (r.has_error() ? num(r.err_sq) : "")
        << ',' << num(r.res_sq) << '\n';
  }
}

inline void write_trace_csv(const std::string& path, const Trace& t) {
  auto out = io_detail::open_out(path);
  write_trace_csv(out, t);
}

/// Records only; the caller supplies the run configuration.
inline std::vector<IterationRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader)
    throw std::invalid_argument("trace csv: unexpected header");
  std::vector<IterationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw std::invalid_argument("trace csv: malformed row '" + line + "'");
    IterationRecord r;
    r.k = std::stoull(f[0]);
    const long long idx = std::stoll(f[1]);
    r.index = idx < 0 ? kNoIndex : static_cast<Index>(idx);
    r.set_size = std::stoull(f[2]);
    r.gamma = std::stod(f[3]);
    if (!f[4].empty()) r.err_sq = std::stod(f[4]);
    r.res_sq = std::stod(f[5]);
    records.push_back(r);
  }
  return records;
}

inline std::vector<IterationRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace grk

#endif  // GRK_HARNESS_RESULTS_IO_HPP
