#ifndef GRK_SOLVERS_HPP
#define GRK_SOLVERS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grk/linalg.hpp"
#include "grk/selection.hpp"

namespace grk {

enum class Variant { Cyclic, RK, GRK, MGRK };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Cyclic: return "cyclic";
    case Variant::RK: return "rk";
    case Variant::GRK: return "grk";
    case Variant::MGRK: return "mgrk";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "cyclic") return Variant::Cyclic;
  if (s == "rk") return Variant::RK;
  if (s == "grk") return Variant::GRK;
  if (s == "mgrk") return Variant::MGRK;
  throw std::invalid_argument("unknown method '" + s + "'");
}

struct SolverConfig {
  Variant variant = Variant::GRK;
  double alpha = 1.0;
  double beta = 0.0;
  double theta = 0.5;
  GammaMode gamma_mode = GammaMode::Frobenius;
  ProbabilityRule prob_rule = ProbabilityRule::ResidualProportional;
  std::uint64_t seed = 0;
  Index max_iters = 1'000'000;
  // ||x - x*||^2 / ||x*||^2; used whenever the problem carries x*.
  double rse_tol = 1e-12;
  // ||A x - b||^2 / ||b||^2; used when x* is unknown.
  double residual_tol = 1e-24;
  // residual entries with |r_i| <= scale * max(1, ||b||_inf) count as zero
  double residual_floor_scale = 1e-14;
  Index refresh_interval = 1000;
  // rows of A A^T are cached per run for dense matrices with at most this many rows
  Index gram_cache_rows = 2048;

  bool operator==(const SolverConfig&) const = default;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0,1]");
    if (variant == Variant::GRK && beta != 0.0)
      throw std::invalid_argument("grk does not take momentum; use mgrk");
    if (refresh_interval == 0) throw std::invalid_argument("refresh interval must be positive");
  }
};

inline constexpr Index kNoIndex = std::numeric_limits<Index>::max();

/// State at iterate k and the selection made from it.
struct IterationRecord {
  Index k = 0;
  Index index = kNoIndex;  // i_k; kNoIndex on the terminal record
  Index set_size = 0;      // |J_k|
  double gamma = 0.0;      // Gamma_k
  double err_sq = std::numeric_limits<double>::quiet_NaN();  // ||x^k - x*||^2
  double res_sq = 0.0;     // ||A x^k - b||^2
  std::int64_t nanos = 0;  // wall clock since start of run

  bool has_error() const { return !std::isnan(err_sq); }
};

enum class Termination { RseTolerance, ResidualTolerance, ExactSolution, MaxIters };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::RseTolerance: return "rse_tol";
    case Termination::ResidualTolerance: return "residual_tol";
    case Termination::ExactSolution: return "exact_solution";
    case Termination::MaxIters: return "max_iters";
  }
  return "?";
}

struct Trace {
  SolverConfig config;
  double frobenius_sq = 0.0;
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIters;
  Vector solution;

  Index iterations() const { return records.empty() ? 0 : records.size() - 1; }
  bool converged() const { return termination != Termination::MaxIters; }
  double seconds() const { return records.empty() ? 0.0 : records.back().nanos * 1e-9; }
};

struct SolverState {
  Vector x;
  Vector x_prev;
  Index k = 0;
  Vector r;
  std::optional<Index> last_index;
};

/// x - alpha (<a_i, x> - b_i) / ||a_i||^2 a_i
inline Vector kaczmarz_project(std::span<const double> x, const RowView& a_i, double b_i,
                               double alpha) {
  const double nrm = norm_sq(a_i.values);
  if (!(nrm > 0.0)) throw std::invalid_argument("kaczmarz_project: zero row");
  Vector out(x.begin(), x.end());
  a_i.axpy(-alpha * (a_i.dot(x) - b_i) / nrm, out);
  return out;
}

/// Heavy-ball step: projection step plus beta (x - x_prev).
inline Vector momentum_step(const SolverState& s, const RowView& a_i, double b_i, double alpha,
                            double beta) {
  const double nrm = norm_sq(a_i.values);
  if (!(nrm > 0.0)) throw std::invalid_argument("momentum_step: zero row");
  const double step = alpha * (a_i.dot(s.x) - b_i) / nrm;
  Vector out(s.x.begin(), s.x.end());
  if (beta != 0.0)
    for (Index j = 0; j < out.size(); ++j) out[j] += beta * (s.x[j] - s.x_prev[j]);
  a_i.axpy(-step, out);
  return out;
}

/// Maintains r = A x - b across projection and momentum steps without
/// touching x. For an update x+ = x - step a_i + beta (x - x_prev):
///   r+ = r - step (A a_i) + beta (r - r_prev).
class ResidualTracker {
 public:
  ResidualTracker(const RowAccessMatrix& a, std::span<const double> b, Index gram_cache_rows)
      : a_(&a), b_(b) {
    if (!a.is_sparse() && a.rows() <= gram_cache_rows) gram_.resize(a.rows());
  }

  void reset(std::span<const double> x, std::span<const double> x_prev) {
    r_ = residual(*a_, x, b_);
    r_prev_ = residual(*a_, x_prev, b_);
  }

  void reset(std::span<const double> x) {
    r_ = residual(*a_, x, b_);
    r_prev_ = r_;
  }

  const Vector& r() const { return r_; }
  const Vector& r_prev() const { return r_prev_; }

  void apply(Index i, double step, double beta) {
    if (beta != 0.0) {
      for (Index k = 0; k < r_.size(); ++k) {
        const double cur = r_[k];
        r_[k] += beta * (cur - r_prev_[k]);
        r_prev_[k] = cur;
      }
    } else {
      r_prev_ = r_;
    }
    if (!gram_.empty()) {
      const Vector& g = gram_column(i);
      for (Index k = 0; k < r_.size(); ++k) r_[k] -= step * g[k];
    } else {
      a_->accumulate_gram_column(i, -step, r_);
    }
  }

 private:
  const Vector& gram_column(Index i) {
    Vector& g = gram_[i];
    if (g.empty()) {
      g.assign(a_->rows(), 0.0);
      a_->accumulate_gram_column(i, 1.0, g);
    }
    return g;
  }

  const RowAccessMatrix* a_;
  std::span<const double> b_;
  Vector r_;
  Vector r_prev_;
  std::vector<Vector> gram_;
};

/// Read-only view handed to an observer once per recorded iterate.
struct IterateView {
  Index k;
  std::span<const double> x;
  std::span<const double> r;
  std::optional<Index> last_index;
};

using IterationObserver = std::function<void(const IterateView&)>;

namespace detail {

class RowSampler {
 public:
  explicit RowSampler(const RowAccessMatrix& a) : cdf_(a.rows()) {
    double acc = 0.0;
    for (Index i = 0; i < a.rows(); ++i) cdf_[i] = (acc += a.row_norm_sq(i));
  }

  template <class Rng>
  Index draw(Rng& rng) const {
    const double u = uniform01(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<Index>(static_cast<Index>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  Vector cdf_;
};

}  // namespace detail

/// Runs one solver from x^(0) = 0. Every iterate k = 0..K is recorded; record
/// k carries the selection that produced x^(k+1).
inline Trace run(const Problem& problem, const SolverConfig& config,
                 const IterationObserver& observer = {}) {
  config.validate();
  const RowAccessMatrix& a = problem.a;
  const Index m = a.rows(), n = a.cols();
  const bool momentum = config.beta != 0.0;

  Trace trace;
  trace.config = config;
  trace.frobenius_sq = a.frobenius_sq();

  std::mt19937_64 rng(config.seed);
  std::optional<detail::RowSampler> row_sampler;
  if (config.variant == Variant::RK) row_sampler.emplace(a);

  const double b_inf = norm_inf(problem.b);
  const double b_sq = norm_sq(problem.b);
  const double residual_floor = config.residual_floor_scale * std::max(1.0, b_inf);
  const Vector* xs = problem.x_star ? &*problem.x_star : nullptr;
  const double xs_sq = xs ? norm_sq(*xs) : 0.0;

  Vector x(n, 0.0), x_prev(n, 0.0);
  ResidualTracker tracker(a, problem.b, config.gram_cache_rows);
  tracker.reset(x);
  std::optional<Index> last_index;

  const auto start = std::chrono::steady_clock::now();
  for (Index k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.res_sq = norm_sq(tracker.r());
    if (xs) rec.err_sq = distance_sq(x, *xs);
    if (observer) observer({k, x, tracker.r(), last_index});

    std::optional<Termination> stop;
    if (xs) {
      const double rse = xs_sq > 0.0 ? rec.err_sq / xs_sq : rec.err_sq;
      if (rse <= config.rse_tol) stop = Termination::RseTolerance;
    } else {
      const double rel = b_sq > 0.0 ? rec.res_sq / b_sq : rec.res_sq;
      if (rel <= config.residual_tol) stop = Termination::ResidualTolerance;
    }
    if (!stop && rec.res_sq == 0.0) stop = Termination::ExactSolution;
    if (!stop && k >= config.max_iters) stop = Termination::MaxIters;

    Index i = kNoIndex;
    if (!stop) {
      switch (config.variant) {
        case Variant::Cyclic:
          i = k % m;
          rec.set_size = 1;
          rec.gamma = a.frobenius_sq();
          break;
        case Variant::RK:
          i = row_sampler->draw(rng);
          rec.set_size = m;
          rec.gamma = a.frobenius_sq();
          break;
        case Variant::GRK:
        case Variant::MGRK: {
          const GammaResult g =
              active_set_gamma(a, tracker.r(), config.gamma_mode, last_index, residual_floor);
          if (g.converged()) {
            stop = Termination::ExactSolution;
            break;
          }
          const WorkingSet ws = greedy_set(a, tracker.r(), g.gamma, config.theta);
          const Vector p = sampling_distribution(tracker.r(), ws, config.prob_rule);
          i = ws.indices[sample_index(p, rng)];
          rec.set_size = ws.indices.size();
          rec.gamma = g.gamma;
          break;
        }
      }
    }
    if (stop) {
      rec.nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      trace.records.push_back(rec);
      trace.termination = *stop;
      break;
    }
    rec.index = i;

    const RowView ai = a.row(i);
    const double step = config.alpha * (ai.dot(x) - problem.b[i]) / a.row_norm_sq(i);
    if (momentum) {
      for (Index j = 0; j < n; ++j) {
        const double cur = x[j];
        x[j] += config.beta * (cur - x_prev[j]);
        x_prev[j] = cur;
      }
    }
    ai.axpy(-step, x);
    tracker.apply(i, step, config.beta);
    last_index = i;

    if ((k + 1) % config.refresh_interval == 0) {
      if (momentum)
        tracker.reset(x, x_prev);
      else
        tracker.reset(x);
    }
    rec.nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    trace.records.push_back(rec);
  }
  trace.solution = std::move(x);
  return trace;
}

}  // namespace grk

#endif  // GRK_SOLVERS_HPP
