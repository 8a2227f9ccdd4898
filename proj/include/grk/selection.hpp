#ifndef GRK_SELECTION_HPP
#define GRK_SELECTION_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grk/linalg.hpp"

namespace grk {

/// How the threshold parameter Gamma_k is formed.
///  Exact:     sum of ||a_i||^2 over rows with nonzero residual.
///  LastRow:   ||A||_F^2 at k = 0, ||A||_F^2 - ||a_{i_{k-1}}||^2 afterwards.
///  Frobenius: ||A||_F^2 for every k (original GRK).
enum class GammaMode { Exact, LastRow, Frobenius };

enum class ProbabilityRule { ResidualProportional, Uniform };

inline const char* to_string(GammaMode m) {
  switch (m) {
    case GammaMode::Exact: return "exact";
    case GammaMode::LastRow: return "lastrow";
    case GammaMode::Frobenius: return "frobenius";
  }
  return "?";
}

inline const char* to_string(ProbabilityRule r) {
  return r == ProbabilityRule::Uniform ? "uniform" : "residual";
}

inline GammaMode parse_gamma_mode(const std::string& s) {
  if (s == "exact") return GammaMode::Exact;
  if (s == "lastrow") return GammaMode::LastRow;
  if (s == "frobenius") return GammaMode::Frobenius;
  throw std::invalid_argument("unknown gamma mode '" + s + "'");
}

inline ProbabilityRule parse_probability_rule(const std::string& s) {
  if (s == "residual") return ProbabilityRule::ResidualProportional;
  if (s == "uniform") return ProbabilityRule::Uniform;
  throw std::invalid_argument("unknown probability rule '" + s + "'");
}

struct GammaResult {
  double gamma = 0.0;
  // |N_k| for Exact mode; m for the other modes.
  Index active_count = 0;

  // Exact mode found no residual above the floor, i.e. A x = b.
  bool converged() const { return active_count == 0; }
};

/// Threshold parameter Gamma_k. `residual_floor` is the magnitude at or below
/// which a residual entry counts as zero (Exact mode only).
inline GammaResult active_set_gamma(const RowAccessMatrix& a, std::span<const double> r,
                                    GammaMode mode, std::optional<Index> last_index,
                                    double residual_floor) {
  if (r.size() != a.rows()) throw std::invalid_argument("active_set_gamma: r has wrong length");
  switch (mode) {
    case GammaMode::Frobenius:
      return {a.frobenius_sq(), a.rows()};
    case GammaMode::LastRow:
      if (!last_index) return {a.frobenius_sq(), a.rows()};
      if (*last_index >= a.rows()) throw std::out_of_range("active_set_gamma: last index");
      return {a.frobenius_sq() - a.row_norm_sq(*last_index), a.rows()};
    case GammaMode::Exact: {
      GammaResult g;
      for (Index i = 0; i < r.size(); ++i) {
        if (std::abs(r[i]) > residual_floor) {
          g.gamma += a.row_norm_sq(i);
          ++g.active_count;
        }
      }
      return g;
    }
  }
  throw std::invalid_argument("active_set_gamma: bad mode");
}

/// The greedy index set J_k (theta = 1/2) or its relaxed form S_k.
struct WorkingSet {
  std::vector<Index> indices;  // sorted
  double gamma_k = 0.0;
  Index active_count = 0;
  double threshold = 0.0;      // right-hand side of the greedy inequality
  double max_weighted = 0.0;   // max_i r_i^2 / ||a_i||^2
  double residual_sq = 0.0;    // ||r||^2
};

/// { i : r_i^2/||a_i||^2 >= theta * max_j r_j^2/||a_j||^2 + (1-theta) ||r||^2 / gamma }
/// Ties at the threshold are members. An argmax row is always included.
inline WorkingSet greedy_set(const RowAccessMatrix& a, std::span<const double> r, double gamma,
                             double theta) {
  if (r.size() != a.rows()) throw std::invalid_argument("greedy_set: r has wrong length");
  if (!(gamma > 0.0)) throw std::invalid_argument("greedy_set: gamma must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("greedy_set: theta outside [0,1]");

  WorkingSet ws;
  ws.gamma_k = gamma;
  Index argmax = 0;
  for (Index i = 0; i < r.size(); ++i) {
    const double ri2 = r[i] * r[i];
    ws.residual_sq += ri2;
    const double w = ri2 / a.row_norm_sq(i);
    if (w > ws.max_weighted) {
      ws.max_weighted = w;
      argmax = i;
    }
  }
  if (ws.residual_sq == 0.0) throw std::invalid_argument("greedy_set: residual is zero, system already solved");

  ws.threshold = theta * ws.max_weighted + (1.0 - theta) * ws.residual_sq / gamma;
  for (Index i = 0; i < r.size(); ++i) {
    if (i == argmax || r[i] * r[i] / a.row_norm_sq(i) >= ws.threshold) ws.indices.push_back(i);
  }
  return ws;
}

/// Probabilities over ws.indices, in the same order.
inline Vector sampling_distribution(std::span<const double> r, const WorkingSet& ws,
                                    ProbabilityRule rule) {
  if (ws.indices.empty()) throw std::invalid_argument("sampling_distribution: empty working set");
  Vector p(ws.indices.size());
  if (rule == ProbabilityRule::Uniform) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  double total = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    p[k] = r[ws.indices[k]] * r[ws.indices[k]];
    total += p[k];
  }
  if (!(total > 0.0)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (double& v : p) v /= total;
  return p;
}

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
template <class Rng>
double uniform01(Rng& rng) {
  static_assert(sizeof(typename Rng::result_type) >= 8, "needs a 64-bit generator");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw; returns a position into `probs`.
template <class Rng>
Index sample_index(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw std::invalid_argument("sample_index: empty distribution");
  if (probs.size() == 1) return 0;
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (Index k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  // rounding left u past the last partial sum; take the last positive entry
  for (Index k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return k;
  return probs.size() - 1;
}

}  // namespace grk

#endif  // GRK_SELECTION_HPP
