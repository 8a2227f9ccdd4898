#ifndef GRK_ANALYSIS_HPP
#define GRK_ANALYSIS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "grk/linalg.hpp"
#include "grk/solvers.hpp"

namespace grk {

/// Leave-one-out squared Frobenius norm: max_i (||A||_F^2 - ||a_i||^2).
inline double gamma_leaveout(const RowAccessMatrix& a) {
  if (a.rows() < 2) throw std::invalid_argument("gamma_leaveout: need at least two rows");
  double smallest = a.row_norm_sq(0);
  for (Index i = 1; i < a.rows(); ++i) smallest = std::min(smallest, a.row_norm_sq(i));
  return a.frobenius_sq() - smallest;
}

struct GrkBounds {
  double expectation;    // GRK factor in expectation form
  double deterministic;  // iGRK factor
};

/// k-step error factors relative to ||x^0 - x*||^2:
///   expectation   (1 - (frob/gamma + 1) sigma^2 / (2 frob))^(k-1) (1 - sigma^2/frob)
///   deterministic (1 - sigma^2/gamma)^(k-1) (1 - sigma^2/frob)
inline GrkBounds grk_bounds(double sigma_min_sq, double frob_sq, double gamma, Index k) {
  if (!(sigma_min_sq > 0.0)) throw std::invalid_argument("grk_bounds: sigma_min^2 must be positive");
  if (!(sigma_min_sq <= gamma)) throw std::invalid_argument("grk_bounds: need sigma_min^2 <= gamma");
  if (!(gamma < frob_sq)) throw std::invalid_argument("grk_bounds: need gamma < ||A||_F^2");
  if (k == 0) return {1.0, 1.0};
  const double first = 1.0 - sigma_min_sq / frob_sq;
  const double e = 1.0 - 0.5 * (frob_sq / gamma + 1.0) * sigma_min_sq / frob_sq;
  const double d = 1.0 - sigma_min_sq / gamma;
  const double p = static_cast<double>(k - 1);
  return {std::pow(e, p) * first, std::pow(d, p) * first};
}

struct RateReport {
  double sigma_min_sq = 0.0;
  double frob_sq = 0.0;
  double gamma_leaveout = 0.0;
  double grk_expectation_factor = 0.0;
  double igrk_factor = 0.0;
  double first_step_factor = 0.0;

  /// Deterministic bound on ||x^k - x*||^2 / ||x^0 - x*||^2.
  double bound_curve(Index k) const {
    return grk_bounds(sigma_min_sq, frob_sq, gamma_leaveout, k).deterministic;
  }
  double expectation_curve(Index k) const {
    return grk_bounds(sigma_min_sq, frob_sq, gamma_leaveout, k).expectation;
  }
};

inline RateReport rate_report(double sigma_min_sq, double frob_sq, double gamma) {
  grk_bounds(sigma_min_sq, frob_sq, gamma, 1);  // validates ordering
  RateReport r;
  r.sigma_min_sq = sigma_min_sq;
  r.frob_sq = frob_sq;
  r.gamma_leaveout = gamma;
  r.grk_expectation_factor = 1.0 - 0.5 * (frob_sq / gamma + 1.0) * sigma_min_sq / frob_sq;
  r.igrk_factor = 1.0 - sigma_min_sq / gamma;
  r.first_step_factor = 1.0 - sigma_min_sq / frob_sq;
  return r;
}

inline RateReport rate_report(const RowAccessMatrix& a, double sigma_min_sq) {
  return rate_report(sigma_min_sq, a.frobenius_sq(), gamma_leaveout(a));
}

struct MomentumReport {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double q = 0.0;
  double delta = 0.0;
  bool feasible = false;  // gamma1 + gamma2 < 1
  // largest admissible beta for this alpha; NaN when alpha > 1
  double beta_upper = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;

  /// q^k (1 + delta): bound on ||x^(k+1) - x*||^2 / ||x^0 - x*||^2.
  double bound(Index k) const { return std::pow(q, static_cast<double>(k)) * (1.0 + delta); }
};

inline void check_momentum_hypothesis(double alpha, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("momentum: beta must be nonnegative");
  if (beta == 0.0 && !(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("momentum: alpha must lie in (0,2) when beta = 0");
  if (beta > 0.0 && !(alpha > 0.0 && alpha < 1.0 + beta))
    throw std::invalid_argument("momentum: alpha must lie in (0,1+beta) when beta > 0");
}

/// tau1 = 4 - 3 alpha s, tau2 = (2 alpha - alpha^2) s with s = sigma^2/frob.
/// Any beta in [0, (sqrt(tau1^2 + 16 tau2) - tau1)/8) gives gamma1 + gamma2 < 1.
inline double beta_upper(double alpha, double sigma_min_sq, double frob_sq) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("beta_upper: alpha must lie in (0,1]");
  if (!(frob_sq > 0.0) || sigma_min_sq < 0.0) throw std::invalid_argument("beta_upper: bad spectrum");
  const double s = sigma_min_sq / frob_sq;
  const double tau1 = 4.0 - 3.0 * alpha * s;
  const double tau2 = (2.0 * alpha - alpha * alpha) * s;
  return (std::sqrt(tau1 * tau1 + 16.0 * tau2) - tau1) / 8.0;
}

inline MomentumReport momentum_factors(double alpha, double beta, double sigma_min_sq,
                                       double frob_sq) {
  check_momentum_hypothesis(alpha, beta);
  if (!(frob_sq > 0.0) || sigma_min_sq < 0.0) throw std::invalid_argument("momentum: bad spectrum");
  MomentumReport r;
  r.alpha = alpha;
  r.beta = beta;
  const double s = sigma_min_sq / frob_sq;
  r.gamma1 = 2.0 * beta * beta + 3.0 * beta + 1.0 - (3.0 * alpha * beta + 2.0 * alpha - alpha * alpha) * s;
  r.gamma2 = 2.0 * beta * beta + beta;
  r.q = r.gamma2 > 0.0 ? 0.5 * (r.gamma1 + std::sqrt(r.gamma1 * r.gamma1 + 4.0 * r.gamma2)) : r.gamma1;
  r.delta = r.q - r.gamma1;
  r.feasible = r.gamma1 + r.gamma2 < 1.0;
  r.tau1 = 4.0 - 3.0 * alpha * s;
  r.tau2 = (2.0 * alpha - alpha * alpha) * s;
  r.beta_upper = alpha <= 1.0 ? beta_upper(alpha, sigma_min_sq, frob_sq)
                              : std::numeric_limits<double>::quiet_NaN();
  return r;
}

struct ComplexityReport {
  double k1 = 0.0;  // from the expectation bound, confidence 1 - rho
  double k2 = 0.0;  // from the deterministic bound
  double epsilon = 0.0;
  double rho = 0.0;
};

inline ComplexityReport iteration_complexity(double sigma_min_sq, double frob_sq, double err0_sq,
                                             double epsilon, double rho) {
  if (!(sigma_min_sq > 0.0 && frob_sq > 0.0))
    throw std::invalid_argument("iteration_complexity: spectrum must be positive");
  if (!(epsilon > 0.0 && epsilon < err0_sq))
    throw std::invalid_argument("iteration_complexity: need 0 < epsilon < initial error");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("iteration_complexity: rho must lie in (0,1)");
  const double c = frob_sq / sigma_min_sq;
  return {c * std::log(err0_sq / (epsilon * rho)), c * std::log(err0_sq / epsilon), epsilon, rho};
}

enum class CertificationStatus { Pass, Violation, NotApplicable };

inline const char* to_string(CertificationStatus s) {
  switch (s) {
    case CertificationStatus::Pass: return "pass";
    case CertificationStatus::Violation: return "fail";
    case CertificationStatus::NotApplicable: return "n/a";
  }
  return "?";
}

struct Certification {
  CertificationStatus status = CertificationStatus::Pass;
  // index of the first record whose error exceeds its bound
  std::optional<Index> first_violation;
  Index checked = 0;
  // max over checked records of err / bound (slack excluded)
  double worst_ratio = 0.0;
  std::string reason;

  bool passed() const { return status == CertificationStatus::Pass; }
};

/// Relative slack added to every bound; scaled by ||x^0 - x*||^2.
inline constexpr double kCertificationSlack = 1e-9;

namespace detail {

inline void require_errors(const Trace& t) {
  for (const auto& r : t.records)
    if (!r.has_error()) throw std::invalid_argument("certify: trace lacks the error metric ||x - x*||^2");
}

template <class BoundFn>
Certification check_records(const Trace& t, Index first, BoundFn bound) {
  Certification c;
  const double err0 = t.records.front().err_sq;
  const double slack = kCertificationSlack * err0;
  for (Index k = first; k < t.records.size(); ++k) {
    const double b = bound(k);
    const double e = t.records[k].err_sq;
    ++c.checked;
    if (b > 0.0) c.worst_ratio = std::max(c.worst_ratio, e / b);
    if (e > b + slack) {
      c.status = CertificationStatus::Violation;
      c.first_violation = k;
      c.reason = "record " + std::to_string(k) + ": error " + std::to_string(e) +
                 " exceeds bound " + std::to_string(b);
      return c;
    }
  }
  return c;
}

inline Certification not_applicable(std::string why) {
  Certification c;
  c.status = CertificationStatus::NotApplicable;
  c.reason = std::move(why);
  return c;
}

}  // namespace detail

/// Pathwise check of the solver's stated contraction.
///  beta = 0: ||x^(k+1) - x*||^2 <= (1 - (2 alpha - alpha^2) sigma^2 / Gamma_k) ||x^k - x*||^2
///  beta > 0: ||x^(k+1) - x*||^2 <= q^k (1 + delta) ||x^0 - x*||^2 (requires gamma1 + gamma2 < 1)
/// Each bound gets slack kCertificationSlack * ||x^0 - x*||^2.
inline Certification certify_trace(const Trace& t, double sigma_min_sq) {
  const auto& cfg = t.config;
  if (cfg.variant != Variant::GRK && cfg.variant != Variant::MGRK)
    return detail::not_applicable("no pathwise bound for this method");
  if (t.records.empty()) return {};
  detail::require_errors(t);
  const double err0 = t.records.front().err_sq;

  if (cfg.beta == 0.0) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) return detail::not_applicable("alpha outside (0,2)");
    const double c = 2.0 * cfg.alpha - cfg.alpha * cfg.alpha;
    return detail::check_records(t, 1, [&](Index k) {
      const auto& prev = t.records[k - 1];
      return (1.0 - c * sigma_min_sq / prev.gamma) * prev.err_sq;
    });
  }

  MomentumReport mr;
  try {
    mr = momentum_factors(cfg.alpha, cfg.beta, sigma_min_sq, t.frobenius_sq);
  } catch (const std::invalid_argument& e) {
    return detail::not_applicable(e.what());
  }
  if (!mr.feasible) return detail::not_applicable("gamma1 + gamma2 >= 1");
  return detail::check_records(t, 1, [&](Index k) { return mr.bound(k - 1) * err0; });
}

/// Global k-step bound for alpha = 1, beta = 0 runs:
///  Exact / LastRow Gamma: (1 - sigma^2/gamma)^(k-1) (1 - sigma^2/frob)
///  Frobenius Gamma:       (1 - (theta frob/gamma + 1 - theta) sigma^2/frob)^(k-1) (1 - sigma^2/frob)
/// With theta = 1/2 the second line is the GRK expectation factor, here checked pathwise.
inline Certification certify_global_bound(const Trace& t, double sigma_min_sq, double gamma) {
  const auto& cfg = t.config;
  if ((cfg.variant != Variant::GRK && cfg.variant != Variant::MGRK) || cfg.alpha != 1.0 ||
      cfg.beta != 0.0)
    return detail::not_applicable("global bound needs a greedy method with alpha = 1, beta = 0");
  if (t.records.empty()) return {};
  detail::require_errors(t);
  const double frob = t.frobenius_sq;
  grk_bounds(sigma_min_sq, frob, gamma, 1);
  const double first = 1.0 - sigma_min_sq / frob;
  const double rate =
      cfg.gamma_mode == GammaMode::Frobenius
          ? 1.0 - (cfg.theta * frob / gamma + 1.0 - cfg.theta) * sigma_min_sq / frob
          : 1.0 - sigma_min_sq / gamma;
  const double err0 = t.records.front().err_sq;
  return detail::check_records(t, 1, [&](Index k) {
    return std::pow(rate, static_cast<double>(k - 1)) * first * err0;
  });
}

}  // namespace grk

#endif  // GRK_ANALYSIS_HPP
