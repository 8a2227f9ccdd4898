#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "grk/analysis.hpp"
#include "test_support.hpp"

namespace grk {
namespace {

const RowAccessMatrix kDiag12 = RowAccessMatrix::dense({{1, 0}, {0, 2}});

double rel(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

TEST(GammaLeaveout, WorkedExamples) {
  EXPECT_DOUBLE_EQ(gamma_leaveout(RowAccessMatrix::dense({{1, 0}, {0, 1}})), 1.0);
  EXPECT_DOUBLE_EQ(gamma_leaveout(kDiag12), 4.0);
  // equal row norms c^2 = 2, m = 5
  const auto a = RowAccessMatrix::dense({{1, 1}, {1, -1}, {-1, 1}, {0, std::sqrt(2.0)}, {std::sqrt(2.0), 0}});
  EXPECT_NEAR(gamma_leaveout(a), 8.0, 1e-14);
  EXPECT_LT(gamma_leaveout(a), a.frobenius_sq());
}

TEST(GammaLeaveout, AgreesWithPerRowSums) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = RowAccessMatrix::from_eigen(testing::gaussian_rank_r(15, 5, 5, seed));
    double best = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      for (Index j = 0; j < a.rows(); ++j)
        if (j != i) s += a.row_norm_sq(j);
      best = std::max(best, s);
    }
    EXPECT_NEAR(gamma_leaveout(a), best, 1e-12 * best);
  }
}

TEST(GammaLeaveout, NeedsTwoRows) {
  EXPECT_THROW(gamma_leaveout(RowAccessMatrix::dense({{1, 2}})), std::invalid_argument);
}

TEST(GrkBounds, WorkedExamples) {
  const auto b1 = grk_bounds(1.0, 5.0, 4.0, 1);
  EXPECT_DOUBLE_EQ(b1.deterministic, 0.8);
  EXPECT_DOUBLE_EQ(b1.expectation, 0.8);
  const auto b2 = grk_bounds(1.0, 5.0, 4.0, 2);
  EXPECT_LE(rel(b2.deterministic, 0.6), 1e-12);
  EXPECT_LE(rel(b2.expectation, 0.62), 1e-12);
  const auto b3 = grk_bounds(2.0, 5.0, 2.0, 3);
  EXPECT_EQ(b3.deterministic, 0.0);
}

TEST(GrkBounds, ParameterOrder) {
  EXPECT_THROW(grk_bounds(0.0, 5.0, 4.0, 2), std::invalid_argument);
  EXPECT_THROW(grk_bounds(4.5, 5.0, 4.0, 2), std::invalid_argument);
  EXPECT_THROW(grk_bounds(1.0, 4.0, 4.0, 2), std::invalid_argument);
}

TEST(RateReport, FactorOrderingOnRandomTriples) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double frob = 1.0 + 100.0 * u(rng);
    const double gamma = frob * (0.01 + 0.98 * u(rng));
    const double s2 = gamma * (0.001 + 0.998 * u(rng));
    const RateReport r = rate_report(s2, frob, gamma);
    EXPECT_LT(r.igrk_factor, r.grk_expectation_factor);
    EXPECT_GE(r.igrk_factor, 0.0);
    EXPECT_LT(r.grk_expectation_factor, 1.0);
    EXPECT_LT(r.first_step_factor, 1.0);
    for (Index k : {1u, 2u, 10u}) EXPECT_LE(r.bound_curve(k), r.expectation_curve(k));
  }
}

TEST(MomentumFactors, WorkedExamples) {
  const auto r0 = momentum_factors(1.0, 0.0, 0.2, 1.0);
  // 1 - (2 alpha - alpha^2) sigma^2/frob = 1 - 0.2
  EXPECT_LE(rel(r0.gamma1, 0.8), 1e-9);
  EXPECT_EQ(r0.gamma2, 0.0);
  EXPECT_EQ(r0.q, r0.gamma1);
  EXPECT_EQ(r0.delta, 0.0);
  EXPECT_TRUE(r0.feasible);

  const auto r1 = momentum_factors(1.0, 0.1, 0.2, 1.0);
  EXPECT_LE(rel(r1.gamma1, 1.06), 1e-9);
  EXPECT_LE(rel(r1.gamma2, 0.12), 1e-9);
  EXPECT_FALSE(r1.feasible);

  const auto r2 = momentum_factors(1.0, 0.05, 0.2, 1.0);
  EXPECT_LE(rel(r2.gamma1, 0.925), 1e-9);
  EXPECT_LE(rel(r2.gamma2, 0.055), 1e-9);
  EXPECT_TRUE(r2.feasible);
  EXPECT_LE(rel(r2.q, 0.9810617128172885), 1e-9);
  EXPECT_LE(rel(r2.delta, 0.9810617128172885 - 0.925), 1e-9);
  EXPECT_LE(r2.gamma1 + r2.gamma2, r2.q);
  EXPECT_LT(r2.q, 1.0);
}

TEST(MomentumFactors, ZeroMomentumMatchesRelaxedRate) {
  // beta = 0: q = 1 - (2 alpha - alpha^2) sigma^2 / frob
  for (double alpha : {0.2, 0.7, 1.0, 1.5, 1.9}) {
    const auto r = momentum_factors(alpha, 0.0, 0.3, 1.5);
    EXPECT_EQ(r.gamma2, 0.0);
    EXPECT_EQ(r.q, r.gamma1);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_NEAR(r.q, 1.0 - (2 * alpha - alpha * alpha) * 0.2, 1e-15);
  }
}

TEST(MomentumFactors, HypothesisViolations) {
  EXPECT_THROW(momentum_factors(2.0, 0.0, 0.2, 1.0), std::invalid_argument);
  EXPECT_THROW(momentum_factors(0.0, 0.0, 0.2, 1.0), std::invalid_argument);
  EXPECT_THROW(momentum_factors(1.3, 0.2, 0.2, 1.0), std::invalid_argument);
  EXPECT_THROW(momentum_factors(1.0, -0.1, 0.2, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(momentum_factors(1.1, 0.2, 0.2, 1.0));
}

TEST(BetaUpper, WorkedExamples) {
  EXPECT_LE(rel(beta_upper(1.0, 0.2, 1.0), 0.055234317807463684), 1e-9);
  EXPECT_LT(beta_upper(1.0, 1e-12, 1.0), 1e-11);
  EXPECT_GE(beta_upper(1.0, 1e-12, 1.0), 0.0);
  EXPECT_THROW(beta_upper(1.2, 0.2, 1.0), std::invalid_argument);
  EXPECT_THROW(beta_upper(0.0, 0.2, 1.0), std::invalid_argument);
}

TEST(BetaUpper, BracketsFeasibility) {
  for (double alpha : {0.25, 0.5, 1.0})
    for (double s : {1e-4, 0.01, 0.2, 0.5}) {
      const double bu = beta_upper(alpha, s, 1.0);
      EXPECT_TRUE(momentum_factors(alpha, 0.9 * bu, s, 1.0).feasible);
      EXPECT_FALSE(momentum_factors(alpha, 1.1 * bu, s, 1.0).feasible);
      const auto r = momentum_factors(alpha, 0.5 * bu, s, 1.0);
      EXPECT_DOUBLE_EQ(r.tau1, 4.0 - 3.0 * alpha * s);
      EXPECT_DOUBLE_EQ(r.tau2, (2 * alpha - alpha * alpha) * s);
    }
}

TEST(MomentumFactors, SumIsNondecreasingInBeta) {
  for (double alpha : {0.3, 0.8, 1.0})
    for (double s : {0.001, 0.05, 0.3}) {
      const double bu = beta_upper(alpha, s, 1.0);
      double prev = -1.0;
      const double q0 = momentum_factors(alpha, 0.0, s, 1.0).q;
      for (int g = 0; g <= 50; ++g) {
        const auto r = momentum_factors(alpha, bu * g / 51.0, s, 1.0);
        const double sum = r.gamma1 + r.gamma2;
        EXPECT_GE(sum, prev);
        EXPECT_GE(r.q, q0 - 1e-15);
        prev = sum;
      }
    }
}

TEST(MomentumFactors, LemmaBoundsTwoTermRecursion) {
  // F(k+1) = g1 F(k) + g2 F(k-1), F(1) = F(0): must stay under q^k (1 + delta) F(0)
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double s = 0.001 + 0.5 * u(rng);
    const double beta = beta_upper(1.0, s, 1.0) * u(rng);
    const auto r = momentum_factors(1.0, beta, s, 1.0);
    ASSERT_TRUE(r.feasible);
    double fm = 1.0, f = 1.0;
    for (Index k = 1; k < 300; ++k) {
      const double fn = r.gamma1 * f + r.gamma2 * fm;
      EXPECT_LE(fn, r.bound(k) * (1 + 1e-12));
      fm = f;
      f = fn;
    }
  }
}

TEST(IterationComplexity, WorkedExamples) {
  const auto c = iteration_complexity(1.0, 5.0, 5.0, 5e-12, 0.5);
  EXPECT_LE(rel(c.k2, 138.15510557964274), 1e-9);
  EXPECT_LE(rel(c.k1, 141.62084148244247), 1e-9);

  const auto near_one = iteration_complexity(1.0, 5.0, 5.0, 5e-12, 1.0 - 1e-12);
  EXPECT_NEAR(near_one.k1, near_one.k2, 1e-9);

  const auto unit = iteration_complexity(2.0, 6.0, 7.0, 7.0 / std::exp(1.0), std::exp(-1.0));
  EXPECT_LE(rel(unit.k1, 6.0), 1e-12);
  EXPECT_LE(rel(unit.k2, 3.0), 1e-12);
}

TEST(IterationComplexity, DeterministicNeverWorse) {
  for (double rho : {0.01, 0.1, 0.5, 0.9, 0.999}) {
    const auto c = iteration_complexity(0.7, 40.0, 3.0, 1e-9, rho);
    EXPECT_LE(c.k2, c.k1);
  }
}

TEST(IterationComplexity, Preconditions) {
  EXPECT_THROW(iteration_complexity(1.0, 5.0, 5.0, 6.0, 0.5), std::invalid_argument);
  EXPECT_THROW(iteration_complexity(1.0, 5.0, 5.0, 0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(iteration_complexity(1.0, 5.0, 5.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(iteration_complexity(0.0, 5.0, 5.0, 1.0, 0.5), std::invalid_argument);
}

Trace hand_trace() {
  Trace t;
  t.config.variant = Variant::GRK;
  t.config.gamma_mode = GammaMode::Exact;
  t.frobenius_sq = 5.0;
  t.records = {{0, 1, 1, 5.0, 5.0, 17.0, 0}, {1, 0, 1, 1.0, 1.0, 1.0, 0}, {2, kNoIndex, 0, 0.0, 0.0, 0.0, 0}};
  t.termination = Termination::RseTolerance;
  return t;
}

TEST(CertifyTrace, HandTracePasses) {
  const auto c = certify_trace(hand_trace(), 1.0);
  EXPECT_TRUE(c.passed());
  EXPECT_EQ(c.checked, 2u);
  EXPECT_TRUE(certify_global_bound(hand_trace(), 1.0, 4.0).passed());
}

TEST(CertifyTrace, EmptyTracePassesVacuously) {
  Trace t = hand_trace();
  t.records.resize(1);
  EXPECT_TRUE(certify_trace(t, 1.0).passed());
  t.records.clear();
  EXPECT_TRUE(certify_trace(t, 1.0).passed());
}

TEST(CertifyTrace, CorruptedTraceReportsViolation) {
  Trace t;
  t.config.variant = Variant::GRK;
  t.frobenius_sq = 10.0;
  double e = 1.0;
  for (Index k = 0; k < 8; ++k) {
    t.records.push_back({k, 0, 1, 10.0, e, 1.0, 0});
    e *= 0.5;
  }
  EXPECT_TRUE(certify_trace(t, 1.0).passed());
  t.records[3].err_sq *= 10.0;
  const auto c = certify_trace(t, 1.0);
  EXPECT_EQ(c.status, CertificationStatus::Violation);
  ASSERT_TRUE(c.first_violation);
  EXPECT_EQ(*c.first_violation, 3u);
}

TEST(CertifyTrace, MissingErrorMetricIsError) {
  Trace t = hand_trace();
  t.records[1].err_sq = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(certify_trace(t, 1.0), std::invalid_argument);
}

TEST(CertifyTrace, NotApplicableCases) {
  Trace t = hand_trace();
  t.config.variant = Variant::RK;
  EXPECT_EQ(certify_trace(t, 1.0).status, CertificationStatus::NotApplicable);
  t.config.variant = Variant::MGRK;
  t.config.beta = 0.5;  // infeasible for sigma^2/frob = 0.2
  EXPECT_EQ(certify_trace(t, 1.0).status, CertificationStatus::NotApplicable);
}

TEST(CertifyTrace, MomentumBoundUsesLemmaEnvelope) {
  Trace t;
  t.config.variant = Variant::MGRK;
  t.config.beta = 0.05;
  t.frobenius_sq = 5.0;
  const auto mr = momentum_factors(1.0, 0.05, 1.0, 5.0);
  t.records.push_back({0, 0, 1, 5.0, 1.0, 1.0, 0});
  for (Index k = 1; k < 20; ++k) t.records.push_back({k, 0, 1, 5.0, mr.bound(k - 1), 1.0, 0});
  EXPECT_TRUE(certify_trace(t, 1.0).passed());
  t.records[7].err_sq *= 1.01;
  const auto c = certify_trace(t, 1.0);
  ASSERT_TRUE(c.first_violation);
  EXPECT_EQ(*c.first_violation, 7u);
}

}  // namespace
}  // namespace grk
