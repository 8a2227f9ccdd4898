#ifndef GRK_HARNESS_RANDOM_PROBLEM_HPP
#define GRK_HARNESS_RANDOM_PROBLEM_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "grk/linalg.hpp"
#include "grk/selection.hpp"

namespace grk {

/// A = U D V^T with orthonormal U (m x r), V (n x r) from thin QR of Gaussian
/// matrices and D = diag(1 + (kappa - 1) u), u ~ U(0,1).
struct RandomProblemSpec {
  Index m = 0;
  Index n = 0;
  Index rank = 0;
  double kappa = 2.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (m == 0 || n == 0 || rank == 0) throw std::invalid_argument("random problem: dimensions must be positive");
    if (rank > std::min(m, n))
      throw std::invalid_argument("random problem: rank " + std::to_string(rank) +
                                  " exceeds min(m, n) = " + std::to_string(std::min(m, n)));
    if (!(kappa > 1.0)) throw std::invalid_argument("random problem: kappa must exceed 1");
  }

  bool operator==(const RandomProblemSpec&) const = default;
};

namespace detail {

template <class Rng>
Eigen::MatrixXd gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = nd(rng);
  return g;
}

inline Eigen::MatrixXd thin_orthonormal(const Eigen::MatrixXd& g) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
}

}  // namespace detail

/// Salt separating the x_true stream from the matrix stream of one seed.
inline constexpr std::uint64_t kSolutionStreamSalt = 0x9e3779b97f4a7c15ULL;

/// Gaussian vector of length n drawn from a generator seeded with `seed`.
inline Vector gaussian_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

inline RowAccessMatrix random_matrix(const RandomProblemSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Eigen::MatrixXd u = detail::thin_orthonormal(detail::gaussian_matrix(spec.m, spec.rank, rng));
  const Eigen::MatrixXd v = detail::thin_orthonormal(detail::gaussian_matrix(spec.n, spec.rank, rng));
  Eigen::VectorXd d(static_cast<Eigen::Index>(spec.rank));
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = 1.0 + (spec.kappa - 1.0) * uniform01(rng);
  return RowAccessMatrix::from_eigen(u * d.asDiagonal() * v.transpose());
}

/// b = A x_true with Gaussian x_true; x* = A^+ b from the dense oracle.
inline Problem gen_random_problem(const RandomProblemSpec& spec) {
  RowAccessMatrix a = random_matrix(spec);
  const Vector x_true = gaussian_vector(spec.n, spec.seed ^ kSolutionStreamSalt);
  Vector b = a.multiply(x_true);
  return Problem::with_min_norm_solution(std::move(a), std::move(b));
}

}  // namespace grk

#endif  // GRK_HARNESS_RANDOM_PROBLEM_HPP
