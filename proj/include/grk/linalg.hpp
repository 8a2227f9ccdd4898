#ifndef GRK_LINALG_HPP
#define GRK_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace grk {

using Index = std::size_t;
using Vector = std::vector<double>;

/// Raised when a numerical precondition fails (zero matrix, inconsistent
/// system, nonconvergence that the caller asked to treat as fatal).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// One row of a RowAccessMatrix. `cols` is empty for dense storage, in which
/// case `values` holds all n entries.
struct RowView {
  std::span<const double> values;
  std::span<const Index> cols;

  bool dense() const { return cols.empty(); }

  double dot(std::span<const double> x) const {
    double s = 0.0;
    if (dense()) {
      for (Index j = 0; j < values.size(); ++j) s += values[j] * x[j];
    } else {
      for (Index p = 0; p < values.size(); ++p) s += values[p] * x[cols[p]];
    }
    return s;
  }

  // x += scale * a_i
  void axpy(double scale, std::span<double> x) const {
    if (dense()) {
      for (Index j = 0; j < values.size(); ++j) x[j] += scale * values[j];
    } else {
      for (Index p = 0; p < values.size(); ++p) x[cols[p]] += scale * values[p];
    }
  }
};

/// Dense row-major or CSR matrix with cached squared row norms. Immutable
/// after construction; every row is required to be nonzero.
class RowAccessMatrix {
 public:
  enum class Storage { Dense, Sparse };

  RowAccessMatrix() = default;

  static RowAccessMatrix dense(Index m, Index n, Vector row_major) {
    if (row_major.size() != m * n)
      throw std::invalid_argument("dense matrix: expected " +
                                  std::to_string(m * n) + " values, got " +
                                  std::to_string(row_major.size()));
    RowAccessMatrix a;
    a.storage_ = Storage::Dense;
    a.m_ = m;
    a.n_ = n;
    a.values_ = std::move(row_major);
    a.finalize();
    return a;
  }

  static RowAccessMatrix dense(std::initializer_list<std::initializer_list<double>> rows) {
    const Index m = rows.size();
    const Index n = m ? rows.begin()->size() : 0;
    Vector v;
    v.reserve(m * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw std::invalid_argument("dense matrix: ragged rows");
      v.insert(v.end(), r.begin(), r.end());
    }
    return dense(m, n, std::move(v));
  }

  static RowAccessMatrix from_eigen(const Eigen::MatrixXd& a) {
    Vector v(static_cast<Index>(a.size()));
    Index k = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) v[k++] = a(i, j);
    return dense(static_cast<Index>(a.rows()), static_cast<Index>(a.cols()), std::move(v));
  }

  /// Validated CSR construction. Column indices must be strictly increasing
  /// within each row.
  static RowAccessMatrix csr(Index m, Index n, std::vector<Index> row_ptr,
                             std::vector<Index> col_idx, Vector values) {
    if (row_ptr.size() != m + 1 || row_ptr.front() != 0)
      throw std::invalid_argument("csr: row pointer array must have m+1 entries starting at 0");
    if (col_idx.size() != values.size() || row_ptr.back() != values.size())
      throw std::invalid_argument("csr: index/value arrays disagree with row pointers");
    for (Index i = 0; i < m; ++i) {
      if (row_ptr[i + 1] < row_ptr[i])
        throw std::invalid_argument("csr: row pointers must be nondecreasing");
      for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
        if (col_idx[p] >= n)
          throw std::invalid_argument("csr: column index out of range in row " + std::to_string(i));
        if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1])
          throw std::invalid_argument("csr: column indices not strictly increasing in row " +
                                      std::to_string(i));
      }
    }
    RowAccessMatrix a;
    a.storage_ = Storage::Sparse;
    a.m_ = m;
    a.n_ = n;
    a.row_ptr_ = std::move(row_ptr);
    a.col_idx_ = std::move(col_idx);
    a.values_ = std::move(values);
    a.finalize();
    return a;
  }

  /// Builds CSR from unordered triplets; duplicate (row, col) entries are summed.
  static RowAccessMatrix from_triplets(Index m, Index n, std::vector<Triplet> t) {
    for (const auto& e : t)
      if (e.row >= m || e.col >= n)
        throw std::invalid_argument("triplet (" + std::to_string(e.row) + ", " +
                                    std::to_string(e.col) + ") out of range");
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<Index> row_ptr(m + 1, 0), cols;
    Vector vals;
    cols.reserve(t.size());
    vals.reserve(t.size());
    for (Index p = 0; p < t.size(); ++p) {
      if (p > 0 && t[p].row == t[p - 1].row && t[p].col == t[p - 1].col) {
        vals.back() += t[p].value;
        continue;
      }
      cols.push_back(t[p].col);
      vals.push_back(t[p].value);
      ++row_ptr[t[p].row + 1];
    }
    for (Index i = 0; i < m; ++i) row_ptr[i + 1] += row_ptr[i];
    return csr(m, n, std::move(row_ptr), std::move(cols), std::move(vals));
  }

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Storage storage() const { return storage_; }
  bool is_sparse() const { return storage_ == Storage::Sparse; }
  Index nonzeros() const { return values_.size(); }

  RowView row(Index i) const {
    if (storage_ == Storage::Dense)
      return {std::span<const double>(values_.data() + i * n_, n_), {}};
    const Index b = row_ptr_[i], e = row_ptr_[i + 1];
    return {std::span<const double>(values_.data() + b, e - b),
            std::span<const Index>(col_idx_.data() + b, e - b)};
  }

  double row_norm_sq(Index i) const { return row_norms_sq_[i]; }
  std::span<const double> row_norms_sq() const { return row_norms_sq_; }
  double frobenius_sq() const { return frobenius_sq_; }

  /// y = A x
  Vector multiply(std::span<const double> x) const {
    if (x.size() != n_)
      throw std::invalid_argument("multiply: x has length " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(n_));
    Vector y(m_);
    for (Index i = 0; i < m_; ++i) y[i] = row(i).dot(x);
    return y;
  }

  /// out += scale * A a_i (the i-th column of A A^T).
  void accumulate_gram_column(Index i, double scale, std::span<double> out) const {
    const RowView ri = row(i);
    if (storage_ == Storage::Dense) {
      for (Index k = 0; k < m_; ++k) out[k] += scale * row(k).dot(ri.values);
      return;
    }
    for (Index p = 0; p < ri.values.size(); ++p) {
      const Index j = ri.cols[p];
      const double s = scale * ri.values[p];
      for (Index q = csc_ptr_[j]; q < csc_ptr_[j + 1]; ++q) out[csc_row_[q]] += s * csc_val_[q];
    }
  }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                              static_cast<Eigen::Index>(n_));
    for (Index i = 0; i < m_; ++i) {
      const RowView r = row(i);
      if (r.dense()) {
        for (Index j = 0; j < n_; ++j) a(i, j) = r.values[j];
      } else {
        for (Index p = 0; p < r.values.size(); ++p) a(i, r.cols[p]) = r.values[p];
      }
    }
    return a;
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> t;
    for (Index i = 0; i < m_; ++i) {
      const RowView r = row(i);
      for (Index p = 0; p < r.values.size(); ++p)
        t.push_back({i, r.dense() ? p : r.cols[p], r.values[p]});
    }
    return t;
  }

  RowAccessMatrix scaled(double c) const {
    RowAccessMatrix a = *this;
    for (double& v : a.values_) v *= c;
    a.finalize();
    return a;
  }

 private:
  void finalize() {
    row_norms_sq_.assign(m_, 0.0);
    for (Index i = 0; i < m_; ++i) {
      const RowView r = row(i);
      double s = 0.0;
      for (double v : r.values) s += v * v;
      if (!(s > 0.0))
        throw std::invalid_argument("row " + std::to_string(i) + " is zero");
      row_norms_sq_[i] = s;
    }
    frobenius_sq_ = std::accumulate(row_norms_sq_.begin(), row_norms_sq_.end(), 0.0);
    if (storage_ == Storage::Sparse) build_csc();
  }

  void build_csc() {
    csc_ptr_.assign(n_ + 1, 0);
    for (Index c : col_idx_) ++csc_ptr_[c + 1];
    for (Index j = 0; j < n_; ++j) csc_ptr_[j + 1] += csc_ptr_[j];
    csc_row_.resize(values_.size());
    csc_val_.resize(values_.size());
    std::vector<Index> next(csc_ptr_.begin(), csc_ptr_.end() - 1);
    for (Index i = 0; i < m_; ++i)
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        const Index q = next[col_idx_[p]]++;
        csc_row_[q] = i;
        csc_val_[q] = values_[p];
      }
  }

  Storage storage_ = Storage::Dense;
  Index m_ = 0;
  Index n_ = 0;
  Vector values_;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  // column-major mirror for sparse Gram-column products
  std::vector<Index> csc_ptr_;
  std::vector<Index> csc_row_;
  Vector csc_val_;
  Vector row_norms_sq_;
  double frobenius_sq_ = 0.0;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double distance_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double norm_inf(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

/// r_i = <a_i, x> - b_i
inline Vector residual(const RowAccessMatrix& a, std::span<const double> x,
                       std::span<const double> b) {
  if (x.size() != a.cols() || b.size() != a.rows())
    throw std::invalid_argument("residual: dimension mismatch (A is " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + ", x has " +
                                std::to_string(x.size()) + ", b has " + std::to_string(b.size()) +
                                ")");
  Vector r(a.rows());
  for (Index i = 0; i < a.rows(); ++i) r[i] = a.row(i).dot(x) - b[i];
  return r;
}

/// Dense SVD of A plus the numerical-rank cutoff max(m,n) * sigma_max * eps.
/// Desk-scale analysis utility; never used inside the solver loop.
class SpectralOracle {
 public:
  explicit SpectralOracle(const RowAccessMatrix& a)
      : m_(a.rows()), n_(a.cols()),
        svd_(a.to_eigen(), Eigen::ComputeThinU | Eigen::ComputeThinV) {
    const auto& s = svd_.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    cutoff_ = static_cast<double>(std::max(m_, n_)) * smax *
              std::numeric_limits<double>::epsilon();
    rank_ = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > cutoff_) ++rank_;
  }

  Index rank() const { return rank_; }
  double rank_cutoff() const { return cutoff_; }

  Vector singular_values() const {
    const auto& s = svd_.singularValues();
    return Vector(s.data(), s.data() + s.size());
  }

  double sigma_max() const {
    if (rank_ == 0) throw NumericalError("matrix is numerically zero");
    return svd_.singularValues()(0);
  }

  double sigma_min_nonzero() const {
    if (rank_ == 0) throw NumericalError("matrix is numerically zero");
    return svd_.singularValues()(static_cast<Eigen::Index>(rank_ - 1));
  }

  /// A^+ b using only singular values above the cutoff.
  Vector pseudo_solve(std::span<const double> b) const {
    if (b.size() != m_) throw std::invalid_argument("pseudo_solve: b has wrong length");
    const auto r = static_cast<Eigen::Index>(rank_);
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd c = svd_.matrixU().leftCols(r).transpose() * bv;
    c.array() /= svd_.singularValues().head(r).array();
    Eigen::VectorXd x = svd_.matrixV().leftCols(r) * c;
    return Vector(x.data(), x.data() + x.size());
  }

  /// (I - A^+ A) v: component of v in the null space of A.
  Vector null_space_component(std::span<const double> v) const {
    const auto r = static_cast<Eigen::Index>(rank_);
    Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
    const auto vr = svd_.matrixV().leftCols(r);
    Eigen::VectorXd out = vv - vr * (vr.transpose() * vv);
    return Vector(out.data(), out.data() + out.size());
  }

 private:
  Index m_;
  Index n_;
  Eigen::BDCSVD<Eigen::MatrixXd> svd_;
  double cutoff_ = 0.0;
  Index rank_ = 0;
};

inline double smallest_nonzero_singular_value(const RowAccessMatrix& a) {
  return SpectralOracle(a).sigma_min_nonzero();
}

/// Tolerance used for the consistency check ||A x - b|| <= tol * max(1, ||b||).
inline constexpr double kConsistencyTol = 1e-8;

inline bool is_consistent(const RowAccessMatrix& a, std::span<const double> x,
                          std::span<const double> b) {
  const Vector r = residual(a, x, b);
  return std::sqrt(norm_sq(r)) <= kConsistencyTol * std::max(1.0, std::sqrt(norm_sq(b)));
}

inline Vector min_norm_solution(const SpectralOracle& oracle, const RowAccessMatrix& a,
                                std::span<const double> b) {
  Vector x = oracle.pseudo_solve(b);
  if (!is_consistent(a, x, b))
    throw NumericalError("system is inconsistent: ||A x* - b|| exceeds tolerance");
  return x;
}

inline Vector min_norm_solution(const RowAccessMatrix& a, std::span<const double> b) {
  return min_norm_solution(SpectralOracle(a), a, b);
}

/// A consistent system A x = b with an optional min-norm solution x* = A^+ b.
struct Problem {
  RowAccessMatrix a;
  Vector b;
  std::optional<Vector> x_star;

  Problem() = default;
  Problem(RowAccessMatrix a_in, Vector b_in, std::optional<Vector> x_star_in = std::nullopt)
      : a(std::move(a_in)), b(std::move(b_in)), x_star(std::move(x_star_in)) {
    if (b.size() != a.rows())
      throw std::invalid_argument("problem: b has length " + std::to_string(b.size()) +
                                  ", expected " + std::to_string(a.rows()));
    if (x_star) {
      if (x_star->size() != a.cols())
        throw std::invalid_argument("problem: x* has wrong length");
      if (!is_consistent(a, *x_star, b))
        throw NumericalError("problem: A x* does not reproduce b");
    }
  }

  /// Attaches x* = A^+ b computed by the dense oracle.
  static Problem with_min_norm_solution(RowAccessMatrix a, Vector b) {
    Vector xs = min_norm_solution(a, b);
    return Problem(std::move(a), std::move(b), std::move(xs));
  }
};

}  // namespace grk

#endif  // GRK_LINALG_HPP
