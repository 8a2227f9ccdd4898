#ifndef GRK_HARNESS_MATRIX_MARKET_HPP
#define GRK_HARNESS_MATRIX_MARKET_HPP

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grk/linalg.hpp"

namespace grk {

class MatrixMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace mm_detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Header {
  bool coordinate = true;
  enum class Symmetry { General, Symmetric, Skew } symmetry = Symmetry::General;
};

inline Header parse_header(const std::string& line) {
  std::istringstream in(line);
  std::string banner, object, format, field, symmetry;
  in >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
    throw MatrixMarketError("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixMarketError("unsupported object '" + object + "'");
  Header h;
  if (format == "coordinate")
    h.coordinate = true;
  else if (format == "array")
    h.coordinate = false;
  else
    throw MatrixMarketError("unsupported format '" + format + "'");
  if (field == "complex" || field == "pattern")
    throw MatrixMarketError("field '" + field + "' is not supported; need real or integer");
  if (field != "real" && field != "integer" && field != "double")
    throw MatrixMarketError("unknown field '" + field + "'");
  if (symmetry == "general")
    h.symmetry = Header::Symmetry::General;
  else if (symmetry == "symmetric")
    h.symmetry = Header::Symmetry::Symmetric;
  else if (symmetry == "skew-symmetric")
    h.symmetry = Header::Symmetry::Skew;
  else
    throw MatrixMarketError("unsupported symmetry '" + symmetry + "'");
  return h;
}

// next line that is neither a comment nor blank
inline bool data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '%') continue;
    return true;
  }
  return false;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace mm_detail

/// Entries as 0-based triplets plus the declared shape. Symmetric storage is
/// expanded to both triangles.
struct MatrixMarketData {
  Index rows = 0;
  Index cols = 0;
  bool coordinate = true;
  std::vector<Triplet> entries;
};

inline MatrixMarketData parse_matrix_market(std::istream& in) {
  using mm_detail::Header;
  std::string line;
  if (!std::getline(in, line)) throw MatrixMarketError("empty input");
  const Header h = mm_detail::parse_header(line);
  if (!mm_detail::data_line(in, line)) throw MatrixMarketError("missing size line");

  MatrixMarketData d;
  d.coordinate = h.coordinate;
  std::istringstream size(line);
  long long m = -1, n = -1, nnz = -1;
  size >> m >> n;
  if (h.coordinate) size >> nnz;
  if (!size || m <= 0 || n <= 0 || (h.coordinate && nnz < 0))
    throw MatrixMarketError("malformed size line '" + line + "'");
  d.rows = static_cast<Index>(m);
  d.cols = static_cast<Index>(n);
  if (h.symmetry != Header::Symmetry::General && m != n)
    throw MatrixMarketError("symmetric storage requires a square matrix");

  auto add = [&](Index i, Index j, double v) {
    d.entries.push_back({i, j, v});
    if (i != j) {
      if (h.symmetry == Header::Symmetry::Symmetric) d.entries.push_back({j, i, v});
      if (h.symmetry == Header::Symmetry::Skew) d.entries.push_back({j, i, -v});
    }
  };

  if (h.coordinate) {
    for (long long e = 0; e < nnz; ++e) {
      if (!mm_detail::data_line(in, line))
        throw MatrixMarketError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(e));
      std::istringstream es(line);
      long long i = 0, j = 0;
      double v = 0.0;
      es >> i >> j >> v;
      if (!es) throw MatrixMarketError("malformed entry '" + line + "'");
      if (i < 1 || i > m || j < 1 || j > n)
        throw MatrixMarketError("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") out of range for " + std::to_string(m) + "x" + std::to_string(n));
      add(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    }
  } else {
    // column-major; symmetric variants store the lower triangle only
    for (long long j = 0; j < n; ++j) {
      const long long first = h.symmetry == Header::Symmetry::General ? 0
                              : h.symmetry == Header::Symmetry::Symmetric ? j
                                                                          : j + 1;
      for (long long i = first; i < m; ++i) {
        if (!mm_detail::data_line(in, line)) throw MatrixMarketError("array data ends early");
        std::istringstream es(line);
        double v = 0.0;
        es >> v;
        if (!es) throw MatrixMarketError("malformed value '" + line + "'");
        add(static_cast<Index>(i), static_cast<Index>(j), v);
      }
    }
  }
  return d;
}

/// Coordinate files become CSR, array files dense. All-zero rows are rejected.
inline RowAccessMatrix to_row_access_matrix(const MatrixMarketData& d) {
  std::vector<double> row_sq(d.rows, 0.0);
  for (const auto& e : d.entries) row_sq[e.row] += e.value * e.value;
  for (Index i = 0; i < d.rows; ++i)
    if (!(row_sq[i] > 0.0))
      throw MatrixMarketError("row " + std::to_string(i + 1) + " is all zero");
  if (d.coordinate) return RowAccessMatrix::from_triplets(d.rows, d.cols, d.entries);
  Vector v(d.rows * d.cols, 0.0);
  for (const auto& e : d.entries) v[e.row * d.cols + e.col] += e.value;
  return RowAccessMatrix::dense(d.rows, d.cols, std::move(v));
}

inline RowAccessMatrix read_matrix_market(std::istream& in) {
  return to_row_access_matrix(parse_matrix_market(in));
}

inline RowAccessMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open '" + path + "'");
  try {
    return read_matrix_market(in);
  } catch (const MatrixMarketError& e) {
    throw MatrixMarketError(path + ": " + e.what());
  }
}

/// A dense m x 1 or 1 x n file (array or coordinate) read as a vector.
inline Vector read_matrix_market_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open '" + path + "'");
  const MatrixMarketData d = parse_matrix_market(in);
  if (d.rows != 1 && d.cols != 1) throw MatrixMarketError(path + ": not a vector");
  Vector v(std::max(d.rows, d.cols), 0.0);
  for (const auto& e : d.entries) v[d.cols == 1 ? e.row : e.col] += e.value;
  return v;
}

inline void write_matrix_market(std::ostream& out, const RowAccessMatrix& a) {
  const auto t = a.triplets();
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << t.size() << '\n';
  for (const auto& e : t) out << e.row + 1 << ' ' << e.col + 1 << ' ' << mm_detail::fmt(e.value) << '\n';
}

inline void write_matrix_market(const std::string& path, const RowAccessMatrix& a) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError("cannot write '" + path + "'");
  write_matrix_market(out, a);
}

inline void write_matrix_market_vector(const std::string& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
  for (double x : v) out << mm_detail::fmt(x) << '\n';
}

}  // namespace grk

#endif  // GRK_HARNESS_MATRIX_MARKET_HPP
