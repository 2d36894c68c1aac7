#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rank1part/errors.hpp"

namespace rank1part {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Dense m-by-n data matrix with an optional observation mask (true = observed).
// Observed entries must be finite; a mask must leave at least one observed
// entry in every row and every column.
struct DataMatrix {
  Matrix values;
  std::optional<Mask> mask;

  DataMatrix() = default;
  explicit DataMatrix(Matrix vals, std::optional<Mask> m = std::nullopt)
      : values(std::move(vals)), mask(std::move(m)) {
    validate();
  }

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  bool observed(Eigen::Index i, Eigen::Index j) const {
    return !mask.has_value() || (*mask)(i, j);
  }

  bool fully_observed() const {
    if (!mask.has_value()) return true;
    return mask->all();
  }

  double min_observed() const {
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cols(); ++j)
      for (Eigen::Index i = 0; i < rows(); ++i)
        if (observed(i, j)) lo = std::min(lo, values(i, j));
    return lo;
  }

  void validate() const {
    if (values.rows() < 1 || values.cols() < 1)
      throw ArgumentError("DataMatrix: dimensions must be positive");
    if (mask.has_value()) {
      if (mask->rows() != values.rows() || mask->cols() != values.cols())
        throw ArgumentError("DataMatrix: mask shape does not match values");
      for (Eigen::Index i = 0; i < values.rows(); ++i) {
        bool any = false;
        for (Eigen::Index j = 0; j < values.cols(); ++j) any = any || (*mask)(i, j);
        if (!any) throw ArgumentError("DataMatrix: row " + std::to_string(i) + " has no observed entry");
      }
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        bool any = false;
        for (Eigen::Index i = 0; i < values.rows(); ++i) any = any || (*mask)(i, j);
        if (!any) throw ArgumentError("DataMatrix: column " + std::to_string(j) + " has no observed entry");
      }
    }
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      for (Eigen::Index i = 0; i < values.rows(); ++i)
        if (observed(i, j) && !std::isfinite(values(i, j)))
          throw ArgumentError("DataMatrix: non-finite observed entry at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
  }
};

// Gaussian-kernel similarity between the rows of a data matrix. Entries lie in
// (0, 1], the diagonal is exactly 1, and the bandwidth used to build it is
// kept for reproducibility.
struct SimilarityMatrix {
  Matrix values;
  double sigma = 0.0;

  Eigen::Index size() const { return values.rows(); }
};

// Symmetric normalized Laplacian I - D^{-1/2} S D^{-1/2} together with the
// degree vector d (row sums of S). sqrt(d) spans its kernel.
struct LaplacianMatrix {
  Matrix values;
  Vector degrees;

  Eigen::Index size() const { return values.rows(); }
};

// Result of Sinkhorn-Knopp balancing: values = diag(row_scale) S diag(col_scale)
// with all row and column sums within `residual` of 1.
struct ScalingResult {
  Matrix values;
  Vector row_scale;
  Vector col_scale;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline Matrix pairwise_row_distances(const Matrix& x) {
  const Eigen::Index m = x.rows();
  const Vector sq = x.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * x * x.transpose());
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  Matrix d(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) d(i, j) = std::sqrt(std::max(d2(i, j), 0.0));
    d(j, j) = 0.0;
  }
  return d;
}

inline double median_of(std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const std::size_t mid = n / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  double hi = xs[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.end());
  return 0.5 * (xs[mid - 1] + hi);
}

}  // namespace detail

// S_ij = exp(-||row_i - row_j||^2 / (2 sigma^2)). When sigma is not given it
// defaults to the median of the nonzero pairwise row distances.
inline SimilarityMatrix build_similarity(const DataMatrix& a,
                                         std::optional<double> sigma = std::nullopt) {
  if (!a.fully_observed())
    throw ArgumentError("build_similarity: input must be fully observed");
  if (sigma.has_value() && *sigma <= 0.0)
    throw ArgumentError("build_similarity: sigma must be positive");

  const Eigen::Index m = a.rows();
  const Matrix dist = detail::pairwise_row_distances(a.values);

  double s = 0.0;
  if (sigma.has_value()) {
    s = *sigma;
  } else {
    std::vector<double> nonzero;
    nonzero.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i + 1; j < m; ++j)
        if (dist(i, j) > 0.0) nonzero.push_back(dist(i, j));
    if (nonzero.empty())
      throw DegenerateInputError("build_similarity: all rows identical, median distance is zero");
    s = detail::median_of(nonzero);
  }

  SimilarityMatrix sim;
  sim.sigma = s;
  sim.values = Matrix(m, m);
  const double inv = 1.0 / (2.0 * s * s);
  for (Eigen::Index i = 0; i < m; ++i) {
    sim.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = std::exp(-dist(i, j) * dist(i, j) * inv);
      sim.values(i, j) = v;
      sim.values(j, i) = v;
    }
  }
  return sim;
}

namespace detail {

inline LaplacianMatrix normalized_laplacian_dense(const Matrix& s) {
  const Eigen::Index m = s.rows();
  Vector d = s.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i)
    if (d(i) <= 0.0)
      throw DegenerateInputError("normalized_laplacian: row " + std::to_string(i) +
                                 " has non-positive sum");
  Vector dinv = d.array().rsqrt();
  Matrix l = -(dinv * dinv.transpose()).cwiseProduct(s);
  l.diagonal().array() += 1.0;
  l = ((l + l.transpose()) * 0.5).eval();
  return LaplacianMatrix{std::move(l), std::move(d)};
}

}  // namespace detail

inline LaplacianMatrix normalized_laplacian(const SimilarityMatrix& s) {
  return detail::normalized_laplacian_dense(s.values);
}

namespace detail {

inline ScalingResult sinkhorn_knopp_dense(const Matrix& s, double tol, int max_iter) {
  const Eigen::Index m = s.rows();
  const Eigen::Index n = s.cols();
  if ((s.array() <= 0.0).any())
    throw ArgumentError("sinkhorn_knopp: matrix must be entrywise positive");
  if (tol <= 0.0) throw ArgumentError("sinkhorn_knopp: tol must be positive");

  Vector r = Vector::Ones(m);
  Vector c = Vector::Ones(n);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    r = (s * c).cwiseInverse();
    c = (s.transpose() * r).cwiseInverse();
    const Matrix scaled = r.asDiagonal() * s * c.asDiagonal();
    const double row_res = (scaled.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_res = (scaled.colwise().sum().array() - 1.0).abs().maxCoeff();
    residual = std::max(row_res, col_res);
    if (residual <= tol) return ScalingResult{scaled, r, c, it, residual};
  }
  throw ConvergenceError("sinkhorn_knopp: no convergence within " + std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual);
}

}  // namespace detail

// Balances a positive similarity matrix to doubly stochastic form by
// alternating row and column normalization.
inline ScalingResult sinkhorn_knopp_ds(const SimilarityMatrix& s, double tol = 1e-9,
                                       int max_iter = 10000) {
  return detail::sinkhorn_knopp_dense(s.values, tol, max_iter);
}

// Divides each column by its sum.
inline Matrix column_stochastic(const DataMatrix& a) {
  if ((a.values.array() < 0.0).any())
    throw ArgumentError("column_stochastic: matrix must be nonnegative");
  Matrix out = a.values;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double sum = out.col(j).sum();
    if (sum <= 0.0)
      throw DegenerateInputError("column_stochastic: column " + std::to_string(j) +
                                 " sums to zero");
    out.col(j) /= sum;
  }
  return out;
}

// Offset that makes a matrix strictly positive when it has negative entries:
// max(0, -min) + 0.01, and 0 when the matrix is already nonnegative.
inline std::pair<DataMatrix, double> shift_to_nonnegative(const DataMatrix& a) {
  const double lo = a.min_observed();
  if (lo >= 0.0) return {a, 0.0};
  const double offset = -lo + 0.01;
  DataMatrix out = a;
  out.values.array() += offset;
  return {std::move(out), offset};
}

// ---------------------------------------------------------------------------
// Matrix file format: first line "m,n", then m lines of n comma-separated
// values; missing entries are written as the literal NA.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  if (ec != std::errc()) throw IoError("format_fixed: conversion failed");
  return std::string(buf, ptr);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double_field(const std::string& field, const std::string& path, int line_no) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw IoError(path + ":" + std::to_string(line_no) + ": cannot parse value '" + field + "'");
  return value;
}

}  // namespace detail

inline void write_matrix_csv(const std::string& path, const DataMatrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << a.rows() << ',' << a.cols() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      if (a.observed(i, j))
        out << detail::format_double(a.values(i, j));
      else
        out << "NA";
    }
    out << '\n';
  }
  if (!out) throw IoError("error while writing '" + path + "'");
}

inline DataMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto header = detail::split_csv_line(line);
  if (header.size() != 2) throw IoError(path + ":1: header must be 'm,n'");
  long m = 0;
  long n = 0;
  try {
    m = std::stol(header[0]);
    n = std::stol(header[1]);
  } catch (const std::exception&) {
    throw IoError(path + ":1: header must be 'm,n'");
  }
  if (m < 1 || n < 1) throw IoError(path + ":1: dimensions must be positive");

  Matrix values(m, n);
  Mask mask = Mask::Constant(m, n, true);
  bool any_missing = false;
  for (long i = 0; i < m; ++i) {
    if (!std::getline(in, line))
      throw IoError(path + ": expected " + std::to_string(m) + " data rows, got " +
                    std::to_string(i));
    const auto fields = detail::split_csv_line(line);
    if (static_cast<long>(fields.size()) != n)
      throw IoError(path + ":" + std::to_string(i + 2) + ": expected " + std::to_string(n) +
                    " fields, got " + std::to_string(fields.size()));
    for (long j = 0; j < n; ++j) {
      if (fields[j] == "NA") {
        values(i, j) = 0.0;
        mask(i, j) = false;
        any_missing = true;
      } else {
        values(i, j) = detail::parse_double_field(fields[j], path, static_cast<int>(i + 2));
      }
    }
  }
  if (any_missing) return DataMatrix(std::move(values), std::move(mask));
  return DataMatrix(std::move(values));
}

}  // namespace rank1part
