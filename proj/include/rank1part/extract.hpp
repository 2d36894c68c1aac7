#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rank1part/errors.hpp"
#include "rank1part/matrix.hpp"
#include "rank1part/rng.hpp"

namespace rank1part {

enum class Method { kNmf, kCcot, kCcotGw, kFiedler, kFiedlerDs, kPageRank, kMarginal };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kNmf: return "nmf";
    case Method::kCcot: return "ccot";
    case Method::kCcotGw: return "ccot_gw";
    case Method::kFiedler: return "fiedler";
    case Method::kFiedlerDs: return "fiedler_ds";
    case Method::kPageRank: return "pagerank";
    case Method::kMarginal: return "marginal";
  }
  return "unknown";
}

inline std::optional<Method> method_from_string(std::string_view s) {
  if (s == "nmf") return Method::kNmf;
  if (s == "ccot") return Method::kCcot;
  if (s == "ccot_gw") return Method::kCcotGw;
  if (s == "fiedler") return Method::kFiedler;
  if (s == "fiedler_ds") return Method::kFiedlerDs;
  if (s == "pagerank") return Method::kPageRank;
  if (s == "marginal") return Method::kMarginal;
  return std::nullopt;
}

enum class NmfLoss { kKl, kEuclidean };
enum class FiedlerVariant { kRaw, kDoublyStochastic };

struct ExtractDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  double objective = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> objective_trace;  // per-iteration objective of the last restart
};

// Step-1 output: cluster-generating vector u over rows and, for co-clustering
// capable extractors, v over columns.
struct CgVectorPair {
  Vector u;
  std::optional<Vector> v;
  Method method = Method::kMarginal;
  ExtractDiagnostics diag;
};

// Entropic optimal transport plan gamma = diag(u) exp(-M/epsilon) diag(v)
// whose marginals match the prescribed weights within the solver tolerance.
struct TransportPlan {
  Matrix gamma;
  Vector u;
  Vector v;
  double epsilon = 0.0;
  Matrix cost;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

constexpr double kFactorFloor = 1e-300;

inline void check_nonnegative_observed(const DataMatrix& a, const char* who) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a.observed(i, j) && a.values(i, j) < 0.0)
        throw ArgumentError(std::string(who) + ": requires nonnegative entries");
}

struct NmfState {
  Vector u;
  Vector v;
  std::vector<double> trace;
  int iterations = 0;
};

// One multiplicative-update run from a random start. The fully observed KL
// and Euclidean paths use the closed-form row/column aggregates; the masked
// paths run the literal per-entry updates with factors floored at 1e-300.
inline NmfState nmf_single_run(const DataMatrix& a, NmfLoss loss, int max_iter, double tol,
                               Rng& rng) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const bool full = a.fully_observed();

  Vector row_sums = Vector::Zero(m);
  Vector col_sums = Vector::Zero(n);
  double total = 0.0;
  double const_kl = 0.0;
  double const_e = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!a.observed(i, j)) continue;
      const double x = a.values(i, j);
      row_sums(i) += x;
      col_sums(j) += x;
      total += x;
      if (x > 0.0) const_kl += x * std::log(x) - x;
      const_e += x * x;
    }

  NmfState st;
  st.u = Vector(m);
  st.v = Vector(n);
  for (Eigen::Index i = 0; i < m; ++i) st.u(i) = rng.uniform(0.5, 1.5);
  for (Eigen::Index j = 0; j < n; ++j) st.v(j) = rng.uniform(0.5, 1.5);
  if (total > 0.0) {
    const double scale = std::sqrt(total / (st.u.sum() * st.v.sum()));
    st.u *= scale;
    st.v *= scale;
  }

  const auto objective = [&]() -> double {
    if (loss == NmfLoss::kKl) {
      if (full) {
        double obj = const_kl + st.u.sum() * st.v.sum();
        for (Eigen::Index i = 0; i < m; ++i)
          obj -= row_sums(i) * std::log(std::max(st.u(i), kFactorFloor));
        for (Eigen::Index j = 0; j < n; ++j)
          obj -= col_sums(j) * std::log(std::max(st.v(j), kFactorFloor));
        return obj;
      }
      double obj = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) {
          if (!a.observed(i, j)) continue;
          const double x = a.values(i, j);
          const double uv = std::max(st.u(i) * st.v(j), kFactorFloor);
          obj += (x > 0.0 ? x * std::log(x / uv) - x : 0.0) + uv;
        }
      return obj;
    }
    if (full) {
      const Vector av = a.values * st.v;
      return const_e - 2.0 * st.u.dot(av) + st.u.squaredNorm() * st.v.squaredNorm();
    }
    double obj = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!a.observed(i, j)) continue;
        const double d = a.values(i, j) - st.u(i) * st.v(j);
        obj += d * d;
      }
    return obj;
  };

  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    if (loss == NmfLoss::kKl) {
      if (full) {
        const double sv = std::max(st.v.sum(), kFactorFloor);
        for (Eigen::Index i = 0; i < m; ++i) st.u(i) = row_sums(i) / sv;
        const double su = std::max(st.u.sum(), kFactorFloor);
        for (Eigen::Index j = 0; j < n; ++j) st.v(j) = col_sums(j) / su;
      } else {
        for (Eigen::Index i = 0; i < m; ++i) {
          double num = 0.0;
          double den = 0.0;
          for (Eigen::Index j = 0; j < n; ++j) {
            if (!a.observed(i, j)) continue;
            num += a.values(i, j) / std::max(st.u(i) * st.v(j), kFactorFloor) * st.v(j);
            den += st.v(j);
          }
          st.u(i) *= num / std::max(den, kFactorFloor);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          double num = 0.0;
          double den = 0.0;
          for (Eigen::Index i = 0; i < m; ++i) {
            if (!a.observed(i, j)) continue;
            num += a.values(i, j) / std::max(st.u(i) * st.v(j), kFactorFloor) * st.u(i);
            den += st.u(i);
          }
          st.v(j) *= num / std::max(den, kFactorFloor);
        }
      }
    } else {
      if (full) {
        const Vector av = a.values * st.v;
        const double sv2 = st.v.squaredNorm();
        for (Eigen::Index i = 0; i < m; ++i)
          st.u(i) *= av(i) / std::max(st.u(i) * sv2, kFactorFloor);
        const Vector atu = a.values.transpose() * st.u;
        const double su2 = st.u.squaredNorm();
        for (Eigen::Index j = 0; j < n; ++j)
          st.v(j) *= atu(j) / std::max(st.v(j) * su2, kFactorFloor);
      } else {
        for (Eigen::Index i = 0; i < m; ++i) {
          double num = 0.0;
          double den = 0.0;
          for (Eigen::Index j = 0; j < n; ++j) {
            if (!a.observed(i, j)) continue;
            num += a.values(i, j) * st.v(j);
            den += st.u(i) * st.v(j) * st.v(j);
          }
          st.u(i) *= num / std::max(den, kFactorFloor);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          double num = 0.0;
          double den = 0.0;
          for (Eigen::Index i = 0; i < m; ++i) {
            if (!a.observed(i, j)) continue;
            num += a.values(i, j) * st.u(i);
            den += st.v(j) * st.u(i) * st.u(i);
          }
          st.v(j) *= num / std::max(den, kFactorFloor);
        }
      }
    }

    const double obj = objective();
    if (!std::isfinite(obj)) throw NumericalError("extract_nmf_rank1: non-finite objective");
    st.trace.push_back(obj);
    st.iterations = it;
    if (it > 1 && prev - obj <= tol * std::max(1.0, std::abs(prev))) break;
    prev = obj;
  }
  return st;
}

}  // namespace detail

// Rank-one nonnegative factorization A ~ u v^T by multiplicative updates,
// averaged over random restarts; u is normalized to sum 1 after each restart
// (scale pushed into v) so restart averaging is well defined.
inline CgVectorPair extract_nmf_rank1(const DataMatrix& a, NmfLoss loss = NmfLoss::kKl,
                                      int restarts = 100, int max_iter = 1000, double tol = 1e-9,
                                      std::uint64_t seed = 0) {
  if (restarts < 1) throw ArgumentError("extract_nmf_rank1: restarts must be >= 1");
  if (max_iter < 1) throw ArgumentError("extract_nmf_rank1: max_iter must be >= 1");
  if (!(tol > 0.0)) throw ArgumentError("extract_nmf_rank1: tol must be positive");
  detail::check_nonnegative_observed(a, "extract_nmf_rank1");

  Vector u_acc = Vector::Zero(a.rows());
  Vector v_acc = Vector::Zero(a.cols());
  detail::NmfState last;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    detail::NmfState st = detail::nmf_single_run(a, loss, max_iter, tol, rng);
    const double su = st.u.sum();
    if (!(su > 0.0)) throw NumericalError("extract_nmf_rank1: factor collapsed to zero");
    st.u /= su;
    st.v *= su;
    u_acc += st.u;
    v_acc += st.v;
    if (r == restarts - 1) last = std::move(st);
  }

  CgVectorPair out;
  out.u = u_acc / static_cast<double>(restarts);
  out.v = v_acc / static_cast<double>(restarts);
  out.method = Method::kNmf;
  out.diag.iterations = last.iterations;
  out.diag.objective = last.trace.empty() ? 0.0 : last.trace.back();
  out.diag.residual = out.diag.objective;
  out.diag.seed = seed;
  out.diag.objective_trace = std::move(last.trace);
  return out;
}

// Entropic OT by Sinkhorn scaling of the Gibbs kernel exp(-M/epsilon).
// Switches to stabilized log-domain updates when epsilon <= 0.05 * range(M)
// (or whenever plain exponentials would under/overflow). The returned u sums
// to 1, with the scale pushed into v.
inline TransportPlan extract_sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                                      double epsilon, double tol = 1e-10, int max_iter = 10000) {
  const Eigen::Index m = cost.rows();
  const Eigen::Index n = cost.cols();
  if (!(epsilon > 0.0)) throw ArgumentError("extract_sinkhorn: epsilon must be positive");
  if (!(tol > 0.0)) throw ArgumentError("extract_sinkhorn: tol must be positive");
  if (a.size() != m || b.size() != n)
    throw ArgumentError("extract_sinkhorn: marginal sizes do not match the cost matrix");
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any())
    throw ArgumentError("extract_sinkhorn: marginals must be strictly positive");
  if (std::abs(a.sum() - 1.0) > 1e-12 || std::abs(b.sum() - 1.0) > 1e-12)
    throw ArgumentError("extract_sinkhorn: marginals must sum to 1");

  const double lo = cost.minCoeff();
  const double hi = cost.maxCoeff();
  const double range = hi - lo;
  const bool log_domain =
      epsilon <= 0.05 * range || range / epsilon > 700.0 || std::abs(lo) / epsilon > 700.0;

  TransportPlan plan;
  plan.epsilon = epsilon;
  plan.cost = cost;
  double residual = std::numeric_limits<double>::infinity();

  if (!log_domain) {
    const Matrix kernel = ((cost.array() - lo) / -epsilon).exp();
    Vector u = Vector::Ones(m);
    Vector v = Vector::Ones(n);
    for (int it = 1; it <= max_iter; ++it) {
      u = a.cwiseQuotient(kernel * v);
      v = b.cwiseQuotient(kernel.transpose() * u);
      const Matrix gamma = u.asDiagonal() * kernel * v.asDiagonal();
      const double row_res = (gamma.rowwise().sum() - a).cwiseAbs().maxCoeff();
      const double col_res = (gamma.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
      residual = std::max(row_res, col_res);
      if (residual <= tol) {
        plan.gamma = gamma;
        plan.u = u;
        plan.v = v * std::exp(lo / epsilon);  // fold the kernel shift back
        plan.iterations = it;
        plan.residual = residual;
        const double su = plan.u.sum();
        plan.u /= su;
        plan.v *= su;
        return plan;
      }
    }
  } else {
    Vector f = Vector::Zero(m);
    Vector g = Vector::Zero(n);
    const auto lse_rows = [&](Vector& out) {
      // out_i = log sum_j exp((g_j - M_ij)/eps)
      for (Eigen::Index i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
          mx = std::max(mx, (g(j) - cost(i, j)) / epsilon);
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) s += std::exp((g(j) - cost(i, j)) / epsilon - mx);
        out(i) = mx + std::log(s);
      }
    };
    const auto lse_cols = [&](Vector& out) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i)
          mx = std::max(mx, (f(i) - cost(i, j)) / epsilon);
        double s = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) s += std::exp((f(i) - cost(i, j)) / epsilon - mx);
        out(j) = mx + std::log(s);
      }
    };
    Vector lse(m);
    Vector lse_c(n);
    for (int it = 1; it <= max_iter; ++it) {
      lse_rows(lse);
      for (Eigen::Index i = 0; i < m; ++i) f(i) = epsilon * (std::log(a(i)) - lse(i));
      lse_cols(lse_c);
      for (Eigen::Index j = 0; j < n; ++j) g(j) = epsilon * (std::log(b(j)) - lse_c(j));

      Matrix gamma(m, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          gamma(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / epsilon);
      const double row_res = (gamma.rowwise().sum() - a).cwiseAbs().maxCoeff();
      const double col_res = (gamma.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
      residual = std::max(row_res, col_res);
      if (residual <= tol) {
        plan.gamma = std::move(gamma);
        plan.u = (f / epsilon).array().exp();
        plan.v = (g / epsilon).array().exp();
        plan.iterations = it;
        plan.residual = residual;
        const double su = plan.u.sum();
        plan.u /= su;
        plan.v *= su;
        return plan;
      }
    }
  }
  throw ConvergenceError("extract_sinkhorn: no convergence within " + std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual);
}

// Regularized transport objective <M, gamma> + eps * KL(gamma || a b^T),
// with 0 log 0 = 0. Diagnostic: the Sinkhorn plan minimizes it over the
// transport polytope.
inline double reg_ot_loss(const Matrix& gamma, const Matrix& cost, const Vector& a,
                          const Vector& b, double epsilon) {
  if (gamma.rows() != cost.rows() || gamma.cols() != cost.cols())
    throw ArgumentError("reg_ot_loss: gamma and cost shapes differ");
  if (a.size() != gamma.rows() || b.size() != gamma.cols())
    throw ArgumentError("reg_ot_loss: marginal sizes do not match");
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any())
    throw ArgumentError("reg_ot_loss: marginals must be positive");
  if ((gamma.array() < 0.0).any())
    throw ArgumentError("reg_ot_loss: gamma must be nonnegative");

  double transport = 0.0;
  double kl = 0.0;
  for (Eigen::Index j = 0; j < gamma.cols(); ++j)
    for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
      const double g = gamma(i, j);
      const double ab = a(i) * b(j);
      transport += cost(i, j) * g;
      kl += (g > 0.0 ? g * std::log(g / ab) - g + ab : ab);
    }
  return transport + epsilon * kl;
}

namespace detail {

// Cross cost between rows and columns of a square matrix: M_ij = ||x_i - y_j||
// with x_i = row i and y_j = column j.
inline Matrix row_column_cost(const Matrix& a) {
  const Eigen::Index m = a.rows();
  const Matrix gram = a * a;  // x_i . y_j = sum_k A_ik A_kj
  const Vector row_sq = a.rowwise().squaredNorm();
  const Vector col_sq = a.colwise().squaredNorm();
  Matrix cost(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      cost(i, j) = std::sqrt(std::max(row_sq(i) + col_sq(j) - 2.0 * gram(i, j), 0.0));
  return cost;
}

}  // namespace detail

// CCOT: entropic OT between the empirical row and column measures of a square
// matrix; the Sinkhorn scaling vectors are the cluster-generating pair.
// Default epsilon: 0.1 * mean(M).
inline CgVectorPair extract_ccot(const DataMatrix& a, std::optional<double> epsilon = std::nullopt,
                                 double tol = 1e-10, int max_iter = 10000) {
  if (a.rows() != a.cols())
    throw ArgumentError("extract_ccot: matrix must be square; use extract_ccot_gw for rectangular data");
  if (!a.fully_observed()) throw ArgumentError("extract_ccot: input must be fully observed");
  if (epsilon.has_value() && !(*epsilon > 0.0))
    throw ArgumentError("extract_ccot: epsilon must be positive");

  const Matrix cost = detail::row_column_cost(a.values);
  const double mean_cost = cost.mean();
  const double eps = epsilon.value_or(mean_cost > 0.0 ? 0.1 * mean_cost : 1.0);
  const Eigen::Index m = a.rows();
  const Vector uniform = Vector::Constant(m, 1.0 / static_cast<double>(m));
  const TransportPlan plan = extract_sinkhorn(cost, uniform, uniform, eps, tol, max_iter);

  CgVectorPair out;
  out.u = plan.u;
  out.v = plan.v;
  out.method = Method::kCcot;
  out.diag.iterations = plan.iterations;
  out.diag.residual = plan.residual;
  return out;
}

// Entropic Gromov-Wasserstein (square loss) between the intra-row and
// intra-column distance geometries, for rectangular data. Each outer sweep
// rebuilds the square-loss pseudo-cost -2 C_r gamma C_c^T (the additive
// constants do not move the inner argmin) and re-solves the inner entropic
// OT; the scaling vectors of the final inner solve are returned.
inline CgVectorPair extract_ccot_gw(const DataMatrix& a,
                                    std::optional<double> epsilon = std::nullopt,
                                    int outer_iter = 50, double tol = 1e-6,
                                    double inner_tol = 1e-9, int inner_max_iter = 10000) {
  if (!a.fully_observed()) throw ArgumentError("extract_ccot_gw: input must be fully observed");
  if (outer_iter < 1) throw ArgumentError("extract_ccot_gw: outer_iter must be >= 1");
  if (epsilon.has_value() && !(*epsilon > 0.0))
    throw ArgumentError("extract_ccot_gw: epsilon must be positive");

  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Matrix c_rows = detail::pairwise_row_distances(a.values);
  const Matrix c_cols = detail::pairwise_row_distances(a.values.transpose());
  const Vector wa = Vector::Constant(m, 1.0 / static_cast<double>(m));
  const Vector wb = Vector::Constant(n, 1.0 / static_cast<double>(n));

  Matrix gamma = Matrix::Constant(m, n, 1.0 / static_cast<double>(m * n));

  double eps = 0.0;
  if (epsilon.has_value()) {
    eps = *epsilon;
  } else {
    // scale from the full square-loss cost at the uniform coupling
    const double mean_sq = c_rows.array().square().mean() + c_cols.array().square().mean();
    const double mean_cross = (c_rows * gamma * c_cols.transpose()).mean();
    const double scale = mean_sq - 2.0 * mean_cross;
    eps = scale > 0.0 ? 0.1 * scale : 1.0;
  }

  TransportPlan plan;
  int iterations = 0;
  double delta = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= outer_iter; ++it) {
    const Matrix pseudo = -2.0 * (c_rows * gamma * c_cols.transpose());
    plan = extract_sinkhorn(pseudo, wa, wb, eps, inner_tol, inner_max_iter);
    delta = (plan.gamma - gamma).cwiseAbs().maxCoeff();
    gamma = plan.gamma;
    iterations = it;
    if (delta < tol) break;
  }

  CgVectorPair out;
  out.u = plan.u;
  out.v = plan.v;
  out.method = Method::kCcotGw;
  out.diag.iterations = iterations;
  out.diag.residual = delta;
  const Matrix cross = c_rows * gamma * c_cols.transpose();
  out.diag.objective = c_rows.array().square().mean() + c_cols.array().square().mean() -
                       2.0 * gamma.cwiseProduct(cross).sum();
  return out;
}

// Fiedler vector: eigenvector of the second-smallest eigenvalue of the
// normalized Laplacian of the (optionally doubly stochastic) row similarity.
// Sign convention: the coordinate of largest magnitude is positive.
inline CgVectorPair extract_fiedler(const DataMatrix& a,
                                    FiedlerVariant variant = FiedlerVariant::kRaw,
                                    double tol = 1e-8) {
  if (a.rows() < 2) throw ArgumentError("extract_fiedler: need at least 2 rows");
  const SimilarityMatrix sim = build_similarity(a);
  Matrix w;
  if (variant == FiedlerVariant::kDoublyStochastic) {
    const ScalingResult ds = sinkhorn_knopp_ds(sim);
    w = 0.5 * (ds.values + ds.values.transpose());
  } else {
    w = sim.values;
  }
  const LaplacianMatrix lap = detail::normalized_laplacian_dense(w);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(lap.values);
  if (solver.info() != Eigen::Success)
    throw NumericalError("extract_fiedler: eigendecomposition failed");
  const double lambda2 = solver.eigenvalues()(1);

  // Deflate the known kernel direction sqrt(d). For a connected graph this is
  // a no-op; when the zero eigenvalue has multiplicity 2 the solver's basis of
  // the nullspace is arbitrary and need not be orthogonal to sqrt(d).
  const Vector kernel_dir = lap.degrees.array().sqrt().matrix().normalized();
  Vector u = solver.eigenvectors().col(1);
  u -= u.dot(kernel_dir) * kernel_dir;
  if (u.norm() < 1e-6) {
    u = solver.eigenvectors().col(0);
    u -= u.dot(kernel_dir) * kernel_dir;
  }
  if (!(u.norm() > 0.0)) throw NumericalError("extract_fiedler: degenerate eigenspace");
  u.normalize();
  const double residual = (lap.values * u - lambda2 * u).norm();
  if (residual > tol)
    throw NumericalError("extract_fiedler: eigenpair residual " + std::to_string(residual) +
                         " exceeds tolerance");

  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (std::abs(u(i)) > std::abs(u(arg))) arg = i;
  if (u(arg) < 0.0) u = -u;

  CgVectorPair out;
  out.u = std::move(u);
  out.method = variant == FiedlerVariant::kRaw ? Method::kFiedler : Method::kFiedlerDs;
  out.diag.objective = lambda2;
  out.diag.residual = residual;
  return out;
}

// Power iteration on P = damping * column_stochastic(S) + (1-damping)/m. A
// square input is read as an adjacency matrix; rectangular data first goes
// through build_similarity so all row extractors share one preprocessing path.
inline CgVectorPair extract_pagerank(const DataMatrix& a, double damping = 0.85,
                                     double tol = 1e-10, int max_iter = 100000) {
  if (!(damping >= 0.0 && damping <= 1.0))
    throw ArgumentError("extract_pagerank: damping must lie in [0, 1]");
  if (!a.fully_observed()) throw ArgumentError("extract_pagerank: input must be fully observed");

  Matrix s;
  if (a.rows() == a.cols()) {
    detail::check_nonnegative_observed(a, "extract_pagerank");
    s = a.values;
  } else {
    s = build_similarity(a).values;
  }
  const Eigen::Index m = s.rows();
  for (Eigen::Index j = 0; j < m; ++j)
    if (s.col(j).sum() <= 0.0)
      throw DegenerateInputError("extract_pagerank: column " + std::to_string(j) +
                                 " sums to zero");
  Matrix p = s;
  for (Eigen::Index j = 0; j < m; ++j) p.col(j) /= p.col(j).sum();

  const double teleport = (1.0 - damping) / static_cast<double>(m);
  Vector u = Vector::Constant(m, 1.0 / static_cast<double>(m));
  double delta = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    Vector next = damping * (p * u);
    next.array() += teleport;
    next /= next.sum();
    delta = (next - u).cwiseAbs().sum();
    u = std::move(next);
    if (delta <= tol) {
      CgVectorPair out;
      out.u = std::move(u);
      out.method = Method::kPageRank;
      out.diag.iterations = it;
      out.diag.residual = delta;
      return out;
    }
  }
  throw ConvergenceError("extract_pagerank: no convergence within " + std::to_string(max_iter) +
                             " iterations",
                         delta);
}

// Row means as u and column means as v (the Largest Gaps degree statistic,
// extended to rectangular data).
inline CgVectorPair extract_marginals(const DataMatrix& a) {
  detail::check_nonnegative_observed(a, "extract_marginals");
  if (!a.fully_observed()) throw ArgumentError("extract_marginals: input must be fully observed");
  CgVectorPair out;
  out.u = a.values.rowwise().sum() / static_cast<double>(a.cols());
  out.v = a.values.colwise().sum().transpose() / static_cast<double>(a.rows());
  out.method = Method::kMarginal;
  return out;
}

}  // namespace rank1part
