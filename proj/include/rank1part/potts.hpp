#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "rank1part/errors.hpp"
#include "rank1part/eval.hpp"
#include "rank1part/matrix.hpp"

namespace rank1part {

// Piecewise-constant denoising result. `x` lives in the coordinate order of
// the input; `boundaries` are the 1-based last indices before each jump of the
// solved (possibly sorted) signal, one `segment_values` entry per segment.
// objective = ||x - u||_p^p + lambda * #boundaries.
struct PiecewiseResult {
  Vector x;
  std::vector<int> boundaries;
  std::vector<double> segment_values;
  double objective = 0.0;
  double lambda = 0.0;
  int p = 2;
};

// Stable sorting permutation: perm[t] is the original index of the t-th
// smallest coordinate, ties keep their original order.
struct SortPermutation {
  std::vector<int> perm;
  std::vector<int> inverse;
};

inline SortPermutation make_sort_permutation(const Vector& u) {
  const int n = static_cast<int>(u.size());
  SortPermutation s;
  s.perm.resize(n);
  std::iota(s.perm.begin(), s.perm.end(), 0);
  std::stable_sort(s.perm.begin(), s.perm.end(), [&](int a, int b) { return u(a) < u(b); });
  s.inverse.resize(n);
  for (int t = 0; t < n; ++t) s.inverse[s.perm[t]] = t;
  return s;
}

namespace detail {

// Per-interval fitting costs for the Potts recursion. p = 2 uses prefix sums
// of u and u^2 (O(1) per interval, clamped at zero against cancellation);
// p = 1 precomputes the lower median and the absolute deviation about it for
// every interval. Single-point intervals cost exactly 0 and keep their value.
class SegmentCostTable {
 public:
  SegmentCostTable(const Vector& u, int p) : u_(u), n_(static_cast<int>(u.size())), p_(p) {
    if (p_ == 2) {
      pre1_.assign(n_ + 1, 0.0);
      pre2_.assign(n_ + 1, 0.0);
      for (int i = 0; i < n_; ++i) {
        pre1_[i + 1] = pre1_[i] + u_(i);
        pre2_[i + 1] = pre2_[i] + u_(i) * u_(i);
      }
    } else {
      build_l1();
    }
  }

  double cost(int i, int j) const {
    if (i == j) return 0.0;
    if (p_ == 2) {
      const double len = static_cast<double>(j - i + 1);
      const double d1 = pre1_[j + 1] - pre1_[i];
      const double c = (pre2_[j + 1] - pre2_[i]) - d1 * d1 / len;
      return c > 0.0 ? c : 0.0;
    }
    return cost_[tri(i, j)];
  }

  double value(int i, int j) const {
    if (i == j) return u_(i);
    if (p_ == 1) return med_[tri(i, j)];
    bool constant = true;
    for (int k = i + 1; k <= j && constant; ++k) constant = (u_(k) == u_(i));
    if (constant) return u_(i);
    return (pre1_[j + 1] - pre1_[i]) / static_cast<double>(j - i + 1);
  }

  int size() const { return n_; }

 private:
  void build_l1() {
    const std::size_t total = static_cast<std::size_t>(n_) * (n_ + 1) / 2;
    cost_.resize(total);
    med_.resize(total);
    for (int i = 0; i < n_; ++i) {
      std::priority_queue<double> lo;
      std::priority_queue<double, std::vector<double>, std::greater<double>> hi;
      for (int j = i; j < n_; ++j) {
        const double x = u_(j);
        if (lo.empty() || x <= lo.top())
          lo.push(x);
        else
          hi.push(x);
        if (lo.size() > hi.size() + 1) {
          hi.push(lo.top());
          lo.pop();
        } else if (hi.size() > lo.size()) {
          lo.push(hi.top());
          hi.pop();
        }
        const double med = lo.top();  // lower median
        double c = 0.0;
        for (int k = i; k <= j; ++k) c += std::abs(u_(k) - med);
        const std::size_t idx = tri(i, j);
        med_[idx] = med;
        cost_[idx] = c;
      }
    }
  }

  std::size_t tri(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
           static_cast<std::size_t>(j - i);
  }

  Vector u_;
  int n_;
  int p_;
  std::vector<double> pre1_, pre2_;  // p = 2
  std::vector<double> cost_, med_;   // p = 1
};

// Boundary list (1-based last index before each jump) of the candidate whose
// last segment starts at `i`, given the finalized DP start choices.
inline std::vector<int> candidate_boundaries(const std::vector<int>& start, int i) {
  std::vector<int> b;
  int s = i;
  while (s > 0) {
    b.push_back(s);
    s = start[s - 1];
  }
  std::reverse(b.begin(), b.end());
  return b;
}

// Exact minimizer of sum-of-segment-costs + lambda per jump by dynamic
// programming over the start of the last segment. Ties are broken toward
// fewer segments, then the lexicographically smallest boundary list.
inline PiecewiseResult solve_with_costs(const Vector& u, const SegmentCostTable& costs,
                                        double lambda, int p) {
  const int n = static_cast<int>(u.size());
  std::vector<double> best(n);
  std::vector<int> segs(n);
  std::vector<int> start(n);

  for (int j = 0; j < n; ++j) {
    double best_value = costs.cost(0, j);
    int best_segs = 1;
    int best_start = 0;
    for (int i = 1; i <= j; ++i) {
      double cand = best[i - 1] + lambda;
      cand += costs.cost(i, j);
      const int cand_segs = segs[i - 1] + 1;
      bool take = false;
      if (cand < best_value) {
        take = true;
      } else if (cand == best_value) {
        if (cand_segs < best_segs) {
          take = true;
        } else if (cand_segs == best_segs) {
          take = candidate_boundaries(start, i) < candidate_boundaries(start, best_start);
        }
      }
      if (take) {
        best_value = cand;
        best_segs = cand_segs;
        best_start = i;
      }
    }
    best[j] = best_value;
    segs[j] = best_segs;
    start[j] = best_start;
  }

  std::vector<int> seg_starts;
  for (int s = start[n - 1];;) {
    seg_starts.push_back(s);
    if (s == 0) break;
    s = start[s - 1];
  }
  std::reverse(seg_starts.begin(), seg_starts.end());

  PiecewiseResult result;
  result.lambda = lambda;
  result.p = p;
  result.x = Vector(n);
  for (std::size_t t = 0; t < seg_starts.size(); ++t) {
    const int s = seg_starts[t];
    const int e = (t + 1 < seg_starts.size()) ? seg_starts[t + 1] - 1 : n - 1;
    const double v = costs.value(s, e);
    result.segment_values.push_back(v);
    for (int k = s; k <= e; ++k) result.x(k) = v;
    if (t > 0) result.boundaries.push_back(s);
  }

  double fit = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = result.x(k) - u(k);
    fit += (p == 2) ? d * d : std::abs(d);
  }
  result.objective = fit + lambda * static_cast<double>(result.boundaries.size());
  return result;
}

inline void check_potts_args(const Vector& u, double lambda, int p) {
  if (u.size() < 1) throw ArgumentError("potts_solve: signal must be nonempty");
  if (!(lambda >= 0.0)) throw ArgumentError("potts_solve: lambda must be nonnegative");
  if (p != 1 && p != 2) throw ArgumentError("potts_solve: p must be 1 or 2");
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!std::isfinite(u(i))) throw ArgumentError("potts_solve: signal has non-finite entries");
}

}  // namespace detail

// Exact global minimizer of ||x - u||_p^p + lambda * ||Dx||_0.
inline PiecewiseResult potts_solve(const Vector& u, double lambda, int p) {
  detail::check_potts_args(u, lambda, p);
  const detail::SegmentCostTable costs(u, p);
  return detail::solve_with_costs(u, costs, lambda, p);
}

// Potts on the stably sorted signal, solution mapped back through the inverse
// permutation. Handles non-contiguous clusters; boundaries and segment values
// describe the sorted-domain segmentation.
inline PiecewiseResult sorted_potts_solve(const Vector& u, double lambda, int p) {
  detail::check_potts_args(u, lambda, p);
  const int n = static_cast<int>(u.size());
  const SortPermutation perm = make_sort_permutation(u);
  Vector s(n);
  for (int t = 0; t < n; ++t) s(t) = u(perm.perm[t]);
  const detail::SegmentCostTable costs(s, p);
  PiecewiseResult sorted = detail::solve_with_costs(s, costs, lambda, p);

  PiecewiseResult result = sorted;
  for (int t = 0; t < n; ++t) result.x(perm.perm[t]) = sorted.x(t);
  double fit = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = result.x(k) - u(k);
    fit += (p == 2) ? d * d : std::abs(d);
  }
  result.objective = fit + lambda * static_cast<double>(result.boundaries.size());
  return result;
}

// Baseline label extraction: sort, cut at consecutive gaps larger than
// eps_thr, number clusters by increasing value.
inline std::vector<int> threshold_jump_labels(const Vector& u, double eps_thr) {
  if (!(eps_thr > 0.0)) throw ArgumentError("threshold_jump_labels: eps_thr must be positive");
  if (u.size() < 1) throw ArgumentError("threshold_jump_labels: signal must be nonempty");
  const SortPermutation perm = make_sort_permutation(u);
  const int n = static_cast<int>(u.size());
  std::vector<int> labels(n, 0);
  int label = 0;
  for (int t = 0; t < n; ++t) {
    if (t > 0 && u(perm.perm[t]) - u(perm.perm[t - 1]) > eps_thr) ++label;
    labels[perm.perm[t]] = label;
  }
  return labels;
}

// Coordinates whose denoised values agree within 1e-12 share a label; labels
// are numbered by increasing value.
inline std::vector<int> labels_from_values(const PiecewiseResult& result) {
  const int n = static_cast<int>(result.x.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return result.x(a) < result.x(b); });
  std::vector<int> labels(n, 0);
  int label = 0;
  for (int t = 0; t < n; ++t) {
    if (t > 0 && result.x(order[t]) - result.x(order[t - 1]) > 1e-12) ++label;
    labels[order[t]] = label;
  }
  return labels;
}

struct LambdaCandidate {
  double lambda = 0.0;
  int k = 0;
  double silhouette = 0.0;
};

struct LambdaSelection {
  double lambda = 0.0;
  int k = 0;
  std::vector<int> labels;
  PiecewiseResult solution;
  std::vector<LambdaCandidate> path;
};

// Sweeps an ascending lambda grid over sorted-Potts solutions and picks the
// one maximizing the mean 1D silhouette of the induced labels (ties: fewer
// clusters, then smaller lambda). Solutions with k = 1 or k = n are not
// scored. Default grid: 20 geometric values spanning [1e-3, 10] times the
// p-dependent total deviation. The whole grid is scored; the interval cost
// table is shared across candidates, so one sweep costs little more than a
// single solve.
inline LambdaSelection select_lambda(const Vector& u, int p,
                                     std::optional<std::vector<double>> grid = std::nullopt) {
  const int n = static_cast<int>(u.size());
  if (n < 3) throw ArgumentError("select_lambda: need at least 3 coordinates");
  if (p != 1 && p != 2) throw ArgumentError("select_lambda: p must be 1 or 2");

  std::vector<double> lambdas;
  if (grid.has_value()) {
    if (grid->empty()) throw ArgumentError("select_lambda: empty lambda grid");
    for (double l : *grid)
      if (!(l > 0.0)) throw ArgumentError("select_lambda: grid values must be positive");
    lambdas = *grid;
    std::sort(lambdas.begin(), lambdas.end());
  } else {
    double scale = 0.0;
    if (p == 2) {
      const double mean = u.mean();
      scale = (u.array() - mean).square().sum();
    } else {
      Vector tmp = u;
      std::vector<double> vals(tmp.data(), tmp.data() + n);
      std::nth_element(vals.begin(), vals.begin() + (n - 1) / 2, vals.end());
      const double med = vals[(n - 1) / 2];
      scale = (u.array() - med).abs().sum();
    }
    lambdas.resize(20);
    for (int i = 0; i < 20; ++i)
      lambdas[i] = 1e-3 * scale * std::pow(1e4, static_cast<double>(i) / 19.0);
  }

  const SortPermutation perm = make_sort_permutation(u);
  Vector s(n);
  for (int t = 0; t < n; ++t) s(t) = u(perm.perm[t]);
  const detail::SegmentCostTable costs(s, p);

  LambdaSelection sel;
  bool found = false;
  double best_sil = -std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    PiecewiseResult sorted = detail::solve_with_costs(s, costs, lambda, p);
    PiecewiseResult solution = sorted;
    for (int t = 0; t < n; ++t) solution.x(perm.perm[t]) = sorted.x(t);
    double fit = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = solution.x(k) - u(k);
      fit += (p == 2) ? d * d : std::abs(d);
    }
    solution.objective = fit + lambda * static_cast<double>(solution.boundaries.size());

    std::vector<int> labels = labels_from_values(solution);
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    if (k < 2 || k > n - 1) {
      sel.path.push_back(LambdaCandidate{lambda, k, 0.0});
      continue;
    }
    const double sil = silhouette_1d(u, labels);
    sel.path.push_back(LambdaCandidate{lambda, k, sil});
    const bool better = !found || sil > best_sil || (sil == best_sil && k < sel.k);
    if (better) {
      best_sil = std::max(best_sil, sil);
      sel.lambda = lambda;
      sel.k = k;
      sel.labels = std::move(labels);
      sel.solution = std::move(solution);
      found = true;
    }
  }
  if (!found) throw SelectionError("select_lambda: signal appears constant (no lambda yields k >= 2)");
  return sel;
}

}  // namespace rank1part
