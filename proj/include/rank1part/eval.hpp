#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rank1part/errors.hpp"
#include "rank1part/matrix.hpp"

namespace rank1part {

// Row and column partition of a data matrix, labels contiguous from 0.
struct CoPartition {
  std::vector<int> rows;
  std::vector<int> cols;
};

namespace detail {

// Remaps arbitrary integer labels to 0..k-1 (ordered by label value).
inline std::vector<int> compact_labels(const std::vector<int>& z, int* k_out = nullptr) {
  std::map<int, int> remap;
  for (int v : z) remap.emplace(v, 0);
  int next = 0;
  for (auto& kv : remap) kv.second = next++;
  std::vector<int> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = remap.at(z[i]);
  if (k_out) *k_out = next;
  return out;
}

inline std::vector<std::vector<long>> contingency_table(const std::vector<int>& a, int ka,
                                                        const std::vector<int>& b, int kb) {
  std::vector<std::vector<long>> table(ka, std::vector<long>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) table[a[i]][b[i]] += 1;
  return table;
}

// Hungarian algorithm (Jonker-style with potentials) for the square min-cost
// assignment problem. Returns the column matched to each row.
inline std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0);
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

// Normalized mutual information with arithmetic-mean normalization and natural
// logarithms; 1 when both partitions are the same single cluster.
inline double nmi(const std::vector<int>& z, const std::vector<int>& z_hat) {
  if (z.size() != z_hat.size()) throw ArgumentError("nmi: label vectors differ in length");
  if (z.empty()) throw ArgumentError("nmi: empty label vectors");
  int ka = 0;
  int kb = 0;
  const auto a = detail::compact_labels(z, &ka);
  const auto b = detail::compact_labels(z_hat, &kb);
  const auto table = detail::contingency_table(a, ka, b, kb);
  const double n = static_cast<double>(z.size());

  std::vector<double> pa(ka, 0.0);
  std::vector<double> pb(kb, 0.0);
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      pa[i] += static_cast<double>(table[i][j]);
      pb[j] += static_cast<double>(table[i][j]);
    }
  double ha = 0.0;
  double hb = 0.0;
  for (int i = 0; i < ka; ++i)
    if (pa[i] > 0) ha -= pa[i] / n * std::log(pa[i] / n);
  for (int j = 0; j < kb; ++j)
    if (pb[j] > 0) hb -= pb[j] / n * std::log(pb[j] / n);
  if (ha == 0.0 && hb == 0.0) return 1.0;

  double mi = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      if (table[i][j] == 0) continue;
      const double pij = static_cast<double>(table[i][j]) / n;
      mi += pij * std::log(pij / (pa[i] / n * pb[j] / n));
    }
  const double value = mi / (0.5 * (ha + hb));
  return std::clamp(value, 0.0, 1.0);
}

// Proportion of misclassified points under the best one-to-one matching of
// cluster labels; rectangular confusion matrices are zero-padded so unmatched
// predicted clusters count as errors.
inline double clustering_error(const std::vector<int>& z, const std::vector<int>& z_hat) {
  if (z.size() != z_hat.size())
    throw ArgumentError("clustering_error: label vectors differ in length");
  if (z.empty()) throw ArgumentError("clustering_error: empty label vectors");
  int ka = 0;
  int kb = 0;
  const auto a = detail::compact_labels(z, &ka);
  const auto b = detail::compact_labels(z_hat, &kb);
  const auto table = detail::contingency_table(a, ka, b, kb);

  const int s = std::max(ka, kb);
  std::vector<std::vector<double>> cost(s, std::vector<double>(s, 0.0));
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) cost[i][j] = -static_cast<double>(table[i][j]);
  const auto match = detail::min_cost_assignment(cost);

  long agree = 0;
  for (int i = 0; i < ka; ++i)
    if (match[i] < kb) agree += table[i][match[i]];
  return 1.0 - static_cast<double>(agree) / static_cast<double>(z.size());
}

// Co-clustering error combining the row and column misclassification rates.
inline double cce(const std::vector<int>& z_r, const std::vector<int>& z_c,
                  const std::vector<int>& z_r_hat, const std::vector<int>& z_c_hat) {
  const double er = clustering_error(z_r, z_r_hat);
  const double ec = clustering_error(z_c, z_c_hat);
  return er + ec - er * ec;
}

inline double combine_cce(double e_rows, double e_cols) {
  return e_rows + e_cols - e_rows * e_cols;
}

// Mean silhouette of a 1D clustering; distance is the absolute difference of
// coordinates, singleton clusters and 0/0 points score 0.
inline double silhouette_1d(const Vector& values, const std::vector<int>& labels) {
  const Eigen::Index n = values.size();
  if (static_cast<std::size_t>(n) != labels.size())
    throw ArgumentError("silhouette_1d: values and labels differ in length");
  int k = 0;
  const auto z = detail::compact_labels(labels, &k);
  if (k < 2) throw ArgumentError("silhouette_1d: need at least 2 clusters");

  std::vector<long> count(k, 0);
  for (int c : z) count[c] += 1;

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (count[z[i]] == 1) continue;  // singleton scores 0
    std::vector<double> dist_sum(k, 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      dist_sum[z[j]] += std::abs(values(i) - values(j));
    }
    const double a = dist_sum[z[i]] / static_cast<double>(count[z[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == z[i] || count[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(count[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

// Per-run evaluation record for the benchmark harness.
struct RunReport {
  double nmi_rows = 0.0;
  double nmi_cols = 0.0;
  double ce_rows = 0.0;
  double ce_cols = 0.0;
  double cce = 0.0;
  int k_rows = 0;
  int k_cols = 0;
  double wall_seconds = 0.0;
  std::string method;
  std::string config;
  std::uint64_t seed = 0;
};

}  // namespace rank1part
