#include "goalex/matching.hpp"

#include <limits>

namespace goalex::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieEps = 1e-9;

// Min-cost perfect assignment on a square cost matrix via shortest augmenting paths
// with potentials (Kuhn-Munkres in the O(n^3) formulation). Returns col index per row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = p[static_cast<size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<size_t>(j)]) row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

// Best achievable total over the rows/columns not yet used. Rectangular inputs are
// padded square on the short side only, so every item of the smaller side gets matched.
double best_remaining(const Eigen::MatrixXd& sim, const std::vector<char>& row_used,
                      const std::vector<char>& col_used) {
  std::vector<int> rows, cols;
  for (int i = 0; i < static_cast<int>(row_used.size()); ++i)
    if (!row_used[static_cast<size_t>(i)]) rows.push_back(i);
  for (int j = 0; j < static_cast<int>(col_used.size()); ++j)
    if (!col_used[static_cast<size_t>(j)]) cols.push_back(j);
  if (rows.empty() || cols.empty()) return 0.0;

  const int k = static_cast<int>(std::max(rows.size(), cols.size()));
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = 0; b < cols.size(); ++b)
      cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = -sim(rows[a], cols[b]);

  const std::vector<int> assignment = solve_assignment(cost);
  double total = 0.0;
  for (size_t a = 0; a < rows.size(); ++a) {
    const int b = assignment[a];
    if (b >= 0 && b < static_cast<int>(cols.size())) total += sim(rows[a], cols[static_cast<size_t>(b)]);
  }
  return total;
}

}  // namespace

MatchingResult max_weight_matching(const Eigen::MatrixXd& similarity) {
  const int m = static_cast<int>(similarity.rows());
  const int n = static_cast<int>(similarity.cols());
  MatchingResult result;
  if (m == 0 || n == 0) {
    for (int i = 0; i < m; ++i) result.unmatched_generated.push_back(i);
    for (int j = 0; j < n; ++j) result.unmatched_reference.push_back(j);
    return result;
  }

  std::vector<char> row_used(static_cast<size_t>(m), 0), col_used(static_cast<size_t>(n), 0);
  const double optimum = best_remaining(similarity, row_used, col_used);

  // Fix arcs row by row, keeping only choices that still admit an optimal completion;
  // scanning columns in ascending order yields the lexicographically smallest optimum.
  const int target = std::min(m, n);
  double fixed_weight = 0.0;
  for (int i = 0; i < m && static_cast<int>(result.arcs.size()) < target; ++i) {
    for (int j = 0; j < n; ++j) {
      if (col_used[static_cast<size_t>(j)]) continue;
      row_used[static_cast<size_t>(i)] = 1;
      col_used[static_cast<size_t>(j)] = 1;
      const double attainable =
          fixed_weight + similarity(i, j) + best_remaining(similarity, row_used, col_used);
      if (attainable >= optimum - kTieEps) {
        result.arcs.push_back({i, j, similarity(i, j)});
        fixed_weight += similarity(i, j);
        break;
      }
      row_used[static_cast<size_t>(i)] = 0;
      col_used[static_cast<size_t>(j)] = 0;
    }
  }

  for (int i = 0; i < m; ++i)
    if (!row_used[static_cast<size_t>(i)]) result.unmatched_generated.push_back(i);
  for (int j = 0; j < n; ++j)
    if (!col_used[static_cast<size_t>(j)]) result.unmatched_reference.push_back(j);

  double total = 0.0;
  for (const Arc& arc : result.arcs) total += arc.similarity;
  result.total_similarity = total;
  return result;
}

}  // namespace goalex::eval
