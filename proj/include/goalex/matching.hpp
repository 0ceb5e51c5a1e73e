#pragma once

#include <Eigen/Core>
#include <vector>

namespace goalex::eval {

struct Arc {
  int generated = 0;
  int reference = 0;
  double similarity = 0.0;

  bool operator==(const Arc&) const = default;
};

struct MatchingResult {
  std::vector<Arc> arcs;  // ascending by generated index
  std::vector<int> unmatched_generated;
  std::vector<int> unmatched_reference;
  double total_similarity = 0.0;
};

/// Maximum-weight bipartite matching between generated items (rows) and reference items
/// (columns). Exactly min(rows, cols) arcs are selected; leftover indices are reported
/// as unmatched. Among equal-weight optima the lexicographically smallest arc set wins.
MatchingResult max_weight_matching(const Eigen::MatrixXd& similarity);

}  // namespace goalex::eval
