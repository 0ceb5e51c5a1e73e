#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "goalex/matching.hpp"

using goalex::eval::Arc;
using goalex::eval::MatchingResult;
using goalex::eval::max_weight_matching;

namespace {

// Independent oracle: enumerate every injective assignment of the smaller side and
// take the best total; optionally collect all optimal arc sets.
void enumerate(const Eigen::MatrixXd& sim, int row, std::vector<int>& cols_used,
               std::vector<std::pair<int, int>>& current, double total, double& best,
               std::vector<std::vector<std::pair<int, int>>>* optima) {
  const int m = static_cast<int>(sim.rows());
  const int n = static_cast<int>(sim.cols());
  if (row == m || static_cast<int>(current.size()) == std::min(m, n)) {
    if (static_cast<int>(current.size()) == std::min(m, n)) {
      if (total > best + 1e-12) {
        best = total;
        if (optima) {
          optima->clear();
          optima->push_back(current);
        }
      } else if (optima && std::abs(total - best) <= 1e-12) {
        optima->push_back(current);
      }
    }
    return;
  }
  // leave this row unmatched (only useful when rows outnumber columns)
  if (m - row - 1 >= std::min(m, n) - static_cast<int>(current.size()))
    enumerate(sim, row + 1, cols_used, current, total, best, optima);
  for (int j = 0; j < n; ++j) {
    if (std::find(cols_used.begin(), cols_used.end(), j) != cols_used.end()) continue;
    cols_used.push_back(j);
    current.push_back({row, j});
    enumerate(sim, row + 1, cols_used, current, total + sim(row, j), best, optima);
    current.pop_back();
    cols_used.pop_back();
  }
}

double brute_force_best(const Eigen::MatrixXd& sim,
                        std::vector<std::vector<std::pair<int, int>>>* optima = nullptr) {
  if (sim.rows() == 0 || sim.cols() == 0) return 0.0;
  double best = -1e300;
  std::vector<int> cols_used;
  std::vector<std::pair<int, int>> current;
  enumerate(sim, 0, cols_used, current, 0.0, best, optima);
  return best;
}

Eigen::MatrixXd from_rows(const std::vector<std::vector<double>>& rows) {
  const int m = static_cast<int>(rows.size());
  const int n = m == 0 ? 0 : static_cast<int>(rows[0].size());
  Eigen::MatrixXd sim(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) sim(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return sim;
}

std::set<std::pair<int, int>> arc_set(const MatchingResult& result) {
  std::set<std::pair<int, int>> arcs;
  for (const Arc& a : result.arcs) arcs.insert({a.generated, a.reference});
  return arcs;
}

}  // namespace

TEST_CASE("single cell matrix") {
  const MatchingResult r = max_weight_matching(from_rows({{1.0}}));
  REQUIRE(r.arcs.size() == 1);
  CHECK(r.arcs[0] == Arc{0, 0, 1.0});
  CHECK(r.unmatched_generated.empty());
  CHECK(r.unmatched_reference.empty());
  CHECK(r.total_similarity == doctest::Approx(1.0));
}

TEST_CASE("2x2 picks the diagonal") {
  const MatchingResult r = max_weight_matching(from_rows({{0.9, 0.1}, {0.2, 0.8}}));
  CHECK(arc_set(r) == std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(r.total_similarity == doctest::Approx(1.7));
}

TEST_CASE("3x2 leaves one generated item unmatched") {
  const MatchingResult r =
      max_weight_matching(from_rows({{0.9, 0.1}, {0.2, 0.8}, {0.5, 0.5}}));
  CHECK(arc_set(r) == std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(r.unmatched_generated == std::vector<int>{2});
  CHECK(r.unmatched_reference.empty());
}

TEST_CASE("empty sides") {
  const MatchingResult r = max_weight_matching(Eigen::MatrixXd(0, 3));
  CHECK(r.arcs.empty());
  CHECK(r.unmatched_reference == std::vector<int>{0, 1, 2});
  const MatchingResult r2 = max_weight_matching(Eigen::MatrixXd(0, 0));
  CHECK(r2.arcs.empty());
}

TEST_CASE("negative similarities still yield min(m,n) arcs") {
  const MatchingResult r = max_weight_matching(from_rows({{-0.5, -0.9}, {-0.8, -0.4}}));
  REQUIRE(r.arcs.size() == 2);
  CHECK(arc_set(r) == std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(r.total_similarity == doctest::Approx(-0.9));
}

TEST_CASE("ties break toward the lexicographically smallest arc set") {
  CHECK(arc_set(max_weight_matching(from_rows({{0.5, 0.5}, {0.5, 0.5}}))) ==
        std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(arc_set(max_weight_matching(from_rows({{0.6, 0.6}, {0.3, 0.3}}))) ==
        std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
  // three equal generated rows compete for two references: earliest rows win
  CHECK(arc_set(max_weight_matching(from_rows({{1, 1}, {1, 1}, {1, 1}}))) ==
        std::set<std::pair<int, int>>{{0, 0}, {1, 1}});
}

TEST_CASE("matches brute force on random matrices up to 6x6") {
  std::mt19937 rng(20260809);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 250; ++trial) {
    const int m = dim(rng), n = dim(rng);
    Eigen::MatrixXd sim(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) sim(i, j) = weight(rng);
    const MatchingResult r = max_weight_matching(sim);
    const double expected = brute_force_best(sim);
    REQUIRE(r.total_similarity == doctest::Approx(expected).epsilon(1e-12));
    REQUIRE(static_cast<int>(r.arcs.size()) == std::min(m, n));
    REQUIRE(static_cast<int>(r.arcs.size() + r.unmatched_generated.size()) == m);
    REQUIRE(static_cast<int>(r.arcs.size() + r.unmatched_reference.size()) == n);
    std::set<int> rows, cols;
    for (const Arc& a : r.arcs) {
      REQUIRE(rows.insert(a.generated).second);
      REQUIRE(cols.insert(a.reference).second);
      REQUIRE(a.similarity == sim(a.generated, a.reference));
    }
  }
}

TEST_CASE("lexicographic tie-break agrees with exhaustive enumeration") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> level(0, 2);  // weights from {0, 0.5, 1} force ties
  std::uniform_int_distribution<int> dim(1, 3);
  for (int trial = 0; trial < 120; ++trial) {
    const int m = dim(rng), n = dim(rng);
    Eigen::MatrixXd sim(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) sim(i, j) = 0.5 * level(rng);
    std::vector<std::vector<std::pair<int, int>>> optima;
    brute_force_best(sim, &optima);
    for (auto& o : optima) std::sort(o.begin(), o.end());
    const auto lex_min = *std::min_element(optima.begin(), optima.end());
    const MatchingResult r = max_weight_matching(sim);
    std::vector<std::pair<int, int>> got;
    for (const Arc& a : r.arcs) got.push_back({a.generated, a.reference});
    std::sort(got.begin(), got.end());
    REQUIRE(got == lex_min);
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 4, n = 5;
    Eigen::MatrixXd sim(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) sim(i, j) = weight(rng);

    std::vector<int> rp(m), cp(n);
    for (int i = 0; i < m; ++i) rp[static_cast<size_t>(i)] = i;
    for (int j = 0; j < n; ++j) cp[static_cast<size_t>(j)] = j;
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);

    Eigen::MatrixXd permuted(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        permuted(rp[static_cast<size_t>(i)], cp[static_cast<size_t>(j)]) = sim(i, j);

    const MatchingResult a = max_weight_matching(sim);
    const MatchingResult b = max_weight_matching(permuted);
    CHECK(b.total_similarity == doctest::Approx(a.total_similarity).epsilon(1e-12));
    CHECK(a.arcs.size() == b.arcs.size());
  }
}
