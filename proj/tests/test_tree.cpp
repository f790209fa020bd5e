#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "m2fgb/error.hpp"
#include "m2fgb/tree.hpp"

using namespace m2fgb;

namespace {

Matrix column(const std::vector<double>& values) {
  Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

// exhaustive one-split reference: try every feature and every midpoint,
// return the best SSE reduction
struct OracleSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

OracleSplit exhaustive_best_split(const Matrix& X, const std::vector<double>& t,
                                  int min_leaf) {
  auto sse_around_mean = [&](const std::vector<std::size_t>& rows) {
    double mean = 0.0;
    for (std::size_t r : rows) mean += t[r];
    mean /= static_cast<double>(rows.size());
    double sse = 0.0;
    for (std::size_t r : rows) sse += (t[r] - mean) * (t[r] - mean);
    return sse;
  };
  std::vector<std::size_t> all(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) all[i] = i;
  double parent = sse_around_mean(all);
  OracleSplit best;
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::vector<double> values;
    for (std::size_t i = 0; i < X.rows(); ++i) values.push_back(X(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double threshold = 0.5 * (values[k] + values[k + 1]);
      std::vector<std::size_t> left, right;
      for (std::size_t i = 0; i < X.rows(); ++i)
        (X(i, f) < threshold ? left : right).push_back(i);
      if (left.size() < static_cast<std::size_t>(min_leaf) ||
          right.size() < static_cast<std::size_t>(min_leaf))
        continue;
      double gain = parent - sse_around_mean(left) - sse_around_mean(right);
      if (!best.found || gain > best.gain + 1e-12) {
        best = {true, static_cast<int>(f), threshold, gain};
      }
    }
  }
  return best;
}

double reference_traverse(const RegressionTree& tree, std::span<const double> row,
                          int node_index) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
  if (node.is_leaf()) return node.value;
  bool go_left = row[static_cast<std::size_t>(node.feature)] < node.threshold;
  return reference_traverse(tree, row, go_left ? node.left : node.right);
}

}  // namespace

TEST_CASE("constant targets yield a single leaf") {
  Matrix X = column({1.0, 2.0, 3.0, 4.0});
  std::vector<double> t{2.5, 2.5, 2.5, 2.5};
  auto tree = fit_tree(X, t, {3, 1, 0.0});
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].value == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("max_depth zero returns the mean leaf") {
  Matrix X = column({1.0, 2.0, 3.0});
  std::vector<double> t{1.0, 2.0, 6.0};
  auto tree = fit_tree(X, t, {0, 1, 0.0});
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].value == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("l2 regularization shrinks the leaf value") {
  Matrix X = column({1.0, 2.0});
  std::vector<double> t{3.0, 3.0};
  auto tree = fit_tree(X, t, {0, 1, 2.0});
  CHECK(tree.nodes[0].value == doctest::Approx(6.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("sign-separable targets split at the sign boundary") {
  Matrix X = column({-2.0, -1.0, -0.5, 0.5, 1.0, 2.0});
  std::vector<double> t{-1.0, -1.0, -1.0, 1.0, 1.0, 1.0};
  auto tree = fit_tree(X, t, {1, 1, 0.0});
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].threshold == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tree.predict_row(std::vector<double>{-0.7}) == doctest::Approx(-1.0));
  CHECK(tree.predict_row(std::vector<double>{0.7}) == doctest::Approx(1.0));

  auto oracle = exhaustive_best_split(X, t, 1);
  CHECK(oracle.feature == 0);
  CHECK(tree.nodes[0].threshold == doctest::Approx(oracle.threshold).epsilon(1e-12));
}

TEST_CASE("row exactly at the threshold routes right") {
  Matrix X = column({0.0, 1.0, 0.0, 1.0});
  std::vector<double> t{-1.0, 1.0, -1.0, 1.0};
  auto tree = fit_tree(X, t, {1, 1, 0.0});
  REQUIRE(!tree.nodes[0].is_leaf());
  double threshold = tree.nodes[0].threshold;
  CHECK(tree.predict_row(std::vector<double>{threshold}) == doctest::Approx(1.0));
}

TEST_CASE("greedy split matches the exhaustive oracle on random data") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix X(40, 3);
    std::vector<double> t(40);
    for (std::size_t i = 0; i < 40; ++i) {
      for (std::size_t j = 0; j < 3; ++j) X(i, j) = unif(rng);
      t[i] = unif(rng) + 0.8 * X(i, 1);
    }
    auto tree = fit_tree(X, t, {1, 2, 0.0});
    auto oracle = exhaustive_best_split(X, t, 2);
    REQUIRE(oracle.found);
    REQUIRE(!tree.nodes[0].is_leaf());
    CHECK(tree.nodes[0].feature == oracle.feature);
    CHECK(tree.nodes[0].threshold == doctest::Approx(oracle.threshold).epsilon(1e-12));
  }
}

TEST_CASE("predictions match a recursive reference traversal") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Matrix X(50, 4);
  std::vector<double> t(50);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 4; ++j) X(i, j) = unif(rng);
    t[i] = unif(rng);
  }
  auto tree = fit_tree(X, t, {3, 2, 0.0});
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(tree.predict_row(X.row(i)) == reference_traverse(tree, X.row(i), 0));
}

TEST_CASE("least-squares projection identity and min_samples_leaf") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Matrix X(60, 2);
  std::vector<double> t(60);
  for (std::size_t i = 0; i < 60; ++i) {
    X(i, 0) = unif(rng);
    X(i, 1) = unif(rng);
    t[i] = X(i, 0) + 0.3 * unif(rng);
  }
  TreeParams params{3, 5, 0.0};
  auto tree = fit_tree(X, t, params);

  double dot = 0.0, h_sq = 0.0;
  std::vector<std::size_t> leaf_counts(tree.nodes.size(), 0);
  for (std::size_t i = 0; i < 60; ++i) {
    double h = tree.predict_row(X.row(i));
    dot += t[i] * h;
    h_sq += h * h;
  }
  CHECK(dot == doctest::Approx(h_sq).epsilon(1e-9));

  // every leaf respects min_samples_leaf
  for (std::size_t i = 0; i < 60; ++i) {
    int node = 0;
    while (!tree.nodes[static_cast<std::size_t>(node)].is_leaf()) {
      const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      node = X(i, static_cast<std::size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
    }
    leaf_counts[static_cast<std::size_t>(node)]++;
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].is_leaf())
      CHECK(leaf_counts[k] >= static_cast<std::size_t>(params.min_samples_leaf));
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(fit_tree(Matrix(0, 1), std::vector<double>{}, {3, 1, 0.0}), DataError);
  Matrix X = column({1.0});
  CHECK_THROWS_AS(fit_tree(X, std::vector<double>{std::nan("")}, {3, 1, 0.0}), DataError);
  CHECK_THROWS_AS(fit_tree(X, std::vector<double>{1.0}, {-1, 1, 0.0}), ConfigError);
}
