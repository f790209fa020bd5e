#pragma once

#include <span>
#include <vector>

#include "m2fgb/matrix.hpp"

namespace m2fgb {

struct TreeParams {
  int max_depth = 3;           // 0 means a single leaf
  int min_samples_leaf = 20;
  double l2_leaf_reg = 0.0;

  void validate() const;
};

/// Node in root-first layout. feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  // routing convention: go left iff feature value < threshold
  double predict_row(std::span<const double> row) const;
  std::size_t num_leaves() const;
};

/// Greedy least-squares fit: each split maximizes SSE reduction over
/// all (feature, midpoint-threshold) candidates; ties resolved by
/// lowest feature index then lowest threshold. Leaf value is
/// sum(targets) / (count + l2_leaf_reg).
RegressionTree fit_tree(const Matrix& features, std::span<const double> targets,
                        const TreeParams& params);

/// Thread cap for the split search; 1 disables parallelism. Reads the
/// M2FGB_THREADS environment variable, defaulting to 1.
int split_search_threads();

}  // namespace m2fgb
