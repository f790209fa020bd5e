#include "m2fgb/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "m2fgb/error.hpp"

namespace m2fgb {

namespace {
constexpr double kGainEps = 1e-12;

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// best split of one feature: scan midpoints between adjacent distinct
// sorted values; lowest threshold wins among equal gains
SplitCandidate best_split_for_feature(const Matrix& features, std::span<const double> targets,
                                      std::span<const std::size_t> rows, int feature,
                                      const TreeParams& params, double total_sum) {
  const auto n = static_cast<double>(rows.size());
  std::vector<std::pair<double, double>> order;  // (feature value, target)
  order.reserve(rows.size());
  for (std::size_t r : rows)
    order.emplace_back(features(r, static_cast<std::size_t>(feature)), targets[r]);
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  SplitCandidate best;
  best.feature = feature;
  const double parent_score = total_sum * total_sum / n;
  double left_sum = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    left_sum += order[k].second;
    if (order[k].first == order[k + 1].first) continue;
    auto nl = static_cast<double>(k + 1);
    double nr = n - nl;
    if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
    double right_sum = total_sum - left_sum;
    double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
    if (gain > best.gain + kGainEps * (std::abs(parent_score) + 1.0) ||
        (!best.found && gain > kGainEps * (std::abs(parent_score) + 1.0))) {
      best.found = true;
      best.gain = gain;
      best.threshold = 0.5 * (order[k].first + order[k + 1].first);
    }
  }
  return best;
}

struct Builder {
  const Matrix& features;
  std::span<const double> targets;
  const TreeParams& params;
  std::vector<TreeNode> nodes;
  int threads;

  int build(std::vector<std::size_t>& rows, int depth) {
    double sum = 0.0;
    for (std::size_t r : rows) sum += targets[r];
    int idx = static_cast<int>(nodes.size());
    nodes.push_back({});

    SplitCandidate best;
    if (depth < params.max_depth &&
        rows.size() >= 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
      best = find_best_split(rows, sum);
    }
    if (!best.found) {
      nodes[idx].value = sum / (static_cast<double>(rows.size()) + params.l2_leaf_reg);
      return idx;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      if (features(r, static_cast<std::size_t>(best.feature)) < best.threshold)
        left_rows.push_back(r);
      else
        right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    int left = build(left_rows, depth + 1);
    int right = build(right_rows, depth + 1);
    nodes[idx].feature = best.feature;
    nodes[idx].threshold = best.threshold;
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
  }

  SplitCandidate find_best_split(std::span<const std::size_t> rows, double total_sum) {
    const int d = static_cast<int>(features.cols());
    std::vector<SplitCandidate> per_feature(static_cast<std::size_t>(d));
    int workers = std::min(threads, d);
    if (workers <= 1 || rows.size() < 4096) {
      for (int f = 0; f < d; ++f)
        per_feature[static_cast<std::size_t>(f)] =
            best_split_for_feature(features, targets, rows, f, params, total_sum);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (int f = w; f < d; f += workers)
            per_feature[static_cast<std::size_t>(f)] =
                best_split_for_feature(features, targets, rows, f, params, total_sum);
        });
      }
      for (auto& t : pool) t.join();
    }
    // deterministic reduction: strictly greater gain wins, so the
    // lowest feature index survives ties
    SplitCandidate best;
    for (const SplitCandidate& c : per_feature) {
      if (c.found && (!best.found || c.gain > best.gain)) best = c;
    }
    return best;
  }
};

}  // namespace

void TreeParams::validate() const {
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  if (l2_leaf_reg < 0.0) throw ConfigError("l2_leaf_reg must be >= 0");
}

double RegressionTree::predict_row(std::span<const double> row) const {
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    auto f = static_cast<std::size_t>(node->feature);
    if (f >= row.size()) throw DataError("feature dimension mismatch in tree_predict");
    node = row[f] < node->threshold ? &nodes[static_cast<std::size_t>(node->left)]
                                    : &nodes[static_cast<std::size_t>(node->right)];
  }
  return node->value;
}

std::size_t RegressionTree::num_leaves() const {
  std::size_t count = 0;
  for (const TreeNode& n : nodes) count += n.is_leaf() ? 1 : 0;
  return count;
}

RegressionTree fit_tree(const Matrix& features, std::span<const double> targets,
                        const TreeParams& params) {
  params.validate();
  if (targets.empty()) throw DataError("fit_tree on empty input");
  if (features.rows() != targets.size()) throw DataError("fit_tree row count mismatch");
  for (double t : targets) {
    if (!std::isfinite(t)) throw DataError("non-finite tree-fitting target");
  }
  std::vector<std::size_t> rows(targets.size());
  std::iota(rows.begin(), rows.end(), 0);
  Builder builder{features, targets, params, {}, split_search_threads()};
  builder.build(rows, 0);
  RegressionTree tree;
  tree.nodes = std::move(builder.nodes);
  return tree;
}

int split_search_threads() {
  const char* env = std::getenv("M2FGB_THREADS");
  if (env == nullptr) return 1;
  int value = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::string_view(env).size(), value);
  if (ec != std::errc{} || value < 1) return 1;
  return value;
}

}  // namespace m2fgb
