#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "m2fgb/booster.hpp"
#include "m2fgb/metrics.hpp"

namespace m2fgb {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  bool log_scale = false;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct SearchSpace {
  ParamRange lambda{0.0, 1.0, false};
  ParamRange learning_rate{0.01, 0.3, true};
  ParamRange dual_learning_rate{0.01, 1.0, true};
  IntRange rounds{20, 100};
  IntRange max_depth{2, 4};
  IntRange min_samples_leaf{5, 40};
  ParamRange l2_leaf_reg{0.0, 2.0, false};
  PointwiseLoss pointwise = PointwiseLoss::Logistic;
  GroupLoss group_kind = GroupLoss::TruePositive;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic sample of booster configs from the space.
std::vector<BoosterConfig> random_search(const SearchSpace& space, int count);

struct PoolEntry {
  int id = 0;
  BoosterConfig config;
  Model model;
  double valid_performance = 0.0;
  double valid_fairness = 0.0;
};

struct ModelPool {
  std::vector<PoolEntry> entries;
  MetricName performance_metric = MetricName::Accuracy;
  MetricName fairness_metric = MetricName::TruePositiveRate;
};

/// Trains one model per config and scores it on validation once; sweep
/// trials reuse these entries without retraining.
ModelPool build_pool(const Dataset& train_ds, const Dataset& valid_ds,
                     std::span<const BoosterConfig> configs, MetricName performance_metric,
                     MetricName fairness_metric, double threshold = 0.5);

struct SweepRow {
  double alpha = 0.0;
  int config_id = 0;
  double test_performance = 0.0;
  double test_fairness = 0.0;
};

/// For each alpha, selects the pool entry maximizing the alpha score on
/// validation (ties to the lowest config id) and reports test metrics.
std::vector<SweepRow> run_sweep(const ModelPool& pool, const Dataset& test_ds,
                                std::span<const double> alphas, double threshold = 0.5);

struct LambdaRow {
  double lambda = 0.0;
  double train_loss = 0.0;        // overall L on training data
  double worst_group_loss = 0.0;  // max_z group loss on training data
  double gap = 0.0;               // worst_group_loss - train_loss
};

/// Trains one model per lambda with a shared seed and config and
/// reports the worst-group/overall loss gap.
std::vector<LambdaRow> lambda_monotonicity_experiment(const Dataset& ds,
                                                      std::span<const double> lambdas,
                                                      const BoosterConfig& base_config);

struct ConvergencePair {
  TrainingTrace baseline;  // lambda = 0
  TrainingTrace fair;      // lambda from the config
};

ConvergencePair convergence_experiment(const Dataset& ds, const BoosterConfig& config);

struct ThresholdOracleResult {
  double threshold = 0.0;  // predict 1 iff x >= threshold
  std::vector<double> group_losses;
  double max_group_loss = 0.0;
};

/// Enumerates every threshold classifier on 1D points (midpoints
/// between sorted distinct values plus the two infinities) and returns
/// one minimizing the maximum group 0-1 loss; ties resolved by the
/// smaller loss sum, then the smaller threshold.
ThresholdOracleResult minmax_threshold_oracle(std::span<const double> points,
                                              std::span<const double> labels,
                                              std::span<const int> groups,
                                              std::size_t num_groups);

/// Candidate thresholds the oracle enumerates, in ascending order.
std::vector<double> enumerate_thresholds(std::span<const double> points);

std::vector<double> threshold_group_losses(double threshold, std::span<const double> points,
                                           std::span<const double> labels,
                                           std::span<const int> groups,
                                           std::size_t num_groups);

/// Spearman rank correlation with average ranks for ties.
double spearman_rank_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace m2fgb
