#include "m2fgb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "m2fgb/error.hpp"

namespace m2fgb {

void SearchSpace::validate() const {
  auto check = [](const ParamRange& r, const char* name) {
    if (r.hi < r.lo) throw ConfigError(std::string("empty range for ") + name);
    if (r.log_scale && r.lo <= 0.0)
      throw ConfigError(std::string("log-scale range for ") + name + " must be positive");
  };
  check(lambda, "lambda");
  check(learning_rate, "learning_rate");
  check(dual_learning_rate, "dual_learning_rate");
  check(l2_leaf_reg, "l2_leaf_reg");
  if (rounds.hi < rounds.lo || max_depth.hi < max_depth.lo ||
      min_samples_leaf.hi < min_samples_leaf.lo)
    throw ConfigError("empty integer range in search space");
  if (lambda.lo < 0.0 || lambda.hi > 1.0) throw ConfigError("lambda range outside [0,1]");
}

namespace {

double sample_range(const ParamRange& r, std::mt19937_64& rng) {
  if (r.lo == r.hi) return r.lo;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  if (r.log_scale) return r.lo * std::pow(r.hi / r.lo, u);
  return r.lo + u * (r.hi - r.lo);
}

int sample_int(const IntRange& r, std::mt19937_64& rng) {
  if (r.lo == r.hi) return r.lo;
  std::uniform_int_distribution<int> unif(r.lo, r.hi);
  return unif(rng);
}

}  // namespace

std::vector<BoosterConfig> random_search(const SearchSpace& space, int count) {
  space.validate();
  if (count < 1) throw ConfigError("random_search needs count >= 1");
  std::mt19937_64 rng(space.seed);
  std::vector<BoosterConfig> configs;
  configs.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    BoosterConfig cfg;
    cfg.lambda = sample_range(space.lambda, rng);
    cfg.learning_rate = sample_range(space.learning_rate, rng);
    cfg.dual_learning_rate = sample_range(space.dual_learning_rate, rng);
    cfg.rounds = sample_int(space.rounds, rng);
    cfg.tree.max_depth = sample_int(space.max_depth, rng);
    cfg.tree.min_samples_leaf = sample_int(space.min_samples_leaf, rng);
    cfg.tree.l2_leaf_reg = sample_range(space.l2_leaf_reg, rng);
    cfg.pointwise = space.pointwise;
    cfg.group_kind = space.group_kind;
    cfg.seed = space.seed;
    cfg.validate();
    configs.push_back(cfg);
  }
  return configs;
}

namespace {

std::pair<double, double> evaluate_model(const Model& model, const Dataset& ds,
                                         MetricName performance_metric,
                                         MetricName fairness_metric, double threshold) {
  std::vector<double> predictions;
  if (model.task == Task::BinaryClassification) {
    std::vector<int> labels = model.predict_labels(ds.features, threshold);
    predictions.assign(labels.begin(), labels.end());
  } else {
    predictions = model.predict_scores(ds.features);
  }
  double performance = overall_metric(performance_metric, ds.labels, predictions);
  GroupMetricReport report =
      group_metric(fairness_metric, ds.labels, predictions, ds.groups, ds.num_groups());
  // harm metrics enter the alpha score negated so larger is better
  double fairness = metric_higher_is_better(fairness_metric) ? report.worst_group_value
                                                             : -report.worst_group_value;
  return {performance, fairness};
}

}  // namespace

ModelPool build_pool(const Dataset& train_ds, const Dataset& valid_ds,
                     std::span<const BoosterConfig> configs, MetricName performance_metric,
                     MetricName fairness_metric, double threshold) {
  if (configs.empty()) throw ConfigError("build_pool needs at least one config");
  ModelPool pool;
  pool.performance_metric = performance_metric;
  pool.fairness_metric = fairness_metric;
  int id = 0;
  for (const BoosterConfig& cfg : configs) {
    auto [model, trace] = train(train_ds, cfg);
    auto [performance, fairness] =
        evaluate_model(model, valid_ds, performance_metric, fairness_metric, threshold);
    pool.entries.push_back({id++, cfg, std::move(model), performance, fairness});
  }
  return pool;
}

std::vector<SweepRow> run_sweep(const ModelPool& pool, const Dataset& test_ds,
                                std::span<const double> alphas, double threshold) {
  if (pool.entries.empty()) throw ConfigError("run_sweep on an empty pool");
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    const PoolEntry* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const PoolEntry& entry : pool.entries) {
      double score = alpha_score(entry.valid_performance, entry.valid_fairness, alpha);
      // ties broken by lowest config id (entries are id-ordered)
      if (score > best_score) {
        best_score = score;
        best = &entry;
      }
    }
    auto [performance, fairness] = evaluate_model(best->model, test_ds,
                                                  pool.performance_metric,
                                                  pool.fairness_metric, threshold);
    rows.push_back({alpha, best->id, performance, fairness});
  }
  return rows;
}

std::vector<LambdaRow> lambda_monotonicity_experiment(const Dataset& ds,
                                                      std::span<const double> lambdas,
                                                      const BoosterConfig& base_config) {
  if (lambdas.empty()) throw ConfigError("empty lambda grid");
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    if (lambdas[k + 1] <= lambdas[k]) throw ConfigError("lambda grid must be ascending");
  }
  if (lambdas.front() <= 0.0) throw ConfigError("lambda grid values must be positive");

  std::vector<LambdaRow> rows;
  for (double lambda : lambdas) {
    BoosterConfig cfg = base_config;
    cfg.lambda = lambda;
    try {
      auto [model, trace] = train(ds, cfg);
      std::vector<double> scores = model.predict_scores(ds.features);
      double train_loss = overall_loss(cfg.pointwise, ds.labels, scores);
      std::vector<double> gl = group_losses(cfg.group_kind, cfg.pointwise, ds.labels,
                                            scores, ds.groups, ds.num_groups());
      double worst = *std::max_element(gl.begin(), gl.end());
      rows.push_back({lambda, train_loss, worst, worst - train_loss});
    } catch (const Error& e) {
      throw TrainError("training failed at lambda " + std::to_string(lambda) + ": " +
                       e.what());
    }
  }
  return rows;
}

ConvergencePair convergence_experiment(const Dataset& ds, const BoosterConfig& config) {
  config.validate();
  BoosterConfig baseline = config;
  baseline.lambda = 0.0;
  ConvergencePair pair;
  pair.baseline = train(ds, baseline).second;
  pair.fair = train(ds, config).second;
  return pair;
}

std::vector<double> enumerate_thresholds(std::span<const double> points) {
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> thresholds;
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
    thresholds.push_back(0.5 * (sorted[k] + sorted[k + 1]));
  thresholds.push_back(std::numeric_limits<double>::infinity());
  return thresholds;
}

std::vector<double> threshold_group_losses(double threshold, std::span<const double> points,
                                           std::span<const double> labels,
                                           std::span<const int> groups,
                                           std::size_t num_groups) {
  std::vector<double> errors(num_groups, 0.0);
  std::vector<double> counts(num_groups, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto z = static_cast<std::size_t>(groups[i]);
    double prediction = points[i] >= threshold ? 1.0 : 0.0;
    errors[z] += prediction != labels[i] ? 1.0 : 0.0;
    counts[z] += 1.0;
  }
  for (std::size_t z = 0; z < num_groups; ++z) {
    if (counts[z] == 0.0) throw DataError("empty group in threshold oracle");
    errors[z] /= counts[z];
  }
  return errors;
}

ThresholdOracleResult minmax_threshold_oracle(std::span<const double> points,
                                              std::span<const double> labels,
                                              std::span<const int> groups,
                                              std::size_t num_groups) {
  if (points.empty()) throw DataError("threshold oracle on empty input");
  if (points.size() != labels.size() || points.size() != groups.size())
    throw DataError("threshold oracle length mismatch");
  if (points.size() > 200) throw DataError("threshold oracle limited to 200 points");

  ThresholdOracleResult best;
  bool have = false;
  double best_sum = 0.0;
  for (double t : enumerate_thresholds(points)) {
    std::vector<double> gl = threshold_group_losses(t, points, labels, groups, num_groups);
    double max_loss = *std::max_element(gl.begin(), gl.end());
    double sum = std::accumulate(gl.begin(), gl.end(), 0.0);
    bool better = !have || max_loss < best.max_group_loss ||
                  (max_loss == best.max_group_loss && sum < best_sum);
    if (better) {
      have = true;
      best.threshold = t;
      best.group_losses = std::move(gl);
      best.max_group_loss = max_loss;
      best_sum = sum;
    }
  }
  return best;
}

double spearman_rank_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw DataError("spearman needs two equal-length vectors of size >= 2");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> rank(v.size());
    std::size_t k = 0;
    while (k < order.size()) {
      std::size_t j = k;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[k]]) ++j;
      double avg = 0.5 * (static_cast<double>(k) + static_cast<double>(j)) + 1.0;
      for (std::size_t m = k; m <= j; ++m) rank[order[m]] = avg;
      k = j + 1;
    }
    return rank;
  };
  std::vector<double> ra = ranks(a);
  std::vector<double> rb = ranks(b);
  double mean_a = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  double mean_b = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean_a) * (rb[i] - mean_b);
    var_a += (ra[i] - mean_a) * (ra[i] - mean_a);
    var_b += (rb[i] - mean_b) * (rb[i] - mean_b);
  }
  if (var_a == 0.0 || var_b == 0.0) throw DataError("spearman on a constant vector");
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace m2fgb
