#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "m2fgb/dataset.hpp"
#include "m2fgb/losses.hpp"
#include "m2fgb/tree.hpp"

namespace m2fgb {

struct BoosterConfig {
  double lambda = 0.0;             // fairness weight in [0,1]
  int rounds = 100;                // boosting iterations M
  double learning_rate = 0.1;      // gamma
  double dual_learning_rate = 0.1; // zeta
  PointwiseLoss pointwise = PointwiseLoss::Logistic;
  GroupLoss group_kind = GroupLoss::Equalized;
  TreeParams tree;
  std::uint64_t seed = 0;
  // true: the tree-fitting gradient uses the freshly projected
  // multipliers; false: the pre-update multipliers
  bool fresh_multipliers = true;

  void validate() const;
};

/// One record per completed boosting round.
struct RoundRecord {
  double overall_loss = 0.0;
  std::vector<double> group_losses;
  std::vector<double> mu;
  double epsilon = 0.0;
  double grad_h_inner = 0.0;  // <grad, h> over training rows
  double h_sq_norm = 0.0;     // sum of h(x_i)^2 over training rows
};

using TrainingTrace = std::vector<RoundRecord>;

struct Model {
  double base_score = 0.0;
  double learning_rate = 0.1;
  Task task = Task::BinaryClassification;
  std::vector<RegressionTree> trees;
  BoosterConfig config;            // echoed for reproducibility
  std::size_t num_groups = 0;
  std::size_t num_features = 0;

  std::vector<double> predict_scores(const Matrix& features) const;
  double predict_score_row(std::span<const double> row) const;
  // label 1 iff sigmoid(score) >= threshold
  std::vector<int> predict_labels(const Matrix& features, double threshold = 0.5) const;

  std::string serialize() const;
  static Model deserialize(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);
};

/// f0: log-odds of the clipped positive rate for classification, label
/// mean for regression.
double init_base_score(Task task, std::span<const double> labels);

/// The full primal-dual loop: per round, group losses at the current
/// scores, projected dual ascent on mu, tree fit to the negated
/// Lagrangian gradient, additive score update, and slack restoration.
std::pair<Model, TrainingTrace> train(const Dataset& ds, const BoosterConfig& config);

/// Plain gradient boosting with the fairness machinery absent; the
/// lambda = 0 primal-dual run must reproduce it byte for byte.
std::pair<Model, TrainingTrace> train_plain(const Dataset& ds, const BoosterConfig& config);

}  // namespace m2fgb
