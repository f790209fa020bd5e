#include "m2fgb/booster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "m2fgb/error.hpp"
#include "m2fgb/simplex.hpp"

namespace m2fgb {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double_token(const std::string& tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw DataError("bad numeric token \"" + tok + "\" in model file");
  return v;
}

}  // namespace

void BoosterConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0)
    throw ConfigError("lambda must lie in [0,1], got " + fmt(lambda));
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (dual_learning_rate <= 0.0) throw ConfigError("dual_learning_rate must be > 0");
  tree.validate();
}

double init_base_score(Task task, std::span<const double> labels) {
  if (labels.empty()) throw DataError("init_base_score on empty labels");
  double mean = 0.0;
  for (double y : labels) mean += y;
  mean /= static_cast<double>(labels.size());
  if (task == Task::Regression) return mean;
  double p = std::clamp(mean, 1e-6, 1.0 - 1e-6);
  return std::log(p / (1.0 - p));
}

std::vector<double> Model::predict_scores(const Matrix& features) const {
  if (features.cols() != num_features)
    throw DataError("feature dimension mismatch: model expects " +
                    std::to_string(num_features) + ", got " + std::to_string(features.cols()));
  std::vector<double> scores(features.rows(), base_score);
  for (const RegressionTree& tree : trees) {
    for (std::size_t i = 0; i < features.rows(); ++i)
      scores[i] += learning_rate * tree.predict_row(features.row(i));
  }
  return scores;
}

double Model::predict_score_row(std::span<const double> row) const {
  double s = base_score;
  for (const RegressionTree& tree : trees) s += learning_rate * tree.predict_row(row);
  return s;
}

std::vector<int> Model::predict_labels(const Matrix& features, double threshold) const {
  if (task != Task::BinaryClassification)
    throw DataError("predict_labels requires a classification model");
  std::vector<double> scores = predict_scores(features);
  std::vector<int> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    labels[i] = sigmoid(scores[i]) >= threshold ? 1 : 0;
  return labels;
}

namespace {

std::pair<Model, TrainingTrace> train_impl(const Dataset& ds, const BoosterConfig& config,
                                           bool fairness_enabled) {
  config.validate();
  ds.validate();
  if (config.pointwise == PointwiseLoss::Logistic && ds.task != Task::BinaryClassification)
    throw DataError("logistic loss requires a classification dataset");
  if (config.pointwise == PointwiseLoss::Squared && ds.task != Task::Regression)
    throw DataError("squared loss requires a regression dataset");
  validate_group_loss_inputs(config.group_kind, ds.task, ds.labels, ds.groups,
                             ds.num_groups(), ds.group_names);

  const std::size_t n = ds.n();
  const std::size_t num_groups = ds.num_groups();
  const double lambda = fairness_enabled ? config.lambda : 0.0;

  Model model;
  model.task = ds.task;
  model.learning_rate = config.learning_rate;
  model.config = config;
  model.num_groups = num_groups;
  model.num_features = ds.d();
  model.base_score = init_base_score(ds.task, ds.labels);

  std::vector<double> scores(n, model.base_score);
  std::vector<double> mu(num_groups, lambda / static_cast<double>(num_groups));
  std::vector<double> group_loss_vec = group_losses(config.group_kind, config.pointwise,
                                                    ds.labels, scores, ds.groups, num_groups);
  double epsilon = *std::max_element(group_loss_vec.begin(), group_loss_vec.end());

  TrainingTrace trace;
  trace.reserve(static_cast<std::size_t>(config.rounds));
  std::vector<double> h(n);

  for (int round = 0; round < config.rounds; ++round) {
    group_loss_vec = group_losses(config.group_kind, config.pointwise, ds.labels, scores,
                                  ds.groups, num_groups);
    std::vector<double> mu_next = mu;
    if (fairness_enabled && lambda > 0.0) {
      std::vector<double> ascent(num_groups);
      for (std::size_t z = 0; z < num_groups; ++z)
        ascent[z] = mu[z] + config.dual_learning_rate * (group_loss_vec[z] - epsilon);
      mu_next = project_scaled_simplex(ascent, lambda);
    }
    const std::vector<double>& grad_mu = config.fresh_multipliers ? mu_next : mu;

    std::vector<double> grad = lagrangian_gradient(config.pointwise, config.group_kind,
                                                   ds.labels, scores, ds.groups, num_groups,
                                                   grad_mu, lambda);
    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = -grad[i];
    RegressionTree tree = fit_tree(ds.features, targets, config.tree);

    double inner = 0.0;
    double h_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = tree.predict_row(ds.features.row(i));
      inner += grad[i] * h[i];
      h_sq += h[i] * h[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] += config.learning_rate * h[i];
      if (!std::isfinite(scores[i]))
        throw TrainError("non-finite score at round " + std::to_string(round));
    }
    model.trees.push_back(std::move(tree));
    mu = mu_next;

    group_loss_vec = group_losses(config.group_kind, config.pointwise, ds.labels, scores,
                                  ds.groups, num_groups);
    epsilon = *std::max_element(group_loss_vec.begin(), group_loss_vec.end());

    RoundRecord record;
    record.overall_loss = overall_loss(config.pointwise, ds.labels, scores);
    record.group_losses = group_loss_vec;
    record.mu = mu;
    record.epsilon = epsilon;
    record.grad_h_inner = inner;
    record.h_sq_norm = h_sq;
    trace.push_back(std::move(record));
  }
  return {std::move(model), std::move(trace)};
}

}  // namespace

std::pair<Model, TrainingTrace> train(const Dataset& ds, const BoosterConfig& config) {
  return train_impl(ds, config, true);
}

std::pair<Model, TrainingTrace> train_plain(const Dataset& ds, const BoosterConfig& config) {
  return train_impl(ds, config, false);
}

std::string Model::serialize() const {
  std::ostringstream out;
  out << "m2fgb-model v1\n";
  out << "task " << task_name(task) << "\n";
  out << "pointwise " << pointwise_loss_name(config.pointwise) << "\n";
  out << "group_kind " << group_loss_name(config.group_kind) << "\n";
  out << "lambda " << fmt(config.lambda) << "\n";
  out << "rounds " << config.rounds << "\n";
  out << "learning_rate " << fmt(learning_rate) << "\n";
  out << "dual_learning_rate " << fmt(config.dual_learning_rate) << "\n";
  out << "seed " << config.seed << "\n";
  out << "fresh_multipliers " << (config.fresh_multipliers ? 1 : 0) << "\n";
  out << "max_depth " << config.tree.max_depth << "\n";
  out << "min_samples_leaf " << config.tree.min_samples_leaf << "\n";
  out << "l2_leaf_reg " << fmt(config.tree.l2_leaf_reg) << "\n";
  out << "num_groups " << num_groups << "\n";
  out << "num_features " << num_features << "\n";
  out << "base_score " << fmt(base_score) << "\n";
  out << "num_trees " << trees.size() << "\n";
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out << "tree " << t << " " << trees[t].nodes.size() << "\n";
    for (const TreeNode& node : trees[t].nodes) {
      if (node.is_leaf())
        out << "leaf " << fmt(node.value) << "\n";
      else
        out << "split " << node.feature << " " << fmt(node.threshold) << " " << node.left
            << " " << node.right << "\n";
    }
  }
  out << "end\n";
  return out.str();
}

Model Model::deserialize(std::istream& in) {
  Model model;
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) throw DataError("truncated model file");
    return line;
  };
  if (next_line() != "m2fgb-model v1") throw DataError("bad model file header");

  auto expect_kv = [&](const std::string& key) -> std::string {
    std::string l = next_line();
    auto space = l.find(' ');
    if (space == std::string::npos || l.substr(0, space) != key)
      throw DataError("expected \"" + key + "\" in model file, got \"" + l + "\"");
    return l.substr(space + 1);
  };

  model.task = parse_task(expect_kv("task"));
  model.config.pointwise = parse_pointwise_loss(expect_kv("pointwise"));
  model.config.group_kind = parse_group_loss(expect_kv("group_kind"));
  model.config.lambda = parse_double_token(expect_kv("lambda"));
  model.config.rounds = std::stoi(expect_kv("rounds"));
  model.learning_rate = parse_double_token(expect_kv("learning_rate"));
  model.config.learning_rate = model.learning_rate;
  model.config.dual_learning_rate = parse_double_token(expect_kv("dual_learning_rate"));
  model.config.seed = std::stoull(expect_kv("seed"));
  model.config.fresh_multipliers = expect_kv("fresh_multipliers") == "1";
  model.config.tree.max_depth = std::stoi(expect_kv("max_depth"));
  model.config.tree.min_samples_leaf = std::stoi(expect_kv("min_samples_leaf"));
  model.config.tree.l2_leaf_reg = parse_double_token(expect_kv("l2_leaf_reg"));
  model.num_groups = std::stoull(expect_kv("num_groups"));
  model.num_features = std::stoull(expect_kv("num_features"));
  model.base_score = parse_double_token(expect_kv("base_score"));
  std::size_t num_trees = std::stoull(expect_kv("num_trees"));

  for (std::size_t t = 0; t < num_trees; ++t) {
    std::istringstream head(next_line());
    std::string tag;
    std::size_t index = 0, num_nodes = 0;
    head >> tag >> index >> num_nodes;
    if (tag != "tree" || index != t) throw DataError("bad tree header in model file");
    RegressionTree tree;
    for (std::size_t k = 0; k < num_nodes; ++k) {
      std::istringstream node_line(next_line());
      std::string kind;
      node_line >> kind;
      TreeNode node;
      if (kind == "leaf") {
        std::string value;
        node_line >> value;
        node.value = parse_double_token(value);
      } else if (kind == "split") {
        std::string threshold;
        node_line >> node.feature >> threshold >> node.left >> node.right;
        node.threshold = parse_double_token(threshold);
        if (node.feature < 0 || node.left < 0 || node.right < 0)
          throw DataError("bad split node in model file");
      } else {
        throw DataError("unknown node kind \"" + kind + "\" in model file");
      }
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  if (next_line() != "end") throw DataError("missing end marker in model file");
  return model;
}

void Model::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << serialize();
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  return deserialize(in);
}

}  // namespace m2fgb
