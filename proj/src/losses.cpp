#include "m2fgb/losses.hpp"

#include <algorithm>
#include <cmath>

#include "m2fgb/error.hpp"

namespace m2fgb {

namespace {
constexpr double kSigmoidClip = 1e-12;
}

std::string pointwise_loss_name(PointwiseLoss kind) {
  return kind == PointwiseLoss::Logistic ? "logistic" : "squared";
}

PointwiseLoss parse_pointwise_loss(const std::string& name) {
  if (name == "logistic") return PointwiseLoss::Logistic;
  if (name == "squared") return PointwiseLoss::Squared;
  throw ConfigError("unknown pointwise loss \"" + name + "\"");
}

std::string group_loss_name(GroupLoss kind) {
  switch (kind) {
    case GroupLoss::Equalized: return "equalized";
    case GroupLoss::TruePositive: return "true_positive";
    case GroupLoss::PositiveRate: return "positive_rate";
  }
  return "?";
}

GroupLoss parse_group_loss(const std::string& name) {
  if (name == "equalized") return GroupLoss::Equalized;
  if (name == "true_positive") return GroupLoss::TruePositive;
  if (name == "positive_rate") return GroupLoss::PositiveRate;
  throw ConfigError("unknown group loss \"" + name + "\"");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LossGrad pointwise_loss_and_gradient(PointwiseLoss kind, double y, double score) {
  if (!std::isfinite(y) || !std::isfinite(score))
    throw DataError("non-finite input to pointwise loss");
  if (kind == PointwiseLoss::Logistic) {
    double s = sigmoid(score);
    double sc = std::clamp(s, kSigmoidClip, 1.0 - kSigmoidClip);
    double loss = -y * std::log(sc) - (1.0 - y) * std::log(1.0 - sc);
    return {loss, s - y};
  }
  double diff = score - y;
  return {0.5 * diff * diff, diff};
}

double overall_loss(PointwiseLoss kind, std::span<const double> y,
                    std::span<const double> scores) {
  if (y.empty()) throw DataError("overall_loss on empty vectors");
  if (y.size() != scores.size()) throw DataError("overall_loss length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    sum += pointwise_loss_and_gradient(kind, y[i], scores[i]).loss;
  return sum / static_cast<double>(y.size());
}

namespace {

// denominator per group: N_z, or the group's positive count for the
// true-positive criterion
std::vector<double> group_denominators(GroupLoss kind, std::span<const double> y,
                                       std::span<const int> groups, std::size_t num_groups) {
  std::vector<double> denom(num_groups, 0.0);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto z = static_cast<std::size_t>(groups[i]);
    if (kind == GroupLoss::TruePositive) {
      if (y[i] == 1.0) denom[z] += 1.0;
    } else {
      denom[z] += 1.0;
    }
  }
  return denom;
}

}  // namespace

void validate_group_loss_inputs(GroupLoss kind, Task task, std::span<const double> y,
                                std::span<const int> groups, std::size_t num_groups,
                                const std::vector<std::string>& group_names) {
  if (task == Task::Regression && kind != GroupLoss::Equalized)
    throw DataError("group loss \"" + group_loss_name(kind) +
                    "\" requires a classification task");
  auto denom = group_denominators(kind, y, groups, num_groups);
  for (std::size_t z = 0; z < num_groups; ++z) {
    if (denom[z] == 0.0) {
      std::string name = z < group_names.size() ? group_names[z] : std::to_string(z);
      if (kind == GroupLoss::TruePositive)
        throw DataError("group \"" + name + "\" has no positive samples, required by the "
                        "true-positive criterion");
      throw DataError("group \"" + name + "\" has no samples");
    }
  }
}

std::vector<double> group_losses(GroupLoss kind, PointwiseLoss base,
                                 std::span<const double> y, std::span<const double> scores,
                                 std::span<const int> groups, std::size_t num_groups) {
  if (y.size() != scores.size() || y.size() != groups.size())
    throw DataError("group_losses length mismatch");
  auto denom = group_denominators(kind, y, groups, num_groups);
  std::vector<double> sums(num_groups, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto z = static_cast<std::size_t>(groups[i]);
    switch (kind) {
      case GroupLoss::Equalized:
        sums[z] += pointwise_loss_and_gradient(base, y[i], scores[i]).loss;
        break;
      case GroupLoss::TruePositive:
        if (y[i] == 1.0) sums[z] += pointwise_loss_and_gradient(base, y[i], scores[i]).loss;
        break;
      case GroupLoss::PositiveRate:
        sums[z] += pointwise_loss_and_gradient(base, 1.0, scores[i]).loss;
        break;
    }
  }
  std::vector<double> out(num_groups, 0.0);
  for (std::size_t z = 0; z < num_groups; ++z) {
    if (denom[z] == 0.0)
      throw DataError("group " + std::to_string(z) + " has an empty denominator for loss \"" +
                      group_loss_name(kind) + "\"");
    out[z] = sums[z] / denom[z];
  }
  return out;
}

std::vector<double> lagrangian_gradient(PointwiseLoss base, GroupLoss kind,
                                        std::span<const double> y,
                                        std::span<const double> scores,
                                        std::span<const int> groups, std::size_t num_groups,
                                        std::span<const double> mu, double lambda) {
  const std::size_t n = y.size();
  if (scores.size() != n || groups.size() != n)
    throw DataError("lagrangian_gradient length mismatch");
  if (mu.size() != num_groups) throw DataError("multiplier vector length mismatch");
  double mu_sum = 0.0;
  for (double m : mu) {
    if (m < 0.0) throw DataError("negative multiplier");
    mu_sum += m;
  }
  if (std::abs(mu_sum - lambda) > 1e-9)
    throw DataError("multipliers do not sum to lambda");

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> grad(n);
  if (lambda == 0.0) {
    // plain boosting: the fairness term vanishes identically
    for (std::size_t i = 0; i < n; ++i)
      grad[i] = inv_n * pointwise_loss_and_gradient(base, y[i], scores[i]).grad;
    return grad;
  }

  auto denom = group_denominators(kind, y, groups, num_groups);
  for (std::size_t i = 0; i < n; ++i) {
    auto z = static_cast<std::size_t>(groups[i]);
    double g = pointwise_loss_and_gradient(base, y[i], scores[i]).grad;
    double fair_g = 0.0;
    switch (kind) {
      case GroupLoss::Equalized:
        fair_g = g;
        break;
      case GroupLoss::TruePositive:
        fair_g = y[i] == 1.0 ? g : 0.0;
        break;
      case GroupLoss::PositiveRate:
        fair_g = pointwise_loss_and_gradient(base, 1.0, scores[i]).grad;
        break;
    }
    grad[i] = (1.0 - lambda) * inv_n * g + mu[z] / denom[z] * fair_g;
  }
  return grad;
}

}  // namespace m2fgb
