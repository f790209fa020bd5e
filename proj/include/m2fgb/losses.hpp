#pragma once

#include <span>
#include <string>
#include <vector>

#include "m2fgb/dataset.hpp"

namespace m2fgb {

enum class PointwiseLoss { Logistic, Squared };
enum class GroupLoss { Equalized, TruePositive, PositiveRate };

std::string pointwise_loss_name(PointwiseLoss kind);
PointwiseLoss parse_pointwise_loss(const std::string& name);
std::string group_loss_name(GroupLoss kind);
GroupLoss parse_group_loss(const std::string& name);

double sigmoid(double x);

struct LossGrad {
  double loss;
  double grad;
};

/// Logistic: loss = -y ln s - (1-y) ln(1-s) with s = sigmoid(score)
/// clipped to [1e-12, 1-1e-12], grad = s - y.
/// Squared: loss = (score-y)^2 / 2, grad = score - y.
LossGrad pointwise_loss_and_gradient(PointwiseLoss kind, double y, double score);

/// Mean pointwise loss over all samples.
double overall_loss(PointwiseLoss kind, std::span<const double> y,
                    std::span<const double> scores);

/// Per-group proxy losses for the active fairness criterion:
///  Equalized    - mean pointwise loss within the group
///  TruePositive - mean pointwise loss over the group's y=1 samples
///  PositiveRate - mean pointwise loss against target 1 within the group
std::vector<double> group_losses(GroupLoss kind, PointwiseLoss base,
                                 std::span<const double> y, std::span<const double> scores,
                                 std::span<const int> groups, std::size_t num_groups);

/// Rejects datasets the chosen criterion cannot handle (TruePositive
/// needs at least one positive sample in every group).
void validate_group_loss_inputs(GroupLoss kind, Task task, std::span<const double> y,
                                std::span<const int> groups, std::size_t num_groups,
                                const std::vector<std::string>& group_names);

/// Per-sample gradient of (1-lambda) L + sum_z mu_z Lbar_z with respect
/// to the scores. The caller negates to obtain tree-fitting targets.
std::vector<double> lagrangian_gradient(PointwiseLoss base, GroupLoss kind,
                                        std::span<const double> y,
                                        std::span<const double> scores,
                                        std::span<const int> groups, std::size_t num_groups,
                                        std::span<const double> mu, double lambda);

}  // namespace m2fgb
