#pragma once

#include <span>
#include <string>
#include <vector>

namespace m2fgb {

enum class MetricName { Accuracy, TruePositiveRate, PositiveRate, MeanSquaredError };

std::string metric_name_string(MetricName name);
MetricName parse_metric_name(const std::string& name);

// false for MSE, where the worst group attains the maximum
bool metric_higher_is_better(MetricName name);

struct GroupMetricReport {
  MetricName name = MetricName::Accuracy;
  std::vector<double> per_group;
  double worst_group_value = 0.0;
  int worst_group_index = 0;
  double disparity = 0.0;  // max - min over groups

  std::string to_json() const;
};

/// Per-group metric over each group's rows. Worst group is the argmin
/// for benefit metrics and the argmax for MSE; ties go to the lowest
/// group index. Accuracy/TPR/PositiveRate expect 0/1 predictions.
GroupMetricReport group_metric(MetricName name, std::span<const double> y,
                               std::span<const double> predictions,
                               std::span<const int> groups, std::size_t num_groups);

double overall_metric(MetricName name, std::span<const double> y,
                      std::span<const double> predictions);

/// alpha * fairness + (1 - alpha) * performance
double alpha_score(double performance, double fairness, double alpha);

}  // namespace m2fgb
