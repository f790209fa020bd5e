#include "m2fgb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "m2fgb/error.hpp"

namespace m2fgb {

std::string metric_name_string(MetricName name) {
  switch (name) {
    case MetricName::Accuracy: return "accuracy";
    case MetricName::TruePositiveRate: return "true_positive_rate";
    case MetricName::PositiveRate: return "positive_rate";
    case MetricName::MeanSquaredError: return "mse";
  }
  return "?";
}

MetricName parse_metric_name(const std::string& name) {
  if (name == "accuracy") return MetricName::Accuracy;
  if (name == "true_positive_rate" || name == "tpr") return MetricName::TruePositiveRate;
  if (name == "positive_rate") return MetricName::PositiveRate;
  if (name == "mse") return MetricName::MeanSquaredError;
  throw ConfigError("unknown metric \"" + name + "\"");
}

bool metric_higher_is_better(MetricName name) {
  return name != MetricName::MeanSquaredError;
}

namespace {

double metric_over(MetricName name, std::span<const double> y,
                   std::span<const double> predictions,
                   std::span<const std::size_t> rows) {
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t i : rows) {
    switch (name) {
      case MetricName::Accuracy:
        numerator += predictions[i] == y[i] ? 1.0 : 0.0;
        denominator += 1.0;
        break;
      case MetricName::TruePositiveRate:
        if (y[i] == 1.0) {
          numerator += predictions[i] == 1.0 ? 1.0 : 0.0;
          denominator += 1.0;
        }
        break;
      case MetricName::PositiveRate:
        numerator += predictions[i] == 1.0 ? 1.0 : 0.0;
        denominator += 1.0;
        break;
      case MetricName::MeanSquaredError:
        numerator += (predictions[i] - y[i]) * (predictions[i] - y[i]);
        denominator += 1.0;
        break;
    }
  }
  if (denominator == 0.0) throw DataError("metric denominator is empty");
  return numerator / denominator;
}

}  // namespace

GroupMetricReport group_metric(MetricName name, std::span<const double> y,
                               std::span<const double> predictions,
                               std::span<const int> groups, std::size_t num_groups) {
  if (y.size() != predictions.size() || y.size() != groups.size())
    throw DataError("group_metric length mismatch");
  if (y.empty()) throw DataError("group_metric on empty input");

  std::vector<std::vector<std::size_t>> members(num_groups);
  for (std::size_t i = 0; i < groups.size(); ++i)
    members[static_cast<std::size_t>(groups[i])].push_back(i);

  GroupMetricReport report;
  report.name = name;
  report.per_group.resize(num_groups);
  for (std::size_t z = 0; z < num_groups; ++z) {
    if (members[z].empty())
      throw DataError("group " + std::to_string(z) + " is empty in the evaluation data");
    if (name == MetricName::TruePositiveRate) {
      bool has_positive = false;
      for (std::size_t i : members[z]) has_positive = has_positive || y[i] == 1.0;
      if (!has_positive)
        throw DataError("group " + std::to_string(z) +
                        " has no positive samples for the true-positive rate");
    }
    report.per_group[z] = metric_over(name, y, predictions, members[z]);
  }

  const bool benefit = metric_higher_is_better(name);
  std::size_t worst = 0;
  for (std::size_t z = 1; z < num_groups; ++z) {
    bool better = benefit ? report.per_group[z] < report.per_group[worst]
                          : report.per_group[z] > report.per_group[worst];
    if (better) worst = z;
  }
  report.worst_group_index = static_cast<int>(worst);
  report.worst_group_value = report.per_group[worst];
  auto [lo, hi] = std::minmax_element(report.per_group.begin(), report.per_group.end());
  report.disparity = *hi - *lo;
  return report;
}

double overall_metric(MetricName name, std::span<const double> y,
                      std::span<const double> predictions) {
  if (y.size() != predictions.size()) throw DataError("overall_metric length mismatch");
  if (y.empty()) throw DataError("overall_metric on empty input");
  std::vector<std::size_t> rows(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) rows[i] = i;
  return metric_over(name, y, predictions, rows);
}

double alpha_score(double performance, double fairness, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in [0,1]");
  return alpha * fairness + (1.0 - alpha) * performance;
}

std::string GroupMetricReport::to_json() const {
  nlohmann::json j;
  j["metric"] = metric_name_string(name);
  j["per_group"] = per_group;
  j["worst_group_value"] = worst_group_value;
  j["worst_group_index"] = worst_group_index;
  j["disparity"] = disparity;
  return j.dump();
}

}  // namespace m2fgb
