#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "m2fgb/matrix.hpp"

namespace m2fgb {

enum class Task { BinaryClassification, Regression };

std::string task_name(Task task);
Task parse_task(const std::string& name);

enum class ColumnRole { Numeric, Categorical, Label, Group };

std::string column_role_name(ColumnRole role);
ColumnRole parse_column_role(const std::string& name);

/// Column roles for a CSV file, parsed from a line-oriented
/// `column = role` file. A special `task = classification|regression`
/// line selects the task (defaults to classification).
struct ColumnSchema {
  std::vector<std::pair<std::string, ColumnRole>> columns;
  Task task = Task::BinaryClassification;

  static ColumnSchema from_file(const std::filesystem::path& path);

  // exactly one Label role, at least one Group column
  void validate() const;
  std::vector<std::string> group_columns() const;
  std::string label_column() const;
};

/// Loaded but not yet preprocessed: categorical columns keep their
/// string values, numeric columns are parsed, groups are already
/// enumerated from the group-defining column combinations.
struct RawColumn {
  std::string name;
  ColumnRole role;                  // Numeric or Categorical
  std::vector<double> numeric;      // when Numeric
  std::vector<std::string> text;    // when Categorical
};

struct RawDataset {
  Task task = Task::BinaryClassification;
  std::vector<RawColumn> columns;
  std::vector<double> labels;
  std::vector<int> groups;
  std::vector<std::string> group_names;

  std::size_t n() const { return labels.size(); }
};

/// Model-ready dataset: dense numeric features, labels, group indices.
struct Dataset {
  Matrix features;
  std::vector<std::string> feature_names;
  std::vector<double> labels;
  std::vector<int> groups;
  std::vector<std::string> group_names;
  Task task = Task::BinaryClassification;

  std::size_t n() const { return labels.size(); }
  std::size_t d() const { return features.cols(); }
  std::size_t num_groups() const { return group_names.size(); }

  std::vector<std::size_t> group_counts() const;

  // every group index used, labels in {0,1} for classification,
  // features finite
  void validate() const;
};

RawDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema);

/// Fitted preprocessing statistics: per-numeric-column mean/std and
/// per-categorical-column category lists (first-appearance order).
/// Zero-variance numeric columns are dropped with a warning record.
class Preprocessor {
 public:
  static Preprocessor fit(const RawDataset& raw);

  Dataset transform(const RawDataset& raw) const;

  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  std::string serialize() const;
  static Preprocessor deserialize(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Preprocessor load(const std::filesystem::path& path);

 private:
  struct NumericStat {
    std::string column;
    double mean = 0.0;
    double std_dev = 1.0;
    bool dropped = false;
  };
  struct CategoricalStat {
    std::string column;
    std::vector<std::string> categories;
  };
  // parallel to the raw columns they were fitted on
  std::vector<std::size_t> column_order_;
  std::vector<NumericStat> numeric_;
  std::vector<CategoricalStat> categorical_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> warnings_;
};

/// fit + transform in one step (refit statistics on `raw` itself)
Dataset preprocess(const RawDataset& raw);

struct SplitSpec {
  double train = 0.6;
  double valid = 0.2;
  double test = 0.2;
  std::uint64_t seed = 0;

  void validate() const;  // fractions > 0, sum to 1 within 1e-9
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

/// Group-and-label stratified split: within every (group, label) cell
/// (per group only for regression) the three partitions preserve the
/// requested fractions within one sample. Deterministic given seed.
SplitIndices stratified_split_indices(std::span<const int> groups,
                                      std::span<const double> labels, Task task,
                                      const SplitSpec& spec);

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows);
RawDataset subset(const RawDataset& raw, std::span<const std::size_t> rows);

std::array<Dataset, 3> stratified_split(const Dataset& ds, const SplitSpec& spec);

struct SyntheticGroupSpec {
  std::string name;
  double fraction;
  double positive_rate;
  double signal_shift;
};

/// Seeded synthetic group-annotated dataset. Feature 0 carries the
/// label signal scaled by the group's signal_shift, feature 1 encodes
/// the group location, remaining features are noise.
Dataset generate_synthetic(std::size_t n, const std::vector<SyntheticGroupSpec>& groups,
                           std::size_t d, double noise, std::uint64_t seed);

/// Writes a dataset back out as CSV (features, group name, label) with
/// a matching schema file next to it when schema_path is nonempty.
void write_csv(const Dataset& ds, const std::filesystem::path& csv_path,
               const std::filesystem::path& schema_path);

}  // namespace m2fgb
