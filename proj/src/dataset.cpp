#include "m2fgb/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "m2fgb/error.hpp"

namespace m2fgb {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double_cell(const std::string& cell, std::size_t row, const std::string& column) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError("unparseable numeric cell \"" + cell + "\" at row " +
                    std::to_string(row) + ", column \"" + column + "\"");
  }
  return value;
}

// shortest round-trip representation
std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string task_name(Task task) {
  return task == Task::BinaryClassification ? "classification" : "regression";
}

Task parse_task(const std::string& name) {
  if (name == "classification") return Task::BinaryClassification;
  if (name == "regression") return Task::Regression;
  throw ConfigError("unknown task \"" + name + "\" (expected classification or regression)");
}

std::string column_role_name(ColumnRole role) {
  switch (role) {
    case ColumnRole::Numeric: return "numeric";
    case ColumnRole::Categorical: return "categorical";
    case ColumnRole::Label: return "label";
    case ColumnRole::Group: return "group";
  }
  return "?";
}

ColumnRole parse_column_role(const std::string& name) {
  if (name == "numeric") return ColumnRole::Numeric;
  if (name == "categorical") return ColumnRole::Categorical;
  if (name == "label") return ColumnRole::Label;
  if (name == "group") return ColumnRole::Group;
  throw ConfigError("unknown column role \"" + name + "\"");
}

ColumnSchema ColumnSchema::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file " + path.string());
  ColumnSchema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("schema " + path.string() + ":" + std::to_string(line_no) +
                        ": expected `column = role`");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "task") {
      schema.task = parse_task(value);
    } else {
      schema.columns.emplace_back(key, parse_column_role(value));
    }
  }
  schema.validate();
  return schema;
}

void ColumnSchema::validate() const {
  int labels = 0, groups = 0;
  for (const auto& [name, role] : columns) {
    if (role == ColumnRole::Label) ++labels;
    if (role == ColumnRole::Group) ++groups;
  }
  if (labels != 1) throw ConfigError("schema must declare exactly one label column");
  if (groups < 1) throw ConfigError("schema must declare at least one group column");
}

std::vector<std::string> ColumnSchema::group_columns() const {
  std::vector<std::string> out;
  for (const auto& [name, role] : columns)
    if (role == ColumnRole::Group) out.push_back(name);
  return out;
}

std::string ColumnSchema::label_column() const {
  for (const auto& [name, role] : columns)
    if (role == ColumnRole::Label) return name;
  throw ConfigError("schema has no label column");
}

std::vector<std::size_t> Dataset::group_counts() const {
  std::vector<std::size_t> counts(num_groups(), 0);
  for (int g : groups) counts[static_cast<std::size_t>(g)]++;
  return counts;
}

void Dataset::validate() const {
  if (labels.size() != features.rows() || groups.size() != labels.size())
    throw DataError("dataset row counts disagree");
  if (group_names.empty()) throw DataError("dataset has no groups");
  auto counts = group_counts();
  for (std::size_t z = 0; z < counts.size(); ++z) {
    if (counts[z] == 0)
      throw DataError("group \"" + group_names[z] + "\" has no samples");
  }
  for (int g : groups) {
    if (g < 0 || static_cast<std::size_t>(g) >= num_groups())
      throw DataError("group index out of range");
  }
  if (task == Task::BinaryClassification) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != 0.0 && labels[i] != 1.0)
        throw DataError("label " + format_double(labels[i]) + " at row " +
                        std::to_string(i) + " is not in {0,1}");
    }
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
}

RawDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file " + path.string());
  std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) throw DataError("empty header in " + path.string());

  // map schema columns onto file columns
  std::unordered_map<std::string, std::size_t> file_index;
  for (std::size_t i = 0; i < header.size(); ++i) file_index[header[i]] = i;
  for (std::size_t i = 0; i < header.size(); ++i) {
    bool known = false;
    for (const auto& [name, role] : schema.columns) known = known || name == header[i];
    if (!known)
      throw DataError("column \"" + header[i] + "\" in " + path.string() +
                      " is not declared in the schema");
  }
  for (const auto& [name, role] : schema.columns) {
    if (!file_index.count(name))
      throw DataError("missing column \"" + name + "\" in " + path.string());
  }

  RawDataset raw;
  raw.task = schema.task;
  std::vector<std::size_t> group_cols;
  std::size_t label_col = 0;
  struct Bind {
    std::size_t file_col;
    std::size_t raw_col;
  };
  std::vector<Bind> feature_binds;
  for (const auto& [name, role] : schema.columns) {
    std::size_t fc = file_index[name];
    switch (role) {
      case ColumnRole::Label:
        label_col = fc;
        break;
      case ColumnRole::Group:
        group_cols.push_back(fc);
        break;
      case ColumnRole::Numeric:
      case ColumnRole::Categorical:
        feature_binds.push_back({fc, raw.columns.size()});
        raw.columns.push_back({name, role, {}, {}});
        break;
    }
  }

  // group indices by first appearance of the group-column value combination
  std::unordered_map<std::string, int> group_index;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(header.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty())
        throw DataError("missing value at row " + std::to_string(row) + ", column \"" +
                        header[c] + "\"");
    }
    double label = parse_double_cell(cells[label_col], row, header[label_col]);
    if (schema.task == Task::BinaryClassification && label != 0.0 && label != 1.0)
      throw DataError("label \"" + cells[label_col] + "\" at row " + std::to_string(row) +
                      " is not a binary 0/1 value");
    raw.labels.push_back(label);

    std::string key;
    for (std::size_t gc : group_cols) {
      if (!key.empty()) key += "|";
      key += cells[gc];
    }
    auto it = group_index.find(key);
    if (it == group_index.end()) {
      int idx = static_cast<int>(raw.group_names.size());
      group_index.emplace(key, idx);
      raw.group_names.push_back(key);
      raw.groups.push_back(idx);
    } else {
      raw.groups.push_back(it->second);
    }

    for (const Bind& b : feature_binds) {
      RawColumn& col = raw.columns[b.raw_col];
      if (col.role == ColumnRole::Numeric) {
        double v = parse_double_cell(cells[b.file_col], row, col.name);
        if (!std::isfinite(v))
          throw DataError("non-finite value at row " + std::to_string(row) + ", column \"" +
                          col.name + "\"");
        col.numeric.push_back(v);
      } else {
        col.text.push_back(cells[b.file_col]);
      }
    }
  }
  if (raw.labels.empty()) throw DataError("no data rows in " + path.string());
  return raw;
}

Preprocessor Preprocessor::fit(const RawDataset& raw) {
  Preprocessor p;
  const std::size_t n = raw.n();
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    const RawColumn& col = raw.columns[c];
    p.column_order_.push_back(c);
    if (col.role == ColumnRole::Numeric) {
      double mean = std::accumulate(col.numeric.begin(), col.numeric.end(), 0.0) /
                    static_cast<double>(n);
      double var = 0.0;
      for (double v : col.numeric) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);  // population convention
      NumericStat stat{col.name, mean, std::sqrt(var), false};
      if (stat.std_dev == 0.0) {
        stat.dropped = true;
        p.warnings_.push_back("numeric column \"" + col.name +
                              "\" has zero variance and was dropped");
      } else {
        p.feature_names_.push_back(col.name);
      }
      p.numeric_.push_back(stat);
      p.categorical_.push_back({});
    } else {
      CategoricalStat stat{col.name, {}};
      std::unordered_map<std::string, bool> seen;
      for (const std::string& v : col.text) {
        if (!seen.count(v)) {
          seen.emplace(v, true);
          stat.categories.push_back(v);
        }
      }
      for (const std::string& cat : stat.categories)
        p.feature_names_.push_back(col.name + "=" + cat);
      p.numeric_.push_back({});
      p.categorical_.push_back(stat);
    }
  }
  return p;
}

Dataset Preprocessor::transform(const RawDataset& raw) const {
  const std::size_t n = raw.n();
  if (raw.columns.size() != column_order_.size())
    throw DataError("preprocessor was fitted on a different column layout");
  Dataset ds;
  ds.task = raw.task;
  ds.labels = raw.labels;
  ds.groups = raw.groups;
  ds.group_names = raw.group_names;
  ds.feature_names = feature_names_;
  ds.features = Matrix(n, feature_names_.size());

  std::size_t out = 0;
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    const RawColumn& col = raw.columns[c];
    if (col.role == ColumnRole::Numeric) {
      const NumericStat& stat = numeric_[c];
      if (stat.column != col.name)
        throw DataError("column \"" + col.name + "\" does not match fitted layout");
      if (stat.dropped) continue;
      for (std::size_t i = 0; i < n; ++i)
        ds.features(i, out) = (col.numeric[i] - stat.mean) / stat.std_dev;
      ++out;
    } else {
      const CategoricalStat& stat = categorical_[c];
      if (stat.column != col.name)
        throw DataError("column \"" + col.name + "\" does not match fitted layout");
      std::unordered_map<std::string, std::size_t> index;
      for (std::size_t k = 0; k < stat.categories.size(); ++k)
        index[stat.categories[k]] = k;
      for (std::size_t i = 0; i < n; ++i) {
        auto it = index.find(col.text[i]);
        // categories unseen at fit time get the all-zeros encoding
        if (it != index.end()) ds.features(i, out + it->second) = 1.0;
      }
      out += stat.categories.size();
    }
  }
  ds.validate();
  return ds;
}

Dataset preprocess(const RawDataset& raw) {
  return Preprocessor::fit(raw).transform(raw);
}

std::string Preprocessor::serialize() const {
  std::ostringstream out;
  out << "m2fgb-preprocessor v1\n";
  out << "columns " << column_order_.size() << "\n";
  for (std::size_t c = 0; c < column_order_.size(); ++c) {
    if (!numeric_[c].column.empty()) {
      const NumericStat& s = numeric_[c];
      out << "numeric " << s.column << " " << format_double(s.mean) << " "
          << format_double(s.std_dev) << " " << (s.dropped ? 1 : 0) << "\n";
    } else {
      const CategoricalStat& s = categorical_[c];
      out << "categorical " << s.column << " " << s.categories.size() << "\n";
      for (const std::string& cat : s.categories) out << "cat " << cat << "\n";
    }
  }
  out << "end\n";
  return out.str();
}

Preprocessor Preprocessor::deserialize(std::istream& in) {
  Preprocessor p;
  std::string line;
  auto next = [&]() -> std::string {
    if (!std::getline(in, line)) throw DataError("truncated preprocessor file");
    return line;
  };
  if (next() != "m2fgb-preprocessor v1") throw DataError("bad preprocessor file header");
  std::istringstream head(next());
  std::string tag;
  std::size_t count = 0;
  head >> tag >> count;
  if (tag != "columns") throw DataError("bad preprocessor column count");
  for (std::size_t c = 0; c < count; ++c) {
    std::istringstream row(next());
    std::string kind, name;
    row >> kind >> name;
    p.column_order_.push_back(c);
    if (kind == "numeric") {
      NumericStat s;
      s.column = name;
      int dropped = 0;
      row >> s.mean >> s.std_dev >> dropped;
      s.dropped = dropped != 0;
      if (!s.dropped) p.feature_names_.push_back(name);
      p.numeric_.push_back(s);
      p.categorical_.push_back({});
    } else if (kind == "categorical") {
      CategoricalStat s;
      s.column = name;
      std::size_t ncat = 0;
      row >> ncat;
      for (std::size_t k = 0; k < ncat; ++k) {
        std::string cat_line = next();
        if (cat_line.rfind("cat ", 0) != 0) throw DataError("bad category line");
        s.categories.push_back(cat_line.substr(4));
        p.feature_names_.push_back(name + "=" + s.categories.back());
      }
      p.numeric_.push_back({});
      p.categorical_.push_back(s);
    } else {
      throw DataError("unknown column kind \"" + kind + "\" in preprocessor file");
    }
  }
  if (next() != "end") throw DataError("missing end marker in preprocessor file");
  return p;
}

void Preprocessor::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write preprocessor file " + path.string());
  out << serialize();
}

Preprocessor Preprocessor::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open preprocessor file " + path.string());
  return deserialize(in);
}

void SplitSpec::validate() const {
  if (train <= 0.0 || valid <= 0.0 || test <= 0.0)
    throw ConfigError("split fractions must be positive");
  if (std::abs(train + valid + test - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
}

namespace {

// largest-remainder apportionment of m samples into three partitions;
// every partition receives at least one sample when m >= 3
std::array<std::size_t, 3> apportion(std::size_t m, const SplitSpec& spec) {
  const double fr[3] = {spec.train, spec.valid, spec.test};
  std::array<std::size_t, 3> counts{};
  double rem[3];
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    double ideal = fr[k] * static_cast<double>(m);
    counts[k] = static_cast<std::size_t>(std::floor(ideal));
    rem[k] = ideal - std::floor(ideal);
    assigned += counts[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < m; ++k) {
    counts[order[k % 3]]++;
    ++assigned;
  }
  for (int k = 0; k < 3; ++k) {
    if (counts[k] == 0) {
      auto big = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      counts[big]--;
      counts[k]++;
    }
  }
  return counts;
}

}  // namespace

SplitIndices stratified_split_indices(std::span<const int> groups,
                                      std::span<const double> labels, Task task,
                                      const SplitSpec& spec) {
  spec.validate();
  if (groups.size() != labels.size()) throw DataError("groups/labels length mismatch");
  // cells keyed by (group, label) for classification, (group) for regression
  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    int lab = task == Task::BinaryClassification ? static_cast<int>(labels[i]) : 0;
    cells[{groups[i], lab}].push_back(i);
  }
  std::mt19937_64 rng(spec.seed);
  SplitIndices out;
  for (auto& [key, members] : cells) {
    if (members.size() < 3)
      throw DataError("stratification cell (group " + std::to_string(key.first) + ", label " +
                      std::to_string(key.second) + ") has " + std::to_string(members.size()) +
                      " samples, fewer than the 3 partitions");
    std::shuffle(members.begin(), members.end(), rng);
    auto counts = apportion(members.size(), spec);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < counts[0]; ++k) out.train.push_back(members[pos++]);
    for (std::size_t k = 0; k < counts[1]; ++k) out.valid.push_back(members[pos++]);
    for (std::size_t k = 0; k < counts[2]; ++k) out.test.push_back(members[pos++]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.valid.begin(), out.valid.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.task = ds.task;
  out.group_names = ds.group_names;
  out.feature_names = ds.feature_names;
  out.features = Matrix(rows.size(), ds.d());
  out.labels.reserve(rows.size());
  out.groups.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t src = rows[r];
    for (std::size_t c = 0; c < ds.d(); ++c) out.features(r, c) = ds.features(src, c);
    out.labels.push_back(ds.labels[src]);
    out.groups.push_back(ds.groups[src]);
  }
  return out;
}

RawDataset subset(const RawDataset& raw, std::span<const std::size_t> rows) {
  RawDataset out;
  out.task = raw.task;
  out.group_names = raw.group_names;
  for (const RawColumn& col : raw.columns) {
    RawColumn c{col.name, col.role, {}, {}};
    for (std::size_t r : rows) {
      if (col.role == ColumnRole::Numeric)
        c.numeric.push_back(col.numeric[r]);
      else
        c.text.push_back(col.text[r]);
    }
    out.columns.push_back(std::move(c));
  }
  for (std::size_t r : rows) {
    out.labels.push_back(raw.labels[r]);
    out.groups.push_back(raw.groups[r]);
  }
  return out;
}

std::array<Dataset, 3> stratified_split(const Dataset& ds, const SplitSpec& spec) {
  SplitIndices idx = stratified_split_indices(ds.groups, ds.labels, ds.task, spec);
  return {subset(ds, idx.train), subset(ds, idx.valid), subset(ds, idx.test)};
}

Dataset generate_synthetic(std::size_t n, const std::vector<SyntheticGroupSpec>& groups,
                           std::size_t d, double noise, std::uint64_t seed) {
  if (groups.empty()) throw ConfigError("synthetic generator needs at least one group");
  if (d < 1) throw ConfigError("synthetic generator needs at least one feature");
  double total = 0.0;
  for (const auto& g : groups) {
    if (g.positive_rate <= 0.0 || g.positive_rate >= 1.0)
      throw ConfigError("positive_rate for group \"" + g.name + "\" must lie in (0,1)");
    total += g.fraction;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("group fractions must sum to 1");

  // group sizes by largest remainder
  std::vector<std::size_t> sizes(groups.size());
  std::vector<double> rem(groups.size());
  std::size_t assigned = 0;
  for (std::size_t z = 0; z < groups.size(); ++z) {
    double ideal = groups[z].fraction * static_cast<double>(n);
    sizes[z] = static_cast<std::size_t>(std::floor(ideal));
    rem[z] = ideal - std::floor(ideal);
    assigned += sizes[z];
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) sizes[order[k % groups.size()]]++;
  for (std::size_t z = 0; z < groups.size(); ++z) {
    if (sizes[z] == 0)
      throw ConfigError("fraction " + format_double(groups[z].fraction) + " for group \"" +
                        groups[z].name + "\" yields an empty group at n=" + std::to_string(n));
  }

  Dataset ds;
  ds.task = Task::BinaryClassification;
  ds.features = Matrix(n, d);
  ds.labels.resize(n);
  ds.groups.resize(n);
  for (const auto& g : groups) ds.group_names.push_back(g.name);
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t row = 0;
  for (std::size_t z = 0; z < groups.size(); ++z) {
    const SyntheticGroupSpec& g = groups[z];
    for (std::size_t k = 0; k < sizes[z]; ++k, ++row) {
      double y = unif(rng) < g.positive_rate ? 1.0 : 0.0;
      ds.labels[row] = y;
      ds.groups[row] = static_cast<int>(z);
      ds.features(row, 0) = g.signal_shift * (2.0 * y - 1.0) + noise * gauss(rng);
      if (d > 1) ds.features(row, 1) = 0.6 * static_cast<double>(z) + noise * gauss(rng);
      for (std::size_t j = 2; j < d; ++j) ds.features(row, j) = noise * gauss(rng);
    }
  }
  ds.validate();
  return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& csv_path,
               const std::filesystem::path& schema_path) {
  std::ofstream out(csv_path);
  if (!out) throw DataError("cannot write " + csv_path.string());
  for (const std::string& name : ds.feature_names) out << name << ",";
  out << "group,label\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) out << format_double(ds.features(i, j)) << ",";
    out << ds.group_names[static_cast<std::size_t>(ds.groups[i])] << ","
        << format_double(ds.labels[i]) << "\n";
  }
  if (!schema_path.empty()) {
    std::ofstream sch(schema_path);
    if (!sch) throw DataError("cannot write " + schema_path.string());
    sch << "task = " << task_name(ds.task) << "\n";
    for (const std::string& name : ds.feature_names) sch << name << " = numeric\n";
    sch << "group = group\n";
    sch << "label = label\n";
  }
}

}  // namespace m2fgb
