// Command-line front end: train, evaluate, sweep, lambda-sweep,
// converge, synth, project. Settings come from a line-oriented
// `key = value` config file; flags override file values.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "m2fgb/booster.hpp"
#include "m2fgb/dataset.hpp"
#include "m2fgb/error.hpp"
#include "m2fgb/harness.hpp"
#include "m2fgb/metrics.hpp"
#include "m2fgb/simplex.hpp"

namespace fs = std::filesystem;
using namespace m2fgb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitTrain = 3;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// `key = value` settings with a declared key set; unknown keys are errors
class RunConfig {
 public:
  void load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config " + path.string() + ":" + std::to_string(line_no) +
                          ": expected `key = value`");
      values_[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
    }
  }

  void override_value(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  void check_known(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_) {
      if (!known.count(key)) throw ConfigError("unknown config key \"" + key + "\"");
    }
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_required(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing required config key \"" + key + "\"");
    return *v;
  }

  double get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key \"" + key + "\" is not a number: " + *v);
    }
  }

  int get_int(const std::string& key, int fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stoi(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key \"" + key + "\" is not an integer: " + *v);
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stoull(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key \"" + key + "\" is not an integer: " + *v);
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true") return true;
    if (*v == "0" || *v == "false") return false;
    throw ConfigError("config key \"" + key + "\" is not a boolean: " + *v);
  }

 private:
  std::map<std::string, std::string> values_;
};

const std::set<std::string> kBoosterKeys = {
    "lambda",    "rounds",          "learning_rate", "dual_learning_rate",
    "pointwise", "group_kind",      "max_depth",     "min_samples_leaf",
    "l2_leaf_reg", "seed",          "fresh_multipliers"};

BoosterConfig booster_from_config(const RunConfig& cfg) {
  BoosterConfig out;
  out.lambda = cfg.get_double("lambda", out.lambda);
  out.rounds = cfg.get_int("rounds", out.rounds);
  out.learning_rate = cfg.get_double("learning_rate", out.learning_rate);
  out.dual_learning_rate = cfg.get_double("dual_learning_rate", out.dual_learning_rate);
  if (auto v = cfg.get("pointwise")) out.pointwise = parse_pointwise_loss(*v);
  if (auto v = cfg.get("group_kind")) out.group_kind = parse_group_loss(*v);
  out.tree.max_depth = cfg.get_int("max_depth", out.tree.max_depth);
  out.tree.min_samples_leaf = cfg.get_int("min_samples_leaf", out.tree.min_samples_leaf);
  out.tree.l2_leaf_reg = cfg.get_double("l2_leaf_reg", out.tree.l2_leaf_reg);
  out.seed = cfg.get_u64("seed", out.seed);
  out.fresh_multipliers = cfg.get_bool("fresh_multipliers", out.fresh_multipliers);
  out.validate();
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad value \"" + item + "\" in " + what);
    }
  }
  if (out.empty()) throw ConfigError("empty list for " + what);
  return out;
}

struct LoadedData {
  Preprocessor preprocessor;
  Dataset train;
  Dataset valid;
  Dataset test;
};

// load + stratified split + preprocess with statistics frozen on the
// training partition
LoadedData load_and_split(const fs::path& data_path, const fs::path& schema_path,
                          const SplitSpec& spec) {
  ColumnSchema schema = ColumnSchema::from_file(schema_path);
  RawDataset raw = load_csv(data_path, schema);
  SplitIndices idx = stratified_split_indices(raw.groups, raw.labels, raw.task, spec);
  RawDataset raw_train = subset(raw, idx.train);
  LoadedData out{Preprocessor::fit(raw_train), {}, {}, {}};
  out.train = out.preprocessor.transform(raw_train);
  out.valid = out.preprocessor.transform(subset(raw, idx.valid));
  out.test = out.preprocessor.transform(subset(raw, idx.test));
  return out;
}

void write_trace_csv(const fs::path& path, const TrainingTrace& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace file " + path.string());
  if (trace.empty()) {
    out << "round,overall_loss,epsilon,grad_h_inner,h_sq_norm\n";
    return;
  }
  std::size_t num_groups = trace.front().group_losses.size();
  out << "round,overall_loss,epsilon,grad_h_inner,h_sq_norm";
  for (std::size_t z = 0; z < num_groups; ++z) out << ",group_loss_" << z;
  for (std::size_t z = 0; z < num_groups; ++z) out << ",mu_" << z;
  out << "\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const RoundRecord& r = trace[t];
    out << t << "," << fmt(r.overall_loss) << "," << fmt(r.epsilon) << ","
        << fmt(r.grad_h_inner) << "," << fmt(r.h_sq_norm);
    for (double v : r.group_losses) out << "," << fmt(v);
    for (double v : r.mu) out << "," << fmt(v);
    out << "\n";
  }
}

nlohmann::json report_json(const Dataset& ds, const Model& model, MetricName fairness_metric,
                           double threshold) {
  std::vector<double> predictions;
  if (model.task == Task::BinaryClassification) {
    std::vector<int> labels = model.predict_labels(ds.features, threshold);
    predictions.assign(labels.begin(), labels.end());
  } else {
    predictions = model.predict_scores(ds.features);
  }
  MetricName performance_metric = model.task == Task::BinaryClassification
                                      ? MetricName::Accuracy
                                      : MetricName::MeanSquaredError;
  GroupMetricReport report =
      group_metric(fairness_metric, ds.labels, predictions, ds.groups, ds.num_groups());
  nlohmann::json j = nlohmann::json::parse(report.to_json());
  j["performance_metric"] = metric_name_string(performance_metric);
  j["performance"] = overall_metric(performance_metric, ds.labels, predictions);
  j["group_names"] = ds.group_names;
  return j;
}

void print_report(const nlohmann::json& j, bool as_json) {
  if (as_json) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "metric: " << j["metric"].get<std::string>() << "\n";
  auto names = j["group_names"].get<std::vector<std::string>>();
  auto values = j["per_group"].get<std::vector<double>>();
  for (std::size_t z = 0; z < values.size(); ++z)
    std::cout << "  group " << names[z] << ": " << fmt(values[z]) << "\n";
  std::cout << "worst group: " << names[j["worst_group_index"].get<std::size_t>()] << " ("
            << fmt(j["worst_group_value"].get<double>()) << ")\n";
  std::cout << "disparity: " << fmt(j["disparity"].get<double>()) << "\n";
  std::cout << j["performance_metric"].get<std::string>() << ": "
            << fmt(j["performance"].get<double>()) << "\n";
}

SplitSpec split_from_config(const RunConfig& cfg) {
  SplitSpec spec;
  spec.train = cfg.get_double("split_train", spec.train);
  spec.valid = cfg.get_double("split_valid", spec.valid);
  spec.test = cfg.get_double("split_test", spec.test);
  spec.seed = cfg.get_u64("split_seed", spec.seed);
  spec.validate();
  return spec;
}

const std::set<std::string> kDataKeys = {"data", "schema", "out", "split_train",
                                         "split_valid", "split_test", "split_seed"};

std::set<std::string> merge_keys(std::initializer_list<std::set<std::string>> sets) {
  std::set<std::string> out;
  for (const auto& s : sets) out.insert(s.begin(), s.end());
  return out;
}

int cmd_train(const RunConfig& cfg, bool as_json) {
  cfg.check_known(merge_keys({kDataKeys, kBoosterKeys, {"fairness_metric", "threshold"}}));
  BoosterConfig booster = booster_from_config(cfg);
  fs::path out_dir = cfg.get("out").value_or("out");
  fs::create_directories(out_dir);

  LoadedData data;
  try {
    data = load_and_split(cfg.get_required("data"), cfg.get_required("schema"),
                          split_from_config(cfg));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(std::string("load: ") + e.what());
  }
  for (const std::string& w : data.preprocessor.warnings())
    std::cerr << "warning: " << w << "\n";

  Model model;
  TrainingTrace trace;
  try {
    std::tie(model, trace) = train(data.train, booster);
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw TrainError(std::string("train: ") + e.what());
  }

  model.save(out_dir / "model.txt");
  data.preprocessor.save(out_dir / "preprocessor.txt");
  write_trace_csv(out_dir / "trace.csv", trace);

  MetricName fairness_metric =
      parse_metric_name(cfg.get("fairness_metric")
                            .value_or(model.task == Task::BinaryClassification
                                          ? "true_positive_rate"
                                          : "mse"));
  double threshold = cfg.get_double("threshold", 0.5);
  nlohmann::json report;
  report["train"] = report_json(data.train, model, fairness_metric, threshold);
  report["validation"] = report_json(data.valid, model, fairness_metric, threshold);
  {
    std::ofstream metrics_out(out_dir / "metrics.json");
    metrics_out << report.dump(2) << "\n";
  }
  if (as_json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "model written to " << (out_dir / "model.txt").string() << "\n";
    std::cout << "train metrics:\n";
    print_report(report["train"], false);
    std::cout << "validation metrics:\n";
    print_report(report["validation"], false);
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& schema_path, const std::string& preprocessor_path,
                 const std::string& metric, double threshold, bool as_json) {
  Model model = Model::load(model_path);
  ColumnSchema schema = ColumnSchema::from_file(schema_path);
  RawDataset raw = load_csv(data_path, schema);
  Dataset ds;
  if (!preprocessor_path.empty()) {
    ds = Preprocessor::load(preprocessor_path).transform(raw);
  } else {
    fs::path beside = fs::path(model_path).parent_path() / "preprocessor.txt";
    ds = fs::exists(beside) ? Preprocessor::load(beside).transform(raw) : preprocess(raw);
  }
  if (ds.d() != model.num_features)
    throw DataError("feature dimension mismatch: model expects " +
                    std::to_string(model.num_features) + " features, data has " +
                    std::to_string(ds.d()));
  print_report(report_json(ds, model, parse_metric_name(metric), threshold), as_json);
  return kExitOk;
}

SearchSpace space_from_config(const RunConfig& cfg) {
  SearchSpace space;
  space.lambda = {cfg.get_double("lambda_lo", space.lambda.lo),
                  cfg.get_double("lambda_hi", space.lambda.hi), false};
  space.learning_rate = {cfg.get_double("learning_rate_lo", space.learning_rate.lo),
                         cfg.get_double("learning_rate_hi", space.learning_rate.hi), true};
  space.dual_learning_rate = {
      cfg.get_double("dual_learning_rate_lo", space.dual_learning_rate.lo),
      cfg.get_double("dual_learning_rate_hi", space.dual_learning_rate.hi), true};
  space.rounds = {cfg.get_int("rounds_lo", space.rounds.lo),
                  cfg.get_int("rounds_hi", space.rounds.hi)};
  space.max_depth = {cfg.get_int("max_depth_lo", space.max_depth.lo),
                     cfg.get_int("max_depth_hi", space.max_depth.hi)};
  space.min_samples_leaf = {cfg.get_int("min_samples_leaf_lo", space.min_samples_leaf.lo),
                            cfg.get_int("min_samples_leaf_hi", space.min_samples_leaf.hi)};
  space.l2_leaf_reg = {cfg.get_double("l2_leaf_reg_lo", space.l2_leaf_reg.lo),
                       cfg.get_double("l2_leaf_reg_hi", space.l2_leaf_reg.hi), false};
  if (auto v = cfg.get("pointwise")) space.pointwise = parse_pointwise_loss(*v);
  if (auto v = cfg.get("group_kind")) space.group_kind = parse_group_loss(*v);
  space.seed = cfg.get_u64("seed", space.seed);
  space.validate();
  return space;
}

const std::set<std::string> kSpaceKeys = {
    "lambda_lo",        "lambda_hi",        "learning_rate_lo", "learning_rate_hi",
    "dual_learning_rate_lo", "dual_learning_rate_hi", "rounds_lo", "rounds_hi",
    "max_depth_lo",     "max_depth_hi",     "min_samples_leaf_lo", "min_samples_leaf_hi",
    "l2_leaf_reg_lo",   "l2_leaf_reg_hi",   "pointwise",        "group_kind", "seed"};

int cmd_sweep(const RunConfig& cfg, bool as_json) {
  cfg.check_known(merge_keys({kDataKeys, kSpaceKeys,
                              {"pool_size", "alphas", "fairness_metric", "threshold"}}));
  LoadedData data = load_and_split(cfg.get_required("data"), cfg.get_required("schema"),
                                   split_from_config(cfg));
  SearchSpace space = space_from_config(cfg);
  int pool_size = cfg.get_int("pool_size", 20);
  std::vector<double> alphas =
      parse_double_list(cfg.get("alphas").value_or("0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"),
                        "alphas");
  MetricName performance_metric = data.train.task == Task::BinaryClassification
                                      ? MetricName::Accuracy
                                      : MetricName::MeanSquaredError;
  MetricName fairness_metric = parse_metric_name(
      cfg.get("fairness_metric").value_or("true_positive_rate"));
  double threshold = cfg.get_double("threshold", 0.5);

  std::vector<BoosterConfig> configs = random_search(space, pool_size);
  ModelPool pool = build_pool(data.train, data.valid, configs, performance_metric,
                              fairness_metric, threshold);
  std::vector<SweepRow> rows = run_sweep(pool, data.test, alphas, threshold);

  fs::path out_dir = cfg.get("out").value_or("out");
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "sweep.csv");
    out << "alpha,config_id,test_performance,test_fairness\n";
    for (const SweepRow& r : rows)
      out << fmt(r.alpha) << "," << r.config_id << "," << fmt(r.test_performance) << ","
          << fmt(r.test_fairness) << "\n";
  }
  nlohmann::json manifest;
  manifest["pool_size"] = pool_size;
  manifest["seed"] = space.seed;
  manifest["alphas"] = alphas;
  manifest["fairness_metric"] = metric_name_string(fairness_metric);
  manifest["rows"] = nlohmann::json::array();
  for (const SweepRow& r : rows)
    manifest["rows"].push_back({{"alpha", r.alpha},
                                {"config_id", r.config_id},
                                {"test_performance", r.test_performance},
                                {"test_fairness", r.test_fairness}});
  std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << "\n";
  if (as_json)
    std::cout << manifest.dump(2) << "\n";
  else
    std::cout << "sweep results written to " << (out_dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_lambda_sweep(const RunConfig& cfg, bool as_json) {
  cfg.check_known(merge_keys({kDataKeys, kBoosterKeys, {"lambdas"}}));
  LoadedData data = load_and_split(cfg.get_required("data"), cfg.get_required("schema"),
                                   split_from_config(cfg));
  BoosterConfig booster = booster_from_config(cfg);
  std::vector<double> lambdas = parse_double_list(
      cfg.get("lambdas").value_or("0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"), "lambdas");
  std::vector<LambdaRow> rows = lambda_monotonicity_experiment(data.train, lambdas, booster);

  fs::path out_dir = cfg.get("out").value_or("out");
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "lambda_sweep.csv");
  out << "lambda,train_loss,worst_group_loss,gap\n";
  nlohmann::json j = nlohmann::json::array();
  for (const LambdaRow& r : rows) {
    out << fmt(r.lambda) << "," << fmt(r.train_loss) << "," << fmt(r.worst_group_loss) << ","
        << fmt(r.gap) << "\n";
    j.push_back({{"lambda", r.lambda},
                 {"train_loss", r.train_loss},
                 {"worst_group_loss", r.worst_group_loss},
                 {"gap", r.gap}});
  }
  if (as_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << "lambda sweep written to " << (out_dir / "lambda_sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg, bool as_json) {
  cfg.check_known(merge_keys({kDataKeys, kBoosterKeys, {}}));
  LoadedData data = load_and_split(cfg.get_required("data"), cfg.get_required("schema"),
                                   split_from_config(cfg));
  BoosterConfig booster = booster_from_config(cfg);
  ConvergencePair pair = convergence_experiment(data.train, booster);

  fs::path out_dir = cfg.get("out").value_or("out");
  fs::create_directories(out_dir);
  write_trace_csv(out_dir / "trace_baseline.csv", pair.baseline);
  write_trace_csv(out_dir / "trace_fair.csv", pair.fair);
  nlohmann::json j;
  j["rounds"] = pair.fair.size();
  if (!pair.fair.empty()) {
    auto worst = [](const RoundRecord& r) {
      return *std::max_element(r.group_losses.begin(), r.group_losses.end());
    };
    j["final_worst_group_loss_baseline"] = worst(pair.baseline.back());
    j["final_worst_group_loss_fair"] = worst(pair.fair.back());
    j["final_overall_loss_baseline"] = pair.baseline.back().overall_loss;
    j["final_overall_loss_fair"] = pair.fair.back().overall_loss;
  }
  if (as_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << "paired traces written to " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg) {
  cfg.check_known({"n", "d", "noise", "seed", "groups", "out"});
  auto n = static_cast<std::size_t>(cfg.get_int("n", 1000));
  auto d = static_cast<std::size_t>(cfg.get_int("d", 5));
  double noise = cfg.get_double("noise", 1.0);
  std::uint64_t seed = cfg.get_u64("seed", 0);
  // groups: name:fraction:positive_rate:signal_shift;...
  std::string spec_text =
      cfg.get("groups").value_or("a:0.5:0.5:1.0;b:0.3:0.4:0.6;c:0.2:0.3:0.3");
  std::vector<SyntheticGroupSpec> groups;
  std::stringstream ss(spec_text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::stringstream fields(item);
    std::string name, fraction, positive_rate, shift;
    if (!std::getline(fields, name, ':') || !std::getline(fields, fraction, ':') ||
        !std::getline(fields, positive_rate, ':') || !std::getline(fields, shift, ':'))
      throw ConfigError("bad group spec \"" + item +
                        "\" (expected name:fraction:positive_rate:signal_shift)");
    groups.push_back({name, std::stod(fraction), std::stod(positive_rate), std::stod(shift)});
  }
  Dataset ds = generate_synthetic(n, groups, d, noise, seed);
  fs::path out_dir = cfg.get("out").value_or("out");
  fs::create_directories(out_dir);
  write_csv(ds, out_dir / "synth.csv", out_dir / "synth.schema");
  std::cout << "synthetic dataset written to " << (out_dir / "synth.csv").string() << "\n";
  return kExitOk;
}

int cmd_project(const std::vector<double>& values, double lambda, bool as_json) {
  std::vector<double> projected = project_scaled_simplex(values, lambda);
  if (as_json) {
    std::cout << nlohmann::json(projected).dump() << "\n";
  } else {
    for (std::size_t i = 0; i < projected.size(); ++i)
      std::cout << (i > 0 ? " " : "") << fmt(projected[i]);
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"min-max fair gradient boosting"};
  app.require_subcommand(1);

  std::string config_path, out_dir, model_path, data_path, schema_path, preprocessor_path;
  std::string metric = "true_positive_rate";
  double threshold = 0.5;
  double lambda = 1.0;
  std::vector<double> vector_values;
  bool as_json = false;
  std::optional<std::uint64_t> seed_override;

  app.add_flag("--json", as_json, "machine-readable output");

  auto add_config_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "path to a `key = value` config file");
    cmd->add_option("--seed", seed_override, "override the seed");
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "train a model (writes model, trace, metrics)");
  add_config_options(train_cmd);

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "evaluate a saved model on a dataset");
  eval_cmd->add_option("--model", model_path, "model file")->required();
  eval_cmd->add_option("--data", data_path, "dataset CSV")->required();
  eval_cmd->add_option("--schema", schema_path, "schema file")->required();
  eval_cmd->add_option("--preprocessor", preprocessor_path,
                       "preprocessor file (default: next to the model)");
  eval_cmd->add_option("--metric", metric, "fairness metric to report");
  eval_cmd->add_option("--threshold", threshold, "classification threshold");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "alpha-sweep over a random-search pool");
  add_config_options(sweep_cmd);

  CLI::App* lambda_cmd = app.add_subcommand("lambda-sweep", "gap vs lambda experiment");
  add_config_options(lambda_cmd);

  CLI::App* converge_cmd = app.add_subcommand("converge", "paired baseline/fair traces");
  add_config_options(converge_cmd);

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  add_config_options(synth_cmd);

  CLI::App* project_cmd = app.add_subcommand("project", "project a vector onto the scaled simplex");
  project_cmd->add_option("--lambda", lambda, "simplex scale");
  project_cmd->add_option("values", vector_values, "vector entries")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    if (seed_override) cfg.override_value("seed", std::to_string(*seed_override));
    if (!out_dir.empty()) cfg.override_value("out", out_dir);

    if (train_cmd->parsed()) return cmd_train(cfg, as_json);
    if (eval_cmd->parsed())
      return cmd_evaluate(model_path, data_path, schema_path, preprocessor_path, metric,
                          threshold, as_json);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, as_json);
    if (lambda_cmd->parsed()) return cmd_lambda_sweep(cfg, as_json);
    if (converge_cmd->parsed()) return cmd_converge(cfg, as_json);
    if (synth_cmd->parsed()) return cmd_synth(cfg);
    if (project_cmd->parsed()) return cmd_project(vector_values, lambda, as_json);
    std::cerr << "error: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitTrain;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
