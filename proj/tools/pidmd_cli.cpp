// Command-line driver: generate, train, predict, evaluate, compare (and run,
// which chains them). Errors and warnings go to stderr as one JSON object per
// line.

#include "pidmd/pipeline.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <optional>
#include <sstream>

using namespace pidmd;
using json = nlohmann::json;

namespace {

constexpr int kExitWarnings = 2;

void emit(const json& record) { std::cerr << record.dump() << std::endl; }

void emit_error(ErrorKind kind, const std::string& message) {
  emit({{"error", std::string(to_string(kind))}, {"message", message}});
}

bool is_baseline(Method m) { return m == Method::Stacked || m == Method::RKOI; }

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string method;
  bool strict_warnings = false;

  // predict
  std::string model;
  std::string theta;
  std::string initial;
  Index column = 0;
  Index steps = 0;
  std::string truth;
};

RunConfig config_from(const Options& o) {
  RunConfig c = load_config(o.config);
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.seed) c.seed = *o.seed;
  return c;
}

std::vector<Method> methods_from(const Options& o, const RunConfig& c) {
  if (o.method.empty()) return c.methods;
  return {method_from_id(o.method)};
}

RealVector parse_theta(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      require(used == item.size(), "");
    } catch (...) {
      fail(ErrorKind::InvalidInput, "--theta: cannot parse '" + text + "'");
    }
  }
  require(!values.empty(), "--theta: no values");
  return Eigen::Map<RealVector>(values.data(), static_cast<Index>(values.size()));
}

int cmd_generate(const Options& o) {
  const RunConfig c = config_from(o);
  const auto result = run_generate(c);
  std::cout << "wrote " << result.files.size() << " snapshot files and " << result.manifest.string()
            << "\n";
  return 0;
}

int cmd_train(const Options& o) {
  const RunConfig c = config_from(o);
  bool warned = false;
  for (Method m : methods_from(o, c)) {
    const auto result = run_train(c, m);
    for (const auto& w : result.warnings) {
      emit({{"warning", w}, {"method", std::string(method_id(m))}});
      warned = true;
    }
    std::cout << method_id(m) << ": wrote " << result.models.size() << " model file(s)";
    if (result.training_residual) std::cout << ", training residual " << *result.training_residual;
    std::cout << "\n";
  }
  return warned && o.strict_warnings ? kExitWarnings : 0;
}

int cmd_evaluate(const Options& o) {
  const RunConfig c = config_from(o);
  bool primary_failed = false;
  bool baseline_diverged = false;
  for (Method m : methods_from(o, c)) {
    const auto result = run_evaluate(c, m);
    for (const auto& inc : result.incidents) {
      emit({{"error", std::string(to_string(inc.kind))},
            {"method", inc.method},
            {"label", inc.label},
            {"message", inc.message}});
      (is_baseline(m) ? baseline_diverged : primary_failed) = true;
    }
    const auto table = compare_methods({result.report});
    std::cout << method_id(m) << ": median time-averaged error " << table.rows[0].median << ", "
              << table.rows[0].diverged << "/" << table.rows[0].count << " diverged\n";
  }
  // Numerical failure of a primary method outranks baseline divergence.
  if (primary_failed) return exit_code(ErrorKind::NumericalFailure);
  return baseline_diverged ? exit_code(ErrorKind::DivergenceDetected) : 0;
}

int cmd_compare(const Options& o) {
  const RunConfig c = config_from(o);
  const auto result = run_compare(c);
  for (const auto& row : result.table.rows) {
    std::cout << row.method << ": median " << row.median << " [" << row.q1 << ", " << row.q3 << "], diverged "
              << row.diverged << "/" << row.count << "\n";
  }
  return 0;
}

int cmd_run(const Options& o) {
  const RunConfig c = config_from(o);
  if (c.generator) cmd_generate(o);
  const int train_code = cmd_train(o);
  if (train_code != 0) return train_code;
  const int eval_code = cmd_evaluate(o);
  if (o.method.empty()) cmd_compare(o);
  return eval_code;
}

int cmd_predict(const Options& o) {
  const ModelFile file = read_model_file(o.model);
  const SnapshotSet init = read_snapshot_file(o.initial);
  require(o.column >= 0 && o.column < init.states.cols(), "--column out of range");
  const RealVector x0 = init.states.col(o.column);
  RealVector theta = o.theta.empty() ? init.theta : parse_theta(o.theta);

  Prediction pred;
  try {
    pred = predict_any(file.model, theta, x0, o.steps);
  } catch (const Error& e) {
    emit({{"error", std::string(to_string(e.kind()))}, {"message", e.what()}});
    return exit_code(e.kind());
  }
  int code = 0;
  if (pred.divergence) {
    emit({{"error", std::string(to_string(ErrorKind::DivergenceDetected))}, {"message", *pred.divergence}});
    code = exit_code(ErrorKind::DivergenceDetected);
  }
  if (pred.extrapolated) emit({{"warning", "test parameter lies outside the training range"}});
  if (pred.states.size() == 0) return code;
  if (!pred.states.allFinite()) {
    emit({{"error", std::string(to_string(ErrorKind::DivergenceDetected))},
          {"message", "prediction overflowed; no trajectory written"}});
    return exit_code(ErrorKind::DivergenceDetected);
  }

  const double dt = std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StackedDMDModel>) {
          return m.dt();
        } else {
          return m.dt;
        }
      },
      file.model);
  write_snapshot_file(o.out, {pred.states, dt, theta, "prediction:" + init.label});
  std::cout << "wrote " << o.out << "\n";

  if (!o.truth.empty()) {
    const SnapshotSet truth = read_snapshot_file(o.truth);
    require(truth.state_dim() == pred.states.rows() && truth.states.cols() >= o.column + o.steps + 1,
            "--truth does not cover the predicted horizon");
    const auto series = error_series(truth.states.middleCols(o.column, o.steps + 1), pred.states);
    std::string csv = "config_hash,step,delta\n";
    for (std::size_t k = 0; k < series.delta.size(); ++k) {
      std::ostringstream line;
      line.precision(17);
      line << file.config_hash << ',' << k << ',' << series.delta[k] << '\n';
      csv += line.str();
    }
    write_file_atomic(o.out + ".delta.csv", csv);
    std::cout << "time-averaged residual error " << series.average << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-interpolated DMD and baselines"};
  app.require_subcommand(1);
  Options o;

  auto config_cmd = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "override the output directory");
    sub->add_option("--seed", o.seed, "override the config seed");
    return sub;
  };
  auto* gen = config_cmd("generate", "write snapshot files and a manifest for the configured parameters");
  auto* train = config_cmd("train", "fit models from the training snapshot files");
  train->add_option("--method", o.method, "only this method");
  train->add_flag("--strict-warnings", o.strict_warnings, "exit nonzero when training emits warnings");
  auto* eval = config_cmd("evaluate", "predict every test parameter and write reports");
  eval->add_option("--method", o.method, "only this method");
  auto* cmp = config_cmd("compare", "tabulate and plot the evaluation reports");
  auto* run = config_cmd("run", "generate (if configured), train, evaluate and compare");
  run->add_flag("--strict-warnings", o.strict_warnings, "stop when training emits warnings");

  auto* predict = app.add_subcommand("predict", "predict one trajectory from a model file");
  predict->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--initial", o.initial, "snapshot file holding the initial condition")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--column", o.column, "column of --initial to start from");
  predict->add_option("--theta", o.theta, "comma-separated parameter (default: that of --initial)");
  predict->add_option("--steps", o.steps, "prediction steps")->required()->check(CLI::NonNegativeNumber);
  predict->add_option("--out", o.out, "output snapshot file")->required();
  predict->add_option("--truth", o.truth, "snapshot file to score against")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::InvalidInput);
  }

  try {
    if (gen->parsed()) return cmd_generate(o);
    if (train->parsed()) return cmd_train(o);
    if (eval->parsed()) return cmd_evaluate(o);
    if (cmp->parsed()) return cmd_compare(o);
    if (run->parsed()) return cmd_run(o);
    if (predict->parsed()) return cmd_predict(o);
  } catch (const Error& e) {
    emit_error(e.kind(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    emit_error(ErrorKind::InvalidInput, e.what());
    return exit_code(ErrorKind::InvalidInput);
  }
  return 0;
}
