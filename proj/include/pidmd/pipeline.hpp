#pragma once

// End-to-end protocol behind the CLI: generate data, train, evaluate on the
// test parameters, compare methods. Every step reads and writes files under
// the config's data and output directories.
//
// Layout:
//   <data>/<label>.pdmd, <data>/manifest.json
//   <out>/models/<method>.pdmdm (exact DMD: <out>/models/exact_dmd/<label>.pdmdm)
//   <out>/models/<method>.json                training log
//   <out>/reports/<method>.json, <method>_delta.csv
//   <out>/grids/<method>/<label>.csv          final-step absolute error
//   <out>/comparison.csv, summary.csv, boxplot.svg, error_vs_theta.svg

#include "pidmd/config.hpp"
#include "pidmd/errors.hpp"
#include "pidmd/io.hpp"
#include "pidmd/metrics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pidmd {

/// A per-parameter failure that did not abort the run.
struct Incident {
  std::string method;
  std::string label;
  ErrorKind kind = ErrorKind::NumericalFailure;
  std::string message;
};

/// Worker count for prediction jobs: PIDMD_WORKERS if set, else the hardware
/// concurrency.
std::size_t worker_count();

struct GenerateResult {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

GenerateResult run_generate(const RunConfig& config);

/// Loads the snapshot file for each theta and checks it against the config.
std::vector<SnapshotSet> load_trajectories(const RunConfig& config,
                                           const std::vector<RealVector>& thetas,
                                           Index min_transitions);

std::filesystem::path model_path(const RunConfig& config, Method method,
                                 const RealVector* test_theta = nullptr);

struct TrainResult {
  std::vector<std::filesystem::path> models;
  std::vector<std::string> warnings;
  std::optional<double> training_residual;
};

TrainResult run_train(const RunConfig& config, Method method);

struct Prediction {
  RealMatrix states;  // empty when no trajectory could be formed
  bool extrapolated = false;
  std::optional<std::string> divergence;
};

/// Dispatches to the method's predictor. Exact DMD ignores theta. Numerical
/// failures of DMD and piDMD propagate as exceptions; baseline divergence is
/// reported in the result.
Prediction predict_any(const AnyModel& model, const RealVector& theta, const RealVector& x0,
                       Index steps);

struct EvaluateResult {
  EvalReport report;
  std::vector<Incident> incidents;
};

EvaluateResult run_evaluate(const RunConfig& config, Method method);

/// Reads a report written by run_evaluate.
EvalReport read_report(const std::filesystem::path& path);

struct CompareResult {
  ComparisonTable table;
  std::vector<std::filesystem::path> files;
};

CompareResult run_compare(const RunConfig& config);

}  // namespace pidmd
