#pragma once

#include "pidmd/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pidmd {

/// ||truth - pred||_2 / ||truth||_2. Throws DegenerateInput when ||truth|| = 0.
double residual_error(const RealVector& truth, const RealVector& pred);

/// Truth columns with norm below this are left out of time averages.
inline constexpr double kZeroTruthNorm = 1e-14;
/// A run whose residual error exceeds this at any time is flagged as diverged.
inline constexpr double kDivergenceThreshold = 1e3;

struct ErrorSeries {
  /// One entry per column; excluded columns hold NaN.
  std::vector<double> delta;
  /// Mean over the included columns (the t0 projection column included).
  double average = 0.0;
  Index excluded = 0;
};

ErrorSeries error_series(const RealMatrix& truth, const RealMatrix& pred);
double time_averaged_error(const RealMatrix& truth, const RealMatrix& pred);

struct ThetaReport {
  std::string label;
  RealVector theta;
  std::vector<double> delta;
  double average = 0.0;
  Index excluded = 0;
  bool diverged = false;
  std::string divergence_reason;
  bool extrapolated = false;
};

/// Scores one prediction. A baseline-reported divergence, a non-finite or
/// missing prediction, or any delta above kDivergenceThreshold flags it.
ThetaReport score_prediction(const std::string& label, const RealVector& theta,
                             const RealMatrix& truth, const RealMatrix& pred,
                             const std::optional<std::string>& reported_divergence = {},
                             bool extrapolated = false);

struct EvalReport {
  std::string method;
  std::string config_hash;
  std::vector<ThetaReport> entries;  // in test-parameter order

  Index diverged_count() const;
};

struct MethodSummary {
  std::string method;
  Index count = 0;
  Index diverged = 0;
  // Over the non-diverged time-averaged errors; NaN when none remain.
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct ComparisonTable {
  std::vector<RealVector> thetas;
  std::vector<MethodSummary> rows;
};

/// Linear-interpolation quantile (numpy's default) of an ascending sample.
double quantile(const std::vector<double>& sorted, double q);

/// Throws InvalidInput unless every report covers the same test parameters
/// in the same order.
ComparisonTable compare_methods(const std::vector<EvalReport>& reports);

}  // namespace pidmd
