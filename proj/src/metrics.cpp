#include "pidmd/metrics.hpp"

#include "pidmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pidmd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double residual_error(const RealVector& truth, const RealVector& pred) {
  require(truth.size() == pred.size(), "residual_error: length mismatch");
  const double norm = truth.norm();
  if (!(norm > 0.0)) fail(ErrorKind::DegenerateInput, "residual_error: truth has zero norm");
  return (truth - pred).norm() / norm;
}

ErrorSeries error_series(const RealMatrix& truth, const RealMatrix& pred) {
  require(truth.rows() == pred.rows() && truth.cols() == pred.cols(),
          "error_series: trajectories differ in shape");
  ErrorSeries out;
  out.delta.reserve(static_cast<std::size_t>(truth.cols()));
  double sum = 0.0;
  for (Index k = 0; k < truth.cols(); ++k) {
    if (truth.col(k).norm() < kZeroTruthNorm) {
      out.delta.push_back(kNaN);
      ++out.excluded;
      continue;
    }
    const double d = residual_error(truth.col(k), pred.col(k));
    out.delta.push_back(d);
    sum += d;
  }
  const Index used = truth.cols() - out.excluded;
  if (used == 0) fail(ErrorKind::DegenerateInput, "error_series: every truth column is zero");
  out.average = sum / static_cast<double>(used);
  return out;
}

double time_averaged_error(const RealMatrix& truth, const RealMatrix& pred) {
  return error_series(truth, pred).average;
}

ThetaReport score_prediction(const std::string& label, const RealVector& theta,
                             const RealMatrix& truth, const RealMatrix& pred,
                             const std::optional<std::string>& reported_divergence,
                             bool extrapolated) {
  ThetaReport out;
  out.label = label;
  out.theta = theta;
  out.extrapolated = extrapolated;
  if (reported_divergence) {
    out.diverged = true;
    out.divergence_reason = *reported_divergence;
  }
  if (pred.size() == 0) {
    out.diverged = true;
    if (out.divergence_reason.empty()) out.divergence_reason = "no prediction";
    out.average = std::numeric_limits<double>::infinity();
    return out;
  }
  const ErrorSeries series = error_series(truth, pred);
  out.delta = series.delta;
  out.average = series.average;
  out.excluded = series.excluded;
  for (double d : out.delta) {
    if (std::isnan(d)) continue;
    if (!std::isfinite(d) || d > kDivergenceThreshold) {
      if (!out.diverged) out.divergence_reason = "residual error exceeds 1e3";
      out.diverged = true;
      break;
    }
  }
  if (!std::isfinite(out.average)) {
    out.diverged = true;
    if (out.divergence_reason.empty()) out.divergence_reason = "non-finite residual error";
  }
  return out;
}

Index EvalReport::diverged_count() const {
  return static_cast<Index>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.diverged; }));
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ComparisonTable compare_methods(const std::vector<EvalReport>& reports) {
  require(!reports.empty(), "compare_methods: no reports");
  ComparisonTable table;
  for (const auto& e : reports.front().entries) table.thetas.push_back(e.theta);

  for (const auto& report : reports) {
    require(report.entries.size() == table.thetas.size(),
            "compare_methods: method '" + report.method + "' covers a different test set");
    for (std::size_t j = 0; j < report.entries.size(); ++j) {
      const auto& theta = report.entries[j].theta;
      require(theta.size() == table.thetas[j].size() && theta == table.thetas[j],
              "compare_methods: method '" + report.method + "' covers a different test set");
    }

    MethodSummary row;
    row.method = report.method;
    row.count = static_cast<Index>(report.entries.size());
    std::vector<double> values;
    for (const auto& e : report.entries) {
      if (e.diverged) {
        ++row.diverged;
      } else {
        values.push_back(e.average);
      }
    }
    std::sort(values.begin(), values.end());
    row.min = values.empty() ? kNaN : values.front();
    row.q1 = quantile(values, 0.25);
    row.median = quantile(values, 0.5);
    row.q3 = quantile(values, 0.75);
    row.max = values.empty() ? kNaN : values.back();
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace pidmd
