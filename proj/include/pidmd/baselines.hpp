#pragma once

// Interpolation-based parametric DMD baselines.
//
// Stacked parametric DMD fits one DMD to the pooled multi-parameter data and
// interpolates per-parameter mode sets across theta; its eigenvalues are
// global. rKOI fits per-parameter reduced operators in a shared basis and
// interpolates the operators themselves. Both are reconstructions from the
// published descriptions; the interpolation scheme is recorded with each model.

#include "pidmd/dmd.hpp"
#include "pidmd/interpolation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pidmd {

struct Divergence {
  std::string reason;
  double spectral_radius = 0.0;
};

struct BaselinePrediction {
  /// Empty when no trajectory could be formed (e.g. singular eigenvalue).
  RealMatrix states;
  bool extrapolated = false;
  std::optional<Divergence> divergence;
};

struct StackedDMDModel {
  DMDModel global;
  /// Per training parameter: X+_l (U_r^T X_l)^+ W, all n x r.
  std::vector<ComplexMatrix> modes;
  std::vector<RealVector> thetas;
  std::vector<std::string> labels;
  ParameterInterpolator interpolator;

  double dt() const { return global.dt; }
  Index rank() const { return global.rank; }
};

StackedDMDModel fit_stacked(const std::vector<SnapshotSet>& training, const Truncation& truncation);
inline StackedDMDModel fit_stacked(const std::vector<SnapshotSet>& training, Index r) {
  return fit_stacked(training, Truncation::fixed(r));
}

/// Mode set interpolated at theta (exact at the training knots).
ComplexMatrix stacked_modes(const StackedDMDModel& model, const RealVector& theta,
                            bool* extrapolated = nullptr);

BaselinePrediction predict_stacked(const StackedDMDModel& model, const RealVector& theta,
                                   const RealVector& x0, Index steps);

struct RKOIModel {
  RealMatrix basis;  // n x r, from the pooled snapshots
  /// Per training parameter: U^T X+_l (U^T X_l)^+, all r x r.
  std::vector<RealMatrix> operators;
  std::vector<RealVector> thetas;
  std::vector<std::string> labels;
  ParameterInterpolator interpolator;
  double dt = 0.0;

  Index rank() const { return basis.cols(); }
};

RKOIModel fit_rkoi(const std::vector<SnapshotSet>& training, const Truncation& truncation);
inline RKOIModel fit_rkoi(const std::vector<SnapshotSet>& training, Index r) {
  return fit_rkoi(training, Truncation::fixed(r));
}

/// Reduced operator interpolated at theta (exact at the training knots).
RealMatrix rkoi_operator(const RKOIModel& model, const RealVector& theta,
                         bool* extrapolated = nullptr);

/// Flags DivergenceDetected when the interpolated operator is not
/// diagonalizable, when some |lambda| > 1 + 10 / steps, or when the predicted
/// trajectory overflows. The trajectory is still returned whenever it can be
/// formed so the blow-up shows up in the error report.
BaselinePrediction predict_rkoi(const RKOIModel& model, const RealVector& theta,
                                const RealVector& x0, Index steps);

/// Growth bound on |lambda| used by the spectral-radius guard.
double divergence_growth_bound(Index steps);

/// Largest column norm over ||x0|| above which a trajectory counts as overflowed.
inline constexpr double kOverflowRatio = 1e8;

}  // namespace pidmd
