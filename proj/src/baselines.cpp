#include "pidmd/baselines.hpp"

#include "pidmd/errors.hpp"
#include "pidmd/pidmd.hpp"

#include <cmath>
#include <sstream>

namespace pidmd {

namespace {

struct Pooled {
  RegressionData data;
  std::vector<SnapshotPairs> per_parameter;
};

Pooled pool(const std::vector<SnapshotSet>& training) {
  require(!training.empty(), "baseline: no training trajectories");
  const Index p = training.front().theta.size();
  for (const auto& s : training) {
    require(s.theta.size() == p, "baseline: training parameters differ in dimension");
  }
  Pooled out{assemble_regression(training, ParamMap::none(p)), {}};
  for (const auto& s : training) out.per_parameter.push_back(build_snapshot_pairs(s));
  return out;
}

// Least-squares map from reduced coordinates of X onto `target`.
RealMatrix projected_fit(const RealMatrix& target, const RealMatrix& basis, const RealMatrix& X) {
  return target * pinv(RealMatrix(basis.transpose() * X));
}

std::optional<Divergence> overflow_check(const RealMatrix& states, const RealVector& x0) {
  if (!states.allFinite()) return Divergence{"predicted trajectory is not finite", 0.0};
  const double ref = x0.norm() > 0.0 ? x0.norm() : 1.0;
  for (Index k = 0; k < states.cols(); ++k) {
    if (states.col(k).norm() > kOverflowRatio * ref) {
      std::ostringstream msg;
      msg << "predicted state norm exceeds " << kOverflowRatio << " x ||x0|| at step " << k;
      return Divergence{msg.str(), 0.0};
    }
  }
  return std::nullopt;
}

std::vector<std::string> labels_of(const std::vector<SnapshotSet>& training) {
  std::vector<std::string> out;
  for (const auto& s : training) out.push_back(s.label);
  return out;
}

std::vector<RealVector> thetas_of(const std::vector<SnapshotSet>& training) {
  std::vector<RealVector> out;
  for (const auto& s : training) out.push_back(s.theta);
  return out;
}

}  // namespace

double divergence_growth_bound(Index steps) {
  return 1.0 + 10.0 / static_cast<double>(std::max<Index>(steps, 1));
}

StackedDMDModel fit_stacked(const std::vector<SnapshotSet>& training,
                            const Truncation& truncation) {
  const Pooled pooled = pool(training);
  StackedDMDModel model;
  model.global = fit_dmd(pooled.data.Psi, pooled.data.Xplus, truncation, training.front().dt);
  model.thetas = thetas_of(training);
  model.labels = labels_of(training);
  model.interpolator = ParameterInterpolator(model.thetas);
  for (const auto& pairs : pooled.per_parameter) {
    const RealMatrix gain = projected_fit(pairs.Xplus, model.global.U_r, pairs.X);
    model.modes.push_back(gain.cast<Complex>() * model.global.W);
  }
  return model;
}

ComplexMatrix stacked_modes(const StackedDMDModel& model, const RealVector& theta,
                            bool* extrapolated) {
  const auto w = model.interpolator.weights(theta);
  if (extrapolated != nullptr) *extrapolated = w.extrapolated;
  return ParameterInterpolator::combine(w.w, model.modes);
}

BaselinePrediction predict_stacked(const StackedDMDModel& model, const RealVector& theta,
                                   const RealVector& x0, Index steps) {
  require(x0.size() == model.global.Phi.rows(), "predict_stacked: x0 length mismatch");
  BaselinePrediction out;
  const ComplexMatrix modes = stacked_modes(model, theta, &out.extrapolated);
  out.states = modal_trajectory(modes, model.global.Omega, x0, model.dt(), steps);
  out.divergence = overflow_check(out.states, x0);
  return out;
}

RKOIModel fit_rkoi(const std::vector<SnapshotSet>& training, const Truncation& truncation) {
  require(training.size() >= 2, "fit_rkoi: interpolation needs at least two training parameters");
  const Pooled pooled = pool(training);
  const TruncatedSVD svd = truncated_svd(pooled.data.Psi, truncation);

  RKOIModel model;
  model.basis = svd.U;
  model.dt = training.front().dt;
  model.thetas = thetas_of(training);
  model.labels = labels_of(training);
  model.interpolator = ParameterInterpolator(model.thetas);
  for (const auto& pairs : pooled.per_parameter) {
    model.operators.push_back(
        svd.U.transpose() * projected_fit(pairs.Xplus, svd.U, pairs.X));
  }
  return model;
}

RealMatrix rkoi_operator(const RKOIModel& model, const RealVector& theta, bool* extrapolated) {
  const auto w = model.interpolator.weights(theta);
  if (extrapolated != nullptr) *extrapolated = w.extrapolated;
  return ParameterInterpolator::combine(w.w, model.operators);
}

BaselinePrediction predict_rkoi(const RKOIModel& model, const RealVector& theta,
                                const RealVector& x0, Index steps) {
  require(x0.size() == model.basis.rows(), "predict_rkoi: x0 length mismatch");
  BaselinePrediction out;
  const RealMatrix op = rkoi_operator(model, theta, &out.extrapolated);
  const EigenPairs pairs = eig(op);
  const double radius = pairs.lambdas.size() > 0 ? std::abs(pairs.lambdas(0)) : 0.0;

  if (!(pairs.quality() <= kMaxEigQuality)) {
    out.divergence = Divergence{"interpolated operator is not diagonalizable", radius};
  } else if (radius > divergence_growth_bound(steps)) {
    std::ostringstream msg;
    msg << "interpolated operator has spectral radius " << radius << " > "
        << divergence_growth_bound(steps);
    out.divergence = Divergence{msg.str(), radius};
  }

  ComplexVector omega;
  try {
    omega = continuous_eigenvalues(pairs.lambdas, model.dt);
  } catch (const Error& e) {
    if (!out.divergence) out.divergence = Divergence{e.what(), radius};
    return out;
  }
  const ComplexMatrix phi = model.basis.cast<Complex>() * pairs.W;
  out.states = modal_trajectory(phi, omega, x0, model.dt, steps);
  if (!out.divergence) {
    out.divergence = overflow_check(out.states, x0);
    if (out.divergence) out.divergence->spectral_radius = radius;
  }
  return out;
}

}  // namespace pidmd
