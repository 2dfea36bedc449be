#include "pidmd/dmd.hpp"

#include "pidmd/errors.hpp"

namespace pidmd {

void SnapshotSet::validate(Index min_columns) const {
  require(states.cols() >= min_columns,
          "snapshot set '" + label + "' needs at least " + std::to_string(min_columns) + " snapshots");
  require(states.rows() >= 1, "snapshot set '" + label + "' has empty states");
  require(dt > 0.0, "snapshot set '" + label + "' has non-positive dt");
  require_finite(states, "snapshot set '" + label + "'");
  require_finite(theta, "snapshot set '" + label + "' theta");
}

SnapshotSet SnapshotSet::window(Index first, Index count) const {
  require(first >= 0 && count >= 1 && first + count <= states.cols(),
          "snapshot window [" + std::to_string(first) + ", +" + std::to_string(count) +
              ") out of range for '" + label + "'");
  return {states.middleCols(first, count), dt, theta, label};
}

SnapshotPairs build_snapshot_pairs(const SnapshotSet& s) {
  s.validate();
  const Index T = s.transitions();
  return {s.states.leftCols(T), s.states.rightCols(T)};
}

DMDModel fit_dmd(const RealMatrix& X, const RealMatrix& Xplus, Index r, double dt) {
  return fit_dmd(X, Xplus, Truncation::fixed(r), dt);
}

DMDModel fit_dmd(const RealMatrix& X, const RealMatrix& Xplus, const Truncation& truncation,
                 double dt) {
  require(X.rows() == Xplus.rows() && X.cols() == Xplus.cols(),
          "fit_dmd: X and X+ must have the same shape");
  require(dt > 0.0, "fit_dmd: dt must be positive");
  require_finite(Xplus, "fit_dmd: X+");

  const TruncatedSVD svd = truncated_svd(X, truncation);
  const RealVector inv_s = svd.S.cwiseInverse();
  // X+ V_r S_r^{-1}, shared by the reduced operator and the exact modes.
  const RealMatrix lifted = Xplus * svd.V * inv_s.asDiagonal();

  DMDModel model;
  model.U_r = svd.U;
  model.Atilde = svd.U.transpose() * lifted;
  model.rank = svd.rank();
  model.rank_deficient = svd.rank_deficient;
  model.discarded_energy = svd.discarded_energy;
  model.dt = dt;

  const EigenPairs pairs = eig(model.Atilde);
  model.eig_quality = pairs.quality();
  model.W = pairs.W;
  model.Lambda = pairs.lambdas;
  model.Omega = continuous_eigenvalues(pairs.lambdas, dt);
  model.Phi = lifted.cast<Complex>() * pairs.W;
  return model;
}

RealMatrix predict_dmd(const DMDModel& model, const RealVector& x0, Index steps) {
  return modal_trajectory(model.Phi, model.Omega, x0, model.dt, steps);
}

}  // namespace pidmd
