#include "pidmd/pidmd.hpp"

#include "pidmd/errors.hpp"

#include <cmath>

namespace pidmd {

RealVector lift(const RealVector& x, const RealVector& hvals) {
  require_finite(x, "lift: x");
  require_finite(hvals, "lift: h");
  const Index n = x.size();
  RealVector out(n + hvals.size() * n);
  out.head(n) = x;
  for (Index i = 0; i < hvals.size(); ++i) out.segment(n + i * n, n) = hvals(i) * x;
  return out;
}

RegressionData assemble_regression(const std::vector<SnapshotSet>& training,
                                   const ParamMap& map) {
  require(!training.empty(), "assemble_regression: no training trajectories");
  const Index n = training.front().state_dim();
  const double dt = training.front().dt;
  Index total = 0;
  for (const auto& s : training) {
    s.validate();
    require(s.state_dim() == n, "assemble_regression: trajectory '" + s.label +
                                    "' has state dimension " + std::to_string(s.state_dim()) +
                                    ", expected " + std::to_string(n));
    require(s.dt == dt, "assemble_regression: trajectory '" + s.label + "' has a different dt");
    total += s.transitions();
  }
  require(total >= 1, "assemble_regression: no snapshot pairs");

  const Index m = map.m();
  RegressionData data{RealMatrix(n + m * n, total), RealMatrix(n, total)};
  Index col = 0;
  for (const auto& s : training) {
    const Index T = s.transitions();
    const RealVector h = map.evaluate(s.theta);
    auto X = s.states.leftCols(T);
    data.Psi.block(0, col, n, T) = X;
    for (Index i = 0; i < m; ++i) data.Psi.block(n + i * n, col, n, T) = h(i) * X;
    data.Xplus.middleCols(col, T) = s.states.rightCols(T);
    col += T;
  }
  return data;
}

PiDMDModel fit_pidmd(const std::vector<SnapshotSet>& training, const ParamMap& map,
                     const PiDMDOptions& options) {
  const RegressionData data = assemble_regression(training, map);
  const Index n = training.front().state_dim();
  const Index m = map.m();

  PiDMDModel model;
  model.dt = training.front().dt;
  model.param_map = map;
  for (const auto& s : training) {
    model.training.labels.push_back(s.label);
    model.training.thetas.push_back(s.theta);
  }

  const TruncatedSVD psi = truncated_svd(data.Psi, options.psi);
  model.rank_tilde = psi.rank();
  model.psi_rank_deficient = psi.rank_deficient;
  if (psi.rank_deficient) {
    model.warnings.push_back("Psi has numerical rank " + std::to_string(psi.numerical_rank) +
                             " < requested " + std::to_string(psi.requested_rank) +
                             "; truncation rank reduced");
  }

  // X+ V S^{-1} is shared by A and every B block.
  const RealMatrix gain = data.Xplus * psi.V * psi.S.cwiseInverse().asDiagonal();
  model.Atilde = gain * psi.U.topRows(n).transpose();
  model.Btilde.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    model.Btilde.push_back(gain * psi.U.middleRows(n + i * n, n).transpose());
  }

  const double xnorm = data.Xplus.norm();
  const RealMatrix fitted = gain * (psi.U.transpose() * data.Psi);
  model.training_residual = xnorm > 0.0 ? (data.Xplus - fitted).norm() / xnorm : 0.0;

  const TruncatedSVD basis = truncated_svd(data.Xplus, options.basis);
  model.U_hat = basis.U;
  model.rank_hat = basis.rank();
  model.basis_rank_deficient = basis.rank_deficient;
  if (basis.rank_deficient) {
    model.warnings.push_back("X+ has numerical rank " + std::to_string(basis.numerical_rank) +
                             " < requested " + std::to_string(basis.requested_rank) +
                             "; reduced basis rank reduced");
  }

  if (m >= 1 && excitation_rank(map, model.training.thetas) < m + 1) {
    model.ill_conditioned = true;
    model.warnings.push_back(
        "IllConditioned: training parameters do not excite all parameter functions; "
        "B operators are not identifiable");
  }
  return model;
}

RealMatrix operator_at_h(const PiDMDModel& model, const RealVector& hvals) {
  require(hvals.size() == static_cast<Index>(model.Btilde.size()),
          "operator_at_h: expected " + std::to_string(model.Btilde.size()) +
              " parameter-function values");
  RealMatrix K = model.Atilde;
  for (std::size_t i = 0; i < model.Btilde.size(); ++i) {
    K += hvals(static_cast<Index>(i)) * model.Btilde[i];
  }
  return K;
}

RealMatrix evaluate_operator(const PiDMDModel& model, const RealVector& theta) {
  require(theta.size() == model.param_map.p(),
          "evaluate_operator: theta has length " + std::to_string(theta.size()) + ", expected " +
              std::to_string(model.param_map.p()));
  return operator_at_h(model, model.param_map.evaluate(theta));
}

ParametricROM reduce(const PiDMDModel& model, const RealVector& theta) {
  const RealMatrix K = evaluate_operator(model, theta);
  ParametricROM rom;
  rom.theta = theta;
  rom.dt = model.dt;
  rom.K_r = model.U_hat.transpose() * K * model.U_hat;

  const EigenPairs pairs = eig(rom.K_r);
  rom.eig_quality = pairs.quality();
  if (!(rom.eig_quality <= kMaxEigQuality)) {
    fail(ErrorKind::NumericalFailure,
         "reduce: reduced operator is not numerically diagonalizable (eigen residual " +
             std::to_string(rom.eig_quality) + ")");
  }
  rom.Lambda = pairs.lambdas;
  rom.Omega = continuous_eigenvalues(pairs.lambdas, model.dt);
  rom.Phi = model.U_hat.cast<Complex>() * pairs.W;
  return rom;
}

RealMatrix predict_rom(const ParametricROM& rom, const RealVector& x0, Index steps) {
  return modal_trajectory(rom.Phi, rom.Omega, x0, rom.dt, steps);
}

RealMatrix predict_pidmd(const PiDMDModel& model, const RealVector& theta, const RealVector& x0,
                         Index steps) {
  return predict_rom(reduce(model, theta), x0, steps);
}

RealMatrix iterate_operator(const PiDMDModel& model, const RealVector& theta,
                            const RealVector& x0, Index steps) {
  require(x0.size() == model.state_dim(), "iterate_operator: x0 length mismatch");
  const RealMatrix K = evaluate_operator(model, theta);
  RealMatrix out(x0.size(), steps + 1);
  out.col(0) = x0;
  for (Index k = 1; k <= steps; ++k) out.col(k) = K * out.col(k - 1);
  return out;
}

}  // namespace pidmd
