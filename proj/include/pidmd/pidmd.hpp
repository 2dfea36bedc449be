#pragma once

// Parameter-interpolated DMD.
//
// One least-squares regression over trajectories from several parameter
// samples fits x_{k+1} ~ (A + sum_i h_i(theta) B_i) x_k, where h are known
// functions of the parameter. The lifted regressor [x; h(theta) (x) x] makes
// the unknowns [A B_1 .. B_m] appear linearly. A rank-r_hat basis of the
// pooled X+ then gives a reduced operator at any theta, whose eigenpairs
// drive the continuous-time modal predictor.

#include "pidmd/dmd.hpp"
#include "pidmd/param_map.hpp"

#include <string>
#include <vector>

namespace pidmd {

/// [x; h_1 x; ...; h_m x]
RealVector lift(const RealVector& x, const RealVector& hvals);

struct RegressionData {
  RealMatrix Psi;    // (n + m n) x (L T)
  RealMatrix Xplus;  // n x (L T)
};

/// Builds Psi and X+ block by block, in training order.
RegressionData assemble_regression(const std::vector<SnapshotSet>& training,
                                   const ParamMap& map);

struct TrainingMeta {
  std::vector<std::string> labels;
  std::vector<RealVector> thetas;
};

struct PiDMDModel {
  RealMatrix Atilde;               // n x n
  std::vector<RealMatrix> Btilde;  // m blocks, each n x n
  RealMatrix U_hat;                // n x r_hat basis of the pooled X+
  double dt = 0.0;
  ParamMap param_map;
  Index rank_tilde = 0;
  Index rank_hat = 0;
  TrainingMeta training;

  /// ||X+ - [A B] Psi||_F / ||X+||_F on the training data.
  double training_residual = 0.0;
  bool psi_rank_deficient = false;
  bool basis_rank_deficient = false;
  /// [1; h(theta_l)] samples do not span m+1 dimensions: B is not identifiable.
  bool ill_conditioned = false;
  std::vector<std::string> warnings;

  Index state_dim() const { return Atilde.rows(); }
};

struct PiDMDOptions {
  Truncation psi = Truncation::fixed(1);
  Truncation basis = Truncation::fixed(1);

  static PiDMDOptions ranks(Index r_tilde, Index r_hat) {
    return {Truncation::fixed(r_tilde), Truncation::fixed(r_hat)};
  }
};

PiDMDModel fit_pidmd(const std::vector<SnapshotSet>& training, const ParamMap& map,
                     const PiDMDOptions& options);
inline PiDMDModel fit_pidmd(const std::vector<SnapshotSet>& training, const ParamMap& map,
                            Index r_tilde, Index r_hat) {
  return fit_pidmd(training, map, PiDMDOptions::ranks(r_tilde, r_hat));
}

/// A + sum_i h_i(theta) B_i with theta in raw (unnormalized) coordinates.
RealMatrix evaluate_operator(const PiDMDModel& model, const RealVector& theta);
/// Same, but with the parameter-function values supplied directly.
RealMatrix operator_at_h(const PiDMDModel& model, const RealVector& hvals);

struct ParametricROM {
  RealVector theta;
  RealMatrix K_r;  // U_hat^T K(theta) U_hat
  ComplexMatrix Phi;
  ComplexVector Lambda;
  ComplexVector Omega;
  double dt = 0.0;
  double eig_quality = 0.0;
};

/// Largest eigenpair quality a reduced operator may have before it is treated
/// as non-diagonalizable.
inline constexpr double kMaxEigQuality = 1e-6;

ParametricROM reduce(const PiDMDModel& model, const RealVector& theta);

RealMatrix predict_rom(const ParametricROM& rom, const RealVector& x0, Index steps);
RealMatrix predict_pidmd(const PiDMDModel& model, const RealVector& theta, const RealVector& x0,
                         Index steps);

/// Repeated multiplication by the full n x n operator; used to cross-check the
/// modal predictor on small problems.
RealMatrix iterate_operator(const PiDMDModel& model, const RealVector& theta,
                            const RealVector& x0, Index steps);

}  // namespace pidmd
