#pragma once

#include "pidmd/linalg.hpp"

#include <string>

namespace pidmd {

/// A uniformly sampled trajectory x_0..x_T (one column per snapshot) taken at
/// one parameter sample.
struct SnapshotSet {
  RealMatrix states;
  double dt = 0.0;
  RealVector theta;
  std::string label;

  Index state_dim() const { return states.rows(); }
  /// Number of transitions T (columns - 1).
  Index transitions() const { return states.cols() - 1; }

  /// Throws InvalidInput unless T >= 1, dt > 0 and every entry is finite.
  /// Training data needs two snapshots; a stored prediction may hold one.
  void validate(Index min_columns = 2) const;

  /// Columns [first, first + count) as a new set with the same metadata.
  SnapshotSet window(Index first, Index count) const;
};

struct SnapshotPairs {
  RealMatrix X;      // x_0 .. x_{T-1}
  RealMatrix Xplus;  // x_1 .. x_T
};

SnapshotPairs build_snapshot_pairs(const SnapshotSet& s);

struct DMDModel {
  RealMatrix Atilde;     // r x r reduced operator U_r^T X+ V_r S_r^{-1}
  ComplexMatrix Phi;     // n x r exact DMD modes X+ V_r S_r^{-1} W
  ComplexMatrix W;       // eigenvectors of Atilde
  ComplexVector Lambda;  // discrete eigenvalues
  ComplexVector Omega;   // log(Lambda) / dt
  RealMatrix U_r;
  double dt = 0.0;
  Index rank = 0;
  bool rank_deficient = false;
  double discarded_energy = 0.0;
  /// Eigenpair quality of Atilde (see EigenPairs::quality).
  double eig_quality = 0.0;
};

DMDModel fit_dmd(const RealMatrix& X, const RealMatrix& Xplus, Index r, double dt);
DMDModel fit_dmd(const RealMatrix& X, const RealMatrix& Xplus, const Truncation& truncation,
                 double dt);

/// Column k is real(Phi e^{Omega k dt} Phi^+ x0); column 0 is the modal
/// projection of x0.
RealMatrix predict_dmd(const DMDModel& model, const RealVector& x0, Index steps);

}  // namespace pidmd
