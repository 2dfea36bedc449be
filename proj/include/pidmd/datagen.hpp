#pragma once

// Ground-truth generators with known parameter structure.

#include "pidmd/dmd.hpp"
#include "pidmd/param_map.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pidmd {

/// x_{k+1} = (A + sum_i h_i(theta) B_i) x_k with seeded random A, B_i.
struct AffineSystemSpec {
  Index n = 8;
  std::uint64_t seed = 0;
  /// Target for the largest spectral radius over the declared parameters.
  double spectral_radius_target = 0.95;
  ParamMap h;
  /// Operator-norm of each B_i relative to A before the common rescale.
  double coupling = 0.5;
  double noise_std = 0.0;

  Index m() const { return h.m(); }
};

struct AffineSystem {
  RealMatrix A;
  std::vector<RealMatrix> B;
  ParamMap h;

  RealMatrix operator_at(const RealVector& theta) const;
};

double spectral_radius(const RealMatrix& m);

/// Draws A (a random orthogonal matrix) and B_i, then scales the whole family
/// so the largest spectral radius over `declared` equals the target.
AffineSystem make_affine_system(const AffineSystemSpec& spec,
                                const std::vector<RealVector>& declared);

struct AffineDataset {
  std::vector<SnapshotSet> trajectories;
  AffineSystem truth;
};

/// One trajectory of T transitions per theta. `declared` lists any further
/// parameters (e.g. test samples) the stability target must cover. Initial
/// conditions default to seeded unit Gaussian vectors.
AffineDataset gen_affine_trajectories(const AffineSystemSpec& spec,
                                      const std::vector<RealVector>& thetas, Index T,
                                      const std::vector<RealVector>& x0s = {},
                                      const std::vector<RealVector>& declared = {},
                                      double dt = 1.0);

/// Iterates x_{k+1} = K x_k.
RealMatrix iterate_linear(const RealMatrix& K, const RealVector& x0, Index steps);

/// Two-state family K(theta) = P D P^{-1} with P = [[1, g t1], [-g t2, 1]]:
/// stable at every theta in [0,1]^2, but entrywise averages of operators at
/// different corners can have spectral radius above one.
struct ShearFamilySpec {
  double gain = 8.0;
  double fast = 0.9;
  double slow = 0.5;

  RealMatrix operator_at(const RealVector& theta) const;
};

std::vector<SnapshotSet> gen_shear_trajectories(const ShearFamilySpec& spec,
                                                const std::vector<RealVector>& thetas, Index T,
                                                const RealVector& x0, double dt = 1.0);

/// u_t = -c u_x + nu u_xx on a periodic grid; first-order upwind advection,
/// central diffusion, explicit Euler. The one-step map is affine in nu.
struct AdvDiffSpec {
  Index n = 128;
  double length = 6.283185307179586;
  double c = 1.0;
  /// Integration step; snapshots are stored every `substeps` steps.
  double dt = 0.01;
  Index substeps = 1;
  /// "sine", "gaussian" or "multimode"
  std::string initial_condition = "gaussian";
  /// Wavenumber for "sine", pulse width for "gaussian".
  double ic_param = 0.3;

  double dx() const { return length / static_cast<double>(n); }
  double sample_dt() const { return dt * static_cast<double>(substeps); }
  RealVector grid() const;
  RealVector initial_state() const;
  /// Throws InvalidInput unless c dt/dx <= 1 and nu dt/dx^2 <= 0.5.
  void check_stability(double nu_max) const;
};

/// One set of T+1 snapshots per nu, after dropping `transient_skip` samples.
std::vector<SnapshotSet> gen_advdiff(const AdvDiffSpec& spec, const std::vector<double>& nus,
                                     Index T, Index transient_skip);

/// Label used for generated trajectories, e.g. "nu=0.0130".
std::string theta_label(const std::string& prefix, const RealVector& theta);

}  // namespace pidmd
