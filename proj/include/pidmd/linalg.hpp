#pragma once

// Dense kernels shared by every decomposition in the library.
//
// Storage order is Eigen's default column-major everywhere. Snapshot columns
// are contiguous, which is also the on-disk payload order (see snapshot_io).

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string_view>

namespace pidmd {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

[[noreturn]] void fail_non_finite(std::string_view what);

/// Throws InvalidInput when any entry is NaN or infinite.
template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, std::string_view what) {
  if (!m.allFinite()) fail_non_finite(what);
}

/// How many singular triplets to keep.
struct Truncation {
  enum class Mode { Rank, Energy };

  Mode mode = Mode::Rank;
  Index rank = 1;
  /// Fraction of sum(sigma^2) to retain when mode == Energy.
  double energy = 1.0;
  /// Move the cut by one when it would separate a near-degenerate pair of
  /// singular values (travelling structures show up as such pairs).
  bool keep_pairs = false;
  double pair_rel_gap = 1e-3;
  /// Singular values below rank_rel_tol * sigma_max count as zero.
  /// Defaults to max(rows, cols) * machine epsilon.
  std::optional<double> rank_rel_tol;

  static Truncation fixed(Index r) {
    Truncation t;
    t.rank = r;
    return t;
  }
  static Truncation by_energy(double fraction) {
    Truncation t;
    t.mode = Mode::Energy;
    t.energy = fraction;
    return t;
  }
};

struct TruncatedSVD {
  RealMatrix U;  // rows x r, orthonormal columns
  RealVector S;  // r, positive, nonincreasing
  RealMatrix V;  // cols x r, orthonormal columns
  /// sum_{i>r} sigma_i^2 / sum_i sigma_i^2
  double discarded_energy = 0.0;
  Index requested_rank = 0;
  Index numerical_rank = 0;
  /// Set when fewer than the requested triplets were numerically nonzero.
  bool rank_deficient = false;
  /// -1, 0 or +1: shift applied to keep a singular-value pair together.
  int pair_adjustment = 0;

  Index rank() const { return S.size(); }
};

TruncatedSVD truncated_svd(const RealMatrix& m, const Truncation& truncation);
inline TruncatedSVD truncated_svd(const RealMatrix& m, Index r) {
  return truncated_svd(m, Truncation::fixed(r));
}

struct EigenPairs {
  ComplexMatrix W;        // unit-norm eigenvectors as columns
  ComplexVector lambdas;  // sorted by decreasing modulus, then imaginary part
  /// max_i ||M w_i - lambda_i w_i||_2 / ||M||_F
  double residual = 0.0;
  /// ||M - W Lambda W^{-1}||_F / ||M||_F; large for defective matrices.
  double reconstruction_residual = 0.0;

  double quality() const { return std::max(residual, reconstruction_residual); }
};

EigenPairs eig(const RealMatrix& m);

/// True when the multiset of values is closed under complex conjugation.
bool conjugate_closed(const ComplexVector& values, double tol);

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are
/// treated as zero. rel_tol defaults to max(rows, cols) * machine epsilon.
ComplexMatrix pinv(const ComplexMatrix& m, std::optional<double> rel_tol = {});
RealMatrix pinv(const RealMatrix& m, std::optional<double> rel_tol = {});

struct ModalState {
  RealVector values;
  /// ||imag(Phi e^{Omega t} b)||_2, dropped from values.
  double imag_norm = 0.0;
};

/// Real part of Phi * diag(exp(omega_i t)) * amplitudes.
ModalState evolve_modes(const ComplexMatrix& phi, const ComplexVector& omega,
                        const ComplexVector& amplitudes, double t);

/// Principal-branch log(lambda) / dt. Throws SingularEigenvalue when some
/// |lambda| <= 1e-14.
ComplexVector continuous_eigenvalues(const ComplexVector& lambdas, double dt);

inline constexpr double kSingularEigenvalue = 1e-14;

/// Columns k = 0..steps of real(Phi e^{Omega k dt} Phi^+ x0).
RealMatrix modal_trajectory(const ComplexMatrix& phi, const ComplexVector& omega,
                            const RealVector& x0, double dt, Index steps);

}  // namespace pidmd
