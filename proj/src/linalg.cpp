#include "pidmd/linalg.hpp"

#include "pidmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace pidmd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double default_rel_tol(Index rows, Index cols) {
  return static_cast<double>(std::max(rows, cols)) * kEps;
}

// Index one past the end of the run of near-equal singular values that
// contains position i, and the index where it starts.
std::pair<Index, Index> degenerate_run(const RealVector& s, Index i, double gap) {
  Index lo = i;
  while (lo > 0 && s(lo - 1) - s(lo) <= gap * s(lo - 1)) --lo;
  Index hi = i + 1;
  while (hi < s.size() && s(hi - 1) - s(hi) <= gap * s(hi - 1)) ++hi;
  return {lo, hi};
}

}  // namespace

void fail_non_finite(std::string_view what) {
  fail(ErrorKind::InvalidInput, std::string(what) + ": non-finite entries");
}

TruncatedSVD truncated_svd(const RealMatrix& m, const Truncation& truncation) {
  require_finite(m, "truncated_svd");
  if (m.size() == 0 || m.isZero(0.0)) {
    fail(ErrorKind::DegenerateInput, "truncated_svd: zero matrix");
  }
  if (truncation.mode == Truncation::Mode::Rank && truncation.rank < 1) {
    fail(ErrorKind::InvalidInput, "truncated_svd: rank must be >= 1");
  }
  if (truncation.mode == Truncation::Mode::Energy &&
      !(truncation.energy > 0.0 && truncation.energy <= 1.0)) {
    fail(ErrorKind::InvalidInput, "truncated_svd: energy fraction must be in (0, 1]");
  }

  Eigen::BDCSVD<RealMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const double rel_tol = truncation.rank_rel_tol.value_or(default_rel_tol(m.rows(), m.cols()));
  const double cutoff = rel_tol * sigma(0);

  Index numerical_rank = 0;
  while (numerical_rank < sigma.size() && sigma(numerical_rank) > cutoff) ++numerical_rank;

  Index requested = truncation.rank;
  const double total = sigma.squaredNorm();
  if (truncation.mode == Truncation::Mode::Energy) {
    double kept = 0.0;
    requested = 0;
    while (requested < sigma.size() && kept < truncation.energy * total) {
      kept += sigma(requested) * sigma(requested);
      ++requested;
    }
  }

  TruncatedSVD out;
  out.requested_rank = requested;
  out.numerical_rank = numerical_rank;
  Index r = std::min(requested, numerical_rank);
  out.rank_deficient = requested > numerical_rank;

  if (truncation.keep_pairs && r < numerical_rank) {
    auto [lo, hi] = degenerate_run(sigma, r - 1, truncation.pair_rel_gap);
    // Pairs are formed from the start of the run; an odd count before the
    // cut means the boundary splits one.
    if (hi > r && (r - lo) % 2 == 1) {
      if (r + 1 <= numerical_rank) {
        ++r;
        out.pair_adjustment = 1;
      } else if (r > 1) {
        --r;
        out.pair_adjustment = -1;
      }
    }
  }

  out.U = svd.matrixU().leftCols(r);
  out.S = sigma.head(r);
  out.V = svd.matrixV().leftCols(r);
  out.discarded_energy = (total - out.S.squaredNorm()) / total;
  if (out.discarded_energy < 0.0) out.discarded_energy = 0.0;
  return out;
}

EigenPairs eig(const RealMatrix& m) {
  require(m.rows() == m.cols(), "eig: matrix must be square");
  require_finite(m, "eig");
  const Index n = m.rows();

  Eigen::EigenSolver<RealMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "eig: QR iteration did not converge");
  }
  const ComplexVector values = solver.eigenvalues();
  const ComplexMatrix vectors = solver.eigenvectors();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a).imag() > values(b).imag();
  });

  EigenPairs out;
  out.lambdas.resize(n);
  out.W.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.lambdas(j) = values(src);
    ComplexVector w = vectors.col(src);
    const double norm = w.norm();
    if (norm > 0.0) w /= norm;
    out.W.col(j) = w;
  }

  const double scale = m.norm() > 0.0 ? m.norm() : 1.0;
  const ComplexMatrix mc = m.cast<Complex>();
  for (Index j = 0; j < n; ++j) {
    const double r = (mc * out.W.col(j) - out.lambdas(j) * out.W.col(j)).norm() / scale;
    out.residual = std::max(out.residual, r);
  }
  if (n > 0) {
    Eigen::FullPivLU<ComplexMatrix> lu(out.W);
    if (!lu.isInvertible()) {
      out.reconstruction_residual = std::numeric_limits<double>::infinity();
    } else {
      const ComplexMatrix rebuilt = out.W * out.lambdas.asDiagonal() * lu.inverse();
      out.reconstruction_residual = (mc - rebuilt).norm() / scale;
    }
  }
  return out;
}

bool conjugate_closed(const ComplexVector& values, double tol) {
  const Index n = values.size();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    const Complex target = std::conj(values(i));
    Index best = -1;
    double best_dist = tol;
    for (Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)] || (j == i && std::abs(values(i).imag()) > tol)) {
        continue;
      }
      const double d = std::abs(values(j) - target);
      if (d <= best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best < 0) return false;
    used[static_cast<std::size_t>(i)] = true;
    used[static_cast<std::size_t>(best)] = true;
  }
  return true;
}

namespace {

template <typename Matrix>
Matrix pinv_impl(const Matrix& m, std::optional<double> rel_tol) {
  require_finite(m, "pinv");
  if (m.size() == 0 || m.isZero(0.0)) {
    fail(ErrorKind::DegenerateInput, "pinv: zero matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const double cutoff = rel_tol.value_or(default_rel_tol(m.rows(), m.cols())) * sigma(0);
  RealVector inv = RealVector::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  using Scalar = typename Matrix::Scalar;
  return svd.matrixV() * inv.cast<Scalar>().asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

ComplexMatrix pinv(const ComplexMatrix& m, std::optional<double> rel_tol) {
  return pinv_impl(m, rel_tol);
}

RealMatrix pinv(const RealMatrix& m, std::optional<double> rel_tol) {
  return pinv_impl(m, rel_tol);
}

ModalState evolve_modes(const ComplexMatrix& phi, const ComplexVector& omega,
                        const ComplexVector& amplitudes, double t) {
  require(phi.cols() == omega.size() && omega.size() == amplitudes.size(),
          "evolve_modes: dimension mismatch");
  require(t >= 0.0, "evolve_modes: t must be nonnegative");
  const ComplexVector weights = (omega * t).array().exp() * amplitudes.array();
  const ComplexVector state = phi * weights;
  return {state.real(), state.imag().norm()};
}

ComplexVector continuous_eigenvalues(const ComplexVector& lambdas, double dt) {
  require(dt > 0.0, "continuous_eigenvalues: dt must be positive");
  ComplexVector omega(lambdas.size());
  for (Index i = 0; i < lambdas.size(); ++i) {
    if (std::abs(lambdas(i)) <= kSingularEigenvalue) {
      fail(ErrorKind::SingularEigenvalue,
           "discrete eigenvalue " + std::to_string(i) + " has modulus below 1e-14");
    }
    omega(i) = std::log(lambdas(i)) / dt;
  }
  return omega;
}

RealMatrix modal_trajectory(const ComplexMatrix& phi, const ComplexVector& omega,
                            const RealVector& x0, double dt, Index steps) {
  require(x0.size() == phi.rows(), "modal prediction: x0 length does not match modes");
  require(steps >= 0, "modal prediction: steps must be nonnegative");
  require_finite(x0, "x0");
  const ComplexVector amplitudes = pinv(phi) * x0.cast<Complex>();
  RealMatrix out(phi.rows(), steps + 1);
  for (Index k = 0; k <= steps; ++k) {
    out.col(k) = evolve_modes(phi, omega, amplitudes, static_cast<double>(k) * dt).values;
  }
  return out;
}

}  // namespace pidmd
