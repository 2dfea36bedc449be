#include "pidmd/datagen.hpp"

#include "pidmd/errors.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace pidmd {

namespace {

RealMatrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

RealMatrix random_orthogonal(std::mt19937_64& rng, Index n) {
  Eigen::HouseholderQR<RealMatrix> qr(gaussian_matrix(rng, n, n));
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(n, n);
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

double spectral_norm(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double spectral_radius(const RealMatrix& m) {
  return m.size() == 0 ? 0.0 : m.eigenvalues().cwiseAbs().maxCoeff();
}

RealMatrix AffineSystem::operator_at(const RealVector& theta) const {
  const RealVector hv = h.evaluate(theta);
  RealMatrix K = A;
  for (std::size_t i = 0; i < B.size(); ++i) K += hv(static_cast<Index>(i)) * B[i];
  return K;
}

AffineSystem make_affine_system(const AffineSystemSpec& spec,
                                const std::vector<RealVector>& declared) {
  if (spec.n < 1) fail(ErrorKind::SpecRejected, "affine system: n must be >= 1");
  if (!(spec.spectral_radius_target > 0.0 && spec.spectral_radius_target <= 1.0)) {
    fail(ErrorKind::SpecRejected, "affine system: spectral radius target must be in (0, 1]");
  }
  if (!(spec.noise_std >= 0.0)) fail(ErrorKind::SpecRejected, "affine system: noise_std < 0");

  std::mt19937_64 rng(spec.seed);
  AffineSystem sys;
  sys.h = spec.h;
  sys.A = random_orthogonal(rng, spec.n);
  for (Index i = 0; i < spec.m(); ++i) {
    RealMatrix b = gaussian_matrix(rng, spec.n, spec.n);
    sys.B.push_back(spec.coupling * b / spectral_norm(b));
  }

  double worst = spectral_radius(sys.A);
  for (const auto& theta : declared) worst = std::max(worst, spectral_radius(sys.operator_at(theta)));
  if (!(worst > 0.0) || !std::isfinite(worst)) {
    fail(ErrorKind::SpecRejected, "affine system: degenerate operator family");
  }
  const double scale = spec.spectral_radius_target / worst;
  sys.A *= scale;
  for (auto& b : sys.B) b *= scale;
  return sys;
}

RealMatrix iterate_linear(const RealMatrix& K, const RealVector& x0, Index steps) {
  RealMatrix out(x0.size(), steps + 1);
  out.col(0) = x0;
  for (Index k = 1; k <= steps; ++k) out.col(k) = K * out.col(k - 1);
  return out;
}

std::string theta_label(const std::string& prefix, const RealVector& theta) {
  std::string out = prefix + "=";
  char buf[32];
  for (Index i = 0; i < theta.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", theta(i));
    if (i > 0) out += "_";
    out += buf;
  }
  return out;
}

AffineDataset gen_affine_trajectories(const AffineSystemSpec& spec,
                                      const std::vector<RealVector>& thetas, Index T,
                                      const std::vector<RealVector>& x0s,
                                      const std::vector<RealVector>& declared, double dt) {
  require(T >= 1, "gen_affine_trajectories: T must be >= 1");
  require(dt > 0.0, "gen_affine_trajectories: dt must be positive");
  require(x0s.empty() || x0s.size() == thetas.size(),
          "gen_affine_trajectories: need one initial condition per theta");
  for (const auto& t : thetas) require_finite(t, "gen_affine_trajectories theta");

  std::vector<RealVector> all = thetas;
  all.insert(all.end(), declared.begin(), declared.end());
  AffineDataset out{{}, make_affine_system(spec, all)};

  // Separate stream so initial conditions and noise do not depend on how many
  // draws the system construction consumed.
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < thetas.size(); ++l) {
    const RealMatrix K = out.truth.operator_at(thetas[l]);
    if (spectral_radius(K) > 1.0 + 1e-6) {
      fail(ErrorKind::SpecRejected, "affine system is unstable at " +
                                        theta_label("theta", thetas[l]));
    }
    RealVector x0;
    if (x0s.empty()) {
      x0 = gaussian_matrix(rng, spec.n, 1);
      x0.normalize();
    } else {
      x0 = x0s[l];
      require(x0.size() == spec.n, "gen_affine_trajectories: initial condition length mismatch");
    }
    RealMatrix states = iterate_linear(K, x0, T);
    if (spec.noise_std > 0.0) {
      for (Index j = 0; j < states.cols(); ++j) {
        for (Index i = 0; i < states.rows(); ++i) states(i, j) += spec.noise_std * normal(rng);
      }
    }
    out.trajectories.push_back({std::move(states), dt, thetas[l], theta_label("theta", thetas[l])});
  }
  return out;
}

RealMatrix ShearFamilySpec::operator_at(const RealVector& theta) const {
  require(theta.size() == 2, "shear family: theta must have two coordinates");
  RealMatrix P(2, 2);
  P << 1.0, gain * theta(0), -gain * theta(1), 1.0;
  const RealVector d = (RealVector(2) << fast, slow).finished();
  return P * d.asDiagonal() * P.inverse();
}

std::vector<SnapshotSet> gen_shear_trajectories(const ShearFamilySpec& spec,
                                                const std::vector<RealVector>& thetas, Index T,
                                                const RealVector& x0, double dt) {
  require(x0.size() == 2, "shear family: x0 must have two entries");
  std::vector<SnapshotSet> out;
  for (const auto& theta : thetas) {
    out.push_back({iterate_linear(spec.operator_at(theta), x0, T), dt, theta,
                   theta_label("theta", theta)});
  }
  return out;
}

RealVector AdvDiffSpec::grid() const {
  RealVector x(n);
  for (Index i = 0; i < n; ++i) x(i) = static_cast<double>(i) * dx();
  return x;
}

RealVector AdvDiffSpec::initial_state() const {
  const RealVector x = grid();
  const double two_pi = 2.0 * std::acos(-1.0);
  RealVector u(n);
  if (initial_condition == "sine") {
    u = (two_pi * ic_param / length * x.array()).sin();
  } else if (initial_condition == "gaussian") {
    const double centre = 0.5 * length;
    u = (-(x.array() - centre).square() / (2.0 * ic_param * ic_param)).exp();
    u.array() -= u.mean();
  } else if (initial_condition == "multimode") {
    u.setZero();
    for (int k = 1; k <= 6; ++k) {
      const double phase = 0.7 * k;
      u.array() += (two_pi * k / length * x.array() + phase).sin() / k;
    }
  } else {
    fail(ErrorKind::InvalidInput, "advdiff: unknown initial condition '" + initial_condition + "'");
  }
  return u;
}

void AdvDiffSpec::check_stability(double nu_max) const {
  require(n >= 3, "advdiff: need at least three grid points");
  require(length > 0.0 && dt > 0.0 && substeps >= 1, "advdiff: invalid grid or time step");
  require(nu_max >= 0.0, "advdiff: viscosity must be nonnegative");
  const double cfl = std::abs(c) * dt / dx();
  const double diffusion = nu_max * dt / (dx() * dx());
  require(cfl <= 1.0, "advdiff: CFL number " + std::to_string(cfl) + " exceeds 1");
  require(diffusion <= 0.5,
          "advdiff: diffusion number " + std::to_string(diffusion) + " exceeds 0.5");
}

std::vector<SnapshotSet> gen_advdiff(const AdvDiffSpec& spec, const std::vector<double>& nus,
                                     Index T, Index transient_skip) {
  require(!nus.empty(), "advdiff: no viscosities");
  require(T >= 1 && transient_skip >= 0, "advdiff: invalid snapshot counts");
  double nu_max = 0.0;
  for (double nu : nus) {
    require(std::isfinite(nu) && nu >= 0.0, "advdiff: viscosity must be finite and >= 0");
    nu_max = std::max(nu_max, nu);
  }
  spec.check_stability(nu_max);

  const Index n = spec.n;
  const double inv_dx = 1.0 / spec.dx();
  const double inv_dx2 = inv_dx * inv_dx;
  const RealVector u0 = spec.initial_state();

  std::vector<SnapshotSet> out;
  for (double nu : nus) {
    RealVector u = u0;
    RealVector next(n);
    auto step = [&] {
      for (Index i = 0; i < n; ++i) {
        const Index left = (i + n - 1) % n;
        const Index right = (i + 1) % n;
        const double adv = spec.c >= 0.0 ? spec.c * (u(i) - u(left)) * inv_dx
                                         : spec.c * (u(right) - u(i)) * inv_dx;
        const double diff = nu * (u(right) - 2.0 * u(i) + u(left)) * inv_dx2;
        next(i) = u(i) + spec.dt * (diff - adv);
      }
      u.swap(next);
    };

    for (Index k = 0; k < transient_skip * spec.substeps; ++k) step();
    RealMatrix states(n, T + 1);
    states.col(0) = u;
    for (Index k = 1; k <= T; ++k) {
      for (Index s = 0; s < spec.substeps; ++s) step();
      states.col(k) = u;
    }
    const RealVector theta = RealVector::Constant(1, nu);
    out.push_back({std::move(states), spec.sample_dt(), theta, theta_label("nu", theta)});
  }
  return out;
}

}  // namespace pidmd
