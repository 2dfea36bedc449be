#include "doctest.h"

#include "pidmd/baselines.hpp"
#include "pidmd/errors.hpp"
#include "test_helpers.hpp"

using namespace pidmd;
using namespace pidmd::testing;

namespace {

RealVector scalar(double v) { return RealVector::Constant(1, v); }
RealVector pair(double a, double b) { return (RealVector(2) << a, b).finished(); }

std::vector<SnapshotSet> family(std::mt19937_64& rng, const RealMatrix& A, const RealMatrix& B,
                                const std::vector<double>& thetas, Index T) {
  std::vector<SnapshotSet> out;
  for (double t : thetas) {
    const RealVector x0 = random_matrix(rng, A.rows(), 1);
    out.push_back({matrix_powers(A + t * B, x0, T), 0.1, scalar(t), "t"});
  }
  return out;
}

RealMatrix orthogonal(std::mt19937_64& rng, Index n) {
  Eigen::HouseholderQR<RealMatrix> qr(random_matrix(rng, n, n));
  return qr.householderQ();
}

// 2x2 shear family written out independently of the generator.
RealMatrix shear(double t1, double t2) {
  RealMatrix P(2, 2);
  P << 1.0, 8.0 * t1, -8.0 * t2, 1.0;
  RealMatrix D = RealMatrix::Zero(2, 2);
  D(0, 0) = 0.9;
  D(1, 1) = 0.5;
  return P * D * P.inverse();
}

}  // namespace

TEST_CASE("1-D interpolation weights") {
  ParameterInterpolator interp({scalar(0.3), scalar(0.1), scalar(0.2)});
  CHECK(interp.scheme() == InterpScheme::PiecewiseLinear1D);
  auto w = interp.weights(scalar(0.15));
  CHECK(w.w(1) == doctest::Approx(0.5));
  CHECK(w.w(2) == doctest::Approx(0.5));
  CHECK(w.w(0) == 0.0);
  CHECK_FALSE(w.extrapolated);

  w = interp.weights(scalar(0.2));
  CHECK(w.w == (RealVector(3) << 0, 0, 1).finished());

  w = interp.weights(scalar(0.4));
  CHECK(w.extrapolated);
  CHECK(w.w(0) == doctest::Approx(2.0));
  CHECK(w.w(2) == doctest::Approx(-1.0));

  CHECK_THROWS_AS(ParameterInterpolator({scalar(0.1), scalar(0.1)}), Error);
  CHECK_THROWS_AS(interp.weights(pair(0.1, 0.2)), Error);
}

TEST_CASE("multi-D interpolation is exact at knots and for affine functions") {
  std::mt19937_64 rng(4);
  std::vector<RealVector> knots;
  for (int l = 0; l < 7; ++l) knots.push_back(random_matrix(rng, 2, 1));
  ParameterInterpolator interp(knots);
  CHECK(interp.scheme() == InterpScheme::PolyharmonicAffine);

  for (std::size_t l = 0; l < knots.size(); ++l) {
    const RealVector w = interp.weights(knots[l]).w;
    for (Index j = 0; j < w.size(); ++j) {
      CHECK(std::abs(w(j) - (j == static_cast<Index>(l) ? 1.0 : 0.0)) <= 1e-12);
    }
  }

  const RealVector a = random_matrix(rng, 2, 1);
  RealVector values(7);
  for (Index l = 0; l < 7; ++l) values(l) = 0.7 + a.dot(knots[static_cast<std::size_t>(l)]);
  for (int trial = 0; trial < 5; ++trial) {
    const RealVector t = 0.5 * random_matrix(rng, 2, 1);
    CHECK(std::abs(interp.weights(t).w.dot(values) - (0.7 + a.dot(t))) <= 1e-10);
  }
}

TEST_CASE("stacked DMD with one trajectory is exact DMD") {
  std::mt19937_64 rng(11);
  const RealMatrix M = random_stable(rng, 6, 0.9);
  const RealVector x0 = random_matrix(rng, 6, 1);
  SnapshotSet s{matrix_powers(M, x0, 25), 0.1, scalar(0.5), "only"};
  const auto stacked = fit_stacked({s}, 4);
  const auto pairs = build_snapshot_pairs(s);
  const auto dmd = fit_dmd(pairs.X, pairs.Xplus, 4, 0.1);

  CHECK((stacked.modes[0] - dmd.Phi).cwiseAbs().maxCoeff() <= 1e-10);
  const auto pred = predict_stacked(stacked, scalar(0.5), x0, 40);
  const RealMatrix ref = predict_dmd(dmd, x0, 40);
  for (Index k = 0; k < ref.cols(); ++k) {
    CHECK((pred.states.col(k) - ref.col(k)).norm() <= 1e-10 * std::max(1.0, ref.col(k).norm()));
  }
}

TEST_CASE("stacked DMD knot consistency and parameter-independent data") {
  std::mt19937_64 rng(17);
  const RealMatrix A = 0.95 * orthogonal(rng, 6);
  const RealMatrix B = RealMatrix::Zero(6, 6);
  const auto sets = family(rng, A, B, {0.0, 0.5, 1.0}, 20);
  const auto model = fit_stacked(sets, 6);
  const RealVector x0 = random_matrix(rng, 6, 1);

  for (std::size_t l = 0; l < sets.size(); ++l) {
    const auto pred = predict_stacked(model, sets[l].theta, x0, 30);
    const RealMatrix ref = modal_trajectory(model.modes[l], model.global.Omega, x0, 0.1, 30);
    CHECK((pred.states - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
  }

  const auto pred = predict_stacked(model, scalar(0.37), x0, 40);
  CHECK_FALSE(pred.extrapolated);
  CHECK_FALSE(pred.divergence.has_value());
  CHECK(max_column_rel_error(matrix_powers(A, x0, 40), pred.states) <= 1e-6);

  const auto pairs = build_snapshot_pairs(sets[0]);
  const RealMatrix dmd_pred = predict_dmd(fit_dmd(pairs.X, pairs.Xplus, 6, 0.1), x0, 40);
  CHECK(max_column_rel_error(dmd_pred, pred.states) <= 1e-8);

  CHECK(predict_stacked(model, scalar(1.3), x0, 5).extrapolated);
  CHECK_THROWS_AS(predict_stacked(model, scalar(0.2), RealVector::Ones(3), 5), Error);
}

TEST_CASE("rKOI reproduces training operators and affine families") {
  std::mt19937_64 rng(23);
  const Index n = 6;
  const RealMatrix A = 0.9 * orthogonal(rng, n);
  RealMatrix B = random_matrix(rng, n, n);
  B *= 0.05 / B.norm();
  const auto sets = family(rng, A, B, {-1.0, 0.0, 0.6, 1.0}, 20);
  const auto model = fit_rkoi(sets, n);
  CHECK(model.rank() == n);

  for (std::size_t l = 0; l < sets.size(); ++l) {
    CHECK((rkoi_operator(model, sets[l].theta) - model.operators[l]).cwiseAbs().maxCoeff() <= 1e-10);
    const RealMatrix truth = model.basis.transpose() * (A + sets[l].theta(0) * B) * model.basis;
    CHECK(rel_fro(model.operators[l], truth) <= 1e-8);
  }
  for (double t : {-0.55, 0.3, 0.77}) {
    const RealMatrix truth = model.basis.transpose() * (A + t * B) * model.basis;
    CHECK(rel_fro(rkoi_operator(model, scalar(t)), truth) <= 1e-8);
    const RealVector x0 = random_matrix(rng, n, 1);
    const auto pred = predict_rkoi(model, scalar(t), x0, 50);
    CHECK_FALSE(pred.divergence.has_value());
    CHECK(max_column_rel_error(matrix_powers(A + t * B, x0, 50), pred.states) <= 1e-6);
  }

  CHECK_THROWS_AS(fit_rkoi({sets[0]}, 3), Error);
}

TEST_CASE("rKOI divergence on the 2-D shear family") {
  const std::vector<RealVector> corners = {pair(0, 0), pair(1, 0), pair(0, 1), pair(1, 1)};
  const RealVector x0 = (RealVector(2) << 1.0, 0.3).finished();
  std::vector<SnapshotSet> sets;
  for (const auto& c : corners) {
    sets.push_back({matrix_powers(shear(c(0), c(1)), x0, 15), 1.0, c, "corner"});
    CHECK(shear(c(0), c(1)).eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(0.9));
  }
  const auto model = fit_rkoi(sets, 2);

  RealMatrix average = RealMatrix::Zero(2, 2);
  for (const auto& c : corners) average += 0.25 * shear(c(0), c(1));
  const double avg_radius = average.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(avg_radius > 1.5);

  const RealMatrix K = model.basis * rkoi_operator(model, pair(0.5, 0.5)) * model.basis.transpose();
  CHECK(rel_fro(K, average) <= 1e-8);

  const auto pred = predict_rkoi(model, pair(0.5, 0.5), x0, 100);
  REQUIRE(pred.divergence.has_value());
  CHECK(pred.divergence->spectral_radius == doctest::Approx(avg_radius).epsilon(1e-8));
  CHECK(pred.states.cols() == 101);
  CHECK(divergence_growth_bound(100) == doctest::Approx(1.1));
}

TEST_CASE("rKOI flags non-diagonalizable and overflowing predictions") {
  RKOIModel model;
  model.basis = RealMatrix::Identity(2, 2);
  model.dt = 1.0;
  model.thetas = {scalar(0.0), scalar(1.0)};
  model.interpolator = ParameterInterpolator(model.thetas);
  RealMatrix jordan(2, 2);
  jordan << 0.5, 1.0, 0.0, 0.5;
  model.operators = {jordan, jordan};
  const auto defective = predict_rkoi(model, scalar(0.5), RealVector::Ones(2), 10);
  REQUIRE(defective.divergence.has_value());
  CHECK(defective.divergence->reason.find("diagonalizable") != std::string::npos);

  // Radius below the growth bound for a short horizon, but the long horizon
  // is caught by the spectral guard instead of overflowing silently.
  model.operators = {1.05 * RealMatrix::Identity(2, 2), 1.05 * RealMatrix::Identity(2, 2)};
  CHECK_FALSE(predict_rkoi(model, scalar(0.5), RealVector::Ones(2), 10).divergence.has_value());
  CHECK(predict_rkoi(model, scalar(0.5), RealVector::Ones(2), 1000).divergence.has_value());
}
