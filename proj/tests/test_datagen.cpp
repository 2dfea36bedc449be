#include "doctest.h"

#include "pidmd/datagen.hpp"
#include "pidmd/errors.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace pidmd;
using namespace pidmd::testing;

namespace {

RealVector scalar(double v) { return RealVector::Constant(1, v); }

std::vector<RealVector> grid2(std::initializer_list<std::pair<double, double>> pts) {
  std::vector<RealVector> out;
  for (auto [a, b] : pts) out.push_back((RealVector(2) << a, b).finished());
  return out;
}

}  // namespace

TEST_CASE("affine generator without parameter functions is a plain linear system") {
  AffineSystemSpec spec;
  spec.n = 6;
  spec.seed = 3;
  spec.h = ParamMap::none(1);
  const auto data = gen_affine_trajectories(spec, {scalar(0.0), scalar(1.0)}, 15);
  REQUIRE(data.trajectories.size() == 2);
  CHECK(data.truth.B.empty());
  for (const auto& s : data.trajectories) {
    CHECK(s.states.cols() == 16);
    for (Index k = 0; k < 15; ++k) {
      CHECK((s.states.col(k + 1) - data.truth.A * s.states.col(k)).norm() == 0.0);
    }
  }
}

TEST_CASE("affine generator hits the stability target and reproduces itself") {
  AffineSystemSpec spec;
  spec.n = 8;
  spec.seed = 42;
  spec.spectral_radius_target = 0.97;
  spec.h = ParamMap::coordinates(2, Normalization::identity(2));
  const auto train = grid2({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto test = grid2({{0.5, 0.5}, {0.2, 0.9}, {1.4, -0.3}});
  const auto data = gen_affine_trajectories(spec, train, 30, {}, test);

  double worst = 0.0;
  for (const auto& t : train) worst = std::max(worst, spectral_radius(data.truth.operator_at(t)));
  for (const auto& t : test) worst = std::max(worst, spectral_radius(data.truth.operator_at(t)));
  CHECK(worst <= 0.97 + 1e-6);
  CHECK(worst == doctest::Approx(0.97).epsilon(1e-9));

  for (const auto& s : data.trajectories) {
    const RealMatrix K = data.truth.A + s.theta(0) * data.truth.B[0] + s.theta(1) * data.truth.B[1];
    const RealMatrix again = matrix_powers(K, s.states.col(0), 30);
    CHECK((again - s.states).cwiseAbs().maxCoeff() <= 1e-12);
  }

  const auto twice = gen_affine_trajectories(spec, train, 30, {}, test);
  for (std::size_t l = 0; l < train.size(); ++l) {
    CHECK(twice.trajectories[l].states == data.trajectories[l].states);
    CHECK(twice.trajectories[l].label == data.trajectories[l].label);
  }
  spec.seed = 43;
  CHECK(gen_affine_trajectories(spec, train, 30, {}, test).trajectories[0].states !=
        data.trajectories[0].states);
}

TEST_CASE("affine generator options") {
  AffineSystemSpec spec;
  spec.n = 4;
  spec.seed = 5;
  spec.h = ParamMap::coordinates(1, Normalization::identity(1));

  const RealVector x0 = RealVector::LinSpaced(4, 1.0, 4.0);
  const auto given = gen_affine_trajectories(spec, {scalar(0.2)}, 5, {x0}, {}, 0.25);
  CHECK(given.trajectories[0].states.col(0) == x0);
  CHECK(given.trajectories[0].dt == 0.25);

  spec.noise_std = 0.01;
  const auto noisy = gen_affine_trajectories(spec, {scalar(0.2)}, 5, {x0});
  const double gap = (noisy.trajectories[0].states - given.trajectories[0].states).norm();
  CHECK(gap > 0.0);
  CHECK(gap < 0.2);

  spec.noise_std = 0.0;
  spec.spectral_radius_target = 1.5;
  CHECK_THROWS_AS(gen_affine_trajectories(spec, {scalar(0.2)}, 5), Error);
  spec.spectral_radius_target = 0.9;
  CHECK_THROWS_AS(gen_affine_trajectories(spec, {scalar(0.2)}, 5, {x0, x0}), Error);
}

TEST_CASE("shear family corners are stable but their average is not") {
  ShearFamilySpec spec;
  const auto corners = grid2({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  RealMatrix average = RealMatrix::Zero(2, 2);
  for (const auto& c : corners) {
    const RealMatrix K = spec.operator_at(c);
    CHECK(spectral_radius(K) == doctest::Approx(0.9));
    average += 0.25 * K;
  }
  CHECK(spectral_radius(spec.operator_at(grid2({{0.5, 0.5}})[0])) == doctest::Approx(0.9));
  // Spectral radius of the 2x2 average from its trace and determinant.
  const double tr = average.trace();
  const double det = average.determinant();
  const double disc = tr * tr / 4.0 - det;
  const double radius = disc >= 0 ? std::abs(tr / 2.0) + std::sqrt(disc) : std::sqrt(det);
  CHECK(radius > 1.5);
  CHECK(spectral_radius(average) == doctest::Approx(radius));

  const auto sets = gen_shear_trajectories(spec, corners, 10, RealVector::Ones(2));
  CHECK(sets.size() == 4);
  CHECK((sets[3].states.col(1) - spec.operator_at(corners[3]) * RealVector::Ones(2)).norm() == 0.0);
}

TEST_CASE("advection without viscosity shifts the initial condition") {
  AdvDiffSpec spec;
  spec.n = 256;
  spec.dt = 0.01;
  spec.initial_condition = "sine";
  spec.ic_param = 1.0;
  const auto sets = gen_advdiff(spec, {0.0}, 100, 0);
  const RealVector x = spec.grid();
  const double t = 100 * spec.dt;
  const RealVector exact = (x.array() - spec.c * t).sin();
  const RealVector u = sets[0].states.col(100);
  CHECK((u - exact).norm() / exact.norm() <= 1e-2);
}

TEST_CASE("pure diffusion decays a Fourier mode at the heat-equation rate") {
  AdvDiffSpec spec;
  spec.n = 256;
  spec.c = 0.0;
  spec.dt = 0.005;
  spec.initial_condition = "sine";
  spec.ic_param = 2.0;
  const double nu = 0.05;
  const auto sets = gen_advdiff(spec, {nu}, 200, 0);
  const double t = 200 * spec.dt;
  const RealVector exact = std::exp(-nu * 4.0 * t) * spec.initial_state();
  const RealVector u = sets[0].states.col(200);
  CHECK((u - exact).norm() / exact.norm() <= 1e-3);
}

TEST_CASE("advdiff sampling, stability bounds and labels") {
  AdvDiffSpec spec;
  spec.n = 64;
  spec.substeps = 3;
  const auto a = gen_advdiff(spec, {0.01, 0.02}, 10, 4);
  CHECK(a.size() == 2);
  CHECK(a[0].states.cols() == 11);
  CHECK(a[0].dt == doctest::Approx(0.03));
  CHECK(a[1].theta(0) == 0.02);
  CHECK(a[0].label == "nu=0.01");

  // Dropping samples continues the same trajectory.
  const auto full = gen_advdiff(spec, {0.01}, 14, 0);
  CHECK((full[0].states.rightCols(11) - a[0].states).norm() == 0.0);
  CHECK(gen_advdiff(spec, {0.01}, 14, 0)[0].states == full[0].states);

  spec.dt = 0.2;
  CHECK_THROWS_AS(gen_advdiff(spec, {0.01}, 5, 0), Error);
  spec.dt = 0.01;
  CHECK_THROWS_AS(gen_advdiff(spec, {50.0}, 5, 0), Error);
  spec.initial_condition = "square";
  CHECK_THROWS_AS(gen_advdiff(spec, {0.01}, 5, 0), Error);

  CHECK(theta_label("theta", (RealVector(2) << 0.5, 0.125).finished()) == "theta=0.5_0.125");
}
