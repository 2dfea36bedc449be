#include "doctest.h"

#include "pidmd/errors.hpp"
#include "pidmd/linalg.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace pidmd;
using pidmd::testing::random_complex;
using pidmd::testing::random_matrix;
using pidmd::testing::spectrum_distance;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("truncated_svd keeps the leading triplets") {
  SUBCASE("identity") {
    const auto svd = truncated_svd(RealMatrix::Identity(3, 3), 2);
    CHECK(svd.rank() == 2);
    CHECK(svd.S(0) == doctest::Approx(1.0));
    CHECK(svd.S(1) == doctest::Approx(1.0));
    CHECK((svd.U.transpose() * svd.U - RealMatrix::Identity(2, 2)).norm() < 1e-12);
    CHECK_FALSE(svd.rank_deficient);
  }
  SUBCASE("diagonal") {
    RealMatrix d = RealVector((RealVector(3) << 3, 2, 1).finished()).asDiagonal();
    const auto svd = truncated_svd(d, 2);
    CHECK(svd.S(0) == doctest::Approx(3.0));
    CHECK(svd.S(1) == doctest::Approx(2.0));
    CHECK(svd.discarded_energy == doctest::Approx(1.0 / 14.0).epsilon(1e-14));
  }
}

TEST_CASE("truncated_svd shrinks on rank deficiency") {
  std::mt19937_64 rng(11);
  const RealMatrix m = random_matrix(rng, 10, 4) * random_matrix(rng, 4, 6);
  const auto svd = truncated_svd(m, 6);
  CHECK(svd.rank() == 4);
  CHECK(svd.rank_deficient);
  CHECK(svd.requested_rank == 6);

  // Independent route: singular values are square roots of the eigenvalues of
  // M^T M, computed by the symmetric solver.
  Eigen::SelfAdjointEigenSolver<RealMatrix> gram(m.transpose() * m);
  RealVector ref = gram.eigenvalues().reverse().head(4).cwiseSqrt();
  CHECK((svd.S - ref).norm() / ref.norm() < 1e-10);
}

TEST_CASE("truncated_svd reconstruction error equals discarded energy") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix m = random_matrix(rng, 12, 9);
    const Index r = 1 + trial % 8;
    const auto svd = truncated_svd(m, r);
    const RealMatrix approx = svd.U * svd.S.asDiagonal() * svd.V.transpose();
    const double err2 = (m - approx).squaredNorm();
    CHECK(std::abs(err2 - svd.discarded_energy * m.squaredNorm()) <= 1e-8 * err2 + 1e-14);
    CHECK((svd.U.transpose() * svd.U - RealMatrix::Identity(r, r)).norm() < 1e-10);
    CHECK((svd.V.transpose() * svd.V - RealMatrix::Identity(r, r)).norm() < 1e-10);
    for (Index i = 1; i < r; ++i) CHECK(svd.S(i) <= svd.S(i - 1));
    CHECK(svd.S.minCoeff() > 0.0);
  }
}

TEST_CASE("truncated_svd energy mode and pair adjustment") {
  RealMatrix d = RealVector((RealVector(4) << 4, 3, 3, 1).finished()).asDiagonal();
  const auto energy = truncated_svd(d, Truncation::by_energy(0.5));
  CHECK(energy.rank() == 2);  // 16/35 < 0.5 <= 25/35

  Truncation t = Truncation::fixed(2);
  t.keep_pairs = true;
  const auto paired = truncated_svd(d, t);
  CHECK(paired.rank() == 3);
  CHECK(paired.pair_adjustment == 1);

  t.rank = 3;
  const auto unsplit = truncated_svd(d, t);
  CHECK(unsplit.rank() == 3);
  CHECK(unsplit.pair_adjustment == 0);
}

TEST_CASE("truncated_svd errors") {
  CHECK(kind_of([] { truncated_svd(RealMatrix::Zero(3, 3), 1); }) == ErrorKind::DegenerateInput);
  RealMatrix bad = RealMatrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK(kind_of([&] { truncated_svd(bad, 1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("eig on small closed-form cases") {
  SUBCASE("diagonal") {
    RealMatrix d = RealVector((RealVector(2) << 2, 3).finished()).asDiagonal();
    const auto e = eig(d);
    CHECK(e.lambdas(0).real() == doctest::Approx(3.0));
    CHECK(e.lambdas(1).real() == doctest::Approx(2.0));
    CHECK(std::abs(std::abs(e.W(1, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(e.W(0, 1)) - 1.0) < 1e-14);
  }
  SUBCASE("rotation generator") {
    RealMatrix r(2, 2);
    r << 0, -1, 1, 0;
    const auto e = eig(r);
    CHECK(std::abs(e.lambdas(0) - Complex(0, 1)) < 1e-14);
    CHECK(std::abs(e.lambdas(1) - Complex(0, -1)) < 1e-14);
  }
}

TEST_CASE("eig residual and conjugate symmetry on random matrices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const RealMatrix m = random_matrix(rng, 8, 8);
    const auto e = eig(m);
    const ComplexMatrix mc = m.cast<Complex>();
    const double res = (mc * e.W - e.W * e.lambdas.asDiagonal()).norm() / m.norm();
    CHECK(res <= 1e-8);
    CHECK(e.residual <= 1e-8);
    for (Index j = 0; j < 8; ++j) CHECK(std::abs(e.W.col(j).norm() - 1.0) < 1e-12);
    CHECK(conjugate_closed(e.lambdas, 1e-8));
    // Same spectrum as the characteristic roots from an independent solver.
    CHECK(spectrum_distance(e.lambdas, m.eigenvalues()) < 1e-8);
  }
}

TEST_CASE("eig flags defective matrices") {
  RealMatrix jordan(2, 2);
  jordan << 1, 1, 0, 1;
  const auto e = eig(jordan);
  CHECK(e.quality() > 1e-6);
  CHECK(kind_of([] { eig(RealMatrix::Zero(2, 3)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("conjugate_closed rejects unpaired complex values") {
  ComplexVector v(2);
  v << Complex(1, 1), Complex(1, 0.5);
  CHECK_FALSE(conjugate_closed(v, 1e-8));
  v << Complex(1, 1), Complex(1, -1);
  CHECK(conjugate_closed(v, 1e-8));
}

TEST_CASE("pinv closed forms") {
  CHECK((pinv(ComplexMatrix(ComplexMatrix::Identity(4, 4))) - ComplexMatrix::Identity(4, 4)).norm() <
        1e-14);
  ComplexMatrix two(1, 1);
  two(0, 0) = 2.0;
  CHECK(std::abs(pinv(two)(0, 0) - 0.5) < 1e-15);

  std::mt19937_64 rng(17);
  const ComplexMatrix tall = random_complex(rng, 6, 3);
  CHECK((pinv(tall) * tall - ComplexMatrix::Identity(3, 3)).norm() < 1e-10);
  CHECK(kind_of([] { pinv(ComplexMatrix(ComplexMatrix::Zero(2, 2))); }) ==
        ErrorKind::DegenerateInput);
}

TEST_CASE("pinv satisfies the Penrose identities") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Index rows = 2 + trial % 5;
    const Index cols = 2 + (trial * 3) % 6;
    const Index rank = 1 + trial % std::min(rows, cols);
    const ComplexMatrix a = random_complex(rng, rows, rank) * random_complex(rng, rank, cols);
    const ComplexMatrix p = pinv(a, 1e-10);
    const double scale = a.norm();
    CHECK((a * p * a - a).norm() <= 1e-8 * scale);
    CHECK((p * a * p - p).norm() <= 1e-8 * p.norm());
    CHECK((a * p - (a * p).adjoint()).norm() <= 1e-8);
    CHECK((p * a - (p * a).adjoint()).norm() <= 1e-8);
  }
}

TEST_CASE("evolve_modes") {
  SUBCASE("t = 0 is the plain modal sum") {
    std::mt19937_64 rng(2);
    const ComplexMatrix phi = random_complex(rng, 4, 3);
    const ComplexVector omega = random_complex(rng, 3, 1);
    const ComplexVector amps = random_complex(rng, 3, 1);
    const auto s = evolve_modes(phi, omega, amps, 0.0);
    CHECK((s.values - (phi * amps).real()).norm() < 1e-14);
  }
  SUBCASE("zero frequency mode is constant") {
    const ComplexMatrix phi = ComplexMatrix::Ones(1, 1);
    const ComplexVector omega = ComplexVector::Zero(1);
    const ComplexVector amps = ComplexVector::Ones(1);
    for (double t : {0.0, 0.3, 17.0}) CHECK(evolve_modes(phi, omega, amps, t).values(0) == 1.0);
  }
  SUBCASE("harmonic oscillator closed form") {
    // x' = [[0, -1], [1, 0]] x has modes (1, -+i)/sqrt2 with omega = +-i.
    ComplexMatrix phi(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    phi << Complex(s, 0), Complex(s, 0), Complex(0, -s), Complex(0, s);
    ComplexVector omega(2);
    omega << Complex(0, 1), Complex(0, -1);
    const RealVector x0 = (RealVector(2) << 1, 0).finished();
    const ComplexVector amps = pinv(phi) * x0.cast<Complex>();
    for (double t : {0.0, 0.5, 1.0, 2.5, 10.0}) {
      const auto st = evolve_modes(phi, omega, amps, t);
      CHECK(std::abs(st.values(0) - std::cos(t)) < 1e-10);
      CHECK(std::abs(st.values(1) - std::sin(t)) < 1e-10);
      CHECK(st.imag_norm <= 1e-6 * st.values.norm());
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK(kind_of([] {
            evolve_modes(ComplexMatrix::Ones(2, 2), ComplexVector::Zero(3), ComplexVector::Zero(2),
                         0.0);
          }) == ErrorKind::InvalidInput);
  }
}

TEST_CASE("modal evolution at sample times reproduces discrete powers") {
  std::mt19937_64 rng(29);
  const double dt = 0.1;
  for (int trial = 0; trial < 5; ++trial) {
    const RealMatrix m = pidmd::testing::random_stable(rng, 6, 0.97);
    const auto e = eig(m);
    const ComplexVector omega = continuous_eigenvalues(e.lambdas, dt);
    const RealVector x0 = random_matrix(rng, 6, 1);
    const ComplexVector amps = pinv(e.W) * x0.cast<Complex>();
    ComplexVector lk = ComplexVector::Ones(6);
    for (Index k = 0; k <= 40; ++k) {
      const RealVector discrete = (e.W * (lk.array() * amps.array()).matrix()).real();
      const auto st = evolve_modes(e.W, omega, amps, static_cast<double>(k) * dt);
      CHECK((st.values - discrete).norm() <= 1e-8 * std::max(1.0, discrete.norm()));
      CHECK(st.imag_norm <= 1e-6 * std::max(st.values.norm(), 1e-300));
      lk = lk.array() * e.lambdas.array();
    }
  }
}

TEST_CASE("continuous_eigenvalues rejects singular eigenvalues") {
  ComplexVector l(2);
  l << Complex(0.5, 0), Complex(1e-15, 0);
  CHECK(kind_of([&] { continuous_eigenvalues(l, 1.0); }) == ErrorKind::SingularEigenvalue);
  l(1) = Complex(-1.0, 0.0);
  const auto omega = continuous_eigenvalues(l, 0.5);
  CHECK(std::abs(std::exp(omega(1) * 0.5) - l(1)) < 1e-14);
}
