#include <cmath>

#include "doctest.h"
#include "specinf/errors.hpp"
#include "specinf/lowrank.hpp"
#include "specinf/spectral.hpp"
#include "test_util.hpp"

using namespace specinf;

namespace {

void check_contract(const Matrix& a, const Spectrum& s) {
  const double scale = std::max(1.0, a.norm());
  for (int j = 0; j < s.retained; ++j) {
    CHECK(std::abs(s.vector(j).norm() - 1.0) <= 1e-10);
    CHECK((a * s.vector(j) - s.lambda(j) * s.vector(j)).norm() <= 1e-8 * scale);
    for (int k = 0; k < j; ++k) CHECK(std::abs(s.vector(j).dot(s.vector(k))) <= 1e-8);
    if (j > 0) CHECK(s.lambda(j - 1) >= s.lambda(j));
  }
}

}  // namespace

TEST_CASE("eig_sym zero matrix") {
  const Matrix a = Matrix::Zero(3, 3);
  const Spectrum s = eig_sym(a);
  CHECK(s.retained == 3);
  CHECK(s.eigenvalues.isZero());
  check_contract(a, s);
}

TEST_CASE("eig_sym diagonal") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << -1.0, 2.0;
  const Spectrum s = eig_sym(a);
  CHECK(s.lambda(0) == doctest::Approx(2.0));
  CHECK(s.lambda(1) == doctest::Approx(-1.0));
  CHECK(std::abs(s.vector(0)[1]) == doctest::Approx(1.0));
  CHECK(std::abs(s.vector(1)[0]) == doctest::Approx(1.0));
}

TEST_CASE("eig_sym 2x2 off-diagonal") {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const Spectrum s = eig_sym(a);
  CHECK(s.lambda(0) == doctest::Approx(1.0));
  CHECK(s.lambda(1) == doctest::Approx(-1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.vector(0)[0]) == doctest::Approx(r));
  CHECK(s.vector(0)[0] * s.vector(0)[1] == doctest::Approx(0.5));
  CHECK(s.vector(1)[0] * s.vector(1)[1] == doctest::Approx(-0.5));
}

TEST_CASE("eig_sym random contract, reconstruction and trace") {
  Rng rng(21);
  for (int n : {1, 2, 5, 17, 40}) {
    const Matrix a = testutil::random_symmetric(rng, n, 3.0);
    const Spectrum s = eig_sym(a);
    CHECK(s.retained == n);
    CHECK(s.n == n);
    check_contract(a, s);
    CHECK((a - reconstruct(s)).norm() <= 1e-8 * std::max(1.0, a.norm()));
    CHECK(std::abs(s.eigenvalues.sum() - a.trace()) <= 1e-8 * std::max(1.0, std::abs(a.trace())));
  }
}

TEST_CASE("eig_sym rejects non-finite input") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = INFINITY;
  CHECK_THROWS_AS(eig_sym(a), InvalidArgument);
  CHECK_THROWS_AS(eig_sym(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("truncate_rank examples") {
  CHECK(truncate_rank(eig_sym(Matrix::Zero(4, 4))).retained == 0);

  Rng rng(22);
  const Vector v = testutil::random_orthonormal(rng, 6, 1).col(0);
  const Matrix rank1 = v * v.transpose();
  const Spectrum t1 = truncate_rank(eig_sym(rank1));
  CHECK(t1.retained == 1);
  CHECK(t1.lambda(0) == doctest::Approx(1.0));
  CHECK(t1.eigenvectors.cols() == 1);

  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 1.0, 1e-15;
  CHECK(truncate_rank(eig_sym(d), 1e-9).retained == 1);

  CHECK_THROWS_AS(truncate_rank(eig_sym(d), 0.0), InvalidArgument);
  CHECK_THROWS_AS(truncate_rank(eig_sym(d), 1.0), InvalidArgument);
}

TEST_CASE("truncate_rank reconstruction bound") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 8;
    const Matrix q = testutil::random_orthonormal(rng, n, n);
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam[i] = (i % 3 == 0) ? rng.uniform(-2, 2) : rng.uniform(-1e-11, 1e-11);
    const Matrix a = q * lam.asDiagonal() * q.transpose();
    const Spectrum full = eig_sym(a);
    const double tol = 1e-9;
    const Spectrum t = truncate_rank(full, tol);
    int expect = 0;
    const double top = full.eigenvalues.cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j) expect += std::abs(full.lambda(j)) > tol * top;
    CHECK(t.retained == expect);
    CHECK((a - reconstruct(t)).norm() <= n * tol * top);
  }
}

TEST_CASE("make_spectrum sorts pairs") {
  Matrix v = Matrix::Identity(3, 3);
  const Spectrum s = make_spectrum(Vector{{-1.0, 3.0, 0.5}}, v);
  CHECK(s.lambda(0) == 3.0);
  CHECK(s.vector(0)[1] == 1.0);
  CHECK(s.lambda(2) == -1.0);
  CHECK(s.vector(2)[0] == 1.0);
}

TEST_CASE("eigenvector sign flips move the low-rank estimate by at most twice its bound") {
  Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 9;
    const Matrix q = testutil::random_orthonormal(rng, n, 2);
    const Vector lam{{rng.uniform(0.2, 2.0), -rng.uniform(0.2, 2.0)}};
    const Vector theta = testutil::random_vector(rng, n, -1, 1);
    const Spectrum s = make_spectrum(lam, q);
    Matrix flipped = s.eigenvectors;
    flipped.col(trial % 2) *= -1.0;
    const Spectrum f = make_spectrum(s.eigenvalues, flipped);
    const double c = choose_c_for_epsilon(s, n, 0.1);
    const double bound = theorem_error_bound(s, n, c);
    const double a = estimate_log_z_lowrank(theta, s, c).log_z;
    const double b = estimate_log_z_lowrank(theta, f, c).log_z;
    CHECK(std::abs(a - b) <= 2.0 * bound);
  }
}
