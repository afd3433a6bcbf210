#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "apt/errors.hpp"
#include "apt/linalg.hpp"
#include "support/stats.hpp"

using namespace apt;
using testsupport::random_spd;
using testsupport::random_vector;
using testsupport::rel_frobenius_diff;

TEST_CASE("cholesky of identity is identity") {
  Matrix a(3, 3);
  for (int i = 0; i < 3; ++i) a(i, i) = 1.0;
  CholFactor l = chol_from_dense(a);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(l.at(r, c) == doctest::Approx(r == c ? 1.0 : 0.0));
}

TEST_CASE("cholesky 2x2 hand computation") {
  Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 3.0;
  CholFactor l = chol_from_dense(a);
  CHECK(l.at(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(l.at(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l.at(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(l.at(0, 1) == 0.0);
}

TEST_CASE("cholesky reconstructs random SPD matrices") {
  Rng rng = make_stream(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 1 + rep % 8;
    Matrix a = random_spd(d, rng);
    CholFactor l = chol_from_dense(a);
    CHECK(rel_frobenius_diff(l.reconstruct(), a) < 1e-10);
  }
}

TEST_CASE("cholesky strict mode rejects what jitter mode repairs") {
  // Rank-one matrix: second pivot is exactly zero.
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  a(1, 1) = 1.0;
  CHECK_THROWS_AS(chol_from_dense(a, CholMode::Strict), NotPositiveDefinite);
  CholFactor l = chol_from_dense(a, CholMode::Jitter);
  CHECK(rel_frobenius_diff(l.reconstruct(), a) < 1e-8);
}

TEST_CASE("cholesky rejects an indefinite matrix in both modes") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  CHECK_THROWS_AS(chol_from_dense(a, CholMode::Strict), NotPositiveDefinite);
  CHECK_THROWS_AS(chol_from_dense(a, CholMode::Jitter), NotPositiveDefinite);
}

TEST_CASE("rank-one update matches dense recomputation") {
  Rng rng = make_stream(12, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + rep % 8;
    Matrix a = random_spd(d, rng);
    CholFactor l = chol_from_dense(a);
    const double gamma = testsupport::uniform_in(rng, 0.0, 0.999);
    Vector v = random_vector(d, rng, -2.0, 2.0);

    CholFactor updated = chol_rank_one_update(l, gamma, v);

    Matrix expect(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) expect(r, c) = (1.0 - gamma) * a(r, c) + gamma * v[r] * v[c];
    CHECK(rel_frobenius_diff(updated.reconstruct(), expect) < 1e-10);
    for (int i = 0; i < d; ++i) CHECK(updated.at(i, i) > 0.0);
  }
}

TEST_CASE("rank-one update with gamma zero is the original matrix") {
  Rng rng = make_stream(13, 0);
  Matrix a = random_spd(5, rng);
  CholFactor l = chol_from_dense(a);
  Vector v = random_vector(5, rng);
  CholFactor updated = chol_rank_one_update(l, 0.0, v);
  CHECK(rel_frobenius_diff(updated.reconstruct(), a) < 1e-14);
}

TEST_CASE("rank-one update rejects a mismatched vector") {
  CholFactor l(3);
  Vector v(2, 1.0);
  CHECK_THROWS_AS(chol_rank_one_update(l, 0.5, v), DimensionMismatch);
}

TEST_CASE("sample_mvn folds the scale into the factor") {
  Rng rng = make_stream(14, 0);
  Matrix a = random_spd(4, rng);
  CholFactor l = chol_from_dense(a);
  Vector mean = random_vector(4, rng);
  const double s = 1.7;
  Rng r1 = make_stream(99, 1);
  Rng r2 = r1;
  Vector a1 = sample_mvn(mean, l, s, r1);
  Vector a2 = sample_mvn(mean, l.scaled(s), 1.0, r2);
  for (int k = 0; k < 4; ++k) CHECK(a1[k] == a2[k]);
  CHECK(r1 == r2);  // same number of draws consumed
}

TEST_CASE("sample_mvn with identity factor reproduces mean-shifted normals") {
  CholFactor l(2);
  Vector mean{5.0, -3.0};
  Rng rng = make_stream(15, 0);
  double s1 = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    Vector x = sample_mvn(mean, l, 1.0, rng);
    s1 += x[0];
    s2 += x[1];
  }
  CHECK(s1 / n == doctest::Approx(5.0).epsilon(0.01));
  CHECK(s2 / n == doctest::Approx(-3.0).epsilon(0.01));
}

TEST_CASE("ols recovers exact coefficients on noiseless data") {
  // y = 2 x1 - 3 x2 + 5 with deterministic, well-conditioned design.
  const int n = 40;
  Matrix x(n, 2);
  Vector y(n);
  Rng rng = make_stream(16, 0);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = testsupport::uniform_in(rng, -2.0, 2.0);
    x(i, 1) = testsupport::uniform_in(rng, -1.0, 3.0);
    y[i] = 2.0 * x(i, 0) - 3.0 * x(i, 1) + 5.0;
  }
  OlsFit fit = ols_fit(x, y);
  CHECK(fit.coeffs[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.coeffs[1] == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(fit.resid_var == doctest::Approx(0.0).scale(1.0).epsilon(1e-18));
}

TEST_CASE("ols rejects a singular design") {
  const int n = 10;
  Matrix x(n, 2);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i;
    x(i, 1) = 2.0 * i;  // exact duplicate direction
    y[i] = i;
  }
  CHECK_THROWS_AS(ols_fit(x, y), SingularDesign);
}

TEST_CASE("dot and mat_vec") {
  Vector a{1.0, 2.0, 3.0};
  Vector b{4.0, -5.0, 6.0};
  CHECK(dot(a, b) == doctest::Approx(12.0));
  Matrix m(2, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 0;
  m(1, 1) = -1;
  m(1, 2) = 1;
  Vector r = mat_vec(m, a);
  CHECK(r[0] == doctest::Approx(14.0));
  CHECK(r[1] == doctest::Approx(1.0));
}
