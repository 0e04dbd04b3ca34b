/*
 * Copyright 2026 The gpkrr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>

#include <gtest/gtest.h>

#include "gpkrr/error.hpp"
#include "gpkrr/linalg.hpp"
#include "gpkrr/random.hpp"
#include "support/oracles.hpp"

namespace gpkrr {
namespace {

Matrix random_spd(Index n, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j) a.col(j) = standard_normal(n, rng);
  Matrix s = a * a.transpose();
  s.diagonal().array() += 0.5;
  return s;
}

Matrix random_symmetric(Index n, std::uint64_t seed) {
  auto rng = make_stream(seed, 1);
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j) a.col(j) = standard_normal(n, rng);
  return symmetrize(a);
}

TEST(SpdFactor, IdentityWithZeroRung) {
  const SpdFactor f = SpdFactor::factor(Matrix::Identity(3, 3), JitterPolicy::absolute({0.0}));
  EXPECT_TRUE(f.lower().isApprox(Matrix::Identity(3, 3)));
  EXPECT_EQ(f.jitter_used(), 0.0);
}

TEST(SpdFactor, HandCholesky) {
  Matrix a(2, 2);
  a << 4, 2, 2, 3;
  const SpdFactor f = SpdFactor::factor(a);
  EXPECT_NEAR(f.lower()(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(f.lower()(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(f.lower()(1, 1), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(f.lower()(0, 1), 0.0);
}

TEST(SpdFactor, RankOneNeedsJitter) {
  Vector v(2);
  v << 1, 1;
  const Matrix a = v * v.transpose();
  const SpdFactor f =
      SpdFactor::factor(a, JitterPolicy::absolute({0.0, 1e-10, 1e-8, 1e-6}));
  EXPECT_GT(f.jitter_used(), 0.0);
  Matrix shifted = a;
  shifted.diagonal().array() += f.jitter_used();
  EXPECT_LE((f.reconstruct() - shifted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpdFactor, IndefiniteFails) {
  Matrix a(2, 2);
  a << 1, 0, 0, -1;
  try {
    SpdFactor::factor(a);
    FAIL() << "expected FactorizationFailed";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FactorizationFailed);
  }
}

TEST(SpdFactor, AsymmetricInputIsSymmetrized) {
  Matrix a(2, 2);
  a << 4, 1, 3, 3;
  Matrix sym(2, 2);
  sym << 4, 2, 2, 3;
  EXPECT_LE((SpdFactor::factor(a).reconstruct() - sym).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SpdFactor, InverseOfTwoByTwo) {
  Matrix a(2, 2);
  a << 4, 2, 2, 3;
  Matrix expected(2, 2);
  expected << 3.0 / 8.0, -0.25, -0.25, 0.5;
  const Matrix inv = SpdFactor::factor(a).solve(Matrix(Matrix::Identity(2, 2)));
  EXPECT_LE((inv - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpdFactor, IdentitySolveReturnsRightHandSide) {
  const SpdFactor f = SpdFactor::factor(Matrix::Identity(4, 4));
  const Matrix b = random_symmetric(4, 3);
  EXPECT_EQ(f.solve(b), b);
}

TEST(SpdFactor, SolveRoundTrip) {
  const Matrix a = random_spd(20, 11);
  const Matrix b = random_symmetric(20, 12).leftCols(5);
  const Matrix x = SpdFactor::factor(a).solve(b);
  EXPECT_LE((a * x - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SpdFactor, QuadraticFormAndSolveLower) {
  const Matrix a = random_spd(6, 5);
  const SpdFactor f = SpdFactor::factor(a);
  Vector b = Vector::LinSpaced(6, -1.0, 2.0);
  EXPECT_NEAR(f.quadratic_form(b), b.dot(testing::lu_inverse(a) * b), 1e-10);
  const Matrix w = f.solve_lower(Matrix(b));
  EXPECT_NEAR(w.squaredNorm(), f.quadratic_form(b), 1e-10);
}

TEST(SpdFactor, TriangularSolvesComposeToSolve) {
  const Matrix a = random_spd(7, 6);
  const SpdFactor f = SpdFactor::factor(a);
  const Matrix b = random_symmetric(7, 7).leftCols(3);
  EXPECT_LE((f.solve_upper(f.solve_lower(b)) - f.solve(b)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((f.lower().transpose() * f.solve_upper(b) - b).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(f.solve_upper(Matrix::Ones(3, 1)), Error);
}

TEST(Logdet, SimpleCases) {
  EXPECT_EQ(SpdFactor::factor(Matrix::Identity(5, 5)).logdet(), 0.0);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 2, 3;
  EXPECT_NEAR(SpdFactor::factor(d).logdet(), std::log(6.0), 1e-15);
}

TEST(Logdet, MatchesEigenvalueOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix a = random_spd(10, seed);
    EXPECT_NEAR(SpdFactor::factor(a).logdet(), testing::eig_logdet(a), 1e-8);
  }
}

TEST(OperatorNorm, SimpleCases) {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1, -3, 2;
  EXPECT_NEAR(operator_norm(d), 3.0, 1e-14);
  EXPECT_EQ(operator_norm(Matrix::Zero(4, 4)), 0.0);
}

TEST(OperatorNorm, MatchesEigensolveAndPowerIteration) {
  const Matrix a = random_symmetric(15, 21);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const double expected = eig.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(operator_norm(a), expected, 1e-8);
  EXPECT_NEAR(operator_norm_power(a), expected, 1e-8 * expected);
}

TEST(OperatorNorm, PowerIterationReportsNoConvergence) {
  const Matrix a = random_symmetric(15, 22);
  try {
    operator_norm_power(a, {1e-300, 2});
    FAIL() << "expected NoConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
}

TEST(MinEigenvalue, Diagonal) {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1, -3, 2;
  EXPECT_NEAR(min_eigenvalue(d), -3.0, 1e-14);
}

}  // namespace
}  // namespace gpkrr
