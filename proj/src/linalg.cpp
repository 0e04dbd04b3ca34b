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

#include "gpkrr/linalg.hpp"

#include <cmath>
#include <sstream>

#include "gpkrr/error.hpp"

namespace gpkrr {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

SpdFactor SpdFactor::factor(const Matrix& a, const JitterPolicy& policy) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "factor_spd expects a non-empty square matrix");
  }
  if (policy.rungs.empty()) {
    throw Error(ErrorKind::InvalidArgument, "jitter ladder is empty");
  }
  for (std::size_t i = 1; i < policy.rungs.size(); ++i) {
    if (policy.rungs[i] < policy.rungs[i - 1] || policy.rungs[i - 1] < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "jitter ladder must be nonnegative and ascending");
    }
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::FactorizationFailed, "matrix has non-finite entries");
  }

  const Matrix sym = symmetrize(a);
  const double scale = policy.relative_to_mean_diagonal ? sym.diagonal().mean() : 1.0;
  const Index n = sym.rows();
  for (double rung : policy.rungs) {
    const double jitter = rung * scale;
    if (jitter < 0.0) continue;
    Eigen::LLT<Matrix> llt(sym + jitter * Matrix::Identity(n, n));
    if (llt.info() != Eigen::Success) continue;
    Matrix lower = llt.matrixL();
    const auto diag = lower.diagonal();
    if (!(diag.array() > 0.0).all() || !diag.allFinite()) continue;
    return SpdFactor(std::move(lower), jitter);
  }
  std::ostringstream msg;
  msg << n << "x" << n << " matrix is not positive definite at any of "
      << policy.rungs.size() << " jitter rungs";
  throw Error(ErrorKind::FactorizationFailed, msg.str());
}

Matrix SpdFactor::solve_lower(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "solve: right-hand side has wrong row count");
  }
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Matrix SpdFactor::solve_upper(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "solve: right-hand side has wrong row count");
  }
  return lower_.transpose().triangularView<Eigen::Upper>().solve(b);
}

Matrix SpdFactor::solve(const Matrix& b) const {
  Matrix w = solve_lower(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(w);
}

Vector SpdFactor::solve(const Vector& b) const {
  if (b.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "solve: right-hand side has wrong size");
  }
  Vector w = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(w);
}

double SpdFactor::quadratic_form(const Vector& b) const {
  if (b.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "quadratic_form: vector has wrong size");
  }
  const Vector w = lower_.triangularView<Eigen::Lower>().solve(b);
  return w.squaredNorm();
}

double SpdFactor::logdet() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

Matrix SpdFactor::inverse() const {
  return solve(Matrix(Matrix::Identity(dim(), dim())));
}

double operator_norm(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "operator_norm expects a square matrix");
  }
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    return operator_norm_power(a);
  }
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm_power(const Matrix& a, const PowerIterationOptions& opts) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "operator_norm expects a square matrix");
  }
  const Index n = a.rows();
  if (n == 0 || a.isZero(0.0)) return 0.0;
  // Iterate with A^2 so that eigenvalues +/-s of equal modulus do not stall.
  const Matrix sym = symmetrize(a);
  const Matrix sq = sym * sym;
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  // Perturb the start so it is unlikely to be orthogonal to the top eigenvector.
  for (Index i = 0; i < n; ++i) v(i) += 1e-3 * static_cast<double>(i + 1) / static_cast<double>(n);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Vector w = sq * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    w /= norm;
    if (it > 0 && std::abs(next - estimate) <= opts.relative_tolerance * std::abs(next)) {
      return std::sqrt(next);
    }
    estimate = next;
    v = std::move(w);
  }
  throw Error(ErrorKind::NoConvergence, "power iteration did not converge");
}

double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace gpkrr
