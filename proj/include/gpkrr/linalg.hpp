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

#ifndef GPKRR_LINALG_HPP
#define GPKRR_LINALG_HPP

#include <Eigen/Dense>

#include <vector>

namespace gpkrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Diagonal loading tried in order until a Cholesky factorization succeeds.
// When relative_to_mean_diagonal is set, every rung is multiplied by the
// mean of diag(A) before it is added.
struct JitterPolicy {
  std::vector<double> rungs{0.0, 1e-12, 1e-10, 1e-8, 1e-6};
  bool relative_to_mean_diagonal = true;

  static JitterPolicy none() { return {{0.0}, false}; }
  static JitterPolicy absolute(std::vector<double> rungs) {
    return {std::move(rungs), false};
  }
};

// Cholesky factor L of (A + jitter I), A symmetrized first.
class SpdFactor {
 public:
  static SpdFactor factor(const Matrix& a, const JitterPolicy& policy = {});

  Index dim() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }
  double jitter_used() const { return jitter_; }

  Matrix solve(const Matrix& b) const;
  Vector solve(const Vector& b) const;
  // L^{-1} b, one triangular solve.
  Matrix solve_lower(const Matrix& b) const;
  // L^{-T} b
  Matrix solve_upper(const Matrix& b) const;
  // b^T (A + jitter I)^{-1} b
  double quadratic_form(const Vector& b) const;
  double logdet() const;
  // A^{-1} explicitly; only meant for tests and small diagnostics.
  Matrix inverse() const;
  Matrix reconstruct() const { return lower_ * lower_.transpose(); }

 private:
  SpdFactor(Matrix lower, double jitter)
      : lower_(std::move(lower)), jitter_(jitter) {}

  Matrix lower_;
  double jitter_ = 0.0;
};

inline SpdFactor factor_spd(const Matrix& a, const JitterPolicy& policy = {}) {
  return SpdFactor::factor(a, policy);
}

Matrix symmetrize(const Matrix& a);

// Largest absolute eigenvalue of a symmetric matrix.
double operator_norm(const Matrix& a);

struct PowerIterationOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 10'000;
};

// Operator norm by power iteration on A^2; throws NoConvergence.
double operator_norm_power(const Matrix& a, const PowerIterationOptions& opts = {});

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

}  // namespace gpkrr

#endif  // GPKRR_LINALG_HPP
