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

#ifndef GPKRR_NYSTROM_HPP
#define GPKRR_NYSTROM_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "gpkrr/dataset.hpp"
#include "gpkrr/kernels.hpp"
#include "gpkrr/linalg.hpp"

namespace gpkrr {

/// Inducing inputs Z together with the factored k_ZZ. Defines the subspace
/// M = span(k(., z_1), ..., k(., z_m)) and the approximate kernel
/// q(x, x') = k_Z(x)^T k_ZZ^{-1} k_Z(x').
class InducingSet {
 public:
  /// Throws InvalidCount for m = 0 or repeated rows of z.
  static InducingSet create(const Kernel& k, Points z, const JitterPolicy& policy = {});

  Index size() const { return points_.rows(); }
  const Kernel& kernel() const { return kernel_; }
  const Points& points() const { return points_; }
  const Matrix& kzz() const { return kzz_; }
  const SpdFactor& kzz_factor() const { return factor_; }

  /// k_Z(x)
  Vector cross(PointRef x) const { return gpkrr::cross(kernel_, points_, x); }
  /// k_ZX (m x n)
  Matrix cross_gram(const Points& xs) const { return gram(kernel_, points_, xs); }

  /// Span coefficients k_ZZ^{-1} f_Z of the orthogonal projection P_M f.
  Vector project(const Vector& f_at_z) const;

  double q(PointRef x, PointRef x2) const;
  Matrix q_gram(const Points& a, const Points& b) const;
  Matrix q_gram(const Points& a) const;
  /// q(x_i, x_i) for every row.
  Vector q_diag(const Points& xs) const;

 private:
  InducingSet(Kernel k, Points z, Matrix kzz, SpdFactor f)
      : kernel_(std::move(k)), points_(std::move(z)), kzz_(std::move(kzz)), factor_(std::move(f)) {}

  Kernel kernel_;
  Points points_;
  Matrix kzz_;
  SpdFactor factor_;
};

inline Vector project_onto_M(const InducingSet& ind, const Vector& f_at_z) {
  return ind.project(f_at_z);
}
inline double approx_kernel_q(const InducingSet& ind, PointRef x, PointRef x2) {
  return ind.q(x, x2);
}

/// tr(k_XX - q_XX)
double trace_gap(const InducingSet& ind, const Points& xs);

/// argmin_b |y - k_XZ b|^2 + shift b^T k_ZZ b, solved by QR on the stacked
/// least-squares system so that the condition number of k_ZZ is not squared.
Vector penalized_span_coefficients(const InducingSet& ind, const Matrix& kzx, const Vector& y,
                                  double shift);

/// Nystrom KRR: f_bar = k_Z(.)^T beta,
///   beta = (n lambda k_ZZ + k_ZX k_XZ)^{-1} k_ZX y.
class NystromModel {
 public:
  static NystromModel fit(const InducingSet& ind, const Dataset& data, double ridge);
  /// Same estimator obtained as KRR with kernel q over the n training points,
  /// then mapped back to span coefficients on Z.
  static NystromModel fit_via_q(const InducingSet& ind, const Dataset& data, double ridge);

  double predict(PointRef x) const;
  Vector predict_all(const Points& xs) const;
  double partial_derivative(PointRef x, Index j, double step = 1e-5) const;
  /// beta^T k_ZZ beta
  double rkhs_norm_sq() const;
  /// The same norm taken in H_q: beta^T q_ZZ beta.
  double rkhs_norm_sq_q() const;
  const InducingSet& inducing() const { return inducing_; }
  const Vector& beta() const { return beta_; }
  /// L^T beta with L L^T = k_ZZ; predictions are taken through these.
  const Vector& whitened() const { return whitened_; }
  double ridge() const { return ridge_; }

 private:
  NystromModel(InducingSet ind, Vector whitened, double ridge);

  InducingSet inducing_;
  Vector whitened_;
  Vector beta_;
  double ridge_;
};

inline NystromModel fit_nystrom(const InducingSet& ind, const Dataset& data, double ridge) {
  return NystromModel::fit(ind, data, ridge);
}
inline NystromModel fit_nystrom_via_q(const InducingSet& ind, const Dataset& data, double ridge) {
  return NystromModel::fit_via_q(ind, data, ridge);
}

/// GP posterior under the prior GP(0, q) (deterministic training conditional).
///   mean(x)    = k_Z(x)^T (s2 k_ZZ + k_ZX k_XZ)^{-1} k_ZX y
///   cov(x, x') = k_Z(x)^T (k_ZZ + k_ZX k_XZ / s2)^{-1} k_Z(x')
class DtcPosterior {
 public:
  static DtcPosterior fit(const InducingSet& ind, const Dataset& data, double noise_var);

  double mean(PointRef x) const { return inducing_.cross(x).dot(mean_weights_); }
  double cov(PointRef x, PointRef x2) const;
  Matrix cov_gram(const Points& xs) const;
  double partial_derivative(PointRef x, Index j, double step = 1e-5) const;

  const InducingSet& inducing() const { return inducing_; }
  double noise_var() const { return noise_var_; }

 private:
  DtcPosterior(InducingSet ind, double s2, Vector w, SpdFactor f)
      : inducing_(std::move(ind)), noise_var_(s2), mean_weights_(std::move(w)),
        cov_factor_(std::move(f)) {}

  InducingSet inducing_;
  double noise_var_;
  Vector mean_weights_;
  SpdFactor cov_factor_;  // of k_ZZ + k_ZX k_XZ / s2
};

inline DtcPosterior dtc_posterior(const InducingSet& ind, const Dataset& data, double noise_var) {
  return DtcPosterior::fit(ind, data, noise_var);
}

struct UniformSelection {
  std::uint64_t seed = 0;
};
struct GreedyTraceSelection {};
using SelectionStrategy = std::variant<UniformSelection, GreedyTraceSelection>;

struct Selection {
  std::vector<Index> indices;
  InducingSet inducing;
};

/// Picks m of the n inputs. Uniform: seeded sampling without replacement.
/// Greedy: pivoted Cholesky on k_XX, each step taking the largest residual
/// diagonal k(x,x) - q(x,x) (ties to the lowest index).
Selection select_inducing(const Kernel& k, const Points& inputs, Index m,
                          const SelectionStrategy& strategy);

}  // namespace gpkrr

#endif  // GPKRR_NYSTROM_HPP
