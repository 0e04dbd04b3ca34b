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

#ifndef GPKRR_EXACT_HPP
#define GPKRR_EXACT_HPP

#include "gpkrr/dataset.hpp"
#include "gpkrr/kernels.hpp"
#include "gpkrr/linalg.hpp"

namespace gpkrr {

/// Kernel ridge regression over the full RKHS,
///   f_hat = argmin (1/n) sum_i (y_i - f(x_i))^2 + lambda |f|^2,
/// with f_hat = k_X(.)^T alpha and alpha = (k_XX + n lambda I)^{-1} y.
class KrrModel {
 public:
  static KrrModel fit(const Kernel& k, const Dataset& data, double ridge);

  double predict(PointRef x) const;
  Vector predict_all(const Points& xs) const;
  /// f_hat(x_i) at the training inputs.
  Vector fitted_values() const { return train_gram_ * coefficients_; }
  /// |f_hat|^2_{H_k} = alpha^T k_XX alpha
  double rkhs_norm_sq() const { return coefficients_.dot(train_gram_ * coefficients_); }
  /// d/dx_j f_hat(x) by central differences.
  double partial_derivative(PointRef x, Index j, double step = 1e-5) const;

  const Kernel& kernel() const { return kernel_; }
  const Points& train_inputs() const { return train_inputs_; }
  const Vector& coefficients() const { return coefficients_; }
  const Matrix& train_gram() const { return train_gram_; }
  double ridge() const { return ridge_; }

 private:
  KrrModel(Kernel k, Points x, Matrix gram, Vector alpha, double ridge)
      : kernel_(std::move(k)), train_inputs_(std::move(x)), train_gram_(std::move(gram)),
        coefficients_(std::move(alpha)), ridge_(ridge) {}

  Kernel kernel_;
  Points train_inputs_;
  Matrix train_gram_;
  Vector coefficients_;
  double ridge_;
};

inline KrrModel fit_krr(const Kernel& k, const Dataset& data, double ridge) {
  return KrrModel::fit(k, data, ridge);
}
inline double predict_krr(const KrrModel& model, PointRef x) { return model.predict(x); }

/// Zero-mean GP posterior given noisy observations,
///   m_bar(x)    = k_X(x)^T (k_XX + s2 I)^{-1} y
///   k_bar(x,x') = k(x,x') - k_X(x)^T (k_XX + s2 I)^{-1} k_X(x')
class GpPosterior {
 public:
  static GpPosterior fit(const Kernel& k, const Dataset& data, double noise_var);

  double mean(PointRef x) const;
  double cov(PointRef x, PointRef x2) const;
  double variance(PointRef x) const { return cov(x, x); }
  Matrix cov_gram(const Points& xs) const;
  double partial_derivative(PointRef x, Index j, double step = 1e-5) const;

  const Kernel& kernel() const { return kernel_; }
  const Points& train_inputs() const { return train_inputs_; }
  const Vector& alpha() const { return alpha_; }
  const SpdFactor& factor() const { return factor_; }
  double noise_var() const { return noise_var_; }

 private:
  GpPosterior(Kernel k, Points x, double s2, SpdFactor f, Vector alpha)
      : kernel_(std::move(k)), train_inputs_(std::move(x)), noise_var_(s2),
        factor_(std::move(f)), alpha_(std::move(alpha)) {}

  Kernel kernel_;
  Points train_inputs_;
  double noise_var_;
  SpdFactor factor_;
  Vector alpha_;
};

inline GpPosterior fit_gpr(const Kernel& k, const Dataset& data, double noise_var) {
  return GpPosterior::fit(k, data, noise_var);
}
inline double posterior_cov(const GpPosterior& post, PointRef x, PointRef x2) {
  return post.cov(x, x2);
}

/// log N(y; 0, k_XX + s2 I)
double log_marginal_likelihood(const Kernel& k, const Dataset& data, double noise_var);

/// R_n(f; y) = (1/n) sum (y_i - f(x_i))^2 + lambda |f|^2_{H_k}
double regularized_risk(const Vector& f_at_inputs, double rkhs_norm_sq, const Dataset& data,
                        double ridge);

}  // namespace gpkrr

#endif  // GPKRR_EXACT_HPP
