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

#include "gpkrr/exact.hpp"

#include <cmath>
#include <numbers>

#include "gpkrr/error.hpp"

namespace gpkrr {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

template <class F>
double central_difference(const F& f, PointRef x, Index j, double step) {
  if (j < 0 || j >= x.size()) throw Error(ErrorKind::DimensionMismatch, "coordinate out of range");
  Point plus = x;
  Point minus = x;
  plus(j) += step;
  minus(j) -= step;
  return (f(plus) - f(minus)) / (2.0 * step);
}

}  // namespace

KrrModel KrrModel::fit(const Kernel& k, const Dataset& data, double ridge) {
  validate(data);
  require_positive(ridge, "ridge");
  const double n = static_cast<double>(data.size());
  Matrix gram_xx = gram(k, data.inputs);
  Matrix reg = gram_xx;
  reg.diagonal().array() += n * ridge;
  const SpdFactor f = SpdFactor::factor(reg);
  Vector alpha = f.solve(data.targets);
  return KrrModel(k, data.inputs, std::move(gram_xx), std::move(alpha), ridge);
}

double KrrModel::predict(PointRef x) const {
  return cross(kernel_, train_inputs_, x).dot(coefficients_);
}

Vector KrrModel::predict_all(const Points& xs) const {
  return gram(kernel_, xs, train_inputs_) * coefficients_;
}

double KrrModel::partial_derivative(PointRef x, Index j, double step) const {
  return central_difference([this](PointRef p) { return predict(p); }, x, j, step);
}

GpPosterior GpPosterior::fit(const Kernel& k, const Dataset& data, double noise_var) {
  validate(data);
  require_positive(noise_var, "noise variance");
  Matrix cov = gram(k, data.inputs);
  cov.diagonal().array() += noise_var;
  SpdFactor f = SpdFactor::factor(cov);
  Vector alpha = f.solve(data.targets);
  return GpPosterior(k, data.inputs, noise_var, std::move(f), std::move(alpha));
}

double GpPosterior::mean(PointRef x) const {
  return cross(kernel_, train_inputs_, x).dot(alpha_);
}

double GpPosterior::cov(PointRef x, PointRef x2) const {
  const Vector kx = cross(kernel_, train_inputs_, x);
  const Vector kx2 = cross(kernel_, train_inputs_, x2);
  const Vector wx = factor_.solve_lower(kx);
  const Vector wx2 = factor_.solve_lower(kx2);
  return kernel_(x, x2) - wx.dot(wx2);
}

Matrix GpPosterior::cov_gram(const Points& xs) const {
  const Matrix w = factor_.solve_lower(gram(kernel_, train_inputs_, xs));
  return gram(kernel_, xs) - w.transpose() * w;
}

double GpPosterior::partial_derivative(PointRef x, Index j, double step) const {
  return central_difference([this](PointRef p) { return mean(p); }, x, j, step);
}

double log_marginal_likelihood(const Kernel& k, const Dataset& data, double noise_var) {
  validate(data);
  require_positive(noise_var, "noise variance");
  Matrix cov = gram(k, data.inputs);
  cov.diagonal().array() += noise_var;
  const SpdFactor f = SpdFactor::factor(cov);
  const double n = static_cast<double>(data.size());
  return -0.5 * f.logdet() - 0.5 * f.quadratic_form(data.targets) -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

double regularized_risk(const Vector& f_at_inputs, double rkhs_norm_sq, const Dataset& data,
                        double ridge) {
  if (f_at_inputs.size() != data.size()) {
    throw Error(ErrorKind::DimensionMismatch, "function values and targets differ in length");
  }
  const double n = static_cast<double>(data.size());
  return (data.targets - f_at_inputs).squaredNorm() / n + ridge * rkhs_norm_sq;
}

}  // namespace gpkrr
