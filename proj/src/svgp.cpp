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

#include "gpkrr/svgp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gpkrr/error.hpp"
#include "gpkrr/random.hpp"

namespace gpkrr {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

void check_inputs(const InducingSet& ind, const Dataset& data) {
  validate(data);
  if (data.dim() != ind.kernel().input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "dataset and kernel dimensions differ");
  }
}

double kernel_diag_sum(const Kernel& k, const Points& xs) {
  double total = 0.0;
  for (Index i = 0; i < xs.rows(); ++i) total += k(xs.row(i), xs.row(i));
  return total;
}

}  // namespace

SvgpState SvgpState::create(InducingSet ind, Vector mu, Matrix sigma) {
  const Index m = ind.size();
  if (mu.size() != m || sigma.rows() != m || sigma.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch, "mu and Sigma must match the number of inducing points");
  }
  sigma = symmetrize(sigma);
  SpdFactor sf = SpdFactor::factor(sigma, JitterPolicy::none());
  Vector alpha = ind.kzz_factor().solve(mu);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  Matrix root = eig.operatorSqrt();
  return SvgpState(std::move(ind), std::move(mu), std::move(sigma), std::move(sf),
                   std::move(alpha), std::move(root));
}

double SvgpState::cov(PointRef x, PointRef x2) const {
  const Vector a = inducing_.kzz_factor().solve(inducing_.cross(x));
  const Vector b = inducing_.kzz_factor().solve(inducing_.cross(x2));
  return inducing_.kernel()(x, x2) - inducing_.q(x, x2) + a.dot(sigma_ * b);
}

Matrix SvgpState::cov_gram(const Points& xs) const {
  const Matrix a = inducing_.kzz_factor().solve(inducing_.cross_gram(xs));
  return gram(inducing_.kernel(), xs) - inducing_.q_gram(xs) + a.transpose() * sigma_ * a;
}

Vector SvgpState::feature(PointRef x) const {
  return sigma_root_ * inducing_.kzz_factor().solve(inducing_.cross(x));
}

double SvgpState::kl_to_prior() const {
  const SpdFactor& kf = inducing_.kzz_factor();
  const double m = static_cast<double>(inducing_.size());
  const double trace_term = kf.solve(sigma_).trace();
  return 0.5 * (trace_term + kf.quadratic_form(mu_) - m + kf.logdet() - sigma_factor_.logdet());
}

SvgpState random_state(const InducingSet& ind, std::uint64_t seed, std::uint64_t stream) {
  auto rng = make_stream(seed, stream);
  const Index m = ind.size();
  Vector mu = standard_normal(m, rng);
  Matrix b(m, m);
  for (Index j = 0; j < m; ++j) b.col(j) = 0.5 * standard_normal(m, rng);
  Matrix sigma = b * b.transpose();
  sigma.diagonal().array() += 0.05;
  return SvgpState::create(ind, std::move(mu), std::move(sigma));
}

Vector psi_map(const InducingSet& ind, const Vector& mu) { return ind.project(mu); }

Vector psi_inverse(const InducingSet& ind, const Vector& alpha) {
  if (alpha.size() != ind.size()) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient vector must match inducing set");
  }
  return ind.kzz() * alpha;
}

double elbo(const SvgpState& state, const Dataset& data, double noise_var) {
  check_inputs(state.inducing(), data);
  require_positive(noise_var, "noise variance");
  const InducingSet& ind = state.inducing();
  const Matrix kzx = ind.cross_gram(data.inputs);
  const Matrix a = ind.kzz_factor().solve(kzx);  // k_ZZ^{-1} k_ZX
  const Vector mean_x = a.transpose() * state.mu();
  // Marginal variances k^nu(x_i, x_i).
  const Vector q_diag = kzx.cwiseProduct(a).colwise().sum().transpose();
  const Vector s_diag = a.cwiseProduct(state.sigma() * a).colwise().sum().transpose();
  double expected_sq = (data.targets - mean_x).squaredNorm();
  for (Index i = 0; i < data.size(); ++i) {
    expected_sq += ind.kernel()(data.inputs.row(i), data.inputs.row(i)) - q_diag(i) + s_diag(i);
  }
  const double n = static_cast<double>(data.size());
  const double expected_loglik =
      -0.5 * n * std::log(2.0 * std::numbers::pi * noise_var) - expected_sq / (2.0 * noise_var);
  return -state.kl_to_prior() + expected_loglik;
}

Vector elbo_gradient_mu(const SvgpState& state, const Dataset& data, double noise_var) {
  check_inputs(state.inducing(), data);
  require_positive(noise_var, "noise variance");
  const InducingSet& ind = state.inducing();
  const Matrix kzx = ind.cross_gram(data.inputs);
  const Vector resid = data.targets - kzx.transpose() * state.span_coefficients();
  return ind.kzz_factor().solve(Vector(kzx * resid / noise_var - state.mu()));
}

ElboBreakdown elbo_breakdown(const SvgpState& state, const Dataset& data, double noise_var) {
  check_inputs(state.inducing(), data);
  require_positive(noise_var, "noise variance");
  const InducingSet& ind = state.inducing();
  const SpdFactor& kf = ind.kzz_factor();
  const double n = static_cast<double>(data.size());
  const double m = static_cast<double>(ind.size());

  const Matrix kzx = ind.cross_gram(data.inputs);
  // Whitened quantities with k_ZZ = L L^T.
  const Matrix w = kf.solve_lower(kzx);                                        // L^{-1} k_ZX
  const Matrix s_white = kf.solve_lower(Matrix(kf.solve_lower(state.sigma()).transpose()));  // L^{-1} Sigma L^{-T}

  ElboBreakdown out;
  const Vector resid = data.targets - kzx.transpose() * psi_map(ind, state.mu());
  out.fit_plus_norm = resid.squaredNorm() + noise_var * kf.quadratic_form(state.mu());
  out.sigma_quadratic = (s_white * (w * w.transpose())).trace();
  out.kl_regularizer =
      noise_var * (s_white.trace() + kf.logdet() - state.sigma_factor().logdet() - m);
  out.residual_trace = kernel_diag_sum(ind.kernel(), data.inputs) - w.squaredNorm();
  out.log_normalizer = n * noise_var * std::log(2.0 * std::numbers::pi * noise_var);
  out.total_check = -2.0 * noise_var * elbo(state, data, noise_var);
  return out;
}

SvgpState optimal_parameters(const InducingSet& ind, const Dataset& data, double noise_var) {
  check_inputs(ind, data);
  require_positive(noise_var, "noise variance");
  const Matrix kzx = ind.cross_gram(data.inputs);
  const SpdFactor bf = SpdFactor::factor(noise_var * ind.kzz() + kzx * kzx.transpose());
  Vector mu = ind.kzz() * penalized_span_coefficients(ind, kzx, data.targets, noise_var);
  // k_ZZ (k_ZZ + G / s2)^{-1} k_ZZ = s2 k_ZZ (s2 k_ZZ + G)^{-1} k_ZZ
  const Matrix half = bf.solve_lower(ind.kzz());
  Matrix sigma = noise_var * half.transpose() * half;
  // Sigma* is the inverse Hessian of the ELBO in mu, so one Newton step from
  // the direct solve removes rounding amplified by an ill-conditioned k_ZZ.
  const SvgpState direct = SvgpState::create(ind, mu, sigma);
  mu += sigma * elbo_gradient_mu(direct, data, noise_var);
  return SvgpState::create(ind, std::move(mu), std::move(sigma));
}

OptimalPosterior OptimalPosterior::fit(const InducingSet& ind, const Dataset& data,
                                       double noise_var) {
  return OptimalPosterior(DtcPosterior::fit(ind, data, noise_var),
                          optimal_parameters(ind, data, noise_var));
}

double OptimalPosterior::cov(PointRef x, PointRef x2) const {
  const InducingSet& ind = dtc_.inducing();
  return ind.kernel()(x, x2) - ind.q(x, x2) + dtc_.cov(x, x2);
}

double optimal_elbo(const InducingSet& ind, const Dataset& data, double noise_var) {
  check_inputs(ind, data);
  require_positive(noise_var, "noise variance");
  Matrix qxx = ind.q_gram(data.inputs);
  const double gap = kernel_diag_sum(ind.kernel(), data.inputs) - qxx.trace();
  qxx.diagonal().array() += noise_var;
  const SpdFactor f = SpdFactor::factor(qxx);
  const double n = static_cast<double>(data.size());
  return -0.5 * f.logdet() - 0.5 * f.quadratic_form(data.targets) -
         0.5 * n * std::log(2.0 * std::numbers::pi) - gap / (2.0 * noise_var);
}

FixedPointResult fixed_point_solver(const InducingSet& ind, const Dataset& data, double noise_var,
                                    const FixedPointOptions& opts) {
  check_inputs(ind, data);
  require_positive(noise_var, "noise variance");
  if (!(opts.tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (!(opts.step_size > 0.0 && opts.step_size <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "step size must lie in (0, 1]");
  }
  if (opts.max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");

  const SpdFactor& kf = ind.kzz_factor();
  const Matrix& kzz = ind.kzz();
  const Matrix kzx = ind.cross_gram(data.inputs);
  const Matrix g = kzx * kzx.transpose();
  const Vector b = kzx * data.targets;
  const double rho = opts.step_size;

  // Precisions are carried congruence-scaled, B = k_ZZ P k_ZZ, so that
  // P^{-1} = k_ZZ B^{-1} k_ZZ never needs an explicit k_ZZ^{-1}. The expected
  // Hessian of l(u) scales to g / s2 + k_ZZ.
  const Matrix hessian_scaled = g / noise_var + kzz;
  Matrix precision_scaled = kzz;  // start from the prior N(0, k_ZZ)
  Vector mu = Vector::Zero(ind.size());
  Matrix sigma = kzz;

  // k_ZZ * grad_mu E[l(u)] evaluated at mu.
  auto scaled_gradient = [&](const Vector& m) -> Vector {
    return (g * kf.solve(m) - b) / noise_var + m;
  };

  for (int it = 1; it <= opts.max_iterations; ++it) {
    precision_scaled = (1.0 - rho) * precision_scaled + rho * hessian_scaled;
    const SpdFactor pf = SpdFactor::factor(precision_scaled);
    Vector next_mu = mu - rho * kzz * pf.solve(scaled_gradient(mu));
    const Matrix half = pf.solve_lower(kzz);
    Matrix next_sigma = symmetrize(half.transpose() * half);

    const double change = std::max((next_mu - mu).cwiseAbs().maxCoeff(),
                                   (next_sigma - sigma).cwiseAbs().maxCoeff());
    mu = std::move(next_mu);
    sigma = std::move(next_sigma);
    if (change < opts.tolerance) {
      const double residual = kf.solve(scaled_gradient(mu)).cwiseAbs().maxCoeff();
      return FixedPointResult{SvgpState::create(ind, mu, sigma), it, change, residual};
    }
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not settle within " << opts.max_iterations << " iterations";
  throw Error(ErrorKind::NoConvergence, msg.str());
}

}  // namespace gpkrr
