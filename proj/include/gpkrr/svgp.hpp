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

#ifndef GPKRR_SVGP_HPP
#define GPKRR_SVGP_HPP

#include <cstdint>

#include "gpkrr/dataset.hpp"
#include "gpkrr/linalg.hpp"
#include "gpkrr/nystrom.hpp"

namespace gpkrr {

/// Variational parameters nu = (Z, mu, Sigma) of the sparse GP family
///   m^nu(x)     = k_Z(x)^T k_ZZ^{-1} mu
///   k^nu(x, x') = k(x,x') - q(x,x') + k_Z(x)^T k_ZZ^{-1} Sigma k_ZZ^{-1} k_Z(x')
class SvgpState {
 public:
  /// Sigma must factor without jitter.
  static SvgpState create(InducingSet ind, Vector mu, Matrix sigma);

  const InducingSet& inducing() const { return inducing_; }
  const Vector& mu() const { return mu_; }
  const Matrix& sigma() const { return sigma_; }
  const SpdFactor& sigma_factor() const { return sigma_factor_; }
  /// psi(mu) = k_ZZ^{-1} mu
  const Vector& span_coefficients() const { return alpha_; }

  double mean(PointRef x) const { return inducing_.cross(x).dot(alpha_); }
  double cov(PointRef x, PointRef x2) const;
  Matrix cov_gram(const Points& xs) const;

  /// phi(x) = Sigma^{1/2} k_ZZ^{-1} k_Z(x), Sigma^{1/2} the symmetric root.
  Vector feature(PointRef x) const;
  /// <phi(x), phi(x')>
  double feature_kernel(PointRef x, PointRef x2) const { return feature(x).dot(feature(x2)); }

  /// KL(N(mu, Sigma) || N(0, k_ZZ))
  double kl_to_prior() const;

 private:
  SvgpState(InducingSet ind, Vector mu, Matrix sigma, SpdFactor sf, Vector alpha, Matrix root)
      : inducing_(std::move(ind)), mu_(std::move(mu)), sigma_(std::move(sigma)),
        sigma_factor_(std::move(sf)), alpha_(std::move(alpha)), sigma_root_(std::move(root)) {}

  InducingSet inducing_;
  Vector mu_;
  Matrix sigma_;
  SpdFactor sigma_factor_;
  Vector alpha_;
  Matrix sigma_root_;
};

inline double variational_mean(const SvgpState& s, PointRef x) { return s.mean(x); }
inline double variational_cov(const SvgpState& s, PointRef x, PointRef x2) { return s.cov(x, x2); }
inline Vector feature_map_phi(const SvgpState& s, PointRef x) { return s.feature(x); }

/// Random admissible state: mu ~ N(0, I), Sigma = B B^T + 0.05 I with
/// B entries N(0, 1/4), drawn from stream (seed, stream).
SvgpState random_state(const InducingSet& ind, std::uint64_t seed, std::uint64_t stream);

/// Forward map mu -> span coefficients alpha = k_ZZ^{-1} mu of psi(mu) in M.
Vector psi_map(const InducingSet& ind, const Vector& mu);
/// Inverse on M: coefficients alpha -> f_Z = k_ZZ alpha.
Vector psi_inverse(const InducingSet& ind, const Vector& alpha);

/// ELBO L(nu) = -KL(N(mu,Sigma) || N(0,k_ZZ)) + E_{Q^nu}[log N(y; F_X, s2 I)], closed form.
double elbo(const SvgpState& state, const Dataset& data, double noise_var);

/// Gradient of the ELBO with respect to mu.
Vector elbo_gradient_mu(const SvgpState& state, const Dataset& data, double noise_var);

/// Terms of -2 s2 L(nu):
///   fit_plus_norm   = sum_i (y_i - m^nu(x_i))^2 + s2 mu^T k_ZZ^{-1} mu
///   sigma_quadratic = sum_i k_Z(x_i)^T k_ZZ^{-1} Sigma k_ZZ^{-1} k_Z(x_i)
///   kl_regularizer  = s2 (tr(k_ZZ^{-1} Sigma) + log det k_ZZ - log det Sigma - m)
///   residual_trace  = tr(k_XX - q_XX)
/// The Gaussian likelihood also contributes the mu- and Sigma-free constant
/// log_normalizer = n s2 log(2 pi s2), so that
///   four_term_sum() + log_normalizer == total_check.
struct ElboBreakdown {
  double fit_plus_norm = 0.0;
  double sigma_quadratic = 0.0;
  double kl_regularizer = 0.0;
  double residual_trace = 0.0;
  double log_normalizer = 0.0;
  double total_check = 0.0;  // -2 s2 L(nu)

  double four_term_sum() const {
    return fit_plus_norm + sigma_quadratic + kl_regularizer + residual_trace;
  }
  /// four_term_sum() - total_check
  double residual_four_terms() const { return four_term_sum() - total_check; }
  /// four_term_sum() + log_normalizer - total_check
  double residual_with_normalizer() const { return four_term_sum() + log_normalizer - total_check; }
};

ElboBreakdown elbo_breakdown(const SvgpState& state, const Dataset& data, double noise_var);

/// mu*    = k_ZZ (s2 k_ZZ + k_ZX k_XZ)^{-1} k_ZX y
/// Sigma* = k_ZZ (k_ZZ + k_ZX k_XZ / s2)^{-1} k_ZZ
SvgpState optimal_parameters(const InducingSet& ind, const Dataset& data, double noise_var);

/// Optimal variational posterior GP(m*, k*) in closed form; state() gives the
/// same process through (mu*, Sigma*).
class OptimalPosterior {
 public:
  static OptimalPosterior fit(const InducingSet& ind, const Dataset& data, double noise_var);

  /// k_Z(x)^T (s2 k_ZZ + k_ZX k_XZ)^{-1} k_ZX y
  double mean(PointRef x) const { return dtc_.mean(x); }
  /// k(x,x') - q(x,x') + k_Z(x)^T (k_ZZ + k_ZX k_XZ / s2)^{-1} k_Z(x')
  double cov(PointRef x, PointRef x2) const;
  double partial_derivative(PointRef x, Index j, double step = 1e-5) const {
    return dtc_.partial_derivative(x, j, step);
  }

  const SvgpState& state() const { return state_; }
  const DtcPosterior& dtc() const { return dtc_; }

 private:
  OptimalPosterior(DtcPosterior dtc, SvgpState state)
      : dtc_(std::move(dtc)), state_(std::move(state)) {}

  DtcPosterior dtc_;
  SvgpState state_;
};

inline OptimalPosterior optimal_posterior(const InducingSet& ind, const Dataset& data,
                                          double noise_var) {
  return OptimalPosterior::fit(ind, data, noise_var);
}

/// L* = -1/2 log det(q_XX + s2 I) - 1/2 y^T (q_XX + s2 I)^{-1} y
///      - n/2 log 2 pi - tr(k_XX - q_XX) / (2 s2)
double optimal_elbo(const InducingSet& ind, const Dataset& data, double noise_var);

struct FixedPointOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;
  /// Natural-gradient step; 1 makes each update exact.
  double step_size = 1.0;
};

struct FixedPointResult {
  SvgpState state;
  int iterations = 0;
  double last_change = 0.0;
  /// max-abs of the mu-stationarity gradient at the returned state.
  double gradient_residual = 0.0;
};

/// Iterates the stationarity conditions of the ELBO in (mu, Sigma):
///   precision <- (1 - rho) precision + rho (k_ZZ^{-1} k_ZX k_XZ k_ZZ^{-1} / s2 + k_ZZ^{-1})
///   mu        <- mu - rho precision^{-1} grad_mu E[l(u)]
/// until successive states differ by less than the tolerance (max-abs).
/// Throws NoConvergence after max_iterations.
FixedPointResult fixed_point_solver(const InducingSet& ind, const Dataset& data, double noise_var,
                                    const FixedPointOptions& opts = {});

}  // namespace gpkrr

#endif  // GPKRR_SVGP_HPP
