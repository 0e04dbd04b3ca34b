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

#include "gpkrr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpkrr/error.hpp"
#include "gpkrr/exact.hpp"
#include "gpkrr/random.hpp"
#include "gpkrr/svgp.hpp"

namespace gpkrr {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

void check_compatible(const Kernel& k, const InducingSet& ind, const Points& xs) {
  if (k.describe() != ind.kernel().describe()) {
    throw Error(ErrorKind::InvalidArgument, "inducing set was built with a different kernel");
  }
  if (xs.cols() != k.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "inputs and kernel dimensions differ");
  }
  if (xs.rows() == 0) throw Error(ErrorKind::InvalidCount, "no training inputs");
}

Matrix shifted(Matrix a, double s) {
  a.diagonal().array() += s;
  return a;
}

// Quantities shared by the fixed-y diagnostics.
struct GapParts {
  double logdet_k = 0.0;
  double logdet_q = 0.0;
  double quad_k = 0.0;
  double quad_q = 0.0;
  double trace_gap = 0.0;
  double opnorm_gap = 0.0;
  double y_sq = 0.0;
};

GapParts gap_parts(const Kernel& k, const Dataset& data, const InducingSet& ind, double s2,
                   bool want_opnorm) {
  validate(data);
  check_compatible(k, ind, data.inputs);
  require_positive(s2, "noise variance");
  const Matrix kxx = gram(k, data.inputs);
  const Matrix qxx = ind.q_gram(data.inputs);
  const SpdFactor kf = SpdFactor::factor(shifted(kxx, s2));
  const SpdFactor qf = SpdFactor::factor(shifted(qxx, s2));
  GapParts p;
  p.logdet_k = kf.logdet();
  p.logdet_q = qf.logdet();
  p.quad_k = kf.quadratic_form(data.targets);
  p.quad_q = qf.quadratic_form(data.targets);
  p.trace_gap = kxx.trace() - qxx.trace();
  if (want_opnorm) p.opnorm_gap = operator_norm(symmetrize(kxx - qxx));
  p.y_sq = data.targets.squaredNorm();
  return p;
}

double ridge_to_noise(const Dataset& data, double ridge) {
  require_positive(ridge, "ridge");
  return static_cast<double>(data.size()) * ridge;
}

}  // namespace

GapDiagnostics gap_diagnostics(const InducingSet& ind, const Points& xs, double noise_var) {
  check_compatible(ind.kernel(), ind, xs);
  require_positive(noise_var, "noise variance");
  const Matrix kxx = gram(ind.kernel(), xs);
  const Matrix qxx = ind.q_gram(xs);
  GapDiagnostics g;
  g.trace_gap = kxx.trace() - qxx.trace();
  g.opnorm_gap = operator_norm(symmetrize(kxx - qxx));
  g.logdet_k = SpdFactor::factor(shifted(kxx, noise_var)).logdet();
  g.logdet_q = SpdFactor::factor(shifted(qxx, noise_var)).logdet();
  return g;
}

std::string to_string(RecordKind kind) {
  return kind == RecordKind::Bound ? "bound" : "identity";
}

double default_tolerance(double rhs) { return 1e-8 * std::max(1.0, std::abs(rhs)); }

BoundRecord make_bound(std::string name, double lhs, double rhs, double tolerance) {
  BoundRecord r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = tolerance;
  r.kind = RecordKind::Bound;
  r.holds = std::isfinite(r.slack) && r.slack >= -tolerance;
  return r;
}

BoundRecord make_identity(std::string name, double lhs, double rhs, double tolerance) {
  BoundRecord r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = tolerance;
  r.kind = RecordKind::Identity;
  r.holds = std::isfinite(r.slack) && std::abs(r.slack) <= tolerance;
  return r;
}

KlPaths kl_paths(const Kernel& k, const Dataset& data, const InducingSet& ind, double noise_var) {
  const GapParts p = gap_parts(k, data, ind, noise_var, false);
  KlPaths out;
  out.via_evidence = log_marginal_likelihood(k, data, noise_var) -
                     elbo(optimal_parameters(ind, data, noise_var), data, noise_var);
  out.via_explicit = 0.5 * (p.logdet_q - p.logdet_k + p.quad_q - p.quad_k +
                            p.trace_gap / noise_var);
  return out;
}

double kl_to_exact_posterior(const Kernel& k, const Dataset& data, const InducingSet& ind,
                             double noise_var) {
  const KlPaths kl = kl_paths(k, data, ind, noise_var);
  const double tol = 1e-8 * std::max(1.0, std::abs(kl.via_evidence));
  if (!(std::abs(kl.via_evidence - kl.via_explicit) <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "KL paths disagree: " << kl.via_evidence << " vs " << kl.via_explicit;
    throw Error(ErrorKind::InternalInconsistency, msg.str());
  }
  return kl.via_evidence;
}

std::vector<BoundRecord> burt_upper_bound(const Kernel& k, const Dataset& data,
                                          const InducingSet& ind, double noise_var) {
  const double kl2 = 2.0 * kl_to_exact_posterior(k, data, ind, noise_var);
  const GapParts p = gap_parts(k, data, ind, noise_var, true);
  const double s2 = noise_var;
  const double tr = p.trace_gap;
  const double op = p.opnorm_gap;
  const double quad_gap = p.quad_q - p.quad_k;
  return {
      make_bound("burt", kl2, (tr / s2) * (p.y_sq / s2 + 1.0)),
      make_bound("burt_intermediate", kl2, (tr / s2) * (p.y_sq / (tr + s2) + 1.0)),
      make_bound("quadratic_gap", quad_gap, p.y_sq * op / (s2 * (op + s2))),
      make_bound("quadratic_gap_trace", quad_gap, p.y_sq * tr / (s2 * (tr + s2))),
  };
}

double excess_risk(const Kernel& k, const Dataset& data, const InducingSet& ind, double ridge) {
  validate(data);
  check_compatible(k, ind, data.inputs);
  require_positive(ridge, "ridge");
  const KrrModel exact = KrrModel::fit(k, data, ridge);
  const NystromModel approx = NystromModel::fit(ind, data, ridge);
  const double r_hat = regularized_risk(exact.fitted_values(), exact.rkhs_norm_sq(), data, ridge);
  const double r_bar =
      regularized_risk(approx.predict_all(data.inputs), approx.rkhs_norm_sq(), data, ridge);
  return r_bar - r_hat;
}

double quadratic_form_gap(const Kernel& k, const Dataset& data, const InducingSet& ind,
                          double noise_var) {
  const GapParts p = gap_parts(k, data, ind, noise_var, false);
  return p.quad_q - p.quad_k;
}

std::vector<BoundRecord> excess_risk_identity(const Kernel& k, const Dataset& data,
                                              const InducingSet& ind, double ridge) {
  const double s2 = ridge_to_noise(data, ridge);
  const double n = static_cast<double>(data.size());
  const double lhs = n * excess_risk(k, data, ind, ridge);
  const double d = quadratic_form_gap(k, data, ind, s2);
  return {unenforced(make_identity("excess_risk_identity_as_stated", lhs, d)),
          make_identity("excess_risk_identity", lhs, s2 * d)};
}

std::vector<BoundRecord> excess_risk_upper_bound(const Kernel& k, const Dataset& data,
                                                 const InducingSet& ind, double ridge) {
  const double s2 = ridge_to_noise(data, ridge);
  const double n = static_cast<double>(data.size());
  const double lhs = excess_risk(k, data, ind, ridge);
  const GapParts p = gap_parts(k, data, ind, s2, true);
  const double tr = p.trace_gap;
  const double op = p.opnorm_gap;
  return {
      unenforced(make_bound("excess_risk_opnorm_as_stated", lhs,
                            p.y_sq * op / (n * n * ridge * (op + s2)))),
      unenforced(make_bound("excess_risk_trace_as_stated", lhs,
                            p.y_sq * tr / (n * n * ridge * (tr + s2)))),
      make_bound("excess_risk_opnorm", lhs, p.y_sq * op / (n * (op + s2))),
      make_bound("excess_risk_trace", lhs, p.y_sq * tr / (n * (tr + s2))),
  };
}

double rkhs_distance_sq(const Kernel& k, const Dataset& data, const InducingSet& ind,
                        double ridge) {
  validate(data);
  check_compatible(k, ind, data.inputs);
  require_positive(ridge, "ridge");
  const KrrModel exact = KrrModel::fit(k, data, ridge);
  const NystromModel approx = NystromModel::fit(ind, data, ridge);
  const Vector& a = exact.coefficients();
  // <f_hat, f_bar> = a^T f_bar(X)
  return exact.rkhs_norm_sq() - 2.0 * a.dot(approx.predict_all(data.inputs)) +
         approx.rkhs_norm_sq();
}

BoundRecord rkhs_distance_bound(const Kernel& k, const Dataset& data, const InducingSet& ind,
                                double ridge) {
  const double lhs = rkhs_distance_sq(k, data, ind, ridge);
  const double nl = ridge_to_noise(data, ridge);
  const double tr = trace_gap(ind, data.inputs);
  return make_bound("rkhs_distance", lhs, 2.0 * tr * data.targets.squaredNorm() / (nl * nl));
}

BoundRecord sup_norm_check(const Kernel& k, const Dataset& data, const InducingSet& ind,
                           double ridge, const Points& xs) {
  const double dist = rkhs_distance_sq(k, data, ind, ridge);
  const KrrModel exact = KrrModel::fit(k, data, ridge);
  const NystromModel approx = NystromModel::fit(ind, data, ridge);
  double worst = 0.0;
  for (Index i = 0; i < xs.rows(); ++i) {
    const double diff = approx.predict(xs.row(i)) - exact.predict(xs.row(i));
    const double kxx = k(xs.row(i), xs.row(i));
    if (kxx > 0.0) worst = std::max(worst, diff * diff / kxx);
  }
  return make_bound("sup_norm", worst, std::max(dist, 0.0));
}

BoundRecord derivative_gap_bound(const Kernel& k, const Dataset& data, const InducingSet& ind,
                                 double noise_var, PointRef x, Index j) {
  if (!k.is_gaussian()) {
    throw Error(ErrorKind::UnsupportedKernel, "derivative bound requires the gaussian kernel");
  }
  validate(data);
  check_compatible(k, ind, data.inputs);
  require_positive(noise_var, "noise variance");
  if (j < 0 || j >= k.input_dim()) throw Error(ErrorKind::DimensionMismatch, "coordinate out of range");
  constexpr double kStep = 1e-5;
  const GpPosterior exact = GpPosterior::fit(k, data, noise_var);
  const DtcPosterior approx = DtcPosterior::fit(ind, data, noise_var);
  const double diff = approx.partial_derivative(x, j, kStep) - exact.partial_derivative(x, j, kStep);
  const double tr = trace_gap(ind, data.inputs);
  const double rhs = 2.0 * tr * data.targets.squaredNorm() * k.mixed_second_derivative(j, x) /
                     (noise_var * noise_var);
  return make_bound("derivative", diff * diff, rhs, 1e-4 * std::max(1.0, rhs));
}

WorstCaseTerms worst_case_terms(const Kernel& k, const Dataset& data, const InducingSet& ind,
                                double noise_var, PointRef x) {
  validate(data);
  check_compatible(k, ind, data.inputs);
  require_positive(noise_var, "noise variance");
  for (Index i = 0; i < data.size(); ++i) {
    if (data.inputs.row(i) == x) {
      throw Error(ErrorKind::PointCollision, "evaluation point coincides with a training input");
    }
  }
  const OptimalPosterior post = OptimalPosterior::fit(ind, data, noise_var);
  WorstCaseTerms t;
  t.variance_plus_noise = post.cov(x, x) + noise_var;

  // Interpolation weights v = k_ZZ^{-1} k_Z(x) in H_k.
  const Vector kz = ind.cross(x);
  const Vector v = ind.kzz_factor().solve(kz);
  t.interpolation_sq = k(x, x) - 2.0 * v.dot(kz) + v.dot(ind.kzz() * v);

  // Nystrom KRR weights w = k_XZ (s2 k_ZZ + k_ZX k_XZ)^{-1} k_Z(x) in H_{q + s2 delta}.
  const Matrix kzx = ind.cross_gram(data.inputs);
  const SpdFactor bf = SpdFactor::factor(noise_var * ind.kzz() + kzx * kzx.transpose());
  const Vector w = kzx.transpose() * bf.solve(kz);
  const Vector qx = kzx.transpose() * v;  // q_X(x)
  const Matrix qxx = shifted(ind.q_gram(data.inputs), noise_var);
  t.krr_sq = ind.q(x, x) + noise_var - 2.0 * w.dot(qx) + w.dot(qxx * w);
  return t;
}

BoundRecord worst_case_decomposition(const Kernel& k, const Dataset& data,
                                     const InducingSet& ind, double noise_var, PointRef x) {
  const WorstCaseTerms t = worst_case_terms(k, data, ind, noise_var, x);
  return make_identity("worst_case", t.variance_plus_noise, t.interpolation_sq + t.krr_sq);
}

McEstimate summarize(const std::vector<double>& draws) {
  McEstimate e;
  e.samples = static_cast<Index>(draws.size());
  if (draws.empty()) return e;
  double sum = 0.0;
  for (double d : draws) sum += d;
  e.mean = sum / static_cast<double>(draws.size());
  if (draws.size() > 1) {
    double ss = 0.0;
    for (double d : draws) ss += (d - e.mean) * (d - e.mean);
    const double var = ss / static_cast<double>(draws.size() - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(draws.size()));
  }
  return e;
}

bool KlSandwich::consistent() const {
  const double lo = estimate.mean - 3.0 * estimate.stderr_;
  const double hi = estimate.mean + 3.0 * estimate.stderr_;
  const double tol = 1e-10 * std::max(1.0, upper);
  return lower <= hi + tol && lo <= upper + tol;
}

BoundRecord KlSandwich::lower_record() const {
  return make_bound("expected_kl_lower", lower, estimate.mean,
                    3.0 * estimate.stderr_ + 1e-10 * std::max(1.0, upper));
}

BoundRecord KlSandwich::upper_record() const {
  return make_bound("expected_kl_upper", estimate.mean, upper,
                    3.0 * estimate.stderr_ + 1e-10 * std::max(1.0, upper));
}

KlSandwich expected_kl_sandwich(const Kernel& k, const Points& xs, const InducingSet& ind,
                                double noise_var, Index n_samples, std::uint64_t seed) {
  check_compatible(k, ind, xs);
  require_positive(noise_var, "noise variance");
  if (n_samples < 100) throw Error(ErrorKind::InvalidCount, "at least 100 samples are required");
  const Matrix kxx = gram(k, xs);
  const Matrix qxx = ind.q_gram(xs);
  const SpdFactor kf = SpdFactor::factor(shifted(kxx, noise_var));
  const SpdFactor qf = SpdFactor::factor(shifted(qxx, noise_var));
  const double tr = kxx.trace() - qxx.trace();
  const double constant = qf.logdet() - kf.logdet() + tr / noise_var;

  std::vector<double> draws(static_cast<std::size_t>(n_samples));
  for (Index i = 0; i < n_samples; ++i) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const Vector y = kf.lower() * standard_normal(xs.rows(), rng);
    draws[static_cast<std::size_t>(i)] =
        0.5 * (constant + qf.quadratic_form(y) - kf.quadratic_form(y));
  }
  KlSandwich out;
  out.estimate = summarize(draws);
  out.lower = tr / (2.0 * noise_var);
  out.upper = tr / noise_var;
  return out;
}

BoundRecord ExcessRiskLowerBound::as_stated() const {
  return unenforced(make_bound("expected_excess_risk_lower_bound_as_stated", logdet_term,
                               excess.mean, 3.0 * excess.stderr_ + 1e-10));
}

BoundRecord ExcessRiskLowerBound::rescaled() const {
  const double nl = static_cast<double>(n) * ridge;
  return make_bound("expected_excess_risk_lower_bound", logdet_term, excess.mean / nl,
                    3.0 * excess.stderr_ / nl + 1e-10);
}

ExcessRiskLowerBound expected_excess_risk_lower_bound(const Kernel& k, const Points& xs,
                                                      const InducingSet& ind, double ridge,
                                                      Index n_samples, std::uint64_t seed) {
  check_compatible(k, ind, xs);
  require_positive(ridge, "ridge");
  if (n_samples < 100) throw Error(ErrorKind::InvalidCount, "at least 100 samples are required");
  const Index n = xs.rows();
  const double nd = static_cast<double>(n);
  const double s2 = nd * ridge;
  const Matrix kxx = gram(k, xs);
  const Matrix qxx = ind.q_gram(xs);
  const Matrix kzx = ind.cross_gram(xs);
  const SpdFactor kf = SpdFactor::factor(shifted(kxx, s2));
  const SpdFactor qf = SpdFactor::factor(shifted(qxx, s2));
  const SpdFactor bf = SpdFactor::factor(s2 * ind.kzz() + kzx * kzx.transpose());

  std::vector<double> draws(static_cast<std::size_t>(n_samples));
  for (Index i = 0; i < n_samples; ++i) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const Vector y = kf.lower() * standard_normal(n, rng);
    const Vector alpha = kf.solve(y);
    const Vector f_hat = kxx * alpha;
    const Vector beta = bf.solve(Vector(kzx * y));
    const Vector f_bar = kzx.transpose() * beta;
    const double r_hat = (y - f_hat).squaredNorm() / nd + ridge * alpha.dot(f_hat);
    const double r_bar = (y - f_bar).squaredNorm() / nd + ridge * beta.dot(ind.kzz() * beta);
    draws[static_cast<std::size_t>(i)] = r_bar - r_hat;
  }
  ExcessRiskLowerBound out;
  out.logdet_term = (kf.logdet() - qf.logdet()) / nd;
  out.ridge = ridge;
  out.n = n;
  out.excess = summarize(draws);
  return out;
}

}  // namespace gpkrr
