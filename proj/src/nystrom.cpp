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

#include "gpkrr/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
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

template <class F>
double central_difference(const F& f, PointRef x, Index j, double step) {
  if (j < 0 || j >= x.size()) throw Error(ErrorKind::DimensionMismatch, "coordinate out of range");
  Point plus = x;
  Point minus = x;
  plus(j) += step;
  minus(j) -= step;
  return (f(plus) - f(minus)) / (2.0 * step);
}

void check_inputs(const InducingSet& ind, const Dataset& data) {
  validate(data);
  if (data.dim() != ind.kernel().input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "dataset and kernel dimensions differ");
  }
}

}  // namespace

InducingSet InducingSet::create(const Kernel& k, Points z, const JitterPolicy& policy) {
  if (z.rows() < 1) throw Error(ErrorKind::InvalidCount, "at least one inducing point is required");
  if (z.cols() != k.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "inducing points and kernel dimensions differ");
  }
  if (!z.allFinite()) throw Error(ErrorKind::InvalidArgument, "inducing points must be finite");
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      if (z.row(i) == z.row(j)) {
        std::ostringstream msg;
        msg << "inducing points " << j << " and " << i << " coincide";
        throw Error(ErrorKind::InvalidCount, msg.str());
      }
    }
  }
  Matrix kzz = gram(k, z);
  SpdFactor f = SpdFactor::factor(kzz, policy);
  return InducingSet(k, std::move(z), std::move(kzz), std::move(f));
}

Vector InducingSet::project(const Vector& f_at_z) const {
  if (f_at_z.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, "projection expects values at every inducing point");
  }
  return factor_.solve(f_at_z);
}

double InducingSet::q(PointRef x, PointRef x2) const {
  const Vector a = factor_.solve_lower(cross(x));
  const Vector b = factor_.solve_lower(cross(x2));
  return a.dot(b);
}

Matrix InducingSet::q_gram(const Points& a, const Points& b) const {
  const Matrix wa = factor_.solve_lower(cross_gram(a));
  const Matrix wb = factor_.solve_lower(cross_gram(b));
  return wa.transpose() * wb;
}

Matrix InducingSet::q_gram(const Points& a) const {
  const Matrix w = factor_.solve_lower(cross_gram(a));
  return symmetrize(w.transpose() * w);
}

Vector InducingSet::q_diag(const Points& xs) const {
  const Matrix w = factor_.solve_lower(cross_gram(xs));
  return w.colwise().squaredNorm().transpose();
}

double trace_gap(const InducingSet& ind, const Points& xs) {
  double total = 0.0;
  const Vector qd = ind.q_diag(xs);
  for (Index i = 0; i < xs.rows(); ++i) total += ind.kernel()(xs.row(i), xs.row(i)) - qd(i);
  return total;
}

namespace {

// Least squares on [W^T; sqrt(shift) I] g = [y; 0] with W = L^{-1} k_ZX,
// L L^T = k_ZZ. The stacked matrix has condition number at most
// sqrt(1 + |W|^2 / shift), whatever the conditioning of k_ZZ.
Vector whitened_penalized_solve(const Matrix& w, const Vector& y, double shift) {
  const Index n = w.cols();
  const Index m = w.rows();
  Matrix a(n + m, m);
  a.topRows(n) = w.transpose();
  a.bottomRows(m) = std::sqrt(shift) * Matrix::Identity(m, m);
  Vector rhs = Vector::Zero(n + m);
  rhs.head(n) = y;
  return a.colPivHouseholderQr().solve(rhs);
}

}  // namespace

Vector penalized_span_coefficients(const InducingSet& ind, const Matrix& kzx, const Vector& y,
                                  double shift) {
  if (kzx.rows() != ind.size() || kzx.cols() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "penalized_span_coefficients: shapes disagree");
  }
  require_positive(shift, "shift");
  const Matrix w = ind.kzz_factor().solve_lower(kzx);
  return ind.kzz_factor().solve_upper(whitened_penalized_solve(w, y, shift));
}

NystromModel::NystromModel(InducingSet ind, Vector whitened, double ridge)
    : inducing_(std::move(ind)), whitened_(std::move(whitened)), ridge_(ridge) {
  beta_ = inducing_.kzz_factor().solve_upper(whitened_);
}

NystromModel NystromModel::fit(const InducingSet& ind, const Dataset& data, double ridge) {
  check_inputs(ind, data);
  require_positive(ridge, "ridge");
  const double n = static_cast<double>(data.size());
  const Matrix w = ind.kzz_factor().solve_lower(ind.cross_gram(data.inputs));
  return NystromModel(ind, whitened_penalized_solve(w, data.targets, n * ridge), ridge);
}

double NystromModel::predict(PointRef x) const {
  return inducing_.kzz_factor().solve_lower(inducing_.cross(x)).col(0).dot(whitened_);
}

Vector NystromModel::predict_all(const Points& xs) const {
  return inducing_.kzz_factor().solve_lower(inducing_.cross_gram(xs)).transpose() * whitened_;
}

double NystromModel::rkhs_norm_sq() const {
  // beta^T (L L^T - jitter I) beta
  return whitened_.squaredNorm() - inducing_.kzz_factor().jitter_used() * beta_.squaredNorm();
}

NystromModel NystromModel::fit_via_q(const InducingSet& ind, const Dataset& data, double ridge) {
  check_inputs(ind, data);
  require_positive(ridge, "ridge");
  const double n = static_cast<double>(data.size());
  Matrix qxx = ind.q_gram(data.inputs);
  qxx.diagonal().array() += n * ridge;
  const SpdFactor f = SpdFactor::factor(qxx);
  const Vector a = f.solve(data.targets);
  // q_X(.)^T a = k_Z(.)^T L^{-T} (L^{-1} k_ZX a)
  Vector whitened = ind.kzz_factor().solve_lower(ind.cross_gram(data.inputs) * a);
  return NystromModel(ind, std::move(whitened), ridge);
}

double NystromModel::rkhs_norm_sq_q() const {
  return beta_.dot(inducing_.q_gram(inducing_.points()) * beta_);
}

double NystromModel::partial_derivative(PointRef x, Index j, double step) const {
  return central_difference([this](PointRef p) { return predict(p); }, x, j, step);
}

DtcPosterior DtcPosterior::fit(const InducingSet& ind, const Dataset& data, double noise_var) {
  check_inputs(ind, data);
  require_positive(noise_var, "noise variance");
  const Matrix kzx = ind.cross_gram(data.inputs);
  const Matrix kzxxz = kzx * kzx.transpose();
  Vector w = penalized_span_coefficients(ind, kzx, data.targets, noise_var);
  SpdFactor cov_factor = SpdFactor::factor(ind.kzz() + kzxxz / noise_var);
  return DtcPosterior(ind, noise_var, std::move(w), std::move(cov_factor));
}

double DtcPosterior::cov(PointRef x, PointRef x2) const {
  const Vector a = cov_factor_.solve_lower(inducing_.cross(x));
  const Vector b = cov_factor_.solve_lower(inducing_.cross(x2));
  return a.dot(b);
}

Matrix DtcPosterior::cov_gram(const Points& xs) const {
  const Matrix w = cov_factor_.solve_lower(inducing_.cross_gram(xs));
  return w.transpose() * w;
}

double DtcPosterior::partial_derivative(PointRef x, Index j, double step) const {
  return central_difference([this](PointRef p) { return mean(p); }, x, j, step);
}

namespace {

std::vector<Index> uniform_indices(Index n, Index m, std::uint64_t seed) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  auto rng = make_stream(seed, 3);
  // Partial Fisher-Yates: the first m slots become the sample.
  for (Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(m));
  return all;
}

std::vector<Index> greedy_trace_indices(const Kernel& k, const Points& x, Index m) {
  const Index n = x.rows();
  Vector residual(n);
  for (Index i = 0; i < n; ++i) residual(i) = k(x.row(i), x.row(i));
  Matrix cols = Matrix::Zero(n, m);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(m));

  for (Index t = 0; t < m; ++t) {
    Index pivot = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (!taken[static_cast<std::size_t>(i)] && residual(i) > best) {
        best = residual(i);
        pivot = i;
      }
    }
    taken[static_cast<std::size_t>(pivot)] = true;
    picked.push_back(pivot);
    if (!(best > 0.0)) continue;  // remaining points already reproduced
    const double scale = std::sqrt(best);
    Vector col = cross(k, x, x.row(pivot));
    if (t > 0) col -= cols.leftCols(t) * cols.row(pivot).head(t).transpose();
    col /= scale;
    cols.col(t) = col;
    residual -= col.cwiseAbs2();
  }
  return picked;
}

}  // namespace

Selection select_inducing(const Kernel& k, const Points& inputs, Index m,
                          const SelectionStrategy& strategy) {
  const Index n = inputs.rows();
  if (m < 1 || m > n) {
    std::ostringstream msg;
    msg << "requested " << m << " inducing points from " << n << " inputs";
    throw Error(ErrorKind::InvalidCount, msg.str());
  }
  std::vector<Index> idx =
      std::holds_alternative<UniformSelection>(strategy)
          ? uniform_indices(n, m, std::get<UniformSelection>(strategy).seed)
          : greedy_trace_indices(k, inputs, m);
  Points z(m, inputs.cols());
  for (Index t = 0; t < m; ++t) z.row(t) = inputs.row(idx[static_cast<std::size_t>(t)]);
  return Selection{std::move(idx), InducingSet::create(k, std::move(z))};
}

}  // namespace gpkrr
