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

#include "gpkrr/kernels.hpp"

#include <cmath>
#include <sstream>

#include "gpkrr/error.hpp"

namespace gpkrr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const Kernel& k, Index got, const char* what) {
  if (got != k.input_dim()) {
    std::ostringstream msg;
    msg << what << " has dimension " << got << ", kernel expects " << k.input_dim();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

}  // namespace

Kernel Kernel::gaussian(double lengthscale, Index input_dim) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw Error(ErrorKind::InvalidArgument, "gaussian lengthscale must be positive");
  }
  if (input_dim < 1) throw Error(ErrorKind::InvalidArgument, "input_dim must be >= 1");
  return Kernel(GaussianFamily{lengthscale}, input_dim);
}

Kernel Kernel::polynomial(int degree, double offset, Index input_dim) {
  if (degree < 1) throw Error(ErrorKind::InvalidArgument, "polynomial degree must be >= 1");
  if (!(offset >= 0.0)) throw Error(ErrorKind::InvalidArgument, "polynomial offset must be >= 0");
  if (input_dim < 1) throw Error(ErrorKind::InvalidArgument, "input_dim must be >= 1");
  return Kernel(PolynomialFamily{degree, offset}, input_dim);
}

std::string Kernel::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const GaussianFamily& g) { out << "gaussian(gamma=" << g.lengthscale; },
                 [&](const PolynomialFamily& p) {
                   out << "polynomial(degree=" << p.degree << ", offset=" << p.offset;
                 },
             },
             family_);
  out << ", d=" << input_dim_ << ")";
  return out.str();
}

double Kernel::operator()(PointRef x, PointRef x2) const {
  check_dim(*this, x.size(), "first point");
  check_dim(*this, x2.size(), "second point");
  return std::visit(
      Overloaded{
          [&](const GaussianFamily& g) {
            return std::exp(-(x - x2).squaredNorm() / (g.lengthscale * g.lengthscale));
          },
          [&](const PolynomialFamily& p) { return std::pow(x.dot(x2) + p.offset, p.degree); },
      },
      family_);
}

double Kernel::mixed_second_derivative(Index j, PointRef x) const {
  check_dim(*this, x.size(), "point");
  if (j < 0 || j >= input_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "coordinate index out of range");
  }
  return std::visit(
      Overloaded{
          [&](const GaussianFamily& g) { return 2.0 / (g.lengthscale * g.lengthscale); },
          [&](const PolynomialFamily& p) {
            // m(m-1) s^{m-2} x_j^2 + m s^{m-1},  s = |x|^2 + c
            const double s = x.squaredNorm() + p.offset;
            const double m = p.degree;
            const double second =
                p.degree >= 2 ? m * (m - 1.0) * std::pow(s, p.degree - 2) * x(j) * x(j) : 0.0;
            return second + m * std::pow(s, p.degree - 1);
          },
      },
      family_);
}

Matrix gram(const Kernel& k, const Points& a, const Points& b) {
  check_dim(k, a.cols(), "left point set");
  check_dim(k, b.cols(), "right point set");
  Matrix out(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) out(i, j) = k(a.row(i), b.row(j));
  }
  return out;
}

Matrix gram(const Kernel& k, const Points& a) {
  check_dim(k, a.cols(), "point set");
  const Index n = a.rows();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    out(i, i) = k(a.row(i), a.row(i));
    for (Index j = 0; j < i; ++j) {
      const double v = k(a.row(i), a.row(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Vector cross(const Kernel& k, const Points& pts, PointRef x) {
  check_dim(k, pts.cols(), "point set");
  Vector out(pts.rows());
  for (Index i = 0; i < pts.rows(); ++i) out(i) = k(pts.row(i), x);
  return out;
}

}  // namespace gpkrr
