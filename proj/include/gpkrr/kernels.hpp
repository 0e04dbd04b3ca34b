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

#ifndef GPKRR_KERNELS_HPP
#define GPKRR_KERNELS_HPP

#include <string>
#include <variant>

#include "gpkrr/linalg.hpp"

namespace gpkrr {

// Point sets are n x d, one point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::RowVectorXd;
using PointRef = Eigen::Ref<const Eigen::RowVectorXd>;

struct GaussianFamily {
  double lengthscale = 1.0;
};

struct PolynomialFamily {
  int degree = 2;
  double offset = 0.0;
};

// k(x,x') = exp(-|x-x'|^2 / gamma^2)  or  k(x,x') = (x^T x' + c)^m.
class Kernel {
 public:
  using Family = std::variant<GaussianFamily, PolynomialFamily>;

  static Kernel gaussian(double lengthscale, Index input_dim = 1);
  static Kernel polynomial(int degree, double offset, Index input_dim = 1);

  const Family& family() const { return family_; }
  Index input_dim() const { return input_dim_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianFamily>(family_); }
  std::string describe() const;

  double operator()(PointRef x, PointRef x2) const;

  // d/dx_j d/dx'_j k(x, x') evaluated on the diagonal x' = x.
  double mixed_second_derivative(Index j, PointRef x) const;

 private:
  Kernel(Family family, Index input_dim) : family_(family), input_dim_(input_dim) {}

  Family family_;
  Index input_dim_;
};

inline double eval(const Kernel& k, PointRef x, PointRef x2) { return k(x, x2); }

// (k(a_i, b_j))_{ij}
Matrix gram(const Kernel& k, const Points& a, const Points& b);
// Symmetric k_AA.
Matrix gram(const Kernel& k, const Points& a);
// Column vector (k(p_i, x))_i, i.e. k_P(x).
Vector cross(const Kernel& k, const Points& pts, PointRef x);

inline double mixed_second_derivative(const Kernel& k, Index j, PointRef x) {
  return k.mixed_second_derivative(j, x);
}

}  // namespace gpkrr

#endif  // GPKRR_KERNELS_HPP
