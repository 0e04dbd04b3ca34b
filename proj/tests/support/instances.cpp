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

#include "instances.hpp"

#include <cmath>
#include <random>

#include "gpkrr/random.hpp"

namespace gpkrr::testing {

Instance random_instance(std::uint64_t seed, const InstanceSpec& spec) {
  auto rng = make_stream(seed, 77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double noise_var =
      spec.noise_lo * std::pow(spec.noise_hi / spec.noise_lo, unit(rng));
  Kernel k = Kernel::gaussian(spec.gamma, spec.d);
  const Points x = uniform_inputs(spec.n, spec.d, spec.lo, spec.hi, seed);
  Dataset data = synth_prior_dataset(k, x, noise_var, seed);
  const double norm = data.targets.norm();
  if (norm > 10.0) data.targets *= 10.0 / norm;
  if (spec.inducing_equals_inputs) {
    InducingSet ind = InducingSet::create(k, x);
    return Instance{std::move(k), std::move(data), std::move(ind), noise_var};
  }
  const SelectionStrategy strategy =
      spec.greedy ? SelectionStrategy{GreedyTraceSelection{}} : SelectionStrategy{UniformSelection{seed}};
  Selection sel = select_inducing(k, x, spec.m, strategy);
  return Instance{std::move(k), std::move(data), std::move(sel.inducing), noise_var};
}

Instance small_instance() {
  Kernel k = Kernel::gaussian(1.0, 1);
  Points x(4, 1);
  x << -1.0, 0.0, 0.5, 2.0;
  Vector y(4);
  y << 0.3, -0.2, 0.9, 0.1;
  Points z(2, 1);
  z << -0.5, 1.5;
  InducingSet ind = InducingSet::create(k, z);
  return Instance{std::move(k), make_dataset(x, y), std::move(ind), 0.1};
}

Points random_points(Index count, Index d, double lo, double hi, std::uint64_t seed) {
  return uniform_inputs(count, d, lo, hi, seed, 999);
}

}  // namespace gpkrr::testing
