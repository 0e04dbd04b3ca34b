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

#ifndef GPKRR_DATASET_HPP
#define GPKRR_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "gpkrr/kernels.hpp"

namespace gpkrr {

struct CsvSource {
  std::string path;
};

struct SyntheticSource {
  std::uint64_t seed = 0;
  std::string generator;
};

using Provenance = std::variant<CsvSource, SyntheticSource>;

// Regression sample (x_i, y_i), i = 1..n.
struct Dataset {
  Points inputs;
  Vector targets;
  Provenance provenance = SyntheticSource{};

  Index size() const { return inputs.rows(); }
  Index dim() const { return inputs.cols(); }
};

// Throws InvalidArgument / DimensionMismatch unless n >= 1, d >= 1, the row
// counts agree and every value is finite.
void validate(const Dataset& data);

Dataset make_dataset(Points inputs, Vector targets, Provenance provenance = SyntheticSource{});

// Uniform inputs on [lo, hi]^d drawn from stream (seed, stream).
Points uniform_inputs(Index n, Index d, double lo, double hi, std::uint64_t seed,
                      std::uint64_t stream = 0);

// y ~ N(0, k_XX + noise_var I).
Dataset synth_prior_dataset(const Kernel& k, const Points& inputs, double noise_var,
                            std::uint64_t seed);

enum class TestFunction { Zero, Sine, Bump };

TestFunction parse_test_function(const std::string& name);
std::string to_string(TestFunction f);
double evaluate(TestFunction f, PointRef x);

// y_i = f0(x_i) + eps_i, eps_i ~ N(0, noise_var).
Dataset synth_fixed_function_dataset(TestFunction f0, const Points& inputs, double noise_var,
                                     std::uint64_t seed);

// Header "x1,...,xd,y"; one sample per line.
Dataset load_csv(const std::filesystem::path& path);
// Values written with 17 significant digits so that load_csv(write_csv(d)) == d.
void write_csv(const std::filesystem::path& path, const Dataset& data);
std::string to_csv(const Dataset& data);

}  // namespace gpkrr

#endif  // GPKRR_DATASET_HPP
