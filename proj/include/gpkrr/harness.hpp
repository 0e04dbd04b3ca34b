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

#ifndef GPKRR_HARNESS_HPP
#define GPKRR_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpkrr/dataset.hpp"
#include "gpkrr/diagnostics.hpp"
#include "gpkrr/kernels.hpp"
#include "gpkrr/nystrom.hpp"

namespace gpkrr {

struct KernelSpec {
  std::string family = "gaussian";  // "gaussian" or "polynomial"
  double gamma = 1.0;
  int degree = 2;
  double offset = 1.0;

  bool operator==(const KernelSpec&) const = default;
};

Kernel make_kernel(const KernelSpec& spec, Index d);

enum class SelectionKind { Uniform, GreedyTrace };

std::string to_string(SelectionKind s);
SelectionKind parse_selection(const std::string& name);

struct Tolerances {
  double identity = 1e-8;
  double solver = 1e-6;
  double gradient = 1e-5;

  bool operator==(const Tolerances&) const = default;
};

struct ExperimentConfig {
  KernelSpec kernel;
  Index n = 60;
  Index d = 1;
  Index m = 8;
  std::optional<double> noise_var;
  std::optional<double> ridge;
  bool link_noise_ridge = false;
  SelectionKind selection = SelectionKind::GreedyTrace;
  std::uint64_t seed = 7;
  Index mc_samples = 2000;
  std::optional<std::string> csv_path;  // replaces synthetic data when set
  double input_low = -3.0;
  double input_high = 3.0;
  double max_target_norm = 10.0;
  Index grid_points = 200;
  Index probe_points = 100;
  Index derivative_pairs = 20;
  Index random_states = 10;
  Index perturbations = 100;
  Tolerances tolerances;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Noise variance and ridge after applying the s2 = n ridge link. When only
/// one of the two is given, the other follows from the link; with neither,
/// s2 defaults to 0.1.
struct NoiseRidge {
  double noise_var = 0.0;
  double ridge = 0.0;

  bool operator==(const NoiseRidge&) const = default;
};

NoiseRidge resolve_noise_ridge(const ExperimentConfig& cfg, Index n);

/// Throws InvalidCount / InvalidArgument on a malformed config.
void validate(const ExperimentConfig& cfg);

/// Synthetic prior draw on uniform inputs rescaled so that |y| <= max_target_norm,
/// or the CSV file when csv_path is set.
Dataset build_dataset(const ExperimentConfig& cfg);

Selection build_inducing(const ExperimentConfig& cfg, const Kernel& k, const Points& inputs);

enum class CheckStatus { Pass, Fail, Skipped };

std::string to_string(CheckStatus s);
CheckStatus parse_check_status(const std::string& s);

struct CheckEntry {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  std::vector<BoundRecord> records;
  std::string error;  // empty unless the check threw
  double seconds = 0.0;

  bool operator==(const CheckEntry&) const = default;
};

struct VerificationReport {
  ExperimentConfig config;
  std::optional<NoiseRidge> resolved;
  std::string setup_error;
  std::vector<CheckEntry> entries;

  bool operator==(const VerificationReport&) const = default;

  /// Conjunction over entries; skipped entries count as failures and an
  /// empty report does not pass.
  bool overall_pass() const;
};

/// Canonical check order.
const std::vector<std::string>& check_names();

VerificationReport run_verification(const ExperimentConfig& cfg);

/// Runs a single named check; unknown names throw InvalidArgument.
CheckEntry run_check(const ExperimentConfig& cfg, const std::string& name);

}  // namespace gpkrr

#endif  // GPKRR_HARNESS_HPP
