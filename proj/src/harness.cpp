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

#include "gpkrr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "gpkrr/error.hpp"
#include "gpkrr/exact.hpp"
#include "gpkrr/random.hpp"
#include "gpkrr/svgp.hpp"

namespace gpkrr {

namespace {

// Streams below the selection stream are used by the dataset generators.
constexpr std::uint64_t kGridStream = 10;
constexpr std::uint64_t kProbeStream = 11;
constexpr std::uint64_t kDerivativeStream = 12;
constexpr std::uint64_t kStateStream = 100;
constexpr std::uint64_t kPerturbStream = 200;

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t tag) {
  return seed ^ (tag * 0x9e3779b97f4a7c15ULL);
}

struct Context {
  const ExperimentConfig& cfg;
  Kernel kernel;
  Dataset data;
  Selection selection;
  NoiseRidge noise;

  const InducingSet& ind() const { return selection.inducing; }
  double linked_ridge() const { return noise.noise_var / static_cast<double>(data.size()); }
};

Context make_context(const ExperimentConfig& cfg) {
  validate(cfg);
  Dataset data = build_dataset(cfg);
  Kernel k = make_kernel(cfg.kernel, data.dim());
  Selection sel = build_inducing(cfg, k, data.inputs);
  const NoiseRidge nr = resolve_noise_ridge(cfg, data.size());
  return Context{cfg, std::move(k), std::move(data), std::move(sel), nr};
}

// Record with the smallest margin relative to its tolerance.
BoundRecord worst_of(const std::vector<BoundRecord>& records, std::string name) {
  if (records.empty()) throw Error(ErrorKind::InvalidCount, "no records to summarize");
  auto margin = [](const BoundRecord& r) {
    const double tol = r.tolerance > 0.0 ? r.tolerance : 1e-300;
    const double m = r.kind == RecordKind::Bound ? r.slack + r.tolerance
                                                 : r.tolerance - std::abs(r.slack);
    return std::isfinite(m) ? m / tol : -std::numeric_limits<double>::infinity();
  };
  BoundRecord worst = records.front();
  double worst_margin = margin(worst);
  for (const BoundRecord& r : records) {
    const double m = margin(r);
    if (m < worst_margin) {
      worst = r;
      worst_margin = m;
    }
  }
  worst.name = std::move(name);
  return worst;
}

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<BoundRecord> check_equivalence(const Context& c) {
  const double s2 = c.noise.noise_var;
  const double ridge = c.linked_ridge();
  const Points grid = uniform_inputs(c.cfg.grid_points, c.data.dim(), c.cfg.input_low,
                                     c.cfg.input_high, c.cfg.seed, kGridStream);
  const OptimalPosterior post = OptimalPosterior::fit(c.ind(), c.data, s2);
  const NystromModel nys = NystromModel::fit(c.ind(), c.data, ridge);
  const KrrModel krr = KrrModel::fit(c.kernel, c.data, ridge);
  const GpPosterior gp = GpPosterior::fit(c.kernel, c.data, s2);
  double svgp_gap = 0.0;
  double state_gap = 0.0;
  double exact_gap = 0.0;
  for (Index i = 0; i < grid.rows(); ++i) {
    const double f_bar = nys.predict(grid.row(i));
    svgp_gap = std::max(svgp_gap, std::abs(post.mean(grid.row(i)) - f_bar));
    state_gap = std::max(state_gap, std::abs(post.state().mean(grid.row(i)) - f_bar));
    exact_gap = std::max(exact_gap, std::abs(gp.mean(grid.row(i)) - krr.predict(grid.row(i))));
  }
  const double tol = c.cfg.tolerances.identity;
  const Vector& beta = nys.beta();
  return {
      make_identity("svgp_mean_vs_nystrom", svgp_gap, 0.0, tol),
      make_identity("variational_mean_vs_nystrom", state_gap, 0.0, tol),
      make_identity("gp_mean_vs_krr", exact_gap, 0.0, tol),
      make_identity("span_coefficients",
                    max_abs_diff(post.state().span_coefficients(), beta), 0.0,
                    tol * std::max(1.0, beta.cwiseAbs().maxCoeff())),
  };
}

std::vector<BoundRecord> check_elbo_decomposition(const Context& c) {
  const double s2 = c.noise.noise_var;
  std::vector<BoundRecord> with_normalizer;
  std::vector<BoundRecord> as_stated;
  auto add = [&](const SvgpState& state) {
    const ElboBreakdown b = elbo_breakdown(state, c.data, s2);
    const double tol = c.cfg.tolerances.identity * std::max(1.0, std::abs(b.total_check));
    with_normalizer.push_back(
        make_identity("", b.four_term_sum() + b.log_normalizer, b.total_check, tol));
    as_stated.push_back(make_identity("", b.four_term_sum(), b.total_check, tol));
  };
  add(optimal_parameters(c.ind(), c.data, s2));
  for (Index i = 0; i < c.cfg.random_states; ++i) {
    add(random_state(c.ind(), c.cfg.seed, kStateStream + static_cast<std::uint64_t>(i)));
  }
  return {worst_of(with_normalizer, "elbo_decomposition"),
          unenforced(worst_of(as_stated, "elbo_decomposition_as_stated"))};
}

std::vector<BoundRecord> check_optimality(const Context& c) {
  const double s2 = c.noise.noise_var;
  const InducingSet& ind = c.ind();
  const SvgpState best = optimal_parameters(ind, c.data, s2);
  const double l_best = elbo(best, c.data, s2);
  const double m = static_cast<double>(ind.size());
  std::vector<BoundRecord> out;
  out.push_back(make_identity("elbo_closed_form", l_best, optimal_elbo(ind, c.data, s2),
                              c.cfg.tolerances.identity * std::max(1.0, std::abs(l_best))));

  // Perturb mu additively and Sigma by a congruence (I + e A) Sigma (I + e A)^T.
  double best_perturbed = -std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index i = 0; i < c.cfg.perturbations; ++i) {
    auto rng = make_stream(c.cfg.seed, kPerturbStream + static_cast<std::uint64_t>(i));
    const double scale = std::pow(10.0, -1.0 - 2.0 * unit(rng));
    const double mu_scale = scale * std::max(1.0, best.mu().cwiseAbs().maxCoeff());
    Vector mu = best.mu() + mu_scale * standard_normal(ind.size(), rng);
    Matrix a(ind.size(), ind.size());
    for (Index j = 0; j < ind.size(); ++j) a.col(j) = standard_normal(ind.size(), rng);
    const Matrix t = Matrix::Identity(ind.size(), ind.size()) + (scale / std::sqrt(m)) * a;
    Matrix sigma = t * best.sigma() * t.transpose();
    try {
      const SvgpState s = SvgpState::create(ind, std::move(mu), std::move(sigma));
      best_perturbed = std::max(best_perturbed, elbo(s, c.data, s2));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FactorizationFailed) throw;
    }
  }
  out.push_back(make_bound("perturbed_elbo", best_perturbed, l_best));

  // Central-difference gradient in mu at the optimum.
  Vector grad(ind.size());
  for (Index j = 0; j < ind.size(); ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(best.mu()(j)));
    Vector up = best.mu();
    Vector down = best.mu();
    up(j) += h;
    down(j) -= h;
    const double l_up = elbo(SvgpState::create(ind, up, best.sigma()), c.data, s2);
    const double l_down = elbo(SvgpState::create(ind, down, best.sigma()), c.data, s2);
    grad(j) = (l_up - l_down) / (2.0 * h);
  }
  out.push_back(make_bound("gradient_norm", grad.norm(), c.cfg.tolerances.gradient, 0.0));

  const FixedPointResult fp = fixed_point_solver(ind, c.data, s2);
  const double state_gap = std::max(max_abs_diff(fp.state.mu(), best.mu()),
                                    (fp.state.sigma() - best.sigma()).cwiseAbs().maxCoeff());
  out.push_back(make_identity("fixed_point_state", state_gap, 0.0, c.cfg.tolerances.solver));
  out.push_back(make_bound("fixed_point_iterations", static_cast<double>(fp.iterations), 10.0, 0.0));
  return out;
}

std::vector<BoundRecord> check_kl_two_path(const Context& c) {
  const KlPaths kl = kl_paths(c.kernel, c.data, c.ind(), c.noise.noise_var);
  return {
      make_identity("kl_two_path", kl.via_explicit, kl.via_evidence,
                    c.cfg.tolerances.identity * std::max(1.0, std::abs(kl.via_evidence))),
      make_bound("kl_nonnegative", -kl.via_evidence, 0.0, 1e-10),
  };
}

std::vector<BoundRecord> check_burt(const Context& c) {
  return burt_upper_bound(c.kernel, c.data, c.ind(), c.noise.noise_var);
}

std::vector<BoundRecord> check_excess_risk(const Context& c) {
  const double ridge = c.noise.ridge;
  std::vector<BoundRecord> out = excess_risk_identity(c.kernel, c.data, c.ind(), ridge);
  for (BoundRecord& r : excess_risk_upper_bound(c.kernel, c.data, c.ind(), ridge)) {
    out.push_back(std::move(r));
  }
  out.push_back(
      make_bound("excess_risk_nonnegative", -excess_risk(c.kernel, c.data, c.ind(), ridge), 0.0,
                 1e-10));
  return out;
}

std::vector<BoundRecord> check_rkhs_distance(const Context& c) {
  const Points probes = uniform_inputs(c.cfg.probe_points, c.data.dim(), c.cfg.input_low,
                                       c.cfg.input_high, c.cfg.seed, kProbeStream);
  return {rkhs_distance_bound(c.kernel, c.data, c.ind(), c.noise.ridge),
          sup_norm_check(c.kernel, c.data, c.ind(), c.noise.ridge, probes)};
}

std::vector<BoundRecord> check_derivative(const Context& c) {
  const Points xs = uniform_inputs(c.cfg.derivative_pairs, c.data.dim(), c.cfg.input_low,
                                   c.cfg.input_high, c.cfg.seed, kDerivativeStream);
  auto rng = make_stream(c.cfg.seed, kDerivativeStream + 1);
  std::uniform_int_distribution<Index> coord(0, c.data.dim() - 1);
  std::vector<BoundRecord> all;
  for (Index i = 0; i < xs.rows(); ++i) {
    all.push_back(
        derivative_gap_bound(c.kernel, c.data, c.ind(), c.noise.noise_var, xs.row(i), coord(rng)));
  }
  return {worst_of(all, "derivative")};
}

std::vector<BoundRecord> check_worst_case(const Context& c) {
  const Points probes = uniform_inputs(c.cfg.probe_points, c.data.dim(), c.cfg.input_low,
                                       c.cfg.input_high, c.cfg.seed, kProbeStream);
  std::vector<BoundRecord> all;
  for (Index i = 0; i < probes.rows(); ++i) {
    BoundRecord r =
        worst_case_decomposition(c.kernel, c.data, c.ind(), c.noise.noise_var, probes.row(i));
    r.tolerance = c.cfg.tolerances.identity * std::max(1.0, std::abs(r.rhs));
    r.holds = std::abs(r.slack) <= r.tolerance;
    all.push_back(std::move(r));
  }
  return {worst_of(all, "worst_case")};
}

std::vector<BoundRecord> check_expected_kl(const Context& c) {
  const KlSandwich s = expected_kl_sandwich(c.kernel, c.data.inputs, c.ind(), c.noise.noise_var,
                                            c.cfg.mc_samples, derived_seed(c.cfg.seed, 1));
  return {s.lower_record(), s.upper_record()};
}

std::vector<BoundRecord> check_expected_excess(const Context& c) {
  const ExcessRiskLowerBound b =
      expected_excess_risk_lower_bound(c.kernel, c.data.inputs, c.ind(), c.noise.ridge,
                                       c.cfg.mc_samples, derived_seed(c.cfg.seed, 2));
  return {b.as_stated(), b.rescaled()};
}

using CheckFn = std::function<std::vector<BoundRecord>(const Context&)>;

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"equivalence", check_equivalence},
      {"elbo_decomposition", check_elbo_decomposition},
      {"optimality", check_optimality},
      {"kl_two_path", check_kl_two_path},
      {"burt", check_burt},
      {"excess_risk", check_excess_risk},
      {"rkhs_distance", check_rkhs_distance},
      {"derivative", check_derivative},
      {"worst_case", check_worst_case},
      {"expected_kl", check_expected_kl},
      {"expected_excess_risk_lower_bound", check_expected_excess},
  };
  return checks;
}

CheckEntry run_one(const Context& c, const std::string& name, const CheckFn& fn) {
  CheckEntry entry;
  entry.name = name;
  const auto start = std::chrono::steady_clock::now();
  if (name == "derivative" && !c.kernel.is_gaussian()) {
    entry.status = CheckStatus::Skipped;
    entry.error = "derivative bound requires the gaussian kernel";
    return entry;
  }
  try {
    entry.records = fn(c);
    const bool ok = std::all_of(entry.records.begin(), entry.records.end(),
                                [](const BoundRecord& r) { return !r.enforced || r.holds; });
    entry.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  } catch (const std::exception& e) {
    entry.status = CheckStatus::Fail;
    entry.error = e.what();
  }
  entry.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return entry;
}

}  // namespace

Kernel make_kernel(const KernelSpec& spec, Index d) {
  if (spec.family == "gaussian") return Kernel::gaussian(spec.gamma, d);
  if (spec.family == "polynomial") return Kernel::polynomial(spec.degree, spec.offset, d);
  throw Error(ErrorKind::UnsupportedKernel, "unknown kernel family '" + spec.family + "'");
}

std::string to_string(SelectionKind s) {
  return s == SelectionKind::Uniform ? "uniform" : "greedy_trace";
}

SelectionKind parse_selection(const std::string& name) {
  if (name == "uniform") return SelectionKind::Uniform;
  if (name == "greedy_trace") return SelectionKind::GreedyTrace;
  throw Error(ErrorKind::InvalidArgument, "unknown selection strategy '" + name + "'");
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "fail";
}

CheckStatus parse_check_status(const std::string& s) {
  if (s == "pass") return CheckStatus::Pass;
  if (s == "fail") return CheckStatus::Fail;
  if (s == "skipped") return CheckStatus::Skipped;
  throw Error(ErrorKind::ParseError, "unknown check status '" + s + "'");
}

NoiseRidge resolve_noise_ridge(const ExperimentConfig& cfg, Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidCount, "dataset is empty");
  const double nd = static_cast<double>(n);
  NoiseRidge out;
  if (cfg.link_noise_ridge) {
    if (cfg.noise_var.has_value() == cfg.ridge.has_value()) {
      throw Error(ErrorKind::InvalidArgument,
                  "exactly one of noise variance and ridge must be given when linked");
    }
  }
  if (cfg.noise_var && cfg.ridge) {
    out = {*cfg.noise_var, *cfg.ridge};
  } else if (cfg.noise_var) {
    out = {*cfg.noise_var, *cfg.noise_var / nd};
  } else if (cfg.ridge) {
    out = {nd * *cfg.ridge, *cfg.ridge};
  } else {
    out = {0.1, 0.1 / nd};
  }
  if (!(out.noise_var > 0.0) || !(out.ridge > 0.0) || !std::isfinite(out.noise_var) ||
      !std::isfinite(out.ridge)) {
    throw Error(ErrorKind::InvalidArgument, "noise variance and ridge must be positive");
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (!cfg.csv_path && (cfg.n < 1 || cfg.d < 1)) {
    throw Error(ErrorKind::InvalidCount, "n and d must be at least 1");
  }
  if (cfg.m < 1) throw Error(ErrorKind::InvalidCount, "m must be at least 1");
  if (!cfg.csv_path && cfg.m > cfg.n) throw Error(ErrorKind::InvalidCount, "m must not exceed n");
  if (cfg.mc_samples < 100) throw Error(ErrorKind::InvalidCount, "mc_samples must be at least 100");
  if (cfg.grid_points < 1 || cfg.probe_points < 1 || cfg.derivative_pairs < 1 ||
      cfg.random_states < 0 || cfg.perturbations < 1) {
    throw Error(ErrorKind::InvalidCount, "probe counts must be positive");
  }
  if (!(cfg.input_low < cfg.input_high)) {
    throw Error(ErrorKind::InvalidArgument, "input range is empty");
  }
  if (!(cfg.max_target_norm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "max_target_norm must be positive");
  }
  if (cfg.noise_var && !(*cfg.noise_var > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "noise variance must be positive");
  }
  if (cfg.ridge && !(*cfg.ridge > 0.0)) throw Error(ErrorKind::InvalidArgument, "ridge must be positive");
  if (cfg.link_noise_ridge && cfg.noise_var.has_value() == cfg.ridge.has_value()) {
    throw Error(ErrorKind::InvalidArgument,
                "exactly one of noise variance and ridge must be given when linked");
  }
}

Dataset build_dataset(const ExperimentConfig& cfg) {
  if (cfg.csv_path) return load_csv(*cfg.csv_path);
  const Kernel k = make_kernel(cfg.kernel, cfg.d);
  const NoiseRidge nr = resolve_noise_ridge(cfg, cfg.n);
  const Points x = uniform_inputs(cfg.n, cfg.d, cfg.input_low, cfg.input_high, cfg.seed);
  Dataset data = synth_prior_dataset(k, x, nr.noise_var, cfg.seed);
  const double norm = data.targets.norm();
  if (norm > cfg.max_target_norm) data.targets *= cfg.max_target_norm / norm;
  return data;
}

Selection build_inducing(const ExperimentConfig& cfg, const Kernel& k, const Points& inputs) {
  if (cfg.selection == SelectionKind::Uniform) {
    return select_inducing(k, inputs, cfg.m, UniformSelection{cfg.seed});
  }
  return select_inducing(k, inputs, cfg.m, GreedyTraceSelection{});
}

bool VerificationReport::overall_pass() const {
  if (!setup_error.empty() || entries.empty()) return false;
  return std::all_of(entries.begin(), entries.end(),
                     [](const CheckEntry& e) { return e.status == CheckStatus::Pass; });
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

VerificationReport run_verification(const ExperimentConfig& cfg) {
  VerificationReport report;
  report.config = cfg;
  std::optional<Context> ctx;
  try {
    ctx.emplace(make_context(cfg));
    report.resolved = ctx->noise;
  } catch (const std::exception& e) {
    report.setup_error = e.what();
  }
  for (const auto& [name, fn] : registry()) {
    if (!ctx) {
      CheckEntry entry;
      entry.name = name;
      entry.status = CheckStatus::Fail;
      entry.error = report.setup_error;
      report.entries.push_back(std::move(entry));
      continue;
    }
    report.entries.push_back(run_one(*ctx, name, fn));
  }
  return report;
}

CheckEntry run_check(const ExperimentConfig& cfg, const std::string& name) {
  for (const auto& [n, fn] : registry()) {
    if (n != name) continue;
    try {
      const Context ctx = make_context(cfg);
      return run_one(ctx, name, fn);
    } catch (const std::exception& e) {
      CheckEntry entry;
      entry.name = name;
      entry.status = CheckStatus::Fail;
      entry.error = e.what();
      return entry;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown check '" + name + "'");
}

}  // namespace gpkrr
