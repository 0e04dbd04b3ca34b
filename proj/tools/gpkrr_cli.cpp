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

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpkrr/dataset.hpp"
#include "gpkrr/diagnostics.hpp"
#include "gpkrr/error.hpp"
#include "gpkrr/exact.hpp"
#include "gpkrr/harness.hpp"
#include "gpkrr/nystrom.hpp"
#include "gpkrr/report.hpp"
#include "gpkrr/svgp.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct Flags {
  gpkrr::ExperimentConfig cfg;
  std::string selection = "greedy_trace";
  std::string format = "json";
  std::string csv;
  std::string output;
  double noise_var = 0.0;
  double ridge = 0.0;
  bool timings = false;
};

void add_experiment_flags(CLI::App* app, Flags& f) {
  app->add_option("--kernel", f.cfg.kernel.family, "kernel family")
      ->check(CLI::IsMember({"gaussian", "polynomial"}));
  app->add_option("--gamma", f.cfg.kernel.gamma, "gaussian lengthscale");
  app->add_option("--degree", f.cfg.kernel.degree, "polynomial degree");
  app->add_option("--offset", f.cfg.kernel.offset, "polynomial offset");
  app->add_option("--n", f.cfg.n, "number of synthetic samples");
  app->add_option("--d", f.cfg.d, "input dimension");
  app->add_option("--m", f.cfg.m, "number of inducing points");
  app->add_option("--noise-var", f.noise_var, "noise variance");
  app->add_option("--ridge", f.ridge, "ridge parameter");
  app->add_flag("--link-noise-ridge", f.cfg.link_noise_ridge, "tie noise variance to n * ridge");
  app->add_option("--seed", f.cfg.seed, "random seed");
  app->add_option("--select", f.selection, "inducing point selection")
      ->check(CLI::IsMember({"uniform", "greedy_trace"}));
  app->add_option("--mc-samples", f.cfg.mc_samples, "Monte Carlo draws");
  app->add_option("--csv", f.csv, "read the dataset from a CSV file");
  app->add_option("--format", f.format, "output format")->check(CLI::IsMember({"json", "text"}));
  app->add_option("--output,-o", f.output, "write output to a file");
  app->add_flag("--timings", f.timings, "include per-check wall-clock seconds in JSON");
}

gpkrr::ExperimentConfig finish(CLI::App* app, Flags& f) {
  gpkrr::ExperimentConfig cfg = f.cfg;
  if (app->count("--noise-var") > 0) cfg.noise_var = f.noise_var;
  if (app->count("--ridge") > 0) cfg.ridge = f.ridge;
  if (!f.csv.empty()) cfg.csv_path = f.csv;
  cfg.selection = gpkrr::parse_selection(f.selection);
  return cfg;
}

void write_out(const Flags& f, const std::string& text) {
  if (f.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(f.output, std::ios::binary);
  if (!out) throw gpkrr::Error(gpkrr::ErrorKind::InvalidArgument, "cannot open " + f.output);
  out << text;
}

Json vector_json(const gpkrr::Vector& v) {
  Json a = Json::array();
  for (gpkrr::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

int run_fit(CLI::App* app, Flags& f, const std::string& model) {
  const gpkrr::ExperimentConfig cfg = finish(app, f);
  gpkrr::validate(cfg);
  const gpkrr::Dataset data = gpkrr::build_dataset(cfg);
  const gpkrr::Kernel k = gpkrr::make_kernel(cfg.kernel, data.dim());
  const gpkrr::NoiseRidge nr = gpkrr::resolve_noise_ridge(cfg, data.size());
  const double n = static_cast<double>(data.size());

  Json j;
  j["model"] = model;
  j["kernel"] = k.describe();
  j["n"] = data.size();
  j["noise_var"] = nr.noise_var;
  j["ridge"] = nr.ridge;
  if (model == "exact") {
    const gpkrr::KrrModel krr = gpkrr::KrrModel::fit(k, data, nr.ridge);
    j["regularized_risk"] =
        gpkrr::regularized_risk(krr.fitted_values(), krr.rkhs_norm_sq(), data, nr.ridge);
    j["rkhs_norm_sq"] = krr.rkhs_norm_sq();
    j["log_marginal_likelihood"] = gpkrr::log_marginal_likelihood(k, data, nr.noise_var);
    j["training_rmse"] = std::sqrt((data.targets - krr.fitted_values()).squaredNorm() / n);
  } else {
    const gpkrr::Selection sel = gpkrr::build_inducing(cfg, k, data.inputs);
    Json idx = Json::array();
    for (gpkrr::Index i : sel.indices) idx.push_back(i);
    j["inducing_indices"] = idx;
    j["trace_gap"] = gpkrr::trace_gap(sel.inducing, data.inputs);
    if (model == "nystrom") {
      const gpkrr::NystromModel nys = gpkrr::NystromModel::fit(sel.inducing, data, nr.ridge);
      const gpkrr::Vector fitted = nys.predict_all(data.inputs);
      j["beta"] = vector_json(nys.beta());
      j["regularized_risk"] =
          gpkrr::regularized_risk(fitted, nys.rkhs_norm_sq(), data, nr.ridge);
      j["training_rmse"] = std::sqrt((data.targets - fitted).squaredNorm() / n);
    } else {
      const gpkrr::SvgpState s = gpkrr::optimal_parameters(sel.inducing, data, nr.noise_var);
      j["mu"] = vector_json(s.mu());
      j["sigma_diagonal"] = vector_json(s.sigma().diagonal());
      j["elbo"] = gpkrr::elbo(s, data, nr.noise_var);
      j["kl_to_exact_posterior"] =
          gpkrr::kl_to_exact_posterior(k, data, sel.inducing, nr.noise_var);
    }
  }
  write_out(f, j.dump(2) + "\n");
  return 0;
}

int emit(const Flags& f, const gpkrr::VerificationReport& report) {
  gpkrr::EmitOptions opts;
  opts.timings = f.timings;
  write_out(f, gpkrr::emit_report(report, gpkrr::parse_report_format(f.format), opts));
  return report.overall_pass() ? 0 : 1;
}

int run_synth(CLI::App* app, Flags& f, const std::string& generator) {
  gpkrr::ExperimentConfig cfg = finish(app, f);
  cfg.csv_path.reset();
  const gpkrr::NoiseRidge nr = gpkrr::resolve_noise_ridge(cfg, cfg.n);
  gpkrr::Dataset data;
  if (generator == "prior") {
    data = gpkrr::build_dataset(cfg);
  } else {
    const gpkrr::Points x =
        gpkrr::uniform_inputs(cfg.n, cfg.d, cfg.input_low, cfg.input_high, cfg.seed);
    data = gpkrr::synth_fixed_function_dataset(gpkrr::parse_test_function(generator), x,
                                               nr.noise_var, cfg.seed);
  }
  write_out(f, gpkrr::to_csv(data));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse GP / Nystrom KRR approximation checks"};
  app.require_subcommand(1);

  Flags fit_flags, verify_flags, bounds_flags, synth_flags;
  std::string model = "svgp";
  std::string bound_name;
  std::string generator = "prior";

  CLI::App* fit = app.add_subcommand("fit", "fit a model and print a summary");
  add_experiment_flags(fit, fit_flags);
  fit->add_option("--model", model, "model")->check(CLI::IsMember({"exact", "nystrom", "svgp"}));

  CLI::App* verify = app.add_subcommand("verify", "run every check and print a report");
  add_experiment_flags(verify, verify_flags);

  CLI::App* bounds = app.add_subcommand("bounds", "run one named check");
  add_experiment_flags(bounds, bounds_flags);
  bounds->add_option("--name", bound_name, "check name")
      ->required()
      ->check(CLI::IsMember(gpkrr::check_names()));

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  add_experiment_flags(synth, synth_flags);
  synth->add_option("--generator", generator, "prior, zero, sine or bump")
      ->check(CLI::IsMember({"prior", "zero", "sine", "bump"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return run_fit(fit, fit_flags, model);
    if (verify->parsed()) {
      return emit(verify_flags, gpkrr::run_verification(finish(verify, verify_flags)));
    }
    if (bounds->parsed()) {
      const gpkrr::ExperimentConfig cfg = finish(bounds, bounds_flags);
      gpkrr::VerificationReport report;
      report.config = cfg;
      try {
        gpkrr::Dataset data = gpkrr::build_dataset(cfg);
        report.resolved = gpkrr::resolve_noise_ridge(cfg, data.size());
      } catch (const std::exception& e) {
        report.setup_error = e.what();
      }
      report.entries.push_back(gpkrr::run_check(cfg, bound_name));
      return emit(bounds_flags, report);
    }
    if (synth->parsed()) return run_synth(synth, synth_flags, generator);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
