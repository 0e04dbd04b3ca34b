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

// Acceptance run: one PASS/FAIL line per criterion. Where a relation only
// holds after correcting a missing factor, the literal form is printed first
// and the corrected form follows on its own line with a letter suffix.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "gpkrr/diagnostics.hpp"
#include "gpkrr/exact.hpp"
#include "gpkrr/harness.hpp"
#include "gpkrr/random.hpp"
#include "gpkrr/report.hpp"
#include "gpkrr/svgp.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gpkrr;

int failures = 0;

void report(const std::string& id, bool pass, const std::string& title, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(4) << id << std::setw(46)
            << title << detail << "\n";
}

void note(const std::string& text) { std::cout << "            " << text << "\n"; }

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

// Desk-scale instance: n cycles through {40, 60, 100}, d through {1, 2}, m through 1..12.
testing::Instance desk(std::uint64_t seed, double noise_lo = 0.05, double noise_hi = 0.5) {
  static constexpr std::array<Index, 3> sizes{40, 60, 100};
  testing::InstanceSpec spec;
  spec.n = sizes[seed % 3];
  spec.d = 1 + static_cast<Index>(seed % 2);
  spec.m = 1 + static_cast<Index>(seed % 12);
  spec.noise_lo = noise_lo;
  spec.noise_hi = noise_hi;
  return testing::random_instance(1000 + seed, spec);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void criterion_1() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const testing::Instance inst = desk(s);
    const OptimalPosterior post = OptimalPosterior::fit(inst.inducing, inst.data, inst.noise_var);
    const NystromModel nys = NystromModel::fit(inst.inducing, inst.data, inst.linked_ridge());
    const Points grid = testing::random_points(200, inst.data.dim(), -3, 3, s);
    for (Index i = 0; i < grid.rows(); ++i) {
      const double f = nys.predict(grid.row(i));
      worst = std::max({worst, std::abs(post.mean(grid.row(i)) - f),
                        std::abs(post.state().mean(grid.row(i)) - f)});
    }
  }
  report("1", worst <= 1e-8, "svgp mean equals nystrom krr", "max |m* - f_bar| = " + fmt(worst));
}

void criterion_2() {
  double worst_literal = 0.0;
  double worst_corrected = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const testing::Instance inst = desk(s);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const ElboBreakdown b =
          elbo_breakdown(random_state(inst.inducing, 1000 + s, k), inst.data, inst.noise_var);
      const double scale = std::max(1.0, std::abs(b.total_check));
      worst_literal = std::max(worst_literal, std::abs(b.residual_four_terms()) / scale);
      worst_corrected = std::max(worst_corrected, std::abs(b.residual_with_normalizer()) / scale);
    }
  }
  report("2", worst_literal <= 1e-8, "elbo four-term decomposition, as stated",
         "max rel residual = " + fmt(worst_literal));
  report("2b", worst_corrected <= 1e-8, "elbo decomposition + likelihood constant",
         "max rel residual = " + fmt(worst_corrected));
}

void criterion_3() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const testing::Instance inst = desk(s);
    const SvgpState opt = optimal_parameters(inst.inducing, inst.data, inst.noise_var);
    const Vector beta = NystromModel::fit(inst.inducing, inst.data, inst.linked_ridge()).beta();
    const double scale = std::max(1.0, beta.cwiseAbs().maxCoeff());
    worst = std::max(worst, (opt.span_coefficients() - beta).cwiseAbs().maxCoeff() / scale);
  }
  report("3", worst <= 1e-8, "psi(mu*) equals nystrom coefficients", "max rel diff = " + fmt(worst));
}

void criterion_4() {
  int violations = 0;
  double worst_grad = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const testing::Instance inst = desk(s);
    const SvgpState best = optimal_parameters(inst.inducing, inst.data, inst.noise_var);
    const double l_best = elbo(best, inst.data, inst.noise_var);
    const Index m = inst.inducing.size();
    auto rng = make_stream(1000 + s, 200);
    for (int t = 0; t < 100; ++t) {
      const double eps = 1e-2;
      const Vector mu = best.mu() + eps * standard_normal(m, rng);
      Matrix a(m, m);
      for (Index j = 0; j < m; ++j) a.col(j) = eps * standard_normal(m, rng);
      const Matrix tm = Matrix::Identity(m, m) + a;
      const SvgpState p = SvgpState::create(inst.inducing, mu, tm * best.sigma() * tm.transpose());
      if (elbo(p, inst.data, inst.noise_var) > l_best) ++violations;
    }
    auto f = [&](const Vector& mu) {
      return elbo(SvgpState::create(inst.inducing, mu, best.sigma()), inst.data, inst.noise_var);
    };
    worst_grad = std::max(worst_grad, testing::fd_gradient(f, best.mu(), 1e-5).norm());
  }
  report("4", violations == 0 && worst_grad <= 1e-5, "closed-form (mu*, Sigma*) is optimal",
         std::to_string(violations) + " of 2000 perturbations beat it; max |grad| = " +
             fmt(worst_grad));
}

void criterion_5() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const testing::Instance inst = desk(s);
    const KlPaths p = kl_paths(inst.kernel, inst.data, inst.inducing, inst.noise_var);
    worst = std::max(worst, rel(p.via_explicit, p.via_evidence));
  }
  double worst_full = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    testing::InstanceSpec spec;
    spec.n = 40;
    spec.d = 2;
    spec.inducing_equals_inputs = true;
    const testing::Instance inst = testing::random_instance(2000 + s, spec);
    const KlPaths p = kl_paths(inst.kernel, inst.data, inst.inducing, inst.noise_var);
    worst_full = std::max({worst_full, std::abs(p.via_evidence), std::abs(p.via_explicit)});
  }
  report("5", worst <= 1e-8 && worst_full <= 1e-8, "kl two-path identity",
         "max rel mismatch = " + fmt(worst) + "; max |KL| at Z=X = " + fmt(worst_full));
}

int count_violations(const std::vector<BoundRecord>& records, bool enforced) {
  int v = 0;
  for (const BoundRecord& r : records) {
    if (r.enforced == enforced && !r.holds) ++v;
  }
  return v;
}

void criterion_6() {
  int violations = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const testing::Instance inst = desk(s);
    violations += count_violations(
        burt_upper_bound(inst.kernel, inst.data, inst.inducing, inst.noise_var), true);
  }
  report("6", violations == 0, "kl upper bound and quadratic-form bound",
         std::to_string(violations) + " violations over 50 instances");
}

void criterion_7() {
  double worst_literal = 0.0;
  double worst_corrected = 0.0;
  int literal_bound = 0;
  int corrected_bound = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const testing::Instance inst = desk(s);
    for (const BoundRecord& r :
         excess_risk_identity(inst.kernel, inst.data, inst.inducing, inst.linked_ridge())) {
      const double e = std::abs(r.slack) / std::max(1.0, std::abs(r.rhs));
      (r.enforced ? worst_corrected : worst_literal) =
          std::max(r.enforced ? worst_corrected : worst_literal, e);
    }
    const auto bounds = excess_risk_upper_bound(inst.kernel, inst.data, inst.inducing, inst.linked_ridge());
    literal_bound += count_violations(bounds, false);
    corrected_bound += count_violations(bounds, true);
  }
  report("7", worst_literal <= 1e-8, "excess-risk identity, as stated",
         "max rel residual = " + fmt(worst_literal));
  report("7b", worst_corrected <= 1e-8, "excess-risk identity with n*lambda factor",
         "max rel residual = " + fmt(worst_corrected));
  report("7c", literal_bound == 0, "excess-risk bound, as stated",
         std::to_string(literal_bound) + " violations over 50 instances");
  report("7d", corrected_bound == 0, "excess-risk bound, rescaled",
         std::to_string(corrected_bound) + " violations over 50 instances");
  int high_noise = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const testing::Instance inst = desk(s, 2.0, 8.0);
    high_noise += count_violations(
        excess_risk_upper_bound(inst.kernel, inst.data, inst.inducing, inst.linked_ridge()), false);
  }
  note("as-stated bound with noise variance in [2, 8]: " + std::to_string(high_noise) +
       " violations over 50 instances");
}

void criterion_8() {
  int violations = 0;
  int sup_violations = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const testing::Instance inst = desk(s);
    if (!rkhs_distance_bound(inst.kernel, inst.data, inst.inducing, inst.linked_ridge()).holds) {
      ++violations;
    }
    const Points xs = testing::random_points(100, inst.data.dim(), -3, 3, 3000 + s);
    if (!sup_norm_check(inst.kernel, inst.data, inst.inducing, inst.linked_ridge(), xs).holds) {
      ++sup_violations;
    }
  }
  report("8", violations == 0 && sup_violations == 0, "rkhs distance bound",
         std::to_string(violations) + " bound and " + std::to_string(sup_violations) +
             " sup-norm violations over 50 instances");
}

void criterion_9() {
  int violations = 0;
  int pairs = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const testing::Instance inst = desk(s);
    const Index d = inst.data.dim();
    const Points xs = testing::random_points(20, d, -3, 3, 4000 + s);
    auto rng = make_stream(4000 + s, 13);
    std::uniform_int_distribution<Index> coord(0, d - 1);
    for (Index i = 0; i < xs.rows(); ++i) {
      ++pairs;
      if (!derivative_gap_bound(inst.kernel, inst.data, inst.inducing, inst.noise_var, xs.row(i),
                                coord(rng))
               .holds) {
        ++violations;
      }
    }
  }
  report("9", violations == 0, "derivative gap bound",
         std::to_string(violations) + " violations over " + std::to_string(pairs) + " pairs");
}

void criterion_10() {
  double worst = 0.0;
  bool all_hold = true;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const testing::Instance inst = desk(s);
    const Points xs = testing::random_points(100, inst.data.dim(), -3, 3, 5000 + s);
    for (Index i = 0; i < xs.rows(); ++i) {
      const BoundRecord r =
          worst_case_decomposition(inst.kernel, inst.data, inst.inducing, inst.noise_var, xs.row(i));
      all_hold = all_hold && r.holds;
      worst = std::max(worst, std::abs(r.slack));
    }
  }
  report("10", all_hold && worst <= 1e-8, "worst-case decomposition",
         "max residual = " + fmt(worst));
}

void criterion_11() {
  int inconsistent = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const testing::Instance inst = desk(s);
    const KlSandwich k = expected_kl_sandwich(inst.kernel, inst.data.inputs, inst.inducing,
                                              inst.noise_var, 2000, 6000 + s);
    if (!k.consistent()) ++inconsistent;
  }
  report("11", inconsistent == 0, "expected kl sandwich",
         std::to_string(inconsistent) + " of 10 instances outside the envelope");
}

void criterion_12() {
  int literal = 0;
  int rescaled = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const testing::Instance inst = desk(s);
    const ExcessRiskLowerBound b = expected_excess_risk_lower_bound(
        inst.kernel, inst.data.inputs, inst.inducing, inst.linked_ridge(), 2000, 7000 + s);
    if (!b.as_stated().holds) ++literal;
    if (!b.rescaled().holds) ++rescaled;
  }
  report("12", literal == 0, "expected excess-risk lower bound, as stated",
         std::to_string(literal) + " of 10 instances violate");
  report("12b", rescaled == 0, "expected excess-risk lower bound, rescaled",
         std::to_string(rescaled) + " of 10 instances violate");
}

void criterion_13() {
  double worst = 0.0;
  int most_iterations = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const testing::Instance inst = desk(s);
    const FixedPointResult r = fixed_point_solver(inst.inducing, inst.data, inst.noise_var);
    const SvgpState best = optimal_parameters(inst.inducing, inst.data, inst.noise_var);
    worst = std::max({worst, (r.state.mu() - best.mu()).cwiseAbs().maxCoeff(),
                      (r.state.sigma() - best.sigma()).cwiseAbs().maxCoeff()});
    most_iterations = std::max(most_iterations, r.iterations);
  }
  report("13", worst <= 1e-6 && most_iterations <= 10, "fixed-point solver",
         "max state diff = " + fmt(worst) + "; max iterations = " + std::to_string(most_iterations));
}

void criterion_14() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const testing::Instance inst = desk(s);
    const InducingSet& ind = inst.inducing;
    const Points w = testing::random_points(ind.size() + 3, inst.data.dim(), -3, 3, 8000 + s);
    const Matrix qww = ind.q_gram(w);
    const Matrix kzw = ind.cross_gram(w);
    auto rng = make_stream(8000 + s, 1);
    for (int t = 0; t < 50; ++t) {
      // f = sum_i c_i q(., w_i), expanded in H_q over W and in H_k over Z.
      const Vector c = standard_normal(w.rows(), rng);
      const double norm_q = c.dot(qww * c);
      const Vector b = ind.project(kzw * c);
      const double norm_k = b.dot(ind.kzz() * b);
      worst = std::max(worst, std::abs(norm_q - norm_k) / std::max(norm_k, 1e-300));
    }
  }
  report("14", worst <= 1e-8, "H_q norm equals H_k norm on M", "max rel diff = " + fmt(worst));
}

std::string run_command(const std::string& cmd) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return {};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  return out;
}

void criterion_15(const char* cli) {
  ExperimentConfig cfg;
  cfg.noise_var = 0.1;
  const std::string a = emit_report(run_verification(cfg), ReportFormat::Json);
  const std::string b = emit_report(run_verification(cfg), ReportFormat::Json);
  bool same = !a.empty() && a == b;
  std::string detail = std::to_string(a.size()) + " bytes in-process";
  if (cli != nullptr) {
    const std::string cmd = std::string(cli) + " verify --n 60 --m 8 --noise-var 0.1 --seed 7";
    const std::string c = run_command(cmd);
    const std::string d = run_command(cmd);
    same = same && !c.empty() && c == d;
    detail += ", " + std::to_string(c.size()) + " bytes from the cli";
  }
  report("15", same, "verify output is byte-identical", detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void()>> criteria{
      criterion_1, criterion_2,  criterion_3,  criterion_4,  criterion_5,
      criterion_6, criterion_7,  criterion_8,  criterion_9,  criterion_10,
      criterion_11, criterion_12, criterion_13, criterion_14,
      [&] { criterion_15(argc > 1 ? argv[1] : nullptr); }};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(std::to_string(i + 1), false, "threw", e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " lines FAIL")
            << "\n";
  return failures == 0 ? 0 : 1;
}
