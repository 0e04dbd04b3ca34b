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
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "gpkrr/dataset.hpp"
#include "gpkrr/error.hpp"
#include "support/instances.hpp"

namespace gpkrr {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / ("gpkrr_test_" + name);
  std::ofstream(p, std::ios::binary) << contents;
  return p;
}

ErrorKind kind_of_load(const fs::path& p, std::string* message = nullptr) {
  try {
    load_csv(p);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  return ErrorKind::InternalInconsistency;
}

TEST(Csv, TwoRows) {
  const Dataset d = load_csv(temp_file("two.csv", "x1,y\n0.5,1.25\n-2,3e-1\n"));
  ASSERT_EQ(d.size(), 2);
  ASSERT_EQ(d.dim(), 1);
  EXPECT_EQ(d.inputs(0, 0), 0.5);
  EXPECT_EQ(d.inputs(1, 0), -2.0);
  EXPECT_EQ(d.targets(0), 1.25);
  EXPECT_EQ(d.targets(1), 0.3);
  EXPECT_TRUE(std::holds_alternative<CsvSource>(d.provenance));
}

TEST(Csv, NonNumericCellNamesLine) {
  std::string msg;
  EXPECT_EQ(kind_of_load(temp_file("bad.csv", "x1,x2,y\n1,2,3\n1,abc,3\n"), &msg),
            ErrorKind::ParseError);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Csv, WrongHeaderAndWidth) {
  EXPECT_EQ(kind_of_load(temp_file("hdr.csv", "a,b\n1,2\n")), ErrorKind::ParseError);
  std::string msg;
  EXPECT_EQ(kind_of_load(temp_file("width.csv", "x1,y\n1,2\n1,2,3\n"), &msg),
            ErrorKind::ParseError);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Csv, EmptyFiles) {
  EXPECT_EQ(kind_of_load(temp_file("empty.csv", "")), ErrorKind::EmptyFile);
  EXPECT_EQ(kind_of_load(temp_file("header_only.csv", "x1,y\n")), ErrorKind::EmptyFile);
}

TEST(Csv, RoundTripIsLossless) {
  const Points x = testing::random_points(25, 3, -1e3, 1e3, 5);
  Vector y = x.col(0) * (1.0 / 3.0) + x.col(2).cwiseProduct(x.col(1)) * 1e-7;
  const Dataset d = make_dataset(x, y);
  const fs::path p = fs::temp_directory_path() / "gpkrr_test_roundtrip.csv";
  write_csv(p, d);
  const Dataset back = load_csv(p);
  EXPECT_EQ(back.inputs, d.inputs);
  EXPECT_EQ(back.targets, d.targets);
}

TEST(SynthPrior, DegenerateKernelGivesStandardNormal) {
  // k(0,0) = 0 for the linear kernel without offset, so y ~ N(0, I).
  const Kernel k = Kernel::polynomial(1, 0.0, 1);
  const Points x = Points::Zero(2000, 1);
  const Dataset d = synth_prior_dataset(k, x, 1.0, 42);
  const double n = 2000.0;
  const double mean = d.targets.mean();
  const double var = (d.targets.array() - mean).square().sum() / (n - 1.0);
  // Var of the sample variance of N(0,1) is 2/(n-1).
  EXPECT_NEAR(var, 1.0, 3.0 * std::sqrt(2.0 / (n - 1.0)));
  EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(n));
}

TEST(SynthPrior, Reproducible) {
  const Kernel k = Kernel::gaussian(1.0, 2);
  const Points x = testing::random_points(30, 2, -2, 2, 1);
  EXPECT_EQ(synth_prior_dataset(k, x, 0.1, 9).targets, synth_prior_dataset(k, x, 0.1, 9).targets);
  EXPECT_NE(synth_prior_dataset(k, x, 0.1, 9).targets, synth_prior_dataset(k, x, 0.1, 10).targets);
}

TEST(SynthPrior, EmpiricalCovariance) {
  const Kernel k = Kernel::gaussian(1.0, 1);
  Points x(3, 1);
  x << -0.5, 0.0, 1.0;
  const double s2 = 0.3;
  Matrix expected = gram(k, x);
  expected.diagonal().array() += s2;
  constexpr int kReps = 5000;
  Matrix sum = Matrix::Zero(3, 3);
  Matrix sum_sq = Matrix::Zero(3, 3);
  for (int r = 0; r < kReps; ++r) {
    const Vector y = synth_prior_dataset(k, x, s2, static_cast<std::uint64_t>(r) + 1000).targets;
    const Matrix outer = y * y.transpose();
    sum += outer;
    sum_sq += outer.cwiseProduct(outer);
  }
  const Matrix mean = sum / kReps;
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      const double var = sum_sq(i, j) / kReps - mean(i, j) * mean(i, j);
      EXPECT_NEAR(mean(i, j), expected(i, j), 3.0 * std::sqrt(var / kReps)) << i << "," << j;
    }
  }
}

TEST(SynthFixedFunction, NoiselessIsExact) {
  const Points x = testing::random_points(20, 2, -2, 2, 2);
  for (TestFunction f : {TestFunction::Zero, TestFunction::Sine, TestFunction::Bump}) {
    const Dataset d = synth_fixed_function_dataset(f, x, 0.0, 3);
    for (Index i = 0; i < x.rows(); ++i) EXPECT_EQ(d.targets(i), evaluate(f, x.row(i)));
  }
}

TEST(SynthFixedFunction, ZeroFunctionIsPureNoise) {
  const Points x = testing::random_points(2000, 1, -2, 2, 2);
  const Dataset d = synth_fixed_function_dataset(TestFunction::Zero, x, 0.25, 4);
  EXPECT_NEAR(d.targets.mean(), 0.0, 3.0 * 0.5 / std::sqrt(2000.0));
}

TEST(SynthFixedFunction, ReproducibleAndNamed) {
  const Points x = testing::random_points(10, 1, -2, 2, 2);
  EXPECT_EQ(synth_fixed_function_dataset(TestFunction::Sine, x, 0.1, 5).targets,
            synth_fixed_function_dataset(TestFunction::Sine, x, 0.1, 5).targets);
  EXPECT_EQ(parse_test_function(to_string(TestFunction::Bump)), TestFunction::Bump);
  EXPECT_THROW(parse_test_function("cosine"), Error);
}

TEST(Dataset, Validation) {
  Points x(2, 1);
  x << 0.0, 1.0;
  Vector y(3);
  y << 1, 2, 3;
  EXPECT_THROW(make_dataset(x, y), Error);
  Vector bad(2);
  bad << 1.0, std::nan("");
  EXPECT_THROW(make_dataset(x, bad), Error);
}

}  // namespace
}  // namespace gpkrr
