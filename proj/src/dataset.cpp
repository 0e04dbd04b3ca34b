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

#include "gpkrr/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "gpkrr/error.hpp"
#include "gpkrr/random.hpp"

namespace gpkrr {

void validate(const Dataset& data) {
  if (data.inputs.rows() < 1) throw Error(ErrorKind::InvalidArgument, "dataset is empty");
  if (data.inputs.cols() < 1) throw Error(ErrorKind::InvalidArgument, "inputs have zero dimension");
  if (data.targets.size() != data.inputs.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "inputs and targets have different lengths");
  }
  if (!data.inputs.allFinite() || !data.targets.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "dataset contains NaN or Inf");
  }
}

Dataset make_dataset(Points inputs, Vector targets, Provenance provenance) {
  Dataset data{std::move(inputs), std::move(targets), std::move(provenance)};
  validate(data);
  return data;
}

Points uniform_inputs(Index n, Index d, double lo, double hi, std::uint64_t seed,
                      std::uint64_t stream) {
  if (n < 1 || d < 1) throw Error(ErrorKind::InvalidArgument, "uniform_inputs needs n, d >= 1");
  auto rng = make_stream(seed, stream);
  std::uniform_real_distribution<double> unif(lo, hi);
  Points x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = unif(rng);
  return x;
}

Dataset synth_prior_dataset(const Kernel& k, const Points& inputs, double noise_var,
                            std::uint64_t seed) {
  if (!(noise_var > 0.0)) throw Error(ErrorKind::InvalidArgument, "noise variance must be positive");
  const Index n = inputs.rows();
  Matrix cov = gram(k, inputs);
  cov.diagonal().array() += noise_var;
  const SpdFactor chol = SpdFactor::factor(cov);
  auto rng = make_stream(seed, 1);
  Vector y = chol.lower() * standard_normal(n, rng);
  return make_dataset(inputs, std::move(y), SyntheticSource{seed, "prior"});
}

TestFunction parse_test_function(const std::string& name) {
  if (name == "zero") return TestFunction::Zero;
  if (name == "sine") return TestFunction::Sine;
  if (name == "bump") return TestFunction::Bump;
  throw Error(ErrorKind::InvalidArgument, "unknown test function '" + name + "'");
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::Zero: return "zero";
    case TestFunction::Sine: return "sine";
    case TestFunction::Bump: return "bump";
  }
  return "unknown";
}

double evaluate(TestFunction f, PointRef x) {
  switch (f) {
    case TestFunction::Zero: return 0.0;
    case TestFunction::Sine: return x.array().sin().sum();
    case TestFunction::Bump: return std::exp(-x.squaredNorm());
  }
  return 0.0;
}

Dataset synth_fixed_function_dataset(TestFunction f0, const Points& inputs, double noise_var,
                                     std::uint64_t seed) {
  if (!(noise_var >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise variance must be >= 0");
  const Index n = inputs.rows();
  auto rng = make_stream(seed, 2);
  const Vector eps = standard_normal(n, rng);
  Vector y(n);
  const double sd = std::sqrt(noise_var);
  for (Index i = 0; i < n; ++i) y(i) = evaluate(f0, inputs.row(i)) + (noise_var > 0.0 ? sd * eps(i) : 0.0);
  return make_dataset(inputs, std::move(y), SyntheticSource{seed, to_string(f0)});
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& reason) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + reason);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorKind::EmptyFile, path.string() + " has no header");

  // Header: x1,...,xd,y
  {
    const auto cells = split_commas(trim(line));
    columns = cells.size();
    if (columns < 2) parse_error(line_no, "header needs at least one input column and y");
    for (std::size_t c = 0; c + 1 < columns; ++c) {
      if (trim(cells[c]) != "x" + std::to_string(c + 1)) {
        parse_error(line_no, "expected header column x" + std::to_string(c + 1));
      }
    }
    if (trim(cells.back()) != "y") parse_error(line_no, "last header column must be y");
  }

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto cells = split_commas(body);
    if (cells.size() != columns) {
      parse_error(line_no, "expected " + std::to_string(columns) + " cells, got " +
                               std::to_string(cells.size()));
    }
    for (auto cell : cells) {
      cell = trim(cell);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        parse_error(line_no, "non-numeric cell '" + std::string(cell) + "'");
      }
      if (!std::isfinite(v)) parse_error(line_no, "non-finite value");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::EmptyFile, path.string() + " has no data rows");

  const Index d = static_cast<Index>(columns - 1);
  Points x(static_cast<Index>(rows), d);
  Vector y(static_cast<Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (Index c = 0; c < d; ++c) x(static_cast<Index>(r), c) = values[r * columns + static_cast<std::size_t>(c)];
    y(static_cast<Index>(r)) = values[r * columns + columns - 1];
  }
  return make_dataset(std::move(x), std::move(y), CsvSource{path.string()});
}

std::string to_csv(const Dataset& data) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Index c = 0; c < data.dim(); ++c) out << "x" << (c + 1) << ",";
  out << "y\n";
  for (Index r = 0; r < data.size(); ++r) {
    for (Index c = 0; c < data.dim(); ++c) out << data.inputs(r, c) << ",";
    out << data.targets(r) << "\n";
  }
  return out.str();
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << to_csv(data);
}

}  // namespace gpkrr
