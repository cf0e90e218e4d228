// Copyright 2026 The lnnhier Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lnnhier/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace lnnhier {
namespace {

bool is_constant(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

double negate(double x) { return x == 0.0 ? 0.0 : -x; }

}  // namespace

std::vector<UnitRef> hidden_units(const Network& net) {
  std::vector<UnitRef> units;
  for (std::size_t l = 1; l + 1 < net.depth(); ++l) {
    for (std::size_t p = 0; p < net.layer_sizes[l]; ++p) units.push_back({l, p});
  }
  return units;
}

FeatureMatrix FeatureMatrix::from_values(Matrix values, std::size_t input_dim) {
  if (input_dim > static_cast<std::size_t>(values.cols())) {
    throw InvalidArgument("input_dim exceeds feature width");
  }
  FeatureMatrix fm;
  fm.input_dim = input_dim;
  fm.output_dim = static_cast<std::size_t>(values.cols()) - input_dim;
  fm.undefined.setConstant(values.rows(), values.cols(), false);
  for (Eigen::Index k = 0; k < values.rows(); ++k) fm.units.push_back({1, static_cast<std::size_t>(k)});
  fm.values = std::move(values);
  return fm;
}

void FeatureMatrix::validate() const {
  if (input_dim + output_dim != cols()) throw DimensionMismatch("feature width != input_dim + output_dim");
  if (units.size() != rows()) throw DimensionMismatch("feature matrix unit list length != row count");
  if (undefined.rows() != values.rows() || undefined.cols() != values.cols()) {
    throw DimensionMismatch("feature matrix flag shape != value shape");
  }
}

std::size_t AlignmentTrace::flip_count() const {
  return static_cast<std::size_t>(
      std::count_if(flips.begin(), flips.end(), [](const FlipRecord& f) { return f.flipped; }));
}

Matrix unit_outputs(const Network& net, const Dataset& data) {
  data.validate();
  if (data.input_dim() != net.input_dim()) {
    throw DimensionMismatch(fmt::format("dataset has {} inputs, network expects {}", data.input_dim(), net.input_dim()));
  }
  const auto k0 = static_cast<Eigen::Index>(net.hidden_unit_count());
  Matrix out(data.inputs.rows(), k0);
  for (Eigen::Index n = 0; n < data.inputs.rows(); ++n) {
    const Activations o =
        forward(net, {data.inputs.data() + n * data.inputs.cols(), static_cast<std::size_t>(data.inputs.cols())});
    Eigen::Index k = 0;
    for (std::size_t l = 1; l + 1 < net.depth(); ++l) {
      out.row(n).segment(k, o[l].size()) = o[l].transpose();
      k += o[l].size();
    }
  }
  return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(fmt::format("pearson arguments have lengths {} and {}", a.size(), b.size()));
  }
  if (a.size() < 2) throw InvalidArgument("pearson needs at least 2 samples");
  if (is_constant(a) || is_constant(b)) return std::nullopt;
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  cov /= n;
  var_a /= n;
  var_b /= n;
  if (var_a <= 0.0 || var_b <= 0.0) return std::nullopt;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

FeatureMatrix feature_vectors(const Network& net, const Dataset& data, const FeatureOptions& options) {
  data.validate();
  if (data.output_dim() != net.output_dim()) {
    throw DimensionMismatch(fmt::format("dataset has {} outputs, network emits {}", data.output_dim(), net.output_dim()));
  }
  // Column-major copies so each sample series is contiguous.
  const Eigen::MatrixXd hidden = unit_outputs(net, data);
  const Eigen::MatrixXd inputs = data.inputs;
  const Eigen::MatrixXd outputs = options.use_targets ? Eigen::MatrixXd(data.outputs)
                                                      : Eigen::MatrixXd(predict(net, data.inputs));
  const auto n = static_cast<std::size_t>(hidden.rows());
  auto column = [n](const Eigen::MatrixXd& m, Eigen::Index c) {
    return std::span<const double>(m.data() + c * m.rows(), n);
  };

  FeatureMatrix fm;
  fm.input_dim = data.input_dim();
  fm.output_dim = data.output_dim();
  fm.units = hidden_units(net);
  const auto width = static_cast<Eigen::Index>(fm.input_dim + fm.output_dim);
  fm.values.setZero(hidden.cols(), width);
  fm.undefined.setConstant(hidden.cols(), width, false);
  for (Eigen::Index k = 0; k < hidden.cols(); ++k) {
    const auto unit = column(hidden, k);
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
      if (auto r = pearson(column(inputs, i), unit)) {
        fm.values(k, i) = *r;
      } else {
        fm.undefined(k, i) = true;
      }
    }
    for (Eigen::Index j = 0; j < outputs.cols(); ++j) {
      const Eigen::Index c = inputs.cols() + j;
      if (auto r = pearson(unit, column(outputs, j))) {
        fm.values(k, c) = *r;
      } else {
        fm.undefined(k, c) = true;
      }
    }
  }
  return fm;
}

double cosine_sum(const Matrix& values) {
  const Vector norms = values.rowwise().norm();
  double total = 0.0;
  for (Eigen::Index k = 0; k < values.rows(); ++k) {
    if (norms(k) == 0.0) continue;
    for (Eigen::Index l = k + 1; l < values.rows(); ++l) {
      if (norms(l) == 0.0) continue;
      total += values.row(k).dot(values.row(l)) / (norms(k) * norms(l));
    }
  }
  return total;
}

AlignmentResult align_signs(const FeatureMatrix& fm, std::size_t iterations, std::uint64_t seed) {
  fm.validate();
  AlignmentResult result{fm, {}};
  Matrix& v = result.features.values;
  AlignmentTrace& trace = result.trace;
  trace.iterations = iterations;
  trace.cosine_sum_series.reserve(iterations + 1);
  trace.flips.reserve(iterations);

  double total = cosine_sum(v);
  trace.cosine_sum_series.push_back(total);
  if (v.rows() == 0) {
    trace.cosine_sum_series.resize(iterations + 1, total);
    return result;
  }

  // Unit-length copies; zero rows stay zero and drop out of every sum.
  Matrix unit = v;
  for (Eigen::Index k = 0; k < unit.rows(); ++k) {
    const double norm = unit.row(k).norm();
    if (norm > 0.0) unit.row(k) /= norm;
  }
  std::vector<bool> zero_row(static_cast<std::size_t>(v.rows()));
  for (Eigen::Index k = 0; k < v.rows(); ++k) zero_row[static_cast<std::size_t>(k)] = v.row(k).isZero(0.0);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, v.rows() - 1);
  for (std::size_t a = 1; a <= iterations; ++a) {
    const Eigen::Index k = pick(rng);
    bool flipped = false;
    if (!zero_row[static_cast<std::size_t>(k)]) {
      double similarity = 0.0;
      for (Eigen::Index l = 0; l < unit.rows(); ++l) {
        if (l != k) similarity += unit.row(k).dot(unit.row(l));
      }
      if (similarity < 0.0) {
        v.row(k) = v.row(k).unaryExpr(&negate);
        unit.row(k) = unit.row(k).unaryExpr(&negate);
        // Negating row k turns each of its pair terms c into -c.
        total -= 2.0 * similarity;
        flipped = true;
      }
    }
    trace.flips.push_back({a, static_cast<std::size_t>(k), flipped});
    trace.cosine_sum_series.push_back(total);
  }
  return result;
}

}  // namespace lnnhier
