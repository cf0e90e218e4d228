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

#include "lnnhier/dataset.hpp"

#include <fmt/format.h>

namespace lnnhier {

Scaling Scaling::fit(const Matrix& raw, double target_low, double target_high) {
  if (raw.rows() == 0) throw InvalidArgument("cannot fit scaling on zero samples");
  if (!(target_low < target_high)) throw InvalidArgument("scaling target range is empty");
  Scaling s;
  s.target_low = target_low;
  s.target_high = target_high;
  s.raw_min = raw.colwise().minCoeff().transpose();
  s.raw_max = raw.colwise().maxCoeff().transpose();
  s.constant.resize(static_cast<std::size_t>(raw.cols()));
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    s.constant[static_cast<std::size_t>(c)] = s.raw_min(c) == s.raw_max(c);
  }
  return s;
}

Matrix Scaling::apply(const Matrix& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != size()) {
    throw DimensionMismatch(fmt::format("scaling has {} elements, data has {}", size(), raw.cols()));
  }
  const double mid = 0.5 * (target_low + target_high);
  const double span = target_high - target_low;
  Matrix out(raw.rows(), raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    if (constant[static_cast<std::size_t>(c)]) {
      out.col(c).setConstant(mid);
      continue;
    }
    const double width = raw_max(c) - raw_min(c);
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
      // endpoints exactly, independent of rounding in span
      if (raw(r, c) == raw_max(c)) {
        out(r, c) = target_high;
      } else {
        out(r, c) = target_low + span * (raw(r, c) - raw_min(c)) / width;
      }
    }
  }
  return out;
}

Matrix Scaling::invert(const Matrix& scaled) const {
  if (static_cast<std::size_t>(scaled.cols()) != size()) {
    throw DimensionMismatch(fmt::format("scaling has {} elements, data has {}", size(), scaled.cols()));
  }
  const double span = target_high - target_low;
  Matrix out(scaled.rows(), scaled.cols());
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    if (constant[static_cast<std::size_t>(c)]) {
      out.col(c).setConstant(raw_min(c));
      continue;
    }
    const double width = raw_max(c) - raw_min(c);
    for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
      out(r, c) = raw_min(c) + width * (scaled(r, c) - target_low) / span;
    }
  }
  return out;
}

void Dataset::validate() const {
  if (inputs.rows() != outputs.rows()) {
    throw DimensionMismatch(
        fmt::format("dataset has {} input rows but {} output rows", inputs.rows(), outputs.rows()));
  }
  if (!labels.empty() && labels.size() != size()) {
    throw DimensionMismatch(
        fmt::format("dataset has {} samples but {} labels", size(), labels.size()));
  }
}

}  // namespace lnnhier
