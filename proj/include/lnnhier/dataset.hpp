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

#pragma once

#include <optional>
#include <vector>

#include "lnnhier/common.hpp"

namespace lnnhier {

/// Per-element affine min/max scaling onto [target_low, target_high].
///
/// Elements whose observed minimum equals their maximum cannot be scaled;
/// they map to the middle of the target range and are marked `constant`.
struct Scaling {
  Vector raw_min;
  Vector raw_max;
  double target_low = 0.0;
  double target_high = 1.0;
  std::vector<bool> constant;

  /// Fits min/max per column of `raw`.
  static Scaling fit(const Matrix& raw, double target_low, double target_high);

  Matrix apply(const Matrix& raw) const;
  Matrix invert(const Matrix& scaled) const;
  std::size_t size() const { return static_cast<std::size_t>(raw_min.size()); }
};

/// Paired training samples. Row n of `inputs` and `outputs` is one sample.
struct Dataset {
  Matrix inputs;
  Matrix outputs;
  /// Optional class label per sample; empty when the data has no classes.
  std::vector<int> labels;
  std::optional<Scaling> input_scaling;
  std::optional<Scaling> output_scaling;

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(inputs.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(outputs.cols()); }

  /// Throws DimensionMismatch when row counts or label count disagree.
  void validate() const;
};

}  // namespace lnnhier
