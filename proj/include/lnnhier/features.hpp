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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lnnhier/common.hpp"
#include "lnnhier/dataset.hpp"
#include "lnnhier/network.hpp"

namespace lnnhier {

/// Location of a hidden unit. `layer` is the network layer index (0 = input).
struct UnitRef {
  std::size_t layer = 0;
  std::size_t position = 0;

  friend bool operator==(const UnitRef&, const UnitRef&) = default;
};

/// Hidden units of `net` in layer-major order (first hidden layer first).
std::vector<UnitRef> hidden_units(const Network& net);

/// One correlation feature vector per hidden unit.
///
/// Row k is [corr(input_i, o_k) for all i, corr(o_k, output_j) for all j].
/// Entries whose correlation is undefined because one side is constant are
/// stored as 0 and marked in `undefined`.
struct FeatureMatrix {
  Matrix values;
  std::vector<UnitRef> units;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> undefined;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  /// Wraps a bare matrix; every unit gets layer 1 and its row as position.
  static FeatureMatrix from_values(Matrix values, std::size_t input_dim);

  void validate() const;
};

struct FeatureOptions {
  /// Correlate unit outputs with the dataset targets instead of the
  /// network's own outputs.
  bool use_targets = false;
};

/// n1 x k0 matrix of hidden-unit activations, columns in hidden_units() order.
Matrix unit_outputs(const Network& net, const Dataset& data);

/// Pearson correlation with population moments. Returns nullopt when either
/// argument is constant. Throws on length mismatch or fewer than 2 samples.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

FeatureMatrix feature_vectors(const Network& net, const Dataset& data, const FeatureOptions& options = {});

/// Sum over unordered row pairs of cosine similarity; zero rows contribute 0.
double cosine_sum(const Matrix& values);
inline double cosine_sum(const FeatureMatrix& fm) { return cosine_sum(fm.values); }

struct FlipRecord {
  std::size_t iteration = 0;  ///< 1-based
  std::size_t unit = 0;
  bool flipped = false;
};

struct AlignmentTrace {
  std::size_t iterations = 0;
  /// Entry 0 is the initial cosine sum, entry a the sum after iteration a.
  std::vector<double> cosine_sum_series;
  std::vector<FlipRecord> flips;

  std::size_t flip_count() const;
};

struct AlignmentResult {
  FeatureMatrix features;
  AlignmentTrace trace;
};

/// Randomized sign alignment: each iteration picks a row uniformly and
/// negates it when its summed cosine similarity to all other rows is
/// negative. All-zero rows are never flipped.
AlignmentResult align_signs(const FeatureMatrix& fm, std::size_t iterations, std::uint64_t seed);

}  // namespace lnnhier
