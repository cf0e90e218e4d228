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
#include <vector>

#include "lnnhier/common.hpp"
#include "lnnhier/features.hpp"

namespace lnnhier {

/// Smallest value any factor entry may take.
inline constexpr double kNnmfFloor = 1e-8;

struct NnmfResult {
  Matrix w;  ///< rows x rank
  Matrix h;  ///< rank x cols
  double residual = 0.0;
  /// Frobenius residual before the first round (entry 0) and after each round.
  std::vector<double> residual_trace;
  std::size_t restart_index = 0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
};

/// Entrywise absolute value of the correlation features. Correlation signs
/// are discarded, which is what the baseline cannot represent.
Matrix nonneg_features(const FeatureMatrix& fm);

/// Lee-Seung multiplicative updates minimizing ||V - WH||_F.
///
/// W and H start from |N(0.5, variance 0.5)| draws (W row-major first, then
/// H), clamped to kNnmfFloor. Each round updates H, then W; entries are kept
/// at or above the floor.
NnmfResult nnmf_factorize(const Matrix& v, std::size_t rank, std::size_t iterations, std::uint64_t seed);

/// Best of `restarts` factorizations; restart r uses seed + r. Ties go to
/// the lowest restart index.
NnmfResult nnmf_best_of(const Matrix& v, std::size_t rank, std::size_t iterations, std::size_t restarts,
                        std::uint64_t seed);

/// Cluster of each row: argmax over the row of W, ties to the lowest column.
std::vector<std::size_t> nnmf_assign(const NnmfResult& result);

}  // namespace lnnhier
