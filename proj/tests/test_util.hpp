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

#include <algorithm>
#include <cmath>
#include <random>

#include "lnnhier/dataset.hpp"

namespace test {

inline bool rel_close(double a, double b, double tol, double floor = 1e-4) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor});
}

/// Two bits in [-1, 1], XOR target in [0.01, 0.99].
inline lnnhier::Dataset xor_dataset() {
  lnnhier::Dataset d;
  d.inputs.resize(4, 2);
  d.inputs << -1, -1, -1, 1, 1, -1, 1, 1;
  d.outputs.resize(4, 1);
  d.outputs << 0.01, 0.99, 0.99, 0.01;
  d.labels = {0, 1, 1, 0};
  return d;
}

/// Smooth nonlinear targets of uniform inputs.
inline lnnhier::Dataset regression_dataset(int n, int in, int out, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  lnnhier::Dataset d;
  d.inputs.resize(n, in);
  d.outputs.resize(n, out);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < in; ++j) d.inputs(i, j) = u(rng);
    for (int k = 0; k < out; ++k) {
      double s = 0.0;
      for (int j = 0; j < in; ++j) s += std::sin(1.0 + j + k) * d.inputs(i, j);
      d.outputs(i, k) = 0.01 + 0.98 / (1.0 + std::exp(-2.0 * s));
    }
  }
  return d;
}

}  // namespace test
