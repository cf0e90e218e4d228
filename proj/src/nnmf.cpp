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

#include "lnnhier/nnmf.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace lnnhier {
namespace {

double residual(const Matrix& v, const Matrix& w, const Matrix& h) { return (v - w * h).norm(); }

}  // namespace

Matrix nonneg_features(const FeatureMatrix& fm) { return fm.values.cwiseAbs(); }

NnmfResult nnmf_factorize(const Matrix& v, std::size_t rank, std::size_t iterations, std::uint64_t seed) {
  if ((v.array() < 0.0).any()) throw InvalidArgument("nnmf input has a negative entry");
  if (!v.allFinite()) throw InvalidArgument("nnmf input has a non-finite entry");
  const auto max_rank = static_cast<std::size_t>(std::min(v.rows(), v.cols()));
  if (rank < 1 || rank > max_rank) {
    throw InvalidArgument(fmt::format("nnmf rank {} outside [1, {}]", rank, max_rank));
  }
  const auto r = static_cast<Eigen::Index>(rank);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.5, std::sqrt(0.5));
  auto draw = [&] { return std::max(std::abs(normal(rng)), kNnmfFloor); };
  NnmfResult out;
  out.seed = seed;
  out.iterations = iterations;
  out.w.resize(v.rows(), r);
  out.h.resize(r, v.cols());
  for (Eigen::Index i = 0; i < out.w.rows(); ++i) {
    for (Eigen::Index j = 0; j < r; ++j) out.w(i, j) = draw();
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < out.h.cols(); ++j) out.h(i, j) = draw();
  }

  // Each update minimizes a separable quadratic upper bound of the loss, so
  // clamping the minimizer to the floor keeps the residual non-increasing.
  out.residual_trace.reserve(iterations + 1);
  out.residual_trace.push_back(residual(v, out.w, out.h));
  for (std::size_t it = 0; it < iterations; ++it) {
    const Matrix wt_v = out.w.transpose() * v;
    const Matrix wt_wh = (out.w.transpose() * out.w) * out.h;
    out.h = (out.h.array() * wt_v.array() / wt_wh.array()).max(kNnmfFloor).matrix();
    const Matrix v_ht = v * out.h.transpose();
    const Matrix w_hht = out.w * (out.h * out.h.transpose());
    out.w = (out.w.array() * v_ht.array() / w_hht.array()).max(kNnmfFloor).matrix();
    out.residual_trace.push_back(residual(v, out.w, out.h));
  }
  out.residual = out.residual_trace.back();
  return out;
}

NnmfResult nnmf_best_of(const Matrix& v, std::size_t rank, std::size_t iterations, std::size_t restarts,
                        std::uint64_t seed) {
  if (restarts < 1) throw InvalidArgument("nnmf needs at least one restart");
  NnmfResult best = nnmf_factorize(v, rank, iterations, seed);
  for (std::size_t r = 1; r < restarts; ++r) {
    NnmfResult next = nnmf_factorize(v, rank, iterations, seed + r);
    if (next.residual < best.residual) {
      next.restart_index = r;
      best = std::move(next);
    }
  }
  return best;
}

std::vector<std::size_t> nnmf_assign(const NnmfResult& result) {
  std::vector<std::size_t> labels(static_cast<std::size_t>(result.w.rows()));
  for (Eigen::Index k = 0; k < result.w.rows(); ++k) {
    Eigen::Index best = 0;
    for (Eigen::Index m = 1; m < result.w.cols(); ++m) {
      if (result.w(k, m) > result.w(k, best)) best = m;
    }
    labels[static_cast<std::size_t>(k)] = static_cast<std::size_t>(best);
  }
  return labels;
}

}  // namespace lnnhier
