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
#include <string_view>
#include <vector>

#include "lnnhier/common.hpp"
#include "lnnhier/dataset.hpp"

namespace lnnhier {

/// Fully connected feed-forward sigmoid network.
///
/// Layer 0 is the input layer, layer `depth() - 1` the output layer.
/// `weights[l](i, j)` connects unit i of layer l to unit j of layer l + 1.
/// `biases[l](j)` belongs to unit j of layer l + 1, i.e. the bias added when
/// that unit's activation is computed.
struct Network {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  std::size_t depth() const { return layer_sizes.size(); }
  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  std::size_t hidden_unit_count() const;
  std::size_t weight_count() const;
  std::size_t bias_count() const;

  /// Checks shapes, depth >= 3 and finiteness. Throws on violation.
  void validate() const;
};

/// Activations of every layer for one sample; `[0]` is the input itself.
using Activations = std::vector<Vector>;

enum class OrderPolicy { kUniformRandom, kCyclicByClass };

std::string_view to_string(OrderPolicy policy);
OrderPolicy order_policy_from_string(std::string_view name);

struct TrainConfig {
  double lambda = 0.0;
  double epsilon1 = 1e-3;
  /// Mean number of visits per sample; sets both the schedule and the
  /// default budget a1 * n1.
  double a1 = 1.0;
  double eta0 = 0.7;
  std::uint64_t seed = 0;
  /// Number of single-sample updates. Defaults to round(a1 * n1).
  std::optional<std::uint64_t> total_steps;
  OrderPolicy order = OrderPolicy::kUniformRandom;

  void validate() const;
};

struct TracePoint {
  std::uint64_t step = 0;
  double error = 0.0;
};

struct TrainResult {
  Network network;
  std::vector<TracePoint> trace;
  double final_error = 0.0;
  std::uint64_t steps = 0;
};

/// Raised when a parameter or activation becomes non-finite during training.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, std::vector<TracePoint> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<TracePoint>& trace() const { return trace_; }

 private:
  std::vector<TracePoint> trace_;
};

/// A connection that survives the magnitude threshold.
struct Edge {
  std::size_t layer = 0;  ///< source layer index (0 = input)
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;
};

double sigmoid(double x);

/// Draws every weight and bias i.i.d. from a normal with mean 0 and
/// variance 0.5, weights first (layer by layer, row-major), then biases.
Network init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

Activations forward(const Network& net, std::span<const double> x);

/// Network outputs for every row of `inputs`.
Matrix predict(const Network& net, const Matrix& inputs);

/// Mean over samples of the squared Euclidean output error.
double training_error(const Network& net, const Dataset& data);

/// Sum of |w| over all connection weights; biases are not included.
double l1_norm(const Network& net);

/// (n1 / 2) * training_error + lambda * l1_norm.
double objective(const Network& net, const Dataset& data, double lambda);

/// Step size at update t (t >= 1): eta0 * a1n1 / (a1n1 + 5 t).
double step_size(std::uint64_t t, double a1n1, double eta0 = 0.7);

/// One L1-regularized backpropagation update on a single sample.
///
/// All deltas are computed from the pre-update parameters, then every weight
/// and bias is updated at once. sgn(0) is taken as 0.
void backprop_step(Network& net, std::span<const double> x, std::span<const double> y,
                   double eta, double lambda, double epsilon1);

/// Visiting order for cyclic-by-class training: one sample of each class in
/// ascending class order, round-robin, skipping exhausted classes.
std::vector<std::size_t> class_cycle_order(std::span<const int> labels);

/// Runs the configured number of single-sample updates on a copy of `net`.
/// The error trace holds E(w) at step 0, after every n1 steps, and at the end.
TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg);

std::vector<Edge> prune_view(const Network& net, double threshold);

}  // namespace lnnhier
