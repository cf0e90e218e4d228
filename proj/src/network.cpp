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

#include "lnnhier/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

namespace lnnhier {
namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_sample(const Network& net, std::span<const double> x, std::span<const double> y) {
  if (x.size() != net.input_dim()) {
    throw DimensionMismatch(fmt::format("input has {} values, network expects {}", x.size(), net.input_dim()));
  }
  if (y.size() != net.output_dim()) {
    throw DimensionMismatch(fmt::format("target has {} values, network emits {}", y.size(), net.output_dim()));
  }
}

void check_dataset(const Network& net, const Dataset& data) {
  data.validate();
  if (data.size() == 0) throw InvalidArgument("dataset is empty");
  if (data.input_dim() != net.input_dim() || data.output_dim() != net.output_dim()) {
    throw DimensionMismatch(fmt::format("dataset is {}->{}, network is {}->{}", data.input_dim(),
                                        data.output_dim(), net.input_dim(), net.output_dim()));
  }
}

std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

std::size_t Network::hidden_unit_count() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l + 1 < layer_sizes.size(); ++l) n += layer_sizes[l];
  return n;
}

std::size_t Network::weight_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  return n;
}

std::size_t Network::bias_count() const {
  std::size_t n = 0;
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

void Network::validate() const {
  if (layer_sizes.size() < 3) {
    throw InvalidArgument(fmt::format("network needs at least 3 layers, got {}", layer_sizes.size()));
  }
  for (auto s : layer_sizes) {
    if (s == 0) throw InvalidArgument("network layer of size zero");
  }
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != layer_sizes.size() - 1) {
    throw DimensionMismatch("network parameter list length does not match depth");
  }
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto rows = static_cast<Eigen::Index>(layer_sizes[l]);
    const auto cols = static_cast<Eigen::Index>(layer_sizes[l + 1]);
    if (weights[l].rows() != rows || weights[l].cols() != cols || biases[l].size() != cols) {
      throw DimensionMismatch(fmt::format("parameters of layer {} have the wrong shape", l));
    }
    if (!all_finite(weights[l]) || !all_finite(biases[l])) {
      throw InvalidArgument(fmt::format("non-finite parameter in layer {}", l));
    }
  }
}

std::string_view to_string(OrderPolicy policy) {
  switch (policy) {
    case OrderPolicy::kUniformRandom:
      return "uniform-random";
    case OrderPolicy::kCyclicByClass:
      return "cyclic-by-class";
  }
  return "uniform-random";
}

OrderPolicy order_policy_from_string(std::string_view name) {
  if (name == "uniform-random") return OrderPolicy::kUniformRandom;
  if (name == "cyclic-by-class") return OrderPolicy::kCyclicByClass;
  throw InvalidArgument(fmt::format("unknown order policy '{}'", name));
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(epsilon1 >= 0.0)) throw InvalidArgument("epsilon1 must be >= 0");
  if (!(a1 > 0.0)) throw InvalidArgument("a1 must be > 0");
  if (!(eta0 > 0.0)) throw InvalidArgument("eta0 must be > 0");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Network init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 3) {
    throw InvalidArgument(fmt::format("network needs at least 3 layers, got {}", layer_sizes.size()));
  }
  if (std::find(layer_sizes.begin(), layer_sizes.end(), std::size_t{0}) != layer_sizes.end()) {
    throw InvalidArgument("network layer of size zero");
  }
  Network net;
  net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Matrix w(static_cast<Eigen::Index>(layer_sizes[l]), static_cast<Eigen::Index>(layer_sizes[l + 1]));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = normal(rng);
    }
    net.weights.push_back(std::move(w));
  }
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    Vector b(static_cast<Eigen::Index>(layer_sizes[l]));
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = normal(rng);
    net.biases.push_back(std::move(b));
  }
  return net;
}

Activations forward(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw DimensionMismatch(fmt::format("input has {} values, network expects {}", x.size(), net.input_dim()));
  }
  Activations out;
  out.reserve(net.depth());
  out.emplace_back(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
  if (!out.front().allFinite()) throw InvalidArgument("non-finite input value");
  for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
    Vector pre = net.weights[l].transpose() * out.back() + net.biases[l];
    out.emplace_back(pre.unaryExpr([](double v) { return sigmoid(v); }));
  }
  return out;
}

Matrix predict(const Network& net, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != net.input_dim()) {
    throw DimensionMismatch(fmt::format("inputs have {} columns, network expects {}", inputs.cols(), net.input_dim()));
  }
  Matrix out(inputs.rows(), static_cast<Eigen::Index>(net.output_dim()));
  for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
    out.row(n) = forward(net, row_span(inputs, n)).back().transpose();
  }
  return out;
}

double training_error(const Network& net, const Dataset& data) {
  check_dataset(net, data);
  double total = 0.0;
  for (Eigen::Index n = 0; n < data.inputs.rows(); ++n) {
    const Vector f = forward(net, row_span(data.inputs, n)).back();
    total += (data.outputs.row(n).transpose() - f).squaredNorm();
  }
  return total / static_cast<double>(data.size());
}

double l1_norm(const Network& net) {
  double total = 0.0;
  for (const auto& w : net.weights) total += w.cwiseAbs().sum();
  return total;
}

double objective(const Network& net, const Dataset& data, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  const double n1 = static_cast<double>(data.size());
  return 0.5 * n1 * training_error(net, data) + lambda * l1_norm(net);
}

double step_size(std::uint64_t t, double a1n1, double eta0) {
  return eta0 * a1n1 / (a1n1 + 5.0 * static_cast<double>(t));
}

void backprop_step(Network& net, std::span<const double> x, std::span<const double> y,
                   double eta, double lambda, double epsilon1) {
  check_sample(net, x, y);
  if (!(eta > 0.0)) throw InvalidArgument("step size must be > 0");
  const Activations o = forward(net, x);
  const std::size_t last = net.depth() - 1;
  const Eigen::Map<const Vector> target(y.data(), static_cast<Eigen::Index>(y.size()));

  auto slope = [epsilon1](const Vector& a) {
    return (a.array() * (1.0 - a.array()) + epsilon1).matrix();
  };

  // delta[l] belongs to the units of layer l; delta[0] is unused.
  std::vector<Vector> delta(net.depth());
  delta[last] = ((o[last] - target).array() * slope(o[last]).array()).matrix();
  for (std::size_t l = last - 1; l >= 1; --l) {
    delta[l] = ((net.weights[l] * delta[l + 1]).array() * slope(o[l]).array()).matrix();
  }

  for (std::size_t l = 0; l < last; ++l) {
    Matrix grad = o[l] * delta[l + 1].transpose();
    if (lambda != 0.0) grad += lambda * net.weights[l].unaryExpr([](double w) { return sgn(w); });
    net.weights[l] -= eta * grad;
    net.biases[l] -= eta * delta[l + 1];
    if (!net.weights[l].allFinite() || !net.biases[l].allFinite()) {
      throw TrainingDiverged(fmt::format("non-finite parameter in layer {} after update", l), {});
    }
  }
}

std::vector<std::size_t> class_cycle_order(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t n = 0; n < labels.size(); ++n) by_class[labels[n]].push_back(n);
  std::size_t longest = 0;
  for (const auto& [label, members] : by_class) longest = std::max(longest, members.size());
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  for (std::size_t round = 0; round < longest; ++round) {
    for (const auto& [label, members] : by_class) {
      if (round < members.size()) order.push_back(members[round]);
    }
  }
  return order;
}

TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  net.validate();
  check_dataset(net, data);

  const std::size_t n1 = data.size();
  const double a1n1 = cfg.a1 * static_cast<double>(n1);
  const std::uint64_t total = cfg.total_steps.value_or(static_cast<std::uint64_t>(std::llround(a1n1)));

  std::vector<std::size_t> cycle;
  if (cfg.order == OrderPolicy::kCyclicByClass) {
    if (data.labels.empty()) throw InvalidArgument("cyclic-by-class order needs class labels");
    cycle = class_cycle_order(data.labels);
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n1 - 1);

  TrainResult result;
  result.trace.push_back({0, training_error(net, data)});
  for (std::uint64_t t = 1; t <= total; ++t) {
    const std::size_t n = cycle.empty() ? pick(rng) : cycle[(t - 1) % cycle.size()];
    try {
      backprop_step(net, row_span(data.inputs, static_cast<Eigen::Index>(n)),
                    row_span(data.outputs, static_cast<Eigen::Index>(n)), step_size(t, a1n1, cfg.eta0),
                    cfg.lambda, cfg.epsilon1);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(fmt::format("training diverged at step {}: {}", t, e.what()), result.trace);
    } catch (const InvalidArgument& e) {
      throw TrainingDiverged(fmt::format("training diverged at step {}: {}", t, e.what()), result.trace);
    }
    if (t % n1 == 0 || t == total) result.trace.push_back({t, training_error(net, data)});
  }
  result.final_error = result.trace.back().error;
  result.steps = total;
  result.network = std::move(net);
  return result;
}

std::vector<Edge> prune_view(const Network& net, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("prune threshold must be >= 0");
  std::vector<Edge> edges;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Matrix& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (std::abs(w(i, j)) >= threshold) {
          edges.push_back({l, static_cast<std::size_t>(i), static_cast<std::size_t>(j), w(i, j)});
        }
      }
    }
  }
  return edges;
}

}  // namespace lnnhier
