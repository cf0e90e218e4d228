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

// Independent reference computations for the tests. Nothing here calls into
// the library's numeric code paths; only plain types are shared.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

#include "lnnhier/clustering.hpp"
#include "lnnhier/network.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const lnnhier::Matrix& m) {
  Rows r(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

inline lnnhier::Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  lnnhier::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

/// Straight-line forward pass with explicit index loops.
inline std::vector<std::vector<double>> forward(const lnnhier::Network& net, const std::vector<double>& x) {
  std::vector<std::vector<double>> o{x};
  for (std::size_t d = 0; d + 1 < net.layer_sizes.size(); ++d) {
    std::vector<double> next(net.layer_sizes[d + 1]);
    for (std::size_t j = 0; j < next.size(); ++j) {
      double s = net.biases[d](static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < o[d].size(); ++i) s += net.weights[d](i, j) * o[d][i];
      next[j] = 1.0 / (1.0 + std::exp(-s));
    }
    o.push_back(next);
  }
  return o;
}

inline double half_sq_error(const lnnhier::Network& net, const std::vector<double>& x, const std::vector<double>& y) {
  const auto o = forward(net, x).back();
  double e = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) e += (y[j] - o[j]) * (y[j] - o[j]);
  return 0.5 * e;
}

/// Central-difference gradient of the halved squared error w.r.t. weights.
inline std::vector<lnnhier::Matrix> weight_gradient_fd(lnnhier::Network net, const std::vector<double>& x,
                                                       const std::vector<double>& y, double h = 1e-6) {
  std::vector<lnnhier::Matrix> grad;
  for (std::size_t d = 0; d < net.weights.size(); ++d) {
    lnnhier::Matrix g(net.weights[d].rows(), net.weights[d].cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const double w = net.weights[d](i, j);
        net.weights[d](i, j) = w + h;
        const double plus = half_sq_error(net, x, y);
        net.weights[d](i, j) = w - h;
        const double minus = half_sq_error(net, x, y);
        net.weights[d](i, j) = w;
        g(i, j) = (plus - minus) / (2.0 * h);
      }
    }
    grad.push_back(g);
  }
  return grad;
}

inline std::vector<double> bias_gradient_fd(lnnhier::Network net, const std::vector<double>& x,
                                            const std::vector<double>& y, std::size_t layer, double h = 1e-6) {
  std::vector<double> g;
  for (Eigen::Index j = 0; j < net.biases[layer].size(); ++j) {
    const double b = net.biases[layer](j);
    net.biases[layer](j) = b + h;
    const double plus = half_sq_error(net, x, y);
    net.biases[layer](j) = b - h;
    const double minus = half_sq_error(net, x, y);
    net.biases[layer](j) = b;
    g.push_back((plus - minus) / (2.0 * h));
  }
  return g;
}

/// One-pass sums formula: (n Sab - Sa Sb) / sqrt((n Saa - Sa^2)(n Sbb - Sb^2)).
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  long double n = a.size(), sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += (long double)a[i] * a[i];
    sbb += (long double)b[i] * b[i];
    sab += (long double)a[i] * b[i];
  }
  return static_cast<double>((n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb)));
}

inline double cosine_sum(const Rows& v) {
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (std::size_t l = k + 1; l < v.size(); ++l) {
      double dot = 0, nk = 0, nl = 0;
      for (std::size_t m = 0; m < v[k].size(); ++m) {
        dot += v[k][m] * v[l][m];
        nk += v[k][m] * v[k][m];
        nl += v[l][m] * v[l][m];
      }
      if (nk > 0 && nl > 0) total += dot / std::sqrt(nk * nl);
    }
  }
  return total;
}

/// ESS as cluster size times variance (mean squared distance to centroid).
inline double ess_variance_form(const std::vector<std::vector<std::size_t>>& partition, const Rows& v) {
  double total = 0.0;
  for (const auto& c : partition) {
    const std::size_t dim = v[c.front()].size();
    std::vector<double> mean(dim, 0.0);
    for (auto k : c)
      for (std::size_t m = 0; m < dim; ++m) mean[m] += v[k][m] / static_cast<double>(c.size());
    double var = 0.0;
    for (auto k : c)
      for (std::size_t m = 0; m < dim; ++m) var += (v[k][m] - mean[m]) * (v[k][m] - mean[m]);
    var /= static_cast<double>(c.size());
    total += static_cast<double>(c.size()) * var;
  }
  return total;
}

/// ESS straight from its sum-of-squares definition.
inline double ess_definition(const std::vector<std::vector<std::size_t>>& partition, const Rows& v) {
  double total = 0.0;
  for (const auto& c : partition) {
    const std::size_t dim = v[c.front()].size();
    double sq = 0.0;
    std::vector<double> sum(dim, 0.0);
    for (auto k : c)
      for (std::size_t m = 0; m < dim; ++m) {
        sq += v[k][m] * v[k][m];
        sum[m] += v[k][m];
      }
    double sum_sq = 0.0;
    for (double s : sum) sum_sq += s * s;
    total += sq - sum_sq / static_cast<double>(c.size());
  }
  return total;
}

struct OracleMerge {
  std::size_t left, right;
  double height;
};

/// Greedy agglomeration that recomputes the total ESS of every candidate
/// partition at every step. Ties go to the smallest (lower id, higher id).
inline std::vector<OracleMerge> brute_force_ward(const Rows& v) {
  const std::size_t k0 = v.size();
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> clusters;  // (id, members)
  for (std::size_t k = 0; k < k0; ++k) clusters.push_back({k, {k}});
  std::vector<OracleMerge> merges;
  auto partition_of = [&](const auto& cs) {
    std::vector<std::vector<std::size_t>> p;
    for (const auto& c : cs) p.push_back(c.second);
    return p;
  };
  double current = ess_definition(partition_of(clusters), v);
  for (std::size_t step = 0; step + 1 < k0; ++step) {
    std::tuple<double, std::size_t, std::size_t> best{std::numeric_limits<double>::infinity(), 0, 0};
    std::size_t bi = 0, bj = 0;
    double best_total = 0.0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        auto trial = clusters;
        trial[i].second.insert(trial[i].second.end(), trial[j].second.begin(), trial[j].second.end());
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(j));
        const double total = ess_definition(partition_of(trial), v);
        const std::size_t a = std::min(clusters[i].first, clusters[j].first);
        const std::size_t b = std::max(clusters[i].first, clusters[j].first);
        const std::tuple<double, std::size_t, std::size_t> key{total, a, b};
        if (key < best) {
          best = key;
          bi = i;
          bj = j;
          best_total = total;
        }
      }
    }
    merges.push_back({std::get<1>(best), std::get<2>(best), best_total - current});
    current = best_total;
    clusters[bi].second.insert(clusters[bi].second.end(), clusters[bj].second.begin(), clusters[bj].second.end());
    clusters[bi].first = k0 + step;
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return merges;
}

inline std::vector<std::size_t> argmax_rows(const lnnhier::Matrix& w) {
  std::vector<std::size_t> out;
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    std::size_t best = 0;
    double best_v = -1.0;
    for (Eigen::Index m = 0; m < w.cols(); ++m) {
      if (w(k, m) > best_v) {
        best_v = w(k, m);
        best = static_cast<std::size_t>(m);
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace oracle
