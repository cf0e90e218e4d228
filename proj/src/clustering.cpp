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

#include "lnnhier/clustering.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

namespace lnnhier {
namespace {

Vector cluster_sum(const Cluster& cluster, const Matrix& values) {
  Vector sum = Vector::Zero(values.cols());
  for (auto k : cluster) {
    if (k >= static_cast<std::size_t>(values.rows())) {
      throw InvalidArgument(fmt::format("cluster member {} out of range ({} rows)", k, values.rows()));
    }
    sum += values.row(static_cast<Eigen::Index>(k)).transpose();
  }
  return sum;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

double cluster_ess(const Cluster& cluster, const Matrix& values) {
  if (cluster.empty()) throw InvalidArgument("empty cluster");
  double squares = 0.0;
  for (auto k : cluster) {
    if (k >= static_cast<std::size_t>(values.rows())) {
      throw InvalidArgument(fmt::format("cluster member {} out of range ({} rows)", k, values.rows()));
    }
    squares += values.row(static_cast<Eigen::Index>(k)).squaredNorm();
  }
  return squares - cluster_sum(cluster, values).squaredNorm() / static_cast<double>(cluster.size());
}

double ess(std::span<const Cluster> partition, const Matrix& values) {
  std::vector<int> seen(static_cast<std::size_t>(values.rows()), 0);
  double total = 0.0;
  for (const auto& cluster : partition) {
    total += cluster_ess(cluster, values);
    for (auto k : cluster) ++seen[k];
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (seen[k] != 1) {
      throw InvalidArgument(fmt::format("row {} appears {} times in the partition", k, seen[k]));
    }
  }
  return total;
}

double delta_ess(const Cluster& a, const Cluster& b, const Matrix& values) {
  if (a.empty() || b.empty()) throw InvalidArgument("empty cluster");
  Cluster sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  Cluster common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
  if (!common.empty()) throw InvalidArgument(fmt::format("clusters overlap at row {}", common.front()));
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const Vector diff = cluster_sum(a, values) / na - cluster_sum(b, values) / nb;
  return na * nb / (na + nb) * diff.squaredNorm();
}

void Dendrogram::validate() const {
  if (leaf_count == 0) throw InvalidArgument("dendrogram without leaves");
  if (merges.size() != leaf_count - 1) {
    throw InvalidArgument(fmt::format("dendrogram over {} leaves has {} merges", leaf_count, merges.size()));
  }
  std::vector<std::size_t> size(2 * leaf_count - 1, 1);
  std::vector<bool> used(2 * leaf_count - 1, false);
  for (std::size_t m = 0; m < merges.size(); ++m) {
    const Merge& mg = merges[m];
    const std::size_t id = leaf_count + m;
    if (mg.left >= id || mg.right >= id || mg.left == mg.right) {
      throw InvalidArgument(fmt::format("merge {} references invalid ids", m));
    }
    if (used[mg.left] || used[mg.right]) throw InvalidArgument(fmt::format("merge {} reuses a cluster", m));
    used[mg.left] = used[mg.right] = true;
    size[id] = size[mg.left] + size[mg.right];
    if (size[id] != mg.size) throw InvalidArgument(fmt::format("merge {} has inconsistent size", m));
  }
}

std::vector<std::size_t> Dendrogram::leaf_order() const {
  std::vector<std::size_t> order;
  if (leaf_count == 0) return order;
  std::vector<std::size_t> stack{2 * leaf_count - 2};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (id < leaf_count) {
      order.push_back(id);
    } else {
      const Merge& mg = merges[id - leaf_count];
      stack.push_back(mg.right);
      stack.push_back(mg.left);
    }
  }
  return order;
}

std::vector<std::size_t> Dendrogram::cut_labels(std::size_t c) const {
  if (c < 1 || c > leaf_count) {
    throw InvalidArgument(fmt::format("cluster count {} outside [1, {}]", c, leaf_count));
  }
  std::vector<std::size_t> parent(leaf_count);
  std::iota(parent.begin(), parent.end(), 0);
  // representative leaf of every cluster id
  std::vector<std::size_t> rep(2 * leaf_count - 1);
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(leaf_count), 0);
  for (std::size_t m = 0; m < leaf_count - c; ++m) {
    const Merge& mg = merges[m];
    const std::size_t a = find_root(parent, rep[mg.left]);
    const std::size_t b = find_root(parent, rep[mg.right]);
    parent[std::max(a, b)] = std::min(a, b);
    rep[leaf_count + m] = std::min(a, b);
  }
  std::vector<std::size_t> labels(leaf_count);
  std::vector<std::size_t> label_of_root(leaf_count, leaf_count);
  std::size_t next = 0;
  for (std::size_t k = 0; k < leaf_count; ++k) {
    const std::size_t root = find_root(parent, k);
    if (label_of_root[root] == leaf_count) label_of_root[root] = next++;
    labels[k] = label_of_root[root];
  }
  return labels;
}

Dendrogram ward_cluster(const Matrix& values) {
  const auto k0 = static_cast<std::size_t>(values.rows());
  if (k0 < 2) throw InvalidArgument(fmt::format("ward clustering needs at least 2 rows, got {}", k0));

  // Slot p holds cluster id ids[p] with size sizes[p]; dist is indexed by slot.
  std::vector<std::size_t> ids(k0), sizes(k0, 1);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<bool> active(k0, true);
  Matrix dist = Matrix::Zero(static_cast<Eigen::Index>(k0), static_cast<Eigen::Index>(k0));
  for (std::size_t p = 0; p < k0; ++p) {
    for (std::size_t q = p + 1; q < k0; ++q) {
      const double d = 0.5 * (values.row(static_cast<Eigen::Index>(p)) - values.row(static_cast<Eigen::Index>(q))).squaredNorm();
      dist(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = d;
      dist(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = d;
    }
  }

  Dendrogram tree;
  tree.leaf_count = k0;
  tree.merges.reserve(k0 - 1);
  for (std::size_t m = 0; m + 1 < k0; ++m) {
    std::size_t best_p = 0, best_q = 0;
    std::tuple<double, std::size_t, std::size_t> best{0.0, 0, 0};
    bool found = false;
    for (std::size_t p = 0; p < k0; ++p) {
      if (!active[p]) continue;
      for (std::size_t q = p + 1; q < k0; ++q) {
        if (!active[q]) continue;
        const std::tuple<double, std::size_t, std::size_t> key{
            dist(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)), std::min(ids[p], ids[q]),
            std::max(ids[p], ids[q])};
        if (!found || key < best) {
          best = key;
          best_p = p;
          best_q = q;
          found = true;
        }
      }
    }
    const double height = std::get<0>(best);
    tree.merges.push_back({std::get<1>(best), std::get<2>(best), height, sizes[best_p] + sizes[best_q]});

    // Lance-Williams update for Ward's criterion expressed in delta ESS.
    const auto p = static_cast<Eigen::Index>(best_p);
    const auto q = static_cast<Eigen::Index>(best_q);
    const double np = static_cast<double>(sizes[best_p]);
    const double nq = static_cast<double>(sizes[best_q]);
    for (std::size_t k = 0; k < k0; ++k) {
      if (!active[k] || k == best_p || k == best_q) continue;
      const auto kk = static_cast<Eigen::Index>(k);
      const double nk = static_cast<double>(sizes[k]);
      double d = ((np + nk) * dist(kk, p) + (nq + nk) * dist(kk, q) - nk * height) / (np + nq + nk);
      // Ward is reducible: merged distances never fall below the merge height.
      d = std::max(d, height);
      dist(kk, p) = d;
      dist(p, kk) = d;
    }
    ids[best_p] = k0 + m;
    sizes[best_p] += sizes[best_q];
    active[best_q] = false;
  }
  return tree;
}

std::vector<Cluster> ClusterReport::clusters() const {
  std::vector<Cluster> out(c);
  for (std::size_t k = 0; k < assignment.size(); ++k) out[assignment[k]].push_back(k);
  return out;
}

ClusterReport cut(const Dendrogram& d, std::size_t c, const FeatureMatrix& fm) {
  if (fm.rows() != d.leaf_count) {
    throw DimensionMismatch(fmt::format("dendrogram has {} leaves, feature matrix {} rows", d.leaf_count, fm.rows()));
  }
  ClusterReport report;
  report.c = c;
  report.assignment = d.cut_labels(c);
  report.input_dim = fm.input_dim;
  report.output_dim = fm.output_dim;
  report.sizes.assign(c, 0);
  report.centroids.setZero(static_cast<Eigen::Index>(c), fm.values.cols());
  for (std::size_t k = 0; k < report.assignment.size(); ++k) {
    const auto m = static_cast<Eigen::Index>(report.assignment[k]);
    report.centroids.row(m) += fm.values.row(static_cast<Eigen::Index>(k));
    ++report.sizes[report.assignment[k]];
  }
  for (std::size_t m = 0; m < c; ++m) {
    report.centroids.row(static_cast<Eigen::Index>(m)) /= static_cast<double>(report.sizes[m]);
  }
  return report;
}

RoleMatrix cluster_roles(const ClusterReport& report) {
  if (static_cast<std::size_t>(report.centroids.rows()) != report.c ||
      static_cast<std::size_t>(report.centroids.cols()) != report.input_dim + report.output_dim) {
    throw DimensionMismatch("cluster report centroids have the wrong shape");
  }
  return {report.centroids, report.input_dim, report.output_dim};
}

bool refines(std::span<const std::size_t> fine, std::span<const std::size_t> coarse) {
  if (fine.size() != coarse.size()) throw DimensionMismatch("partitions cover different unit counts");
  std::vector<std::size_t> parent_of;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    if (fine[k] >= parent_of.size()) parent_of.resize(fine[k] + 1, SIZE_MAX);
    if (parent_of[fine[k]] == SIZE_MAX) {
      parent_of[fine[k]] = coarse[k];
    } else if (parent_of[fine[k]] != coarse[k]) {
      return false;
    }
  }
  return true;
}

std::string to_newick(const Dendrogram& d, std::span<const std::string> leaf_names) {
  d.validate();
  if (leaf_names.size() != d.leaf_count) {
    throw DimensionMismatch(fmt::format("{} leaf names for {} leaves", leaf_names.size(), d.leaf_count));
  }
  auto height_of = [&d](std::size_t id) { return id < d.leaf_count ? 0.0 : d.merges[id - d.leaf_count].height; };
  // Recursive descent with an explicit stack keeps deep trees safe.
  std::string out;
  struct Frame {
    std::size_t id;
    int stage;
  };
  std::vector<Frame> stack{{2 * d.leaf_count - 2, 0}};
  std::vector<std::size_t> parent(2 * d.leaf_count - 1, 2 * d.leaf_count - 1);
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    parent[d.merges[m].left] = parent[d.merges[m].right] = d.leaf_count + m;
  }
  auto emit_length = [&](std::size_t id) {
    if (parent[id] < parent.size()) out += fmt::format(":{}", height_of(parent[id]) - height_of(id));
  };
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.id < d.leaf_count) {
      out += leaf_names[f.id];
      emit_length(f.id);
      stack.pop_back();
      continue;
    }
    const Merge& mg = d.merges[f.id - d.leaf_count];
    if (f.stage == 0) {
      out += '(';
      f.stage = 1;
      stack.push_back({mg.left, 0});
    } else if (f.stage == 1) {
      out += ',';
      f.stage = 2;
      stack.push_back({mg.right, 0});
    } else {
      out += ')';
      emit_length(f.id);
      stack.pop_back();
    }
  }
  out += ";";
  return out;
}

}  // namespace lnnhier
