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

#include <span>
#include <string>
#include <vector>

#include "lnnhier/common.hpp"
#include "lnnhier/features.hpp"

namespace lnnhier {

/// A cluster is a list of row indices into a feature matrix.
using Cluster = std::vector<std::size_t>;

/// Error sum of squares of a partition of the rows of `values`:
/// sum over clusters of (sum ||v||^2 - ||sum v||^2 / |C|).
/// The partition must cover every row exactly once; clusters must be nonempty.
double ess(std::span<const Cluster> partition, const Matrix& values);

/// ESS of a single cluster (one term of ess()).
double cluster_ess(const Cluster& cluster, const Matrix& values);

/// Increase of ESS caused by merging two disjoint nonempty clusters:
/// |A||B| / (|A| + |B|) * ||mean(A) - mean(B)||^2.
double delta_ess(const Cluster& a, const Cluster& b, const Matrix& values);

struct Merge {
  std::size_t left = 0;   ///< smaller of the two merged cluster ids
  std::size_t right = 0;  ///< larger of the two merged cluster ids
  double height = 0.0;    ///< delta ESS of this merge
  std::size_t size = 0;   ///< number of leaves in the new cluster
};

/// Full agglomeration history. Leaves have ids 0..k0-1 and merge m creates
/// cluster id k0 + m.
struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;

  /// Throws when ids, sizes or merge count are inconsistent.
  void validate() const;

  /// Leaves in drawing order: left subtree before right subtree, from the root.
  std::vector<std::size_t> leaf_order() const;

  /// Cluster label per leaf after undoing the last c - 1 merges. Labels are
  /// numbered by the smallest leaf they contain.
  std::vector<std::size_t> cut_labels(std::size_t c) const;
};

/// Ward's agglomerative clustering of the rows of `values`. At each step the
/// pair with minimum delta ESS merges; ties go to the lexicographically
/// smallest (lower id, higher id) pair.
Dendrogram ward_cluster(const Matrix& values);
inline Dendrogram ward_cluster(const FeatureMatrix& fm) { return ward_cluster(fm.values); }

struct ClusterReport {
  std::size_t c = 0;
  std::vector<std::size_t> assignment;  ///< cluster label per unit
  Matrix centroids;                     ///< c x width, row m = mean of cluster m
  std::vector<std::size_t> sizes;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;

  std::vector<Cluster> clusters() const;
};

/// Partition at resolution c with centroids over the given feature rows.
ClusterReport cut(const Dendrogram& d, std::size_t c, const FeatureMatrix& fm);

/// Role matrix: one centroid per cluster, split into input/output segments.
struct RoleMatrix {
  Matrix roles;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;

  auto input_role(Eigen::Index m) const { return roles.row(m).head(static_cast<Eigen::Index>(input_dim)); }
  auto output_role(Eigen::Index m) const { return roles.row(m).tail(static_cast<Eigen::Index>(output_dim)); }
};

RoleMatrix cluster_roles(const ClusterReport& report);

/// True when every cluster of `fine` lies inside a single cluster of `coarse`.
bool refines(std::span<const std::size_t> fine, std::span<const std::size_t> coarse);

/// Newick text of the dendrogram; branch lengths are height differences.
std::string to_newick(const Dendrogram& d, std::span<const std::string> leaf_names);

}  // namespace lnnhier
