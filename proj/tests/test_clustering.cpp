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

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "lnnhier/clustering.hpp"
#include "oracles.hpp"

using namespace lnnhier;

namespace {

Matrix points(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix line015() { return points({{0}, {1}, {5}}); }

std::vector<Cluster> random_partition(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> parts(1, n);
  const std::size_t c = parts(rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Cluster> out(c);
  for (std::size_t i = 0; i < n; ++i) out[i < c ? i : std::uniform_int_distribution<std::size_t>(0, c - 1)(rng)].push_back(perm[i]);
  return out;
}

}  // namespace

TEST_CASE("ess hand cases") {
  const Matrix m = points({{0, 0}, {2, 0}, {4, 0}});
  const std::vector<Cluster> singletons{{0}, {1}, {2}};
  CHECK(ess(singletons, m) == 0.0);
  CHECK(cluster_ess({0, 1}, m) == doctest::Approx(2.0).epsilon(1e-15));
  const std::vector<Cluster> pair_and_one{{0, 1}, {2}};
  CHECK(ess(pair_and_one, m) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("ess errors") {
  const Matrix m = points({{0, 0}, {2, 0}});
  const std::vector<Cluster> with_empty{{0, 1}, {}};
  CHECK_THROWS_AS(ess(with_empty, m), InvalidArgument);
  const std::vector<Cluster> missing{{0}};
  CHECK_THROWS_AS(ess(missing, m), InvalidArgument);
  const std::vector<Cluster> twice{{0, 1}, {1}};
  CHECK_THROWS_AS(ess(twice, m), InvalidArgument);
  CHECK_THROWS_AS(cluster_ess({5}, m), InvalidArgument);
}

TEST_CASE("ess matches the size-times-variance form") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = oracle::random_matrix(rng, 12, 4);
    const auto part = random_partition(rng, 12);
    CHECK(ess(part, m) == doctest::Approx(oracle::ess_variance_form(part, oracle::to_rows(m))).epsilon(1e-9));
  }
}

TEST_CASE("delta_ess hand cases and errors") {
  const Matrix m = points({{0, 0}, {2, 0}, {4, 0}, {1, 0}, {1, 0}});
  CHECK(delta_ess({0}, {1}, m) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(delta_ess({0, 1}, {2}, m) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(delta_ess({0, 1}, {3, 4}, m) == 0.0);
  CHECK_THROWS_AS(delta_ess({0, 1}, {1, 2}, m), InvalidArgument);
  CHECK_THROWS_AS(delta_ess({}, {1}, m), InvalidArgument);
}

TEST_CASE("delta_ess equals the ESS difference") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m = oracle::random_matrix(rng, 10, 3);
    auto part = random_partition(rng, 10);
    if (part.size() < 2) continue;
    const Cluster& a = part[0];
    const Cluster& b = part[1];
    Cluster ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(delta_ess(a, b, m) ==
          doctest::Approx(cluster_ess(ab, m) - cluster_ess(a, m) - cluster_ess(b, m)).epsilon(1e-9));
  }
}

TEST_CASE("ward on {0, 1, 5}") {
  const Dendrogram d = ward_cluster(line015());
  d.validate();
  REQUIRE(d.merges.size() == 2);
  CHECK(d.merges[0].left == 0);
  CHECK(d.merges[0].right == 1);
  CHECK(d.merges[0].height == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.merges[0].size == 2);
  CHECK(d.merges[1].left == 2);
  CHECK(d.merges[1].right == 3);
  CHECK(d.merges[1].height == doctest::Approx(13.5).epsilon(1e-15));
  CHECK(d.merges[1].size == 3);
  CHECK(d.leaf_order() == std::vector<std::size_t>{2, 0, 1});
}

TEST_CASE("ward: duplicates merge first at height 0") {
  const Dendrogram d = ward_cluster(points({{0.3, 1}, {4, 2}, {-1, 0}, {4, 2}}));
  CHECK(d.merges[0].left == 1);
  CHECK(d.merges[0].right == 3);
  CHECK(d.merges[0].height == 0.0);
}

TEST_CASE("ward: equal distances break ties on the lowest id pair") {
  const Dendrogram d = ward_cluster(points({{0}, {1}, {2}, {3}}));
  CHECK(d.merges[0].left == 0);
  CHECK(d.merges[0].right == 1);
  CHECK(d.merges[1].left == 2);
  CHECK(d.merges[1].right == 3);
}

TEST_CASE("ward errors") {
  CHECK_THROWS_AS(ward_cluster(points({{1, 2}})), InvalidArgument);
}

TEST_CASE("ward matches the brute-force oracle") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> rows(2, 10), cols(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = oracle::random_matrix(rng, rows(rng), cols(rng));
    const Dendrogram d = ward_cluster(m);
    const auto want = oracle::brute_force_ward(oracle::to_rows(m));
    REQUIRE(d.merges.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(d.merges[i].left == want[i].left);
      CHECK(d.merges[i].right == want[i].right);
      CHECK(d.merges[i].height == doctest::Approx(want[i].height).epsilon(1e-9));
      if (i > 0) CHECK(d.merges[i].height >= d.merges[i - 1].height);
    }
  }
}

TEST_CASE("cut") {
  const Matrix m = line015();
  const FeatureMatrix fm = FeatureMatrix::from_values(m, 1);
  const Dendrogram d = ward_cluster(m);

  const ClusterReport all = cut(d, 3, fm);
  CHECK(all.assignment == std::vector<std::size_t>{0, 1, 2});
  CHECK(all.centroids == m);

  const ClusterReport one = cut(d, 1, fm);
  CHECK(one.assignment == std::vector<std::size_t>{0, 0, 0});
  CHECK(one.centroids(0, 0) == doctest::Approx(2.0));

  const ClusterReport two = cut(d, 2, fm);
  CHECK(two.assignment == std::vector<std::size_t>{0, 0, 1});
  CHECK(two.sizes == std::vector<std::size_t>{2, 1});
  CHECK(two.centroids(0, 0) == doctest::Approx(0.5));
  CHECK(two.clusters() == std::vector<Cluster>{{0, 1}, {2}});

  CHECK_THROWS_AS(cut(d, 0, fm), InvalidArgument);
  CHECK_THROWS_AS(cut(d, 4, fm), InvalidArgument);
  CHECK_THROWS_AS(cut(d, 2, FeatureMatrix::from_values(points({{0}, {1}}), 1)), DimensionMismatch);
}

TEST_CASE("cuts of one dendrogram are nested") {
  std::mt19937_64 rng(4);
  const Matrix m = oracle::random_matrix(rng, 30, 5);
  const Dendrogram d = ward_cluster(m);
  for (std::size_t c = 1; c < 30; ++c) {
    CHECK(refines(d.cut_labels(c + 1), d.cut_labels(c)));
  }
  const std::vector<std::size_t> a{0, 0, 1}, b{0, 1, 1};
  CHECK(!refines(a, b));
}

TEST_CASE("cluster_roles") {
  Matrix m = points({{0.2, -0.4, 0.6}, {0.2, -0.4, 0.6}, {-0.9, 0.1, 0.3}});
  const FeatureMatrix fm = FeatureMatrix::from_values(m, 2);
  const Dendrogram d = ward_cluster(m);
  const RoleMatrix roles = cluster_roles(cut(d, 2, fm));
  CHECK(roles.roles.row(0) == m.row(0));
  CHECK(roles.roles.row(1) == m.row(2));
  CHECK(roles.input_role(1).size() == 2);
  CHECK(roles.output_role(1)(0) == 0.3);

  std::mt19937_64 rng(5);
  const Matrix r = oracle::random_matrix(rng, 15, 4);
  const FeatureMatrix rfm = FeatureMatrix::from_values(r, 3);
  const ClusterReport report = cut(ward_cluster(r), 4, rfm);
  const RoleMatrix rr = cluster_roles(report);
  const auto clusters = report.clusters();
  for (std::size_t c = 0; c < 4; ++c) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      double sum = 0.0;
      for (auto k : clusters[c]) sum += r(static_cast<Eigen::Index>(k), j);
      CHECK(rr.roles(static_cast<Eigen::Index>(c), j) == doctest::Approx(sum / clusters[c].size()).epsilon(1e-12));
    }
  }
}

TEST_CASE("dendrogram validation and newick") {
  const Dendrogram d = ward_cluster(line015());
  const std::vector<std::string> names{"a", "b", "c"};
  CHECK(to_newick(d, names) == "(c:13.5,(a:0.5,b:0.5):13);");
  Dendrogram bad = d;
  bad.merges[1].size = 2;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = d;
  bad.merges[1].left = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = d;
  bad.merges.pop_back();
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
