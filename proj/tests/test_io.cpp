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

#include <filesystem>
#include <limits>
#include <random>

#include <doctest.h>

#include "lnnhier/io.hpp"
#include "oracles.hpp"

using namespace lnnhier;

TEST_CASE("format_number round trips") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = n(rng) * std::pow(10.0, i % 20 - 10);
    CHECK(parse_number(format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
  CHECK_THROWS_AS(parse_number("abc"), FormatError);
  CHECK_THROWS_AS(parse_number("1.5x"), FormatError);
}

TEST_CASE("csv matrices round trip") {
  std::mt19937_64 rng(2);
  const Matrix m = oracle::random_matrix(rng, 5, 3);
  const std::vector<std::string> header{"a", "b", "c"};
  std::vector<std::string> back_header;
  const Matrix back = matrix_from_csv(matrix_to_csv(m, header), &back_header);
  CHECK(back == m);
  CHECK(back_header == header);
  CHECK_THROWS_AS(matrix_from_csv("a,b\n1,2\n3\n"), FormatError);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
}

TEST_CASE("network json round trip") {
  const Network net = init_network(std::vector<std::size_t>{4, 3, 2}, 3);
  const Json j = network_to_json(net, Json{{"seed", 3}});
  const NetworkDocument doc = network_from_json(Json::parse(j.dump()));
  CHECK(doc.network.layer_sizes == net.layer_sizes);
  CHECK(doc.network.weights[0] == net.weights[0]);
  CHECK(doc.network.biases[1] == net.biases[1]);
  CHECK(doc.training["seed"] == 3);
  Json bad = j;
  bad["layer_sizes"] = {4, 3, 3};
  CHECK_THROWS_AS(network_from_json(bad), Error);
  bad = j;
  bad["format"] = "something";
  CHECK_THROWS_AS(network_from_json(bad), FormatError);
}

TEST_CASE("train config json round trip") {
  TrainConfig cfg;
  cfg.lambda = 2e-5;
  cfg.a1 = 500;
  cfg.seed = 9;
  cfg.total_steps = 1234;
  cfg.order = OrderPolicy::kCyclicByClass;
  const TrainConfig back = train_config_from_json(train_config_to_json(cfg));
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.a1 == cfg.a1);
  CHECK(back.seed == 9);
  CHECK(back.total_steps == cfg.total_steps);
  CHECK(back.order == OrderPolicy::kCyclicByClass);
  CHECK_THROWS_AS(order_policy_from_string("sideways"), InvalidArgument);
}

TEST_CASE("dataset directory round trip") {
  std::mt19937_64 rng(3);
  Dataset d;
  const Matrix raw = oracle::random_matrix(rng, 6, 3, 0.0, 10.0);
  d.input_scaling = Scaling::fit(raw, -1.0, 1.0);
  d.inputs = d.input_scaling->apply(raw);
  d.outputs = oracle::random_matrix(rng, 6, 2, 0.01, 0.99);
  d.labels = {0, 1, 2, 0, 1, 2};
  const auto dir = std::filesystem::temp_directory_path() / "lnnhier_dataset_test";
  save_dataset(d, dir);
  const Dataset back = load_dataset(dir);
  CHECK(back.inputs == d.inputs);
  CHECK(back.outputs == d.outputs);
  CHECK(back.labels == d.labels);
  REQUIRE(back.input_scaling.has_value());
  CHECK(back.input_scaling->raw_min == d.input_scaling->raw_min);
  CHECK(!back.output_scaling.has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("features csv and json round trip") {
  const Network net = init_network(std::vector<std::size_t>{3, 2, 2, 2}, 5);
  std::mt19937_64 rng(4);
  Dataset d;
  d.inputs = oracle::random_matrix(rng, 12, 3);
  d.inputs.col(2).setConstant(0.0);
  d.outputs = oracle::random_matrix(rng, 12, 2, 0.0, 1.0);
  const FeatureMatrix fm = feature_vectors(net, d);
  for (const FeatureMatrix& back : {features_from_csv(features_to_csv(fm)), features_from_json(features_to_json(fm))}) {
    CHECK(back.values == fm.values);
    CHECK(back.units == fm.units);
    CHECK(back.input_dim == 3);
    CHECK(back.output_dim == 2);
  }
  CHECK(features_from_json(features_to_json(fm)).undefined == fm.undefined);
  CHECK(unit_names(fm.units) == std::vector<std::string>{"L1U0", "L1U1", "L2U0", "L2U1"});
  const std::string csv = features_to_csv(fm);
  CHECK(csv.rfind("unit,layer,position,in_1,in_2,in_3,out_1,out_2\n", 0) == 0);
}

TEST_CASE("dendrogram json round trip and assignment csv") {
  std::mt19937_64 rng(5);
  const Matrix m = oracle::random_matrix(rng, 6, 2);
  const Dendrogram d = ward_cluster(m);
  const FeatureMatrix fm = FeatureMatrix::from_values(m, 1);
  const Dendrogram back = dendrogram_from_json(dendrogram_to_json(d, fm.units));
  REQUIRE(back.merges.size() == d.merges.size());
  for (std::size_t i = 0; i < d.merges.size(); ++i) {
    CHECK(back.merges[i].left == d.merges[i].left);
    CHECK(back.merges[i].right == d.merges[i].right);
    CHECK(back.merges[i].height == d.merges[i].height);
  }
  const std::vector<std::size_t> labels{0, 0, 1};
  const std::vector<UnitRef> units{{1, 0}, {1, 1}, {2, 0}};
  CHECK(assignment_to_csv(labels, units) == "unit,layer,position,cluster\n0,1,0,0\n1,1,1,0\n2,2,0,1\n");
}

TEST_CASE("alignment trace csv") {
  AlignmentTrace t;
  t.iterations = 2;
  t.cosine_sum_series = {-1.0, 1.0, 1.0};
  CHECK(alignment_trace_to_csv(t) == "iteration,cosine_sum\n0,-1\n1,1\n2,1\n");
}

TEST_CASE("read_text on a missing file") {
  CHECK_THROWS_AS(read_text("/nonexistent/lnnhier/file.txt"), IoError);
}
