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

#include <cstdlib>
#include <filesystem>
#include <regex>
#include <string>

#include <doctest.h>

#include "lnnhier/io.hpp"
#include "lnnhier/render.hpp"

using namespace lnnhier;

namespace {

// Set LNNHIER_UPDATE_GOLDEN=1 to rewrite the checked-in files.
void check_golden(const std::string& name, const std::string& text) {
  const std::filesystem::path path = std::filesystem::path(LNNHIER_GOLDEN_DIR) / name;
  if (std::getenv("LNNHIER_UPDATE_GOLDEN") != nullptr) write_text(path, text);
  REQUIRE(std::filesystem::exists(path));
  CHECK(read_text(path) == text);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

RoleMatrix three_cluster_roles() {
  RoleMatrix r;
  r.input_dim = 4;
  r.output_dim = 2;
  r.roles.resize(3, 6);
  r.roles << 1.0, 1.0, 1.0, 1.0, 0.5, -0.5,
             0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
             -1.0, 0.25, -0.25, 0.75, -0.9, 0.1;
  return r;
}

Dendrogram line015() {
  Matrix m(3, 1);
  m << 0, 1, 5;
  return ward_cluster(m);
}

}  // namespace

TEST_CASE("diverging_color endpoints") {
  CHECK(diverging_color(0.0) == "#f7f7f7");
  CHECK(diverging_color(1.0) == "#b2182b");
  CHECK(diverging_color(-1.0) == "#2166ac");
  CHECK(diverging_color(5.0) == diverging_color(1.0));
  CHECK(diverging_color(0.3) != diverging_color(-0.3));
}

TEST_CASE("render_dendrogram: two leaves give one inverted U") {
  Matrix m(2, 1);
  m << 0, 2;
  const Dendrogram d = ward_cluster(m);
  const std::vector<std::string> names{"x", "y"};
  const std::string svg = render_dendrogram(d, names);
  CHECK(count(svg, "<path") == 1);
  // M x0 bottom V top H x1 V bottom
  std::smatch match;
  REQUIRE(std::regex_search(svg, match, std::regex("d=\"M([0-9.]+) ([0-9.]+) V([0-9.]+) H([0-9.]+) V([0-9.]+)\"")));
  CHECK(std::stod(match[2]) == std::stod(match[5]));
  CHECK(std::stod(match[3]) < std::stod(match[2]));
  CHECK_THROWS_AS(render_dendrogram(d, std::vector<std::string>{"x"}), DimensionMismatch);
}

TEST_CASE("render_dendrogram: higher merges are drawn higher") {
  const Dendrogram d = line015();
  const std::string svg = render_dendrogram(d, std::vector<std::string>{"a", "b", "c"});
  const std::regex re("V([0-9.]+) H");
  std::vector<double> tops;
  for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it) tops.push_back(std::stod((*it)[1]));
  REQUIRE(tops.size() == 2);
  CHECK(tops[1] < tops[0]);
}

TEST_CASE("render_dendrogram golden") {
  check_golden("dendrogram_015.svg", render_dendrogram(line015(), std::vector<std::string>{"a", "b", "c"}));
}

TEST_CASE("render_role: neutral and saturated panels") {
  RoleLayoutSpec layout;
  layout.image_side = 2;
  const RoleMatrix roles = three_cluster_roles();
  const std::string zero = render_role(roles, 1, layout);
  CHECK(count(zero, diverging_color(0.0)) == 4 + 2);
  const std::string full = render_role(roles, 0, layout);
  CHECK(count(full, "fill=\"" + diverging_color(1.0) + "\"") == 4);
  layout.image_side = 3;
  CHECK_THROWS_AS(render_role(roles, 0, layout), DimensionMismatch);
  CHECK_THROWS_AS(render_role(roles, 3, RoleLayoutSpec{}), InvalidArgument);
}

TEST_CASE("render_roles golden on a 3-cluster fixture") {
  RoleLayoutSpec grid;
  grid.image_side = 2;
  grid.output_names = {"p", "q"};
  const auto panels = render_roles(three_cluster_roles(), grid);
  REQUIRE(panels.size() == 3);
  for (std::size_t m = 0; m < 3; ++m) check_golden("roles_grid_" + std::to_string(m) + ".svg", panels[m]);

  RoleLayoutSpec series;
  series.kind = RoleLayout::kPerItemSeries;
  series.item_names = {"u", "v"};
  series.window = 2;
  const auto lines = render_roles(three_cluster_roles(), series);
  REQUIRE(lines.size() == 3);
  check_golden("roles_series_2.svg", lines[2]);
}

TEST_CASE("render_network, heatmap and series are well formed") {
  Network net = init_network(std::vector<std::size_t>{3, 4, 2}, 1);
  const std::vector<std::size_t> labels{0, 1, 0, 2};
  const std::string svg = render_network(net, 0.6, labels);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count(svg, "<line") >= prune_view(net, 0.6).size());
  CHECK_THROWS_AS(render_network(net, 0.6, std::vector<std::size_t>{0, 1}), DimensionMismatch);

  Matrix m(2, 3);
  m << -1, 0, 1, 0.5, -0.5, 0;
  const std::string heat = render_heatmap(m);
  CHECK(count(heat, "<rect") >= 6);
  const std::vector<double> series{0.0, 1.0, 1.0, 3.0};
  CHECK(render_series(series, "trace").find("<polyline") != std::string::npos);
}
