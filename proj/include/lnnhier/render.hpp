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

// Static SVG views of the numeric artifacts. Every renderer is a pure
// function of its inputs and produces byte-stable output.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "lnnhier/clustering.hpp"
#include "lnnhier/network.hpp"

namespace lnnhier {

/// Diverging color for a signed value on the fixed scale [-1, 1]:
/// negative blue, zero neutral grey-white, positive red. "#rrggbb".
std::string diverging_color(double value);

/// Leaves in merge order along x, merge height (delta ESS) on y.
std::string render_dendrogram(const Dendrogram& d, std::span<const std::string> leaf_names);

enum class RoleLayout { kImageGrid, kPerItemSeries };

struct RoleLayoutSpec {
  RoleLayout kind = RoleLayout::kImageGrid;
  /// Image grid: the input role is reshaped to side x side.
  std::size_t image_side = 14;
  /// Series: one line per item over `window` lags, oldest first.
  std::vector<std::string> item_names;
  std::size_t window = 36;
  std::vector<std::string> output_names;
};

/// One panel per cluster: input role (heatmap or per-item lines) plus
/// output-correlation bars. Throws DimensionMismatch when the role width
/// does not fit the layout.
std::string render_role(const RoleMatrix& roles, std::size_t cluster, const RoleLayoutSpec& layout);
std::vector<std::string> render_roles(const RoleMatrix& roles, const RoleLayoutSpec& layout);

/// Layered drawing of connections with |w| >= threshold. Hidden units are
/// colored by `hidden_labels` (one per hidden unit, layer-major) when given.
std::string render_network(const Network& net, double threshold, std::span<const std::size_t> hidden_labels = {});

/// Rows as a diverging heatmap, e.g. feature matrices before/after alignment.
std::string render_heatmap(const Matrix& values);

/// Line plot of a series, e.g. the alignment cosine-sum trace.
std::string render_series(std::span<const double> series, const std::string& title);

}  // namespace lnnhier
