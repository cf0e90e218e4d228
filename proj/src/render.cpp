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

#include "lnnhier/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace lnnhier {
namespace {

constexpr std::array<int, 3> kNegative{33, 102, 172};
constexpr std::array<int, 3> kNeutral{247, 247, 247};
constexpr std::array<int, 3> kPositive{178, 24, 43};

// Categorical palette for cluster coloring.
constexpr std::array<const char*, 12> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                               "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#843c39"};

std::string svg_open(double width, double height) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"10\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n",
      width, height);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string output_bars(const Vector& role, std::span<const std::string> names, double x0, double y0, double width,
                        double height) {
  std::string out;
  const double mid = y0 + height / 2.0;
  const auto n = static_cast<double>(role.size());
  const double slot = width / std::max(n, 1.0);
  out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#000000\"/>\n", x0, mid,
                     x0 + width, mid);
  for (Eigen::Index j = 0; j < role.size(); ++j) {
    const double v = std::clamp(role(j), -1.0, 1.0);
    const double bar = std::abs(v) * height / 2.0;
    const double top = v >= 0.0 ? mid - bar : mid;
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                       x0 + slot * static_cast<double>(j) + 0.15 * slot, top, 0.7 * slot, bar, diverging_color(v));
    const std::string label =
        static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : std::to_string(j);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       x0 + slot * (static_cast<double>(j) + 0.5), y0 + height + 12.0, escape(label));
  }
  return out;
}

}  // namespace

std::string diverging_color(double value) {
  const double v = std::clamp(std::isfinite(value) ? value : 0.0, -1.0, 1.0);
  const auto& end = v < 0.0 ? kNegative : kPositive;
  const double t = std::abs(v);
  std::array<int, 3> rgb{};
  for (std::size_t i = 0; i < 3; ++i) {
    rgb[i] = static_cast<int>(std::lround(kNeutral[i] + t * (end[i] - kNeutral[i])));
  }
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

std::string render_dendrogram(const Dendrogram& d, std::span<const std::string> leaf_names) {
  d.validate();
  if (leaf_names.size() != d.leaf_count) throw DimensionMismatch("one leaf name per leaf required");
  const double margin_left = 50.0, margin_top = 20.0, plot_height = 240.0, label_space = 60.0;
  const double spacing = 14.0;
  const double width = margin_left + spacing * static_cast<double>(d.leaf_count) + 20.0;
  const double height = margin_top + plot_height + label_space;
  double top_height = 0.0;
  for (const auto& m : d.merges) top_height = std::max(top_height, m.height);
  auto y_of = [&](double h) {
    return margin_top + plot_height * (1.0 - (top_height > 0.0 ? h / top_height : 0.0));
  };

  const auto order = d.leaf_order();
  std::vector<double> x(2 * d.leaf_count - 1, 0.0), y(2 * d.leaf_count - 1, y_of(0.0));
  for (std::size_t i = 0; i < order.size(); ++i) {
    x[order[i]] = margin_left + spacing * (static_cast<double>(i) + 0.5);
  }

  std::string out = svg_open(width, height);
  out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#000000\"/>\n",
                     margin_left - 10.0, margin_top, margin_top + plot_height);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", margin_left - 12.0,
                     margin_top + 4.0, top_height);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">0</text>\n", margin_left - 12.0,
                     margin_top + plot_height + 4.0);
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    const Merge& mg = d.merges[m];
    const std::size_t id = d.leaf_count + m;
    y[id] = y_of(mg.height);
    x[id] = 0.5 * (x[mg.left] + x[mg.right]);
    out += fmt::format(
        "<path d=\"M{:.2f} {:.2f} V{:.2f} H{:.2f} V{:.2f}\" fill=\"none\" stroke=\"#000000\" data-merge=\"{}\"/>\n",
        x[mg.left], y[mg.left], y[id], x[mg.right], y[mg.right], m);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double lx = x[order[i]], ly = margin_top + plot_height + 6.0;
    out += fmt::format("<text x=\"{0:.2f}\" y=\"{1:.2f}\" transform=\"rotate(90 {0:.2f} {1:.2f})\">{2}</text>\n", lx,
                       ly, escape(leaf_names[order[i]]));
  }
  out += "</svg>\n";
  return out;
}

std::string render_role(const RoleMatrix& roles, std::size_t cluster, const RoleLayoutSpec& layout) {
  if (cluster >= static_cast<std::size_t>(roles.roles.rows())) throw InvalidArgument("cluster index out of range");
  const auto m = static_cast<Eigen::Index>(cluster);
  const Vector in = roles.input_role(m).transpose();
  const Vector outv = roles.output_role(m).transpose();
  std::string svg;
  if (layout.kind == RoleLayout::kImageGrid) {
    const std::size_t side = layout.image_side;
    if (roles.input_dim != side * side) {
      throw DimensionMismatch(fmt::format("image layout needs {} inputs, role has {}", side * side, roles.input_dim));
    }
    const double cell = 12.0, pad = 10.0;
    const double grid = cell * static_cast<double>(side);
    const double width = 2.0 * pad + grid + 20.0 + std::max(120.0, 18.0 * static_cast<double>(roles.output_dim));
    const double bars = std::max(grid - 20.0, 80.0);
    const double height = 2.0 * pad + std::max(grid, bars + 20.0) + 20.0;
    svg = svg_open(width, height);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">cluster {}</text>\n", pad, pad + 2.0, cluster);
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                           pad + cell * static_cast<double>(c), pad + 10.0 + cell * static_cast<double>(r), cell, cell,
                           diverging_color(in(static_cast<Eigen::Index>(r * side + c))));
      }
    }
    svg += output_bars(outv, layout.output_names, 2.0 * pad + grid + 10.0, pad + 10.0,
                       width - (2.0 * pad + grid + 20.0), bars);
  } else {
    const std::size_t items = layout.item_names.size();
    if (items == 0 || roles.input_dim != items * layout.window) {
      throw DimensionMismatch(fmt::format("series layout needs {} x {} inputs, role has {}", items, layout.window,
                                          roles.input_dim));
    }
    const double panel_w = 220.0, panel_h = 90.0, pad = 10.0;
    const double width = 2.0 * pad + panel_w + 30.0 + std::max(120.0, 30.0 * static_cast<double>(roles.output_dim));
    const double height = pad + 14.0 + (panel_h + 16.0) * static_cast<double>(items) + pad;
    svg = svg_open(width, height);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">cluster {}</text>\n", pad, pad + 2.0, cluster);
    for (std::size_t item = 0; item < items; ++item) {
      const double top = pad + 14.0 + (panel_h + 16.0) * static_cast<double>(item);
      const double mid = top + panel_h / 2.0;
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", pad, top + 8.0, escape(layout.item_names[item]));
      svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#999999\"/>\n", pad,
                         mid, pad + panel_w);
      std::string points;
      for (std::size_t lag = 0; lag < layout.window; ++lag) {
        const double v = std::clamp(in(static_cast<Eigen::Index>(item * layout.window + lag)), -1.0, 1.0);
        const double px = pad + panel_w * (static_cast<double>(lag) + 0.5) / static_cast<double>(layout.window);
        const double py = mid - v * (panel_h / 2.0 - 4.0);
        points += fmt::format("{}{:.2f},{:.2f}", lag ? " " : "", px, py);
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n", px, py, diverging_color(v));
      }
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n", points);
    }
    svg += output_bars(outv, layout.output_names, 2.0 * pad + panel_w + 20.0, pad + 14.0,
                       width - (2.0 * pad + panel_w + 30.0), panel_h);
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::string> render_roles(const RoleMatrix& roles, const RoleLayoutSpec& layout) {
  std::vector<std::string> out;
  for (Eigen::Index m = 0; m < roles.roles.rows(); ++m) out.push_back(render_role(roles, static_cast<std::size_t>(m), layout));
  return out;
}

std::string render_network(const Network& net, double threshold, std::span<const std::size_t> hidden_labels) {
  net.validate();
  if (!hidden_labels.empty() && hidden_labels.size() != net.hidden_unit_count()) {
    throw DimensionMismatch("one cluster label per hidden unit required");
  }
  std::size_t widest = 0;
  for (auto s : net.layer_sizes) widest = std::max(widest, s);
  const double layer_gap = 160.0, unit_gap = 6.0, pad = 20.0;
  const double width = 2.0 * pad + layer_gap * static_cast<double>(net.depth() - 1);
  const double height = 2.0 * pad + unit_gap * static_cast<double>(widest);
  auto pos = [&](std::size_t layer, std::size_t unit) {
    const double span = unit_gap * static_cast<double>(net.layer_sizes[layer]);
    const double top = pad + (unit_gap * static_cast<double>(widest) - span) / 2.0;
    return std::pair{pad + layer_gap * static_cast<double>(layer), top + unit_gap * (static_cast<double>(unit) + 0.5)};
  };

  std::string svg = svg_open(width, height);
  for (const Edge& e : prune_view(net, threshold)) {
    const auto [x1, y1] = pos(e.layer, e.from);
    const auto [x2, y2] = pos(e.layer + 1, e.to);
    svg += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"{:.2f}\"/>\n", x1, y1,
        x2, y2, e.weight >= 0.0 ? "#b2182b" : "#2166ac", std::min(0.5 + std::abs(e.weight), 3.0));
  }
  std::size_t hidden = 0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const bool is_hidden = l > 0 && l + 1 < net.depth();
    for (std::size_t u = 0; u < net.layer_sizes[l]; ++u) {
      const auto [cx, cy] = pos(l, u);
      std::string fill = "#000000";
      if (is_hidden && !hidden_labels.empty()) fill = kPalette[hidden_labels[hidden] % kPalette.size()];
      if (is_hidden) ++hidden;
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", cx, cy, fill);
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_heatmap(const Matrix& values) {
  const double cell = 4.0, pad = 10.0;
  const double width = 2.0 * pad + cell * static_cast<double>(values.cols());
  const double height = 2.0 * pad + cell * static_cast<double>(values.rows());
  std::string svg = svg_open(width, height);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         pad + cell * static_cast<double>(c), pad + cell * static_cast<double>(r), cell, cell,
                         diverging_color(values(r, c)));
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_series(std::span<const double> series, const std::string& title) {
  const double width = 420.0, height = 260.0, pad = 40.0;
  std::string svg = svg_open(width, height);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", pad, pad / 2.0, escape(title));
  if (series.empty()) return svg + "</svg>\n";
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  const double lo = *lo_it, hi = *hi_it;
  const double range = hi > lo ? hi - lo : 1.0;
  const double steps = std::max<double>(static_cast<double>(series.size()) - 1.0, 1.0);
  // Downsample to at most 500 vertices; deterministic stride.
  const std::size_t stride = std::max<std::size_t>(1, series.size() / 500);
  std::string points;
  for (std::size_t i = 0; i < series.size(); i += stride) {
    const double px = pad + (width - 2.0 * pad) * static_cast<double>(i) / steps;
    const double py = height - pad - (height - 2.0 * pad) * (series[i] - lo) / range;
    points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px, py);
  }
  svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\"/>\n", points);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", pad - 4.0, pad, hi);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", pad - 4.0, height - pad, lo);
  svg += "</svg>\n";
  return svg;
}

}  // namespace lnnhier
