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

#include "lnnhier/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "lnnhier/io.hpp"

namespace lnnhier {
namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw FormatError("IDX header truncated");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void write_binary(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

struct Point {
  double x;
  double y;
};
using Stroke = std::vector<Point>;

std::vector<Stroke> ellipse(double cx, double cy, double rx, double ry) {
  Stroke s;
  for (int i = 0; i <= 16; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 16.0;
    s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return {s};
}

// Glyph skeletons on the unit square, y pointing down.
std::vector<Stroke> glyph(int digit) {
  switch (digit) {
    case 0:
      return ellipse(0.5, 0.5, 0.25, 0.4);
    case 1:
      return {{{0.35, 0.25}, {0.52, 0.1}, {0.52, 0.9}}};
    case 2:
      return {{{0.25, 0.3}, {0.35, 0.15}, {0.55, 0.1}, {0.72, 0.2}, {0.72, 0.38}, {0.25, 0.9}, {0.78, 0.9}}};
    case 3:
      return {{{0.25, 0.15}, {0.7, 0.15}, {0.45, 0.45}, {0.7, 0.6}, {0.68, 0.82}, {0.45, 0.9}, {0.25, 0.82}}};
    case 4:
      return {{{0.65, 0.9}, {0.65, 0.1}, {0.2, 0.65}, {0.8, 0.65}}};
    case 5:
      return {{{0.75, 0.1}, {0.3, 0.1}, {0.27, 0.45}, {0.55, 0.42}, {0.72, 0.6}, {0.68, 0.82}, {0.45, 0.9},
               {0.25, 0.82}}};
    case 6:
      return {{{0.7, 0.12}, {0.45, 0.2}, {0.3, 0.45}, {0.28, 0.7}, {0.4, 0.9}, {0.62, 0.88}, {0.72, 0.7},
               {0.6, 0.52}, {0.4, 0.52}, {0.3, 0.65}}};
    case 7:
      return {{{0.22, 0.1}, {0.78, 0.1}, {0.45, 0.9}}};
    case 8: {
      auto top = ellipse(0.5, 0.3, 0.18, 0.18);
      auto bottom = ellipse(0.5, 0.7, 0.22, 0.2);
      top.push_back(bottom.front());
      return top;
    }
    default: {
      auto loop = ellipse(0.5, 0.32, 0.2, 0.2);
      loop.push_back({{0.7, 0.32}, {0.62, 0.9}});
      return loop;
    }
  }
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

Matrix one_hot(std::span<const std::uint8_t> labels, std::size_t classes) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(classes));
  for (std::size_t n = 0; n < labels.size(); ++n) out(static_cast<Eigen::Index>(n), labels[n]) = 1.0;
  return out;
}

}  // namespace

void RawImageSet::validate() const {
  if (labels.empty()) throw InvalidArgument("image set is empty");
  if (rows == 0 || cols == 0) throw InvalidArgument("image set has zero-size frames");
  if (pixels.size() != labels.size() * rows * cols) {
    throw DimensionMismatch(fmt::format("{} pixels for {} images of {}x{}", pixels.size(), labels.size(), rows, cols));
  }
  for (auto l : labels) {
    if (l > 9) throw InvalidArgument(fmt::format("label {} outside 0..9", l));
  }
}

RawImageSet parse_idx(std::span<const std::uint8_t> image_bytes, std::span<const std::uint8_t> label_bytes) {
  if (read_be32(image_bytes, 0) != kIdxImageMagic) {
    throw FormatError(fmt::format("bad IDX image magic 0x{:08x}", read_be32(image_bytes, 0)));
  }
  if (read_be32(label_bytes, 0) != kIdxLabelMagic) {
    throw FormatError(fmt::format("bad IDX label magic 0x{:08x}", read_be32(label_bytes, 0)));
  }
  const std::size_t n_images = read_be32(image_bytes, 4);
  const std::size_t n_labels = read_be32(label_bytes, 4);
  if (n_images != n_labels) {
    throw FormatError(fmt::format("IDX image count {} != label count {}", n_images, n_labels));
  }
  RawImageSet set;
  set.rows = read_be32(image_bytes, 8);
  set.cols = read_be32(image_bytes, 12);
  const std::size_t pixel_count = n_images * set.rows * set.cols;
  if (image_bytes.size() < 16 + pixel_count) throw FormatError("IDX image data truncated");
  if (label_bytes.size() < 8 + n_labels) throw FormatError("IDX label data truncated");
  set.pixels.assign(image_bytes.begin() + 16, image_bytes.begin() + 16 + static_cast<std::ptrdiff_t>(pixel_count));
  set.labels.assign(label_bytes.begin() + 8, label_bytes.begin() + 8 + static_cast<std::ptrdiff_t>(n_labels));
  set.validate();
  return set;
}

RawImageSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto image_bytes = read_bytes(images);
  const auto label_bytes = read_bytes(labels);
  return parse_idx(image_bytes, label_bytes);
}

void save_idx(const RawImageSet& set, const std::filesystem::path& images, const std::filesystem::path& labels) {
  set.validate();
  std::vector<std::uint8_t> img;
  put_be32(img, kIdxImageMagic);
  put_be32(img, static_cast<std::uint32_t>(set.count()));
  put_be32(img, static_cast<std::uint32_t>(set.rows));
  put_be32(img, static_cast<std::uint32_t>(set.cols));
  img.insert(img.end(), set.pixels.begin(), set.pixels.end());
  std::vector<std::uint8_t> lab;
  put_be32(lab, kIdxLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(set.count()));
  lab.insert(lab.end(), set.labels.begin(), set.labels.end());
  write_binary(images, img);
  write_binary(labels, lab);
}

Matrix crop_and_resize(std::span<const std::uint8_t> image, std::size_t rows, std::size_t cols, std::size_t size) {
  if (image.size() != rows * cols) throw DimensionMismatch("image size does not match frame");
  if (size == 0) throw InvalidArgument("target size must be positive");
  std::size_t top = rows, bottom = 0, left = cols, right = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (image[r * cols + c] > 0) {
        top = std::min(top, r);
        bottom = std::max(bottom, r);
        left = std::min(left, c);
        right = std::max(right, c);
      }
    }
  }
  if (top > bottom) {  // blank image: keep the whole frame
    top = 0;
    bottom = rows - 1;
    left = 0;
    right = cols - 1;
  }
  const std::size_t h = bottom - top + 1;
  const std::size_t w = right - left + 1;
  auto at = [&](std::size_t r, std::size_t c) { return static_cast<double>(image[(top + r) * cols + left + c]); };

  // Pixel-center sampling, clamped at the crop border.
  Matrix out(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  const double sy = static_cast<double>(h) / static_cast<double>(size);
  const double sx = static_cast<double>(w) / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double y = std::clamp((static_cast<double>(i) + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const auto y0 = static_cast<std::size_t>(std::floor(y));
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t j = 0; j < size; ++j) {
      const double x = std::clamp((static_cast<double>(j) + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const auto x0 = static_cast<std::size_t>(std::floor(x));
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double fx = x - static_cast<double>(x0);
      const double upper = (1.0 - fx) * at(y0, x0) + fx * at(y0, x1);
      const double lower = (1.0 - fx) * at(y1, x0) + fx * at(y1, x1);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (1.0 - fy) * upper + fy * lower;
    }
  }
  return out;
}

Dataset preprocess_images(const RawImageSet& set, std::size_t size, std::size_t classes) {
  set.validate();
  const auto pixels = static_cast<Eigen::Index>(size * size);
  Matrix raw(static_cast<Eigen::Index>(set.count()), pixels);
  for (std::size_t n = 0; n < set.count(); ++n) {
    const Matrix img = crop_and_resize(set.image(n), set.rows, set.cols, size);
    raw.row(static_cast<Eigen::Index>(n)) = Eigen::Map<const Eigen::RowVectorXd>(img.data(), pixels);
  }
  for (auto l : set.labels) {
    if (l >= classes) throw InvalidArgument(fmt::format("label {} outside {} classes", l, classes));
  }
  const Matrix targets = one_hot(set.labels, classes);

  Dataset data;
  data.input_scaling = Scaling::fit(raw, kInputLow, kInputHigh);
  // One-hot targets use the fixed 0/1 range so every class column keeps both ends.
  Scaling fixed;
  fixed.raw_min = Vector::Zero(static_cast<Eigen::Index>(classes));
  fixed.raw_max = Vector::Ones(static_cast<Eigen::Index>(classes));
  fixed.target_low = kOutputLow;
  fixed.target_high = kOutputHigh;
  fixed.constant.assign(classes, false);
  data.output_scaling = fixed;
  data.inputs = data.input_scaling->apply(raw);
  data.outputs = data.output_scaling->apply(targets);
  data.labels.assign(set.labels.begin(), set.labels.end());
  return data;
}

RawImageSet synth_digits(std::size_t per_class, std::uint64_t seed, std::size_t frame) {
  if (per_class == 0) throw InvalidArgument("per_class must be positive");
  if (frame < 8) throw InvalidArgument("frame must be at least 8 pixels");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  RawImageSet set;
  set.rows = set.cols = frame;
  set.pixels.reserve(per_class * 10 * frame * frame);
  const double margin = static_cast<double>(frame) / 7.0;
  const double extent = static_cast<double>(frame) - 2.0 * margin;
  for (std::size_t s = 0; s < per_class; ++s) {
    for (int digit = 0; digit < 10; ++digit) {
      const double scale = uniform(0.75, 1.0);
      const double shear = uniform(-0.25, 0.25);
      const double dx = uniform(-0.06, 0.06), dy = uniform(-0.06, 0.06);
      const double thickness = uniform(0.045, 0.08) * extent;
      std::vector<Stroke> strokes = glyph(digit);
      for (auto& stroke : strokes) {
        for (auto& p : stroke) {
          const double x = 0.5 + scale * (p.x - 0.5 + shear * (0.5 - p.y)) + dx + uniform(-0.03, 0.03);
          const double y = 0.5 + scale * (p.y - 0.5) + dy + uniform(-0.03, 0.03);
          p = {margin + x * extent, margin + y * extent};
        }
      }
      for (std::size_t r = 0; r < frame; ++r) {
        for (std::size_t c = 0; c < frame; ++c) {
          const Point center{static_cast<double>(c) + 0.5, static_cast<double>(r) + 0.5};
          double d = std::numeric_limits<double>::infinity();
          for (const auto& stroke : strokes) {
            for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
              d = std::min(d, segment_distance(center, stroke[i], stroke[i + 1]));
            }
          }
          const double ink = std::clamp(thickness - d + 0.5, 0.0, 1.0);
          set.pixels.push_back(static_cast<std::uint8_t>(std::lround(255.0 * ink)));
        }
      }
      set.labels.push_back(static_cast<std::uint8_t>(digit));
    }
  }
  return set;
}

void TimeSeriesTable::validate() const {
  if (static_cast<std::size_t>(values.rows()) != months.size() || static_cast<std::size_t>(values.cols()) != names.size()) {
    throw DimensionMismatch("time series table shape does not match its index");
  }
  for (std::size_t t = 1; t < months.size(); ++t) {
    if (months[t] <= months[t - 1]) throw InvalidArgument("time series months must be strictly increasing");
  }
}

Dataset window_timeseries(const TimeSeriesTable& table, std::size_t window, std::size_t horizon) {
  table.validate();
  if (window == 0 || horizon == 0) throw InvalidArgument("window and horizon must be positive");
  if (table.length() < window + horizon) {
    throw InvalidArgument(fmt::format("series of length {} is too short for window {} + horizon {}", table.length(),
                                      window, horizon));
  }
  const std::size_t samples = table.length() - window - horizon + 1;
  const std::size_t items = table.items();
  Matrix raw_in(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(window * items));
  Matrix raw_out(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(items));
  for (std::size_t n = 0; n < samples; ++n) {
    const auto row = static_cast<Eigen::Index>(n);
    for (std::size_t item = 0; item < items; ++item) {
      const auto col = static_cast<Eigen::Index>(item);
      raw_in.row(row).segment(static_cast<Eigen::Index>(item * window), static_cast<Eigen::Index>(window)) =
          table.values.col(col).segment(row, static_cast<Eigen::Index>(window)).transpose();
      raw_out(row, col) = table.values(static_cast<Eigen::Index>(n + window + horizon - 1), col);
    }
  }
  Dataset data;
  data.input_scaling = Scaling::fit(raw_in, kInputLow, kInputHigh);
  data.output_scaling = Scaling::fit(raw_out, kOutputLow, kOutputHigh);
  data.inputs = data.input_scaling->apply(raw_in);
  data.outputs = data.output_scaling->apply(raw_out);
  return data;
}

TimeSeriesTable synth_cpi(std::uint64_t seed, std::size_t months, std::size_t items, const SynthCpiOptions& options) {
  if (months < 48) throw InvalidArgument(fmt::format("synthetic series needs at least 48 months, got {}", months));
  if (items == 0) throw InvalidArgument("synthetic series needs at least one item");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  TimeSeriesTable table;
  if (items == 3) {
    table.names = {"taro", "radish", "carrot"};
  } else {
    for (std::size_t i = 0; i < items; ++i) table.names.push_back(fmt::format("item_{}", i + 1));
  }
  table.months.resize(months);
  for (std::size_t t = 0; t < months; ++t) table.months[t] = static_cast<std::int64_t>(t);
  table.values.resize(static_cast<Eigen::Index>(months), static_cast<Eigen::Index>(items));
  for (std::size_t i = 0; i < items; ++i) {
    const double amplitude = uniform(options.min_amplitude, options.max_amplitude);
    const double trend = uniform(options.min_trend, options.max_trend);
    const double phase = uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t t = 0; t < months; ++t) {
      const double season = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 12.0 + phase);
      const double noise = options.noise == 0.0 ? 0.0 : options.noise * normal(rng);
      table.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
          options.base + trend * static_cast<double>(t) + season + noise;
    }
  }
  return table;
}

TimeSeriesTable read_timeseries_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(read_text(path));
  if (rows.size() < 2) throw FormatError(fmt::format("'{}' has no data rows", path.string()));
  const auto& header = rows.front();
  if (header.size() < 2 || header.front() != "month") {
    throw FormatError(fmt::format("'{}' must start with a 'month' column followed by items", path.string()));
  }
  TimeSeriesTable table;
  table.names.assign(header.begin() + 1, header.end());
  table.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) throw FormatError(fmt::format("row {} has {} fields", r, rows[r].size()));
    table.months.push_back(static_cast<std::int64_t>(parse_number(rows[r][0])));
    for (std::size_t c = 1; c < header.size(); ++c) {
      table.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = parse_number(rows[r][c]);
    }
  }
  table.validate();
  return table;
}

void write_timeseries_csv(const TimeSeriesTable& table, const std::filesystem::path& path) {
  table.validate();
  std::string out = "month";
  for (const auto& name : table.names) out += "," + name;
  out += "\n";
  for (std::size_t t = 0; t < table.length(); ++t) {
    out += std::to_string(table.months[t]);
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      out += "," + format_number(table.values(static_cast<Eigen::Index>(t), c));
    }
    out += "\n";
  }
  write_text(path, out);
}

}  // namespace lnnhier
