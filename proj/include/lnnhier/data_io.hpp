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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lnnhier/common.hpp"
#include "lnnhier/dataset.hpp"

namespace lnnhier {

inline constexpr double kInputLow = -1.0;
inline constexpr double kInputHigh = 1.0;
inline constexpr double kOutputLow = 0.01;
inline constexpr double kOutputHigh = 0.99;

/// Grayscale images stored contiguously, image-major then row-major.
struct RawImageSet {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<std::uint8_t> labels;

  std::size_t count() const { return labels.size(); }
  std::span<const std::uint8_t> image(std::size_t n) const {
    return {pixels.data() + n * rows * cols, rows * cols};
  }
  void validate() const;
};

RawImageSet parse_idx(std::span<const std::uint8_t> image_bytes, std::span<const std::uint8_t> label_bytes);
RawImageSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);
void save_idx(const RawImageSet& set, const std::filesystem::path& images, const std::filesystem::path& labels);

/// Crops to the bounding box of nonzero pixels (whole frame when the image is
/// blank) and bilinearly resamples to size x size. Values stay on 0..255.
Matrix crop_and_resize(std::span<const std::uint8_t> image, std::size_t rows, std::size_t cols, std::size_t size);

/// Image digits to a training set: crop/resize each image to size x size,
/// scale each input element onto [-1, 1], one-hot labels scaled onto
/// [0.01, 0.99]. Labels are kept for class-cyclic training.
Dataset preprocess_images(const RawImageSet& set, std::size_t size = 14, std::size_t classes = 10);

/// Procedurally drawn handwriting-like digits, `per_class` of each 0..9,
/// ordered by sample then class. Stand-in when no IDX files are given.
RawImageSet synth_digits(std::size_t per_class, std::uint64_t seed, std::size_t frame = 28);

/// Monthly series; one column per item.
struct TimeSeriesTable {
  std::vector<std::int64_t> months;
  std::vector<std::string> names;
  Matrix values;  ///< months x items

  std::size_t length() const { return months.size(); }
  std::size_t items() const { return names.size(); }
  void validate() const;
};

/// Sliding windows: sample n takes months [n, n + window) of every item as
/// input (item-major blocks, oldest month first) and every item at month
/// n + window + horizon - 1 as output. Inputs are scaled onto [-1, 1] and
/// outputs onto [0.01, 0.99] per element.
Dataset window_timeseries(const TimeSeriesTable& table, std::size_t window, std::size_t horizon = 1);

struct SynthCpiOptions {
  double base = 100.0;
  double noise = 1.5;
  double min_amplitude = 6.0;
  double max_amplitude = 14.0;
  double min_trend = 0.02;
  double max_trend = 0.08;
};

/// Seasonal (period 12) plus linear trend plus Gaussian noise per item.
/// Three items are named taro, radish and carrot; otherwise item_1..item_n.
TimeSeriesTable synth_cpi(std::uint64_t seed, std::size_t months, std::size_t items = 3,
                          const SynthCpiOptions& options = {});

TimeSeriesTable read_timeseries_csv(const std::filesystem::path& path);
void write_timeseries_csv(const TimeSeriesTable& table, const std::filesystem::path& path);

}  // namespace lnnhier
