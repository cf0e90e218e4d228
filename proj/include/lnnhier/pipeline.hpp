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
#include <optional>
#include <string>
#include <vector>

#include "lnnhier/io.hpp"
#include "lnnhier/network.hpp"
#include "lnnhier/render.hpp"

namespace lnnhier {

enum class DataKind { kDigits, kTimeSeries, kDatasetDir };

/// Everything one end-to-end run needs. Presets fill the experiment defaults;
/// any field may then be overridden.
struct RunConfig {
  std::string preset = "custom";
  DataKind data = DataKind::kDigits;

  // digit images
  std::optional<std::filesystem::path> idx_images;
  std::optional<std::filesystem::path> idx_labels;
  std::size_t images_per_class = 100;  ///< synthetic digits, or cap per class for IDX input
  std::size_t image_size = 14;

  // time series
  std::optional<std::filesystem::path> series_csv;
  std::size_t series_samples = 270;  ///< synthetic length = samples + window + horizon - 1
  std::size_t series_items = 3;
  std::size_t window = 36;
  std::size_t horizon = 1;

  // prepared dataset directory (DataKind::kDatasetDir)
  std::optional<std::filesystem::path> dataset_dir;

  std::vector<std::size_t> hidden_layers{64};
  TrainConfig train;
  bool correlate_with_targets = false;
  std::size_t align_iterations = 5000;
  std::vector<std::size_t> resolutions{4, 8, 16};
  double prune_threshold = 0.6;

  bool nnmf_enabled = true;
  std::size_t nnmf_rank = 16;
  std::size_t nnmf_iterations = 1000;
  std::size_t nnmf_restarts = 100;

  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "lnnhier-out";
};

/// Known presets: E1, E1-desk, E2, E2-desk, custom.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

Json run_config_to_json(const RunConfig& cfg);
/// Expands `preset` (default "custom") and applies every other field present.
RunConfig run_config_from_json(const Json& j);

/// Raised by run_pipeline; names the stage that failed.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ManifestEntry {
  std::string path;  ///< relative to the output directory
  std::string sha256;
  bool numeric = true;  ///< false for rendered views
};

struct PipelineResult {
  std::filesystem::path output_dir;
  std::vector<ManifestEntry> files;
  std::string config_hash;
  std::size_t hidden_units = 0;
  double final_error = 0.0;
  /// Cluster labels per requested resolution, in the order of cfg.resolutions.
  std::vector<std::vector<std::size_t>> cuts;
};

std::string sha256_hex(std::string_view bytes);

/// Role panel layout matching the data kind: image grid for digits, one
/// series per item for time series.
RoleLayoutSpec role_layout_for(const RunConfig& cfg, const Dataset& data);

/// Builds the training set described by `cfg` (stage "data").
Dataset prepare_data(const RunConfig& cfg);

/// Checks the config without touching data: resolutions and NNMF rank must
/// fit the hidden-unit count. Throws PipelineError("validate", ...).
void validate_run_config(const RunConfig& cfg);

/// train -> features -> align -> cluster -> cut/roles -> render (+ NNMF).
/// Writes all artifacts and manifest.json into cfg.output_dir. On failure the
/// manifest records the failed stage, then the PipelineError propagates.
PipelineResult run_pipeline(const RunConfig& cfg);

}  // namespace lnnhier
