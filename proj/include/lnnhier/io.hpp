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

// File formats: JSON documents and CSV tables for every artifact the
// pipeline produces, plus the small text/CSV helpers they share.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lnnhier/clustering.hpp"
#include "lnnhier/dataset.hpp"
#include "lnnhier/features.hpp"
#include "lnnhier/network.hpp"
#include "lnnhier/nnmf.hpp"

namespace lnnhier {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Shortest text that parses back to exactly `x`.
std::string format_number(double x);

/// Splits CSV text into rows of fields. Quoting is not supported.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
double parse_number(std::string_view field);

std::string matrix_to_csv(const Matrix& m, std::span<const std::string> header);
/// Reads a numeric CSV with one header row.
Matrix matrix_from_csv(std::string_view text, std::vector<std::string>* header = nullptr);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// Network
struct NetworkDocument {
  Network network;
  /// Free-form training metadata (seed, config, final error).
  Json training = Json::object();
};
Json network_to_json(const Network& net, const Json& training = Json::object());
NetworkDocument network_from_json(const Json& j);
Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

// Dataset: inputs.csv, outputs.csv, optional labels.csv, scaling.json
Json scaling_to_json(const Scaling& s);
Scaling scaling_from_json(const Json& j);
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Feature matrices
std::vector<std::string> unit_names(std::span<const UnitRef> units);
std::string features_to_csv(const FeatureMatrix& fm);
FeatureMatrix features_from_csv(std::string_view text);
Json features_to_json(const FeatureMatrix& fm);
FeatureMatrix features_from_json(const Json& j);
std::string alignment_trace_to_csv(const AlignmentTrace& trace);

// Clustering
Json dendrogram_to_json(const Dendrogram& d, std::span<const UnitRef> units);
Dendrogram dendrogram_from_json(const Json& j);
/// unit,layer,position,cluster
std::string assignment_to_csv(std::span<const std::size_t> labels, std::span<const UnitRef> units);
std::string roles_to_csv(const RoleMatrix& roles);

// NNMF
Json nnmf_to_json(const NnmfResult& r, std::size_t restarts);

}  // namespace lnnhier
