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

#include "lnnhier/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "lnnhier/clustering.hpp"
#include "lnnhier/data_io.hpp"
#include "lnnhier/features.hpp"
#include "lnnhier/nnmf.hpp"
#include "lnnhier/render.hpp"

namespace lnnhier {
namespace {

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::kDigits:
      return "digits";
    case DataKind::kTimeSeries:
      return "timeseries";
    case DataKind::kDatasetDir:
      return "dataset";
  }
  return "digits";
}

DataKind data_kind_from_string(std::string_view name) {
  if (name == "digits") return DataKind::kDigits;
  if (name == "timeseries") return DataKind::kTimeSeries;
  if (name == "dataset") return DataKind::kDatasetDir;
  throw InvalidArgument(fmt::format("unknown data kind '{}'", name));
}

Json optional_path(const std::optional<std::filesystem::path>& p) {
  return p ? Json(p->generic_string()) : Json(nullptr);
}

void read_optional_path(const Json& j, const char* key, std::optional<std::filesystem::path>& out) {
  if (!j.contains(key)) return;
  if (j[key].is_null()) {
    out.reset();
  } else {
    out = std::filesystem::path(j[key].get<std::string>());
  }
}

RawImageSet cap_per_class(const RawImageSet& set, std::size_t per_class) {
  RawImageSet out;
  out.rows = set.rows;
  out.cols = set.cols;
  std::map<int, std::size_t> taken;
  for (std::size_t n = 0; n < set.count(); ++n) {
    if (taken[set.labels[n]]++ >= per_class) continue;
    const auto img = set.image(n);
    out.pixels.insert(out.pixels.end(), img.begin(), img.end());
    out.labels.push_back(set.labels[n]);
  }
  return out;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void emit(const std::string& rel, std::string_view content, bool numeric) {
    write_text(root_ / rel, content);
    files_.push_back({rel, sha256_hex(content), numeric});
  }

  // Registers a file written by another routine.
  void adopt(const std::string& rel, bool numeric) {
    files_.push_back({rel, sha256_hex(read_text(root_ / rel)), numeric});
  }

  const std::vector<ManifestEntry>& files() const { return files_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::vector<ManifestEntry> files_;
};

Json manifest_json(const RunConfig& cfg, const std::string& config_hash, const std::vector<ManifestEntry>& files,
                   const std::string& status, const std::string& failed_stage, const std::string& error) {
  Json list = Json::array();
  for (const auto& f : files) {
    list.push_back({{"path", f.path}, {"sha256", f.sha256}, {"kind", f.numeric ? "numeric" : "render"}});
  }
  Json m{{"format", "lnnhier.manifest"}, {"version", kFormatVersion}, {"status", status},
         {"preset", cfg.preset},          {"seed", cfg.seed},          {"config_hash", config_hash},
         {"files", list}};
  if (!failed_stage.empty()) {
    m["failed_stage"] = failed_stage;
    m["error"] = error;
  }
  return m;
}

}  // namespace

RoleLayoutSpec role_layout_for(const RunConfig& cfg, const Dataset& data) {
  RoleLayoutSpec spec;
  switch (cfg.data) {
    case DataKind::kDigits:
      spec.kind = RoleLayout::kImageGrid;
      spec.image_side = cfg.image_size;
      for (std::size_t j = 0; j < data.output_dim(); ++j) spec.output_names.push_back(std::to_string(j));
      break;
    case DataKind::kTimeSeries: {
      spec.kind = RoleLayout::kPerItemSeries;
      spec.window = cfg.window;
      const std::size_t items = data.output_dim();
      if (items == 3) {
        spec.item_names = {"taro", "radish", "carrot"};
      } else {
        for (std::size_t i = 0; i < items; ++i) spec.item_names.push_back(fmt::format("item_{}", i + 1));
      }
      spec.output_names = spec.item_names;
      break;
    }
    case DataKind::kDatasetDir: {
      const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(data.input_dim()))));
      if (side * side == data.input_dim()) {
        spec.kind = RoleLayout::kImageGrid;
        spec.image_side = side;
      } else {
        spec.kind = RoleLayout::kPerItemSeries;
        spec.item_names = {"input"};
        spec.window = data.input_dim();
      }
      for (std::size_t j = 0; j < data.output_dim(); ++j) spec.output_names.push_back(fmt::format("out_{}", j + 1));
      break;
    }
  }
  return spec;
}

std::vector<std::string> preset_names() { return {"E1", "E1-desk", "E2", "E2-desk", "custom"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  if (name == "custom") return cfg;
  if (name == "E1" || name == "E1-desk") {
    cfg.data = DataKind::kDigits;
    cfg.images_per_class = name == "E1" ? 500 : 100;
    cfg.hidden_layers = {64};
    cfg.train.lambda = 1.1e-5;
    cfg.train.a1 = name == "E1" ? 100.0 : 20.0;
    cfg.train.order = OrderPolicy::kCyclicByClass;
    cfg.resolutions = {4, 8, 16};
    cfg.prune_threshold = 0.6;
    cfg.nnmf_rank = 16;
    cfg.nnmf_restarts = name == "E1" ? 100 : 10;
  } else if (name == "E2" || name == "E2-desk") {
    cfg.data = DataKind::kTimeSeries;
    cfg.series_samples = 270;
    cfg.series_items = 3;
    cfg.window = 36;
    cfg.horizon = 1;
    cfg.hidden_layers = {40};
    cfg.train.lambda = 2e-5;
    cfg.train.a1 = 500.0;
    cfg.train.order = OrderPolicy::kUniformRandom;
    cfg.resolutions = {3, 6, 12};
    cfg.prune_threshold = 0.001;
    cfg.nnmf_rank = 12;
    cfg.nnmf_restarts = name == "E2" ? 100 : 10;
  } else {
    throw InvalidArgument(fmt::format("unknown preset '{}'", name));
  }
  cfg.train.epsilon1 = 1e-3;
  cfg.train.eta0 = 0.7;
  cfg.align_iterations = 5000;
  cfg.nnmf_iterations = 1000;
  return cfg;
}

Json run_config_to_json(const RunConfig& cfg) {
  return {{"preset", cfg.preset},
          {"data", std::string(to_string(cfg.data))},
          {"idx_images", optional_path(cfg.idx_images)},
          {"idx_labels", optional_path(cfg.idx_labels)},
          {"images_per_class", cfg.images_per_class},
          {"image_size", cfg.image_size},
          {"series_csv", optional_path(cfg.series_csv)},
          {"series_samples", cfg.series_samples},
          {"series_items", cfg.series_items},
          {"window", cfg.window},
          {"horizon", cfg.horizon},
          {"dataset_dir", optional_path(cfg.dataset_dir)},
          {"hidden_layers", cfg.hidden_layers},
          {"train", train_config_to_json(cfg.train)},
          {"correlate_with_targets", cfg.correlate_with_targets},
          {"align_iterations", cfg.align_iterations},
          {"resolutions", cfg.resolutions},
          {"prune_threshold", cfg.prune_threshold},
          {"nnmf", {{"enabled", cfg.nnmf_enabled},
                    {"rank", cfg.nnmf_rank},
                    {"iterations", cfg.nnmf_iterations},
                    {"restarts", cfg.nnmf_restarts}}},
          {"seed", cfg.seed}};
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("run config must be a JSON object");
  static const std::set<std::string> known{
      "format", "preset", "data", "idx_images", "idx_labels", "series_csv", "dataset_dir", "images_per_class",
      "image_size", "series_samples", "series_items", "window", "horizon", "hidden_layers", "train",
      "correlate_with_targets", "align_iterations", "resolutions", "prune_threshold", "nnmf", "seed", "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument(fmt::format("unknown run config key '{}'", key));
  }
  RunConfig cfg = preset_config(j.value("preset", std::string("custom")));
  try {
    if (j.contains("data")) cfg.data = data_kind_from_string(j["data"].get<std::string>());
    read_optional_path(j, "idx_images", cfg.idx_images);
    read_optional_path(j, "idx_labels", cfg.idx_labels);
    read_optional_path(j, "series_csv", cfg.series_csv);
    read_optional_path(j, "dataset_dir", cfg.dataset_dir);
    cfg.images_per_class = j.value("images_per_class", cfg.images_per_class);
    cfg.image_size = j.value("image_size", cfg.image_size);
    cfg.series_samples = j.value("series_samples", cfg.series_samples);
    cfg.series_items = j.value("series_items", cfg.series_items);
    cfg.window = j.value("window", cfg.window);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.hidden_layers = j.value("hidden_layers", cfg.hidden_layers);
    if (j.contains("train")) {
      Json merged = train_config_to_json(cfg.train);
      merged.update(j["train"]);
      cfg.train = train_config_from_json(merged);
    }
    cfg.correlate_with_targets = j.value("correlate_with_targets", cfg.correlate_with_targets);
    cfg.align_iterations = j.value("align_iterations", cfg.align_iterations);
    cfg.resolutions = j.value("resolutions", cfg.resolutions);
    cfg.prune_threshold = j.value("prune_threshold", cfg.prune_threshold);
    if (j.contains("nnmf")) {
      const Json& n = j["nnmf"];
      cfg.nnmf_enabled = n.value("enabled", cfg.nnmf_enabled);
      cfg.nnmf_rank = n.value("rank", cfg.nnmf_rank);
      cfg.nnmf_iterations = n.value("iterations", cfg.nnmf_iterations);
      cfg.nnmf_restarts = n.value("restarts", cfg.nnmf_restarts);
    }
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  } catch (const Json::exception& e) {
    throw FormatError(fmt::format("malformed run config: {}", e.what()));
  }
  return cfg;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

Dataset prepare_data(const RunConfig& cfg) {
  switch (cfg.data) {
    case DataKind::kDigits: {
      RawImageSet raw;
      if (cfg.idx_images || cfg.idx_labels) {
        if (!cfg.idx_images || !cfg.idx_labels) throw InvalidArgument("IDX input needs both images and labels");
        raw = cap_per_class(load_idx(*cfg.idx_images, *cfg.idx_labels), cfg.images_per_class);
      } else {
        raw = synth_digits(cfg.images_per_class, cfg.seed + 4);
      }
      return preprocess_images(raw, cfg.image_size);
    }
    case DataKind::kTimeSeries: {
      const TimeSeriesTable table =
          cfg.series_csv ? read_timeseries_csv(*cfg.series_csv)
                         : synth_cpi(cfg.seed + 4, cfg.series_samples + cfg.window + cfg.horizon - 1, cfg.series_items);
      return window_timeseries(table, cfg.window, cfg.horizon);
    }
    case DataKind::kDatasetDir:
      if (!cfg.dataset_dir) throw InvalidArgument("dataset input needs dataset_dir");
      return load_dataset(*cfg.dataset_dir);
  }
  throw InvalidArgument("unknown data kind");
}

void validate_run_config(const RunConfig& cfg) {
  try {
    cfg.train.validate();
    if (cfg.hidden_layers.empty()) throw InvalidArgument("at least one hidden layer is required");
    std::size_t k0 = 0;
    for (auto h : cfg.hidden_layers) {
      if (h == 0) throw InvalidArgument("hidden layer of size zero");
      k0 += h;
    }
    if (k0 < 2) throw InvalidArgument("clustering needs at least 2 hidden units");
    for (auto c : cfg.resolutions) {
      if (c < 1 || c > k0) throw InvalidArgument(fmt::format("resolution {} outside [1, {}] hidden units", c, k0));
    }
    if (cfg.nnmf_enabled && (cfg.nnmf_rank < 1 || cfg.nnmf_rank > k0)) {
      throw InvalidArgument(fmt::format("nnmf rank {} outside [1, {}]", cfg.nnmf_rank, k0));
    }
    if (cfg.nnmf_enabled && cfg.nnmf_restarts < 1) throw InvalidArgument("nnmf needs at least one restart");
    if (!(cfg.prune_threshold >= 0.0)) throw InvalidArgument("prune threshold must be >= 0");
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError("validate", e.what());
  }
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  validate_run_config(cfg);

  Json hashed = run_config_to_json(cfg);
  const std::string config_text = hashed.dump(2) + "\n";
  const std::string config_hash = sha256_hex(config_text);
  ArtifactWriter out(cfg.output_dir);
  std::filesystem::create_directories(cfg.output_dir);

  PipelineResult result;
  result.output_dir = cfg.output_dir;
  result.config_hash = config_hash;

  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      write_text(cfg.output_dir / "manifest.json",
                 manifest_json(cfg, config_hash, out.files(), "failed", name, e.what()).dump(2) + "\n");
      throw PipelineError(name, e.what());
    }
  };

  out.emit("config.json", config_text, true);

  Dataset data;
  stage("data", [&] {
    data = prepare_data(cfg);
    save_dataset(data, cfg.output_dir / "dataset");
    out.adopt("dataset/inputs.csv", true);
    out.adopt("dataset/outputs.csv", true);
    if (!data.labels.empty()) out.adopt("dataset/labels.csv", true);
    out.adopt("dataset/scaling.json", true);
  });

  TrainResult trained;
  stage("train", [&] {
    std::vector<std::size_t> sizes{data.input_dim()};
    sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
    sizes.push_back(data.output_dim());
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed + 1;
    trained = train(init_network(sizes, cfg.seed), data, tc);
    Json meta{{"init_seed", cfg.seed}, {"config", train_config_to_json(tc)}, {"steps", trained.steps},
              {"final_error", trained.final_error}, {"samples", data.size()}};
    out.emit("network.json", network_to_json(trained.network, meta).dump(2) + "\n", true);
    std::string trace = "step,error\n";
    for (const auto& p : trained.trace) trace += fmt::format("{},{}\n", p.step, format_number(p.error));
    out.emit("train_trace.csv", trace, true);
    result.final_error = trained.final_error;
  });
  const Network& net = trained.network;
  result.hidden_units = net.hidden_unit_count();

  FeatureMatrix raw_features;
  stage("features", [&] {
    raw_features = feature_vectors(net, data, {cfg.correlate_with_targets});
    out.emit("features_raw.csv", features_to_csv(raw_features), true);
    out.emit("features_raw.json", features_to_json(raw_features).dump(2) + "\n", true);
  });

  AlignmentResult aligned;
  stage("align", [&] {
    aligned = align_signs(raw_features, cfg.align_iterations, cfg.seed + 2);
    out.emit("features_aligned.csv", features_to_csv(aligned.features), true);
    out.emit("features_aligned.json", features_to_json(aligned.features).dump(2) + "\n", true);
    out.emit("alignment_trace.csv", alignment_trace_to_csv(aligned.trace), true);
  });
  const FeatureMatrix& fm = aligned.features;
  const auto names = unit_names(fm.units);

  Dendrogram tree, unaligned_tree;
  stage("cluster", [&] {
    tree = ward_cluster(fm);
    unaligned_tree = ward_cluster(raw_features);
    out.emit("dendrogram.json", dendrogram_to_json(tree, fm.units).dump(2) + "\n", true);
    out.emit("dendrogram.nwk", to_newick(tree, names) + "\n", true);
    out.emit("dendrogram_unaligned.json", dendrogram_to_json(unaligned_tree, fm.units).dump(2) + "\n", true);
  });

  std::vector<ClusterReport> reports;
  stage("roles", [&] {
    for (auto c : cfg.resolutions) {
      ClusterReport report = cut(tree, c, fm);
      out.emit(fmt::format("clusters_c{}.csv", c), assignment_to_csv(report.assignment, fm.units), true);
      out.emit(fmt::format("roles_c{}.csv", c), roles_to_csv(cluster_roles(report)), true);
      result.cuts.push_back(report.assignment);
      reports.push_back(std::move(report));
    }
  });

  std::optional<NnmfResult> nnmf;
  if (cfg.nnmf_enabled) {
    stage("nnmf", [&] {
      nnmf = nnmf_best_of(nonneg_features(fm), cfg.nnmf_rank, cfg.nnmf_iterations, cfg.nnmf_restarts, cfg.seed + 3);
      out.emit("nnmf.json", nnmf_to_json(*nnmf, cfg.nnmf_restarts).dump(2) + "\n", true);
      out.emit("nnmf_clusters.csv", assignment_to_csv(nnmf_assign(*nnmf), fm.units), true);
      out.emit("nnmf_roles.csv", roles_to_csv({nnmf->h, fm.input_dim, fm.output_dim}), true);
    });
  }

  stage("render", [&] {
    const RoleLayoutSpec layout = role_layout_for(cfg, data);
    out.emit("svg/dendrogram.svg", render_dendrogram(tree, names), false);
    out.emit("svg/dendrogram_unaligned.svg", render_dendrogram(unaligned_tree, names), false);
    out.emit("svg/features_raw.svg", render_heatmap(raw_features.values), false);
    out.emit("svg/features_aligned.svg", render_heatmap(fm.values), false);
    out.emit("svg/alignment_trace.svg", render_series(aligned.trace.cosine_sum_series, "sum of pairwise cosine similarity"),
             false);
    for (const auto& report : reports) {
      const auto panels = render_roles(cluster_roles(report), layout);
      for (std::size_t m = 0; m < panels.size(); ++m) {
        out.emit(fmt::format("svg/roles_c{}_cluster{}.svg", report.c, m), panels[m], false);
      }
      out.emit(fmt::format("svg/network_c{}.svg", report.c),
               render_network(net, cfg.prune_threshold, report.assignment), false);
    }
    if (nnmf) {
      const auto panels = render_roles({nnmf->h, fm.input_dim, fm.output_dim}, layout);
      for (std::size_t m = 0; m < panels.size(); ++m) {
        out.emit(fmt::format("svg/nnmf_roles_cluster{}.svg", m), panels[m], false);
      }
    }
  });

  result.files = out.files();
  write_text(cfg.output_dir / "manifest.json", manifest_json(cfg, config_hash, result.files, "complete", "", "").dump(2) + "\n");
  return result;
}

}  // namespace lnnhier
