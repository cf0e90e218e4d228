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

// lnnhier command line: stage-by-stage commands over a run directory plus
// the one-shot pipeline. Relative run directories resolve against
// $LNNHIER_OUTPUT_ROOT when it is set.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lnnhier/clustering.hpp"
#include "lnnhier/features.hpp"
#include "lnnhier/io.hpp"
#include "lnnhier/network.hpp"
#include "lnnhier/nnmf.hpp"
#include "lnnhier/pipeline.hpp"
#include "lnnhier/render.hpp"

using namespace lnnhier;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

struct CommonOptions {
  std::string config_file;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_file, "run config JSON file");
  cmd->add_option("-p,--preset", o.preset, "preset: E1, E1-desk, E2, E2-desk, custom");
  cmd->add_option("-s,--seed", o.seed, "master seed");
  cmd->add_option("-o,--out", o.out, "run directory");
  cmd->add_option("--set", o.sets, "override KEY=VALUE (dotted keys, JSON values), repeatable");
}

// Sets j[a][b]... for a dotted key; the value is parsed as JSON when possible.
void apply_set(Json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument(fmt::format("--set expects KEY=VALUE, got '{}'", assignment));
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

fs::path resolve_dir(const fs::path& dir) {
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("LNNHIER_OUTPUT_ROOT"); root != nullptr && *root != '\0') return fs::path(root) / dir;
  return dir;
}

// Precedence: --config file, else the run directory's config.json; then
// --preset, --seed, --out and every --set in order.
RunConfig build_config(const CommonOptions& o, const Json& extra = Json::object()) {
  Json j = Json::object();
  if (!o.config_file.empty()) {
    j = Json::parse(read_text(o.config_file));
  } else if (!o.out.empty() && fs::exists(resolve_dir(o.out) / "config.json")) {
    j = Json::parse(read_text(resolve_dir(o.out) / "config.json"));
  }
  if (!o.preset.empty()) j["preset"] = o.preset;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.out.empty()) j["output_dir"] = o.out;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  for (const auto& s : o.sets) apply_set(j, s);
  RunConfig cfg = run_config_from_json(j);
  cfg.output_dir = resolve_dir(cfg.output_dir);
  return cfg;
}

void save(const fs::path& path, std::string_view text) {
  write_text(path, text);
  fmt::print("wrote {}\n", path.string());
}

Json load_json(const fs::path& path) {
  if (!fs::exists(path)) throw IoError(fmt::format("'{}' not found; run the earlier stage first", path.string()));
  return Json::parse(read_text(path));
}

FeatureMatrix load_features(const fs::path& dir, const std::string& which) {
  return features_from_json(load_json(dir / fmt::format("features_{}.json", which)));
}

Dendrogram load_dendrogram(const fs::path& dir) { return dendrogram_from_json(load_json(dir / "dendrogram.json")); }

int cmd_train(const RunConfig& cfg) {
  // resolutions and NNMF rank are checked by the stages that use them
  RunConfig check = cfg;
  check.resolutions.clear();
  check.nnmf_enabled = false;
  validate_run_config(check);
  const fs::path dir = cfg.output_dir;
  const Dataset data = prepare_data(cfg);
  save_dataset(data, dir / "dataset");
  save(dir / "config.json", run_config_to_json(cfg).dump(2) + "\n");
  std::vector<std::size_t> sizes{data.input_dim()};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(data.output_dim());
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed + 1;
  const TrainResult r = train(init_network(sizes, cfg.seed), data, tc);
  Json meta{{"init_seed", cfg.seed}, {"config", train_config_to_json(tc)}, {"steps", r.steps},
            {"final_error", r.final_error}, {"samples", data.size()}};
  save(dir / "network.json", network_to_json(r.network, meta).dump(2) + "\n");
  std::string trace = "step,error\n";
  for (const auto& p : r.trace) trace += fmt::format("{},{}\n", p.step, format_number(p.error));
  save(dir / "train_trace.csv", trace);
  fmt::print("{} steps, final training error {}\n", r.steps, format_number(r.final_error));
  return 0;
}

int cmd_features(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  const Network net = network_from_json(load_json(dir / "network.json")).network;
  const Dataset data = load_dataset(dir / "dataset");
  const FeatureMatrix fm = feature_vectors(net, data, {cfg.correlate_with_targets});
  save(dir / "features_raw.csv", features_to_csv(fm));
  save(dir / "features_raw.json", features_to_json(fm).dump(2) + "\n");
  const auto flagged = fm.undefined.count();
  if (flagged > 0) fmt::print("{} zero-variance entries set to 0\n", flagged);
  return 0;
}

int cmd_align(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  const AlignmentResult r = align_signs(load_features(dir, "raw"), cfg.align_iterations, cfg.seed + 2);
  save(dir / "features_aligned.csv", features_to_csv(r.features));
  save(dir / "features_aligned.json", features_to_json(r.features).dump(2) + "\n");
  save(dir / "alignment_trace.csv", alignment_trace_to_csv(r.trace));
  fmt::print("{} flips, cosine sum {} -> {}\n", r.trace.flip_count(), format_number(r.trace.cosine_sum_series.front()),
             format_number(r.trace.cosine_sum_series.back()));
  return 0;
}

int cmd_cluster(const RunConfig& cfg, bool unaligned) {
  const fs::path dir = cfg.output_dir;
  const FeatureMatrix fm = load_features(dir, unaligned ? "raw" : "aligned");
  const Dendrogram d = ward_cluster(fm);
  const std::string stem = unaligned ? "dendrogram_unaligned" : "dendrogram";
  save(dir / (stem + ".json"), dendrogram_to_json(d, fm.units).dump(2) + "\n");
  if (!unaligned) save(dir / "dendrogram.nwk", to_newick(d, unit_names(fm.units)) + "\n");
  return 0;
}

int cmd_cut(const RunConfig& cfg, bool roles) {
  const fs::path dir = cfg.output_dir;
  const FeatureMatrix fm = load_features(dir, "aligned");
  const Dendrogram d = load_dendrogram(dir);
  for (auto c : cfg.resolutions) {
    const ClusterReport report = cut(d, c, fm);
    if (roles) {
      save(dir / fmt::format("roles_c{}.csv", c), roles_to_csv(cluster_roles(report)));
    } else {
      save(dir / fmt::format("clusters_c{}.csv", c), assignment_to_csv(report.assignment, fm.units));
    }
  }
  return 0;
}

int cmd_nnmf(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  const FeatureMatrix fm = load_features(dir, "aligned");
  const NnmfResult r =
      nnmf_best_of(nonneg_features(fm), cfg.nnmf_rank, cfg.nnmf_iterations, cfg.nnmf_restarts, cfg.seed + 3);
  save(dir / "nnmf.json", nnmf_to_json(r, cfg.nnmf_restarts).dump(2) + "\n");
  save(dir / "nnmf_clusters.csv", assignment_to_csv(nnmf_assign(r), fm.units));
  save(dir / "nnmf_roles.csv", roles_to_csv({r.h, fm.input_dim, fm.output_dim}));
  fmt::print("best restart {} of {}, residual {}\n", r.restart_index, cfg.nnmf_restarts, format_number(r.residual));
  return 0;
}

int cmd_render(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  const FeatureMatrix fm = load_features(dir, "aligned");
  const Dendrogram d = load_dendrogram(dir);
  const Dataset data = load_dataset(dir / "dataset");
  const Network net = network_from_json(load_json(dir / "network.json")).network;
  const auto names = unit_names(fm.units);
  save(dir / "svg/dendrogram.svg", render_dendrogram(d, names));
  save(dir / "svg/features_aligned.svg", render_heatmap(fm.values));
  if (fs::exists(dir / "features_raw.json")) save(dir / "svg/features_raw.svg", render_heatmap(load_features(dir, "raw").values));
  const RoleLayoutSpec layout = role_layout_for(cfg, data);
  for (auto c : cfg.resolutions) {
    const ClusterReport report = cut(d, c, fm);
    const auto panels = render_roles(cluster_roles(report), layout);
    for (std::size_t m = 0; m < panels.size(); ++m) save(dir / fmt::format("svg/roles_c{}_cluster{}.svg", c, m), panels[m]);
    save(dir / fmt::format("svg/network_c{}.svg", c), render_network(net, cfg.prune_threshold, report.assignment));
  }
  return 0;
}

int cmd_pipeline(const RunConfig& cfg) {
  const PipelineResult r = run_pipeline(cfg);
  fmt::print("{} artifacts in {}\n", r.files.size(), r.output_dir.string());
  fmt::print("hidden units {}, final training error {}\n", r.hidden_units, format_number(r.final_error));
  fmt::print("config sha256 {}\n", r.config_hash);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical modular analysis of layered sigmoid networks"};
  app.require_subcommand(1);

  CommonOptions common;
  std::vector<std::size_t> hidden;
  std::optional<double> lambda, a1;
  std::optional<std::uint64_t> steps;
  std::string order;
  std::optional<std::size_t> iterations, rank, restarts;
  std::vector<std::size_t> resolutions;
  bool targets = false, unaligned = false;

  auto* train_cmd = app.add_subcommand("train", "prepare data and train a network");
  auto* features_cmd = app.add_subcommand("features", "correlation feature vectors of hidden units");
  features_cmd->add_flag("--targets", targets, "correlate with dataset targets instead of network outputs");
  auto* align_cmd = app.add_subcommand("align", "sign alignment of feature vectors");
  align_cmd->add_option("-n,--iterations", iterations, "alignment iterations");
  auto* cluster_cmd = app.add_subcommand("cluster", "Ward clustering of aligned features");
  cluster_cmd->add_flag("--unaligned", unaligned, "cluster the raw features instead");
  auto* cut_cmd = app.add_subcommand("cut", "cluster assignment at given resolutions");
  auto* roles_cmd = app.add_subcommand("roles", "cluster role (centroid) matrices");
  auto* nnmf_cmd = app.add_subcommand("nnmf", "NNMF baseline clustering");
  nnmf_cmd->add_option("--rank", rank, "factorization rank");
  nnmf_cmd->add_option("-n,--iterations", iterations, "multiplicative update rounds");
  nnmf_cmd->add_option("--restarts", restarts, "random restarts");
  auto* render_cmd = app.add_subcommand("render", "SVG views of a run directory");
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage end to end");
  for (auto* cmd : {train_cmd, pipeline_cmd}) {
    cmd->add_option("--hidden", hidden, "hidden layer sizes");
    cmd->add_option("--lambda", lambda, "L1 strength");
    cmd->add_option("--a1", a1, "mean visits per sample");
    cmd->add_option("--steps", steps, "total single-sample updates");
    cmd->add_option("--order", order, "uniform-random or cyclic-by-class");
  }
  for (auto* cmd : app.get_subcommands([](CLI::App*) { return true; })) {
    add_common(cmd, common);
    cmd->add_option("-k,--clusters", resolutions, "cluster counts (resolutions)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    Json extra = Json::object();
    if (!hidden.empty()) extra["hidden_layers"] = hidden;
    if (!resolutions.empty()) extra["resolutions"] = resolutions;
    if (targets) extra["correlate_with_targets"] = true;
    // flag overrides go first so explicit --set entries win
    std::vector<std::string> flag_sets;
    auto set_flag = [&](const std::string& key, const Json& v) { flag_sets.push_back(key + "=" + v.dump()); };
    if (lambda) set_flag("train.lambda", *lambda);
    if (a1) set_flag("train.a1", *a1);
    if (steps) set_flag("train.total_steps", *steps);
    if (!order.empty()) set_flag("train.order", order);
    if (rank) set_flag("nnmf.rank", *rank);
    if (restarts) set_flag("nnmf.restarts", *restarts);
    if (iterations && nnmf_cmd->parsed()) set_flag("nnmf.iterations", *iterations);
    if (iterations && align_cmd->parsed()) set_flag("align_iterations", *iterations);
    common.sets.insert(common.sets.begin(), flag_sets.begin(), flag_sets.end());

    const RunConfig cfg = build_config(common, extra);

    if (train_cmd->parsed()) return cmd_train(cfg);
    if (features_cmd->parsed()) return cmd_features(cfg);
    if (align_cmd->parsed()) return cmd_align(cfg);
    if (cluster_cmd->parsed()) return cmd_cluster(cfg, unaligned);
    if (cut_cmd->parsed()) return cmd_cut(cfg, false);
    if (roles_cmd->parsed()) return cmd_cut(cfg, true);
    if (nnmf_cmd->parsed()) return cmd_nnmf(cfg);
    if (render_cmd->parsed()) return cmd_render(cfg);
    if (pipeline_cmd->parsed()) return cmd_pipeline(cfg);
  } catch (const PipelineError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.stage() == "validate" ? kExitInvalid : kExitFailure;
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "invalid: {}\n", e.what());
    return kExitInvalid;
  } catch (const FormatError& e) {
    fmt::print(stderr, "invalid: {}\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
