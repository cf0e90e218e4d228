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

#include "lnnhier/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace lnnhier {
namespace {

void expect_format(const Json& j, std::string_view kind) {
  if (!j.is_object() || j.value("format", "") != kind) {
    throw FormatError(fmt::format("document is not a '{}' document", kind));
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw FormatError(fmt::format("unsupported '{}' version {}", kind, j.value("version", 0)));
  }
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::string header_line(std::span<const std::string> header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  return out + "\n";
}

std::vector<std::string> feature_header(std::size_t input_dim, std::size_t output_dim) {
  std::vector<std::string> h{"unit", "layer", "position"};
  for (std::size_t i = 1; i <= input_dim; ++i) h.push_back(fmt::format("in_{}", i));
  for (std::size_t j = 1; j <= output_dim; ++j) h.push_back(fmt::format("out_{}", j));
  return h;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  return {text.begin(), text.end()};
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::string format_number(double x) { return fmt::format("{}", x); }

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = line.find(',', start);
        fields.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      rows.push_back(std::move(fields));
    }
    pos = end + 1;
  }
  return rows;
}

double parse_number(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError(fmt::format("'{}' is not a number", field));
  }
  return value;
}

std::string matrix_to_csv(const Matrix& m, std::span<const std::string> header) {
  if (header.size() != static_cast<std::size_t>(m.cols())) throw DimensionMismatch("CSV header width != matrix width");
  std::string out = header_line(header);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_number(m(r, c));
    }
    out += '\n';
  }
  return out;
}

Matrix matrix_from_csv(std::string_view text, std::vector<std::string>* header) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw FormatError("CSV has no header");
  if (header) *header = rows.front();
  const std::size_t width = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(width));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) throw FormatError(fmt::format("CSV row {} has {} fields, expected {}", r, rows[r].size(), width));
    for (std::size_t c = 0; c < width; ++c) {
      m(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = parse_number(rows[r][c]);
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("matrix rows have unequal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Json network_to_json(const Network& net, const Json& training) {
  Json weights = Json::array();
  Json biases = Json::array();
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    weights.push_back(matrix_to_json(net.weights[l]));
    biases.push_back(vector_to_json(net.biases[l]));
  }
  return {{"format", "lnnhier.network"}, {"version", kFormatVersion}, {"layer_sizes", net.layer_sizes},
          {"weights", weights},          {"biases", biases},          {"training", training}};
}

NetworkDocument network_from_json(const Json& j) {
  expect_format(j, "lnnhier.network");
  NetworkDocument doc;
  try {
    doc.network.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    for (const auto& w : j.at("weights")) doc.network.weights.push_back(matrix_from_json(w));
    for (const auto& b : j.at("biases")) doc.network.biases.push_back(vector_from_json(b));
  } catch (const Json::exception& e) {
    throw FormatError(fmt::format("malformed network document: {}", e.what()));
  }
  doc.training = j.value("training", Json::object());
  doc.network.validate();
  return doc;
}

Json train_config_to_json(const TrainConfig& cfg) {
  Json j{{"lambda", cfg.lambda}, {"epsilon1", cfg.epsilon1}, {"a1", cfg.a1},
         {"eta0", cfg.eta0},     {"seed", cfg.seed},         {"order", std::string(to_string(cfg.order))}};
  j["total_steps"] = cfg.total_steps ? Json(*cfg.total_steps) : Json(nullptr);
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.epsilon1 = j.value("epsilon1", cfg.epsilon1);
  cfg.a1 = j.value("a1", cfg.a1);
  cfg.eta0 = j.value("eta0", cfg.eta0);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("total_steps") && !j["total_steps"].is_null()) cfg.total_steps = j["total_steps"].get<std::uint64_t>();
  if (j.contains("order")) cfg.order = order_policy_from_string(j["order"].get<std::string>());
  cfg.validate();
  return cfg;
}

Json scaling_to_json(const Scaling& s) {
  return {{"raw_min", vector_to_json(s.raw_min)},
          {"raw_max", vector_to_json(s.raw_max)},
          {"target_low", s.target_low},
          {"target_high", s.target_high},
          {"constant", s.constant}};
}

Scaling scaling_from_json(const Json& j) {
  Scaling s;
  s.raw_min = vector_from_json(j.at("raw_min"));
  s.raw_max = vector_from_json(j.at("raw_max"));
  s.target_low = j.at("target_low").get<double>();
  s.target_high = j.at("target_high").get<double>();
  s.constant = j.at("constant").get<std::vector<bool>>();
  if (s.constant.size() != s.size() || s.raw_max.size() != s.raw_min.size()) throw FormatError("scaling arrays differ in length");
  return s;
}

void save_dataset(const Dataset& data, const std::filesystem::path& dir) {
  data.validate();
  std::vector<std::string> in_header, out_header;
  for (std::size_t i = 1; i <= data.input_dim(); ++i) in_header.push_back(fmt::format("in_{}", i));
  for (std::size_t j = 1; j <= data.output_dim(); ++j) out_header.push_back(fmt::format("out_{}", j));
  write_text(dir / "inputs.csv", matrix_to_csv(data.inputs, in_header));
  write_text(dir / "outputs.csv", matrix_to_csv(data.outputs, out_header));
  if (!data.labels.empty()) {
    std::string labels = "label\n";
    for (int l : data.labels) labels += std::to_string(l) + "\n";
    write_text(dir / "labels.csv", labels);
  }
  Json meta{{"format", "lnnhier.dataset"}, {"version", kFormatVersion}, {"samples", data.size()},
            {"input_dim", data.input_dim()}, {"output_dim", data.output_dim()}};
  meta["input_scaling"] = data.input_scaling ? scaling_to_json(*data.input_scaling) : Json(nullptr);
  meta["output_scaling"] = data.output_scaling ? scaling_to_json(*data.output_scaling) : Json(nullptr);
  write_text(dir / "scaling.json", meta.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset data;
  data.inputs = matrix_from_csv(read_text(dir / "inputs.csv"));
  data.outputs = matrix_from_csv(read_text(dir / "outputs.csv"));
  if (std::filesystem::exists(dir / "labels.csv")) {
    const Matrix labels = matrix_from_csv(read_text(dir / "labels.csv"));
    for (Eigen::Index n = 0; n < labels.rows(); ++n) data.labels.push_back(static_cast<int>(labels(n, 0)));
  }
  if (std::filesystem::exists(dir / "scaling.json")) {
    const Json meta = Json::parse(read_text(dir / "scaling.json"));
    expect_format(meta, "lnnhier.dataset");
    if (!meta["input_scaling"].is_null()) data.input_scaling = scaling_from_json(meta["input_scaling"]);
    if (!meta["output_scaling"].is_null()) data.output_scaling = scaling_from_json(meta["output_scaling"]);
  }
  data.validate();
  return data;
}

std::vector<std::string> unit_names(std::span<const UnitRef> units) {
  std::vector<std::string> names;
  names.reserve(units.size());
  for (const auto& u : units) names.push_back(fmt::format("L{}U{}", u.layer, u.position));
  return names;
}

std::string features_to_csv(const FeatureMatrix& fm) {
  fm.validate();
  std::string out = header_line(feature_header(fm.input_dim, fm.output_dim));
  for (std::size_t k = 0; k < fm.rows(); ++k) {
    out += fmt::format("{},{},{}", k, fm.units[k].layer, fm.units[k].position);
    for (Eigen::Index c = 0; c < fm.values.cols(); ++c) {
      out += ',' + format_number(fm.values(static_cast<Eigen::Index>(k), c));
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix features_from_csv(std::string_view text) {
  std::vector<std::string> header;
  const Matrix raw = matrix_from_csv(text, &header);
  if (header.size() < 3 || header[0] != "unit" || header[1] != "layer" || header[2] != "position") {
    throw FormatError("feature CSV must start with unit,layer,position");
  }
  FeatureMatrix fm;
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (header[c].rfind("in_", 0) == 0) {
      ++fm.input_dim;
    } else if (header[c].rfind("out_", 0) == 0) {
      ++fm.output_dim;
    } else {
      throw FormatError(fmt::format("unexpected feature column '{}'", header[c]));
    }
  }
  fm.values = raw.rightCols(raw.cols() - 3);
  fm.undefined.setConstant(fm.values.rows(), fm.values.cols(), false);
  for (Eigen::Index k = 0; k < raw.rows(); ++k) {
    fm.units.push_back({static_cast<std::size_t>(raw(k, 1)), static_cast<std::size_t>(raw(k, 2))});
  }
  return fm;
}

Json features_to_json(const FeatureMatrix& fm) {
  fm.validate();
  Json units = Json::array();
  for (const auto& u : fm.units) units.push_back({{"layer", u.layer}, {"position", u.position}});
  Json flags = Json::array();
  for (Eigen::Index k = 0; k < fm.undefined.rows(); ++k) {
    for (Eigen::Index c = 0; c < fm.undefined.cols(); ++c) {
      if (fm.undefined(k, c)) flags.push_back({k, c});
    }
  }
  return {{"format", "lnnhier.features"}, {"version", kFormatVersion}, {"input_dim", fm.input_dim},
          {"output_dim", fm.output_dim},  {"units", units},            {"values", matrix_to_json(fm.values)},
          {"undefined", flags}};
}

FeatureMatrix features_from_json(const Json& j) {
  expect_format(j, "lnnhier.features");
  FeatureMatrix fm;
  try {
    fm.input_dim = j.at("input_dim").get<std::size_t>();
    fm.output_dim = j.at("output_dim").get<std::size_t>();
    for (const auto& u : j.at("units")) fm.units.push_back({u.at("layer").get<std::size_t>(), u.at("position").get<std::size_t>()});
    fm.values = matrix_from_json(j.at("values"));
    if (fm.values.size() == 0) fm.values.resize(0, static_cast<Eigen::Index>(fm.input_dim + fm.output_dim));
    fm.undefined.setConstant(fm.values.rows(), fm.values.cols(), false);
    for (const auto& f : j.at("undefined")) fm.undefined(f[0].get<Eigen::Index>(), f[1].get<Eigen::Index>()) = true;
  } catch (const Json::exception& e) {
    throw FormatError(fmt::format("malformed feature document: {}", e.what()));
  }
  fm.validate();
  return fm;
}

std::string alignment_trace_to_csv(const AlignmentTrace& trace) {
  std::string out = "iteration,cosine_sum\n";
  for (std::size_t a = 0; a < trace.cosine_sum_series.size(); ++a) {
    out += fmt::format("{},{}\n", a, format_number(trace.cosine_sum_series[a]));
  }
  return out;
}

Json dendrogram_to_json(const Dendrogram& d, std::span<const UnitRef> units) {
  d.validate();
  Json leaves = Json::array();
  for (std::size_t k = 0; k < d.leaf_count; ++k) {
    Json leaf{{"id", k}};
    if (k < units.size()) {
      leaf["layer"] = units[k].layer;
      leaf["position"] = units[k].position;
    }
    leaves.push_back(std::move(leaf));
  }
  Json merges = Json::array();
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    const Merge& mg = d.merges[m];
    merges.push_back({{"id", d.leaf_count + m}, {"left", mg.left}, {"right", mg.right}, {"height", mg.height}, {"size", mg.size}});
  }
  return {{"format", "lnnhier.dendrogram"}, {"version", kFormatVersion}, {"leaf_count", d.leaf_count},
          {"leaves", leaves}, {"merges", merges}};
}

Dendrogram dendrogram_from_json(const Json& j) {
  expect_format(j, "lnnhier.dendrogram");
  Dendrogram d;
  try {
    d.leaf_count = j.at("leaf_count").get<std::size_t>();
    for (const auto& m : j.at("merges")) {
      d.merges.push_back({m.at("left").get<std::size_t>(), m.at("right").get<std::size_t>(), m.at("height").get<double>(),
                          m.at("size").get<std::size_t>()});
    }
  } catch (const Json::exception& e) {
    throw FormatError(fmt::format("malformed dendrogram document: {}", e.what()));
  }
  d.validate();
  return d;
}

std::string assignment_to_csv(std::span<const std::size_t> labels, std::span<const UnitRef> units) {
  if (labels.size() != units.size()) throw DimensionMismatch("assignment and unit list differ in length");
  std::string out = "unit,layer,position,cluster\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out += fmt::format("{},{},{},{}\n", k, units[k].layer, units[k].position, labels[k]);
  }
  return out;
}

std::string roles_to_csv(const RoleMatrix& roles) {
  std::vector<std::string> header{"cluster"};
  for (std::size_t i = 1; i <= roles.input_dim; ++i) header.push_back(fmt::format("in_{}", i));
  for (std::size_t j = 1; j <= roles.output_dim; ++j) header.push_back(fmt::format("out_{}", j));
  std::string out = header_line(header);
  for (Eigen::Index m = 0; m < roles.roles.rows(); ++m) {
    out += std::to_string(m);
    for (Eigen::Index c = 0; c < roles.roles.cols(); ++c) out += ',' + format_number(roles.roles(m, c));
    out += '\n';
  }
  return out;
}

Json nnmf_to_json(const NnmfResult& r, std::size_t restarts) {
  return {{"format", "lnnhier.nnmf"},
          {"version", kFormatVersion},
          {"rank", r.w.cols()},
          {"iterations", r.iterations},
          {"restarts", restarts},
          {"seed", r.seed},
          {"restart_index", r.restart_index},
          {"residual", r.residual},
          {"w", matrix_to_json(r.w)},
          {"h", matrix_to_json(r.h)}};
}

}  // namespace lnnhier
