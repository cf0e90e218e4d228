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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lnnhier/clustering.hpp"
#include "lnnhier/data_io.hpp"
#include "lnnhier/features.hpp"
#include "lnnhier/io.hpp"
#include "lnnhier/network.hpp"
#include "lnnhier/nnmf.hpp"
#include "lnnhier/pipeline.hpp"
#include "lnnhier/render.hpp"

namespace py = pybind11;
using namespace lnnhier;

namespace {

Dataset make_dataset(const Matrix& inputs, const Matrix& outputs, std::vector<int> labels) {
  Dataset d;
  d.inputs = inputs;
  d.outputs = outputs;
  d.labels = std::move(labels);
  d.validate();
  return d;
}

RunConfig config_from_dict(const py::object& obj) {
  const py::module_ json = py::module_::import("json");
  return run_config_from_json(Json::parse(json.attr("dumps")(obj).cast<std::string>()));
}

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_lnnhier, m) {
  m.doc() = "Hierarchical modular analysis of layered sigmoid networks";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

  py::class_<Network>(m, "Network")
      .def_readonly("layer_sizes", &Network::layer_sizes)
      .def_readwrite("weights", &Network::weights)
      .def_readwrite("biases", &Network::biases)
      .def_property_readonly("hidden_unit_count", &Network::hidden_unit_count)
      .def_property_readonly("weight_count", &Network::weight_count);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("inputs"), py::arg("outputs"), py::arg("labels") = std::vector<int>{})
      .def_readonly("inputs", &Dataset::inputs)
      .def_readonly("outputs", &Dataset::outputs)
      .def_readonly("labels", &Dataset::labels)
      .def("__len__", &Dataset::size);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &TrainConfig::lambda)
      .def_readwrite("epsilon1", &TrainConfig::epsilon1)
      .def_readwrite("a1", &TrainConfig::a1)
      .def_readwrite("eta0", &TrainConfig::eta0)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("total_steps", &TrainConfig::total_steps)
      .def_property(
          "order", [](const TrainConfig& c) { return std::string(to_string(c.order)); },
          [](TrainConfig& c, const std::string& s) { c.order = order_policy_from_string(s); });

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("network", &TrainResult::network)
      .def_readonly("final_error", &TrainResult::final_error)
      .def_readonly("steps", &TrainResult::steps)
      .def_property_readonly("trace", [](const TrainResult& r) {
        std::vector<std::pair<std::uint64_t, double>> out;
        for (const auto& p : r.trace) out.emplace_back(p.step, p.error);
        return out;
      });

  m.def("init_network", [](std::vector<std::size_t> sizes, std::uint64_t seed) { return init_network(sizes, seed); },
        py::arg("layer_sizes"), py::arg("seed"));
  m.def("forward", [](const Network& net, std::vector<double> x) { return forward(net, x); });
  m.def("predict", &predict);
  m.def("training_error", &training_error);
  m.def("objective", &objective);
  m.def("step_size", &step_size, py::arg("t"), py::arg("a1n1"), py::arg("eta0") = 0.7);
  m.def("train", &train, py::arg("network"), py::arg("data"), py::arg("config"));
  m.def(
      "prune_view",
      [](const Network& net, double threshold) {
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t, double>> out;
        for (const auto& e : prune_view(net, threshold)) out.emplace_back(e.layer, e.from, e.to, e.weight);
        return out;
      },
      "Edges (layer, from, to, weight) with |weight| >= threshold.");

  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def_static("from_values", &FeatureMatrix::from_values, py::arg("values"), py::arg("input_dim"))
      .def_readonly("values", &FeatureMatrix::values)
      .def_readonly("undefined", &FeatureMatrix::undefined)
      .def_readonly("input_dim", &FeatureMatrix::input_dim)
      .def_readonly("output_dim", &FeatureMatrix::output_dim)
      .def_property_readonly("units", [](const FeatureMatrix& fm) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& u : fm.units) out.emplace_back(u.layer, u.position);
        return out;
      });

  m.def("pearson", [](std::vector<double> a, std::vector<double> b) { return pearson(a, b); });
  m.def("unit_outputs", &unit_outputs);
  m.def(
      "feature_vectors",
      [](const Network& net, const Dataset& data, bool use_targets) { return feature_vectors(net, data, {use_targets}); },
      py::arg("network"), py::arg("data"), py::arg("use_targets") = false);
  m.def("cosine_sum", py::overload_cast<const Matrix&>(&cosine_sum));
  m.def(
      "align_signs",
      [](const FeatureMatrix& fm, std::size_t iterations, std::uint64_t seed) {
        AlignmentResult r = align_signs(fm, iterations, seed);
        return py::make_tuple(r.features, r.trace.cosine_sum_series, r.trace.flip_count());
      },
      py::arg("features"), py::arg("iterations"), py::arg("seed"),
      "Returns (aligned features, cosine-sum series, flip count).");

  py::class_<Merge>(m, "Merge")
      .def_readonly("left", &Merge::left)
      .def_readonly("right", &Merge::right)
      .def_readonly("height", &Merge::height)
      .def_readonly("size", &Merge::size);
  py::class_<Dendrogram>(m, "Dendrogram")
      .def_readonly("leaf_count", &Dendrogram::leaf_count)
      .def_readonly("merges", &Dendrogram::merges)
      .def("leaf_order", &Dendrogram::leaf_order)
      .def("cut_labels", &Dendrogram::cut_labels, py::arg("c"))
      .def("newick", [](const Dendrogram& d, std::vector<std::string> names) { return to_newick(d, names); });

  m.def("ess", [](std::vector<Cluster> partition, const Matrix& v) { return ess(partition, v); });
  m.def("delta_ess", &delta_ess);
  m.def("ward_cluster", py::overload_cast<const Matrix&>(&ward_cluster));
  m.def(
      "cluster_roles",
      [](const Dendrogram& d, std::size_t c, const FeatureMatrix& fm) { return cluster_roles(cut(d, c, fm)).roles; },
      py::arg("dendrogram"), py::arg("c"), py::arg("features"), "Role (centroid) matrix at resolution c.");

  py::class_<NnmfResult>(m, "NnmfResult")
      .def_readonly("w", &NnmfResult::w)
      .def_readonly("h", &NnmfResult::h)
      .def_readonly("residual", &NnmfResult::residual)
      .def_readonly("residual_trace", &NnmfResult::residual_trace)
      .def_readonly("restart_index", &NnmfResult::restart_index);
  m.def("nnmf_factorize", &nnmf_factorize, py::arg("v"), py::arg("rank"), py::arg("iterations"), py::arg("seed"));
  m.def("nnmf_best_of", &nnmf_best_of, py::arg("v"), py::arg("rank"), py::arg("iterations"), py::arg("restarts"),
        py::arg("seed"));
  m.def("nnmf_assign", &nnmf_assign);

  m.def(
      "synth_cpi",
      [](std::uint64_t seed, std::size_t months, std::size_t items) {
        const TimeSeriesTable t = synth_cpi(seed, months, items);
        return py::make_tuple(t.names, t.values);
      },
      py::arg("seed"), py::arg("months"), py::arg("items") = 3, "Returns (item names, months x items values).");
  m.def(
      "window_timeseries",
      [](const Matrix& values, std::size_t window, std::size_t horizon) {
        TimeSeriesTable t;
        for (Eigen::Index i = 0; i < values.cols(); ++i) t.names.push_back("item_" + std::to_string(i + 1));
        for (Eigen::Index n = 0; n < values.rows(); ++n) t.months.push_back(n);
        t.values = values;
        return window_timeseries(t, window, horizon);
      },
      py::arg("values"), py::arg("window"), py::arg("horizon") = 1);
  m.def(
      "synth_digits",
      [](std::size_t per_class, std::uint64_t seed, std::size_t size) {
        return preprocess_images(synth_digits(per_class, seed), size);
      },
      py::arg("per_class"), py::arg("seed"), py::arg("size") = 14, "Synthetic digit training set.");

  m.def("render_dendrogram",
        [](const Dendrogram& d, std::vector<std::string> names) { return render_dendrogram(d, names); });
  m.def("preset", [](const std::string& name) { return to_python(run_config_to_json(preset_config(name))); });
  m.def(
      "run_pipeline",
      [](const py::dict& config) {
        const PipelineResult r = run_pipeline(config_from_dict(config));
        py::dict out;
        out["output_dir"] = r.output_dir;
        out["config_hash"] = r.config_hash;
        out["hidden_units"] = r.hidden_units;
        out["final_error"] = r.final_error;
        out["cuts"] = r.cuts;
        py::dict files;
        for (const auto& f : r.files) files[py::str(f.path)] = f.sha256;
        out["files"] = files;
        return out;
      },
      py::arg("config"), "Runs every stage; config keys follow config.json (preset, seed, output_dir, ...).");
}
