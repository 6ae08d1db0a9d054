// Copyright 2026 The qkmeans Authors
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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qkmeans/clustering.h"
#include "qkmeans/data.h"
#include "qkmeans/evaluation.h"
#include "qkmeans/experiment.h"
#include "qkmeans/feature_maps.h"
#include "qkmeans/kernel.h"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

qkm::Matrix to_matrix(const Array &a) {
    if (a.ndim() != 2) {
        throw std::invalid_argument("expected a 2-D array");
    }
    auto rows = static_cast<size_t>(a.shape(0));
    auto cols = static_cast<size_t>(a.shape(1));
    return qkm::Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

std::vector<double> to_vector(const Array &a) {
    if (a.ndim() != 1) {
        throw std::invalid_argument("expected a 1-D array");
    }
    return std::vector<double>(a.data(), a.data() + a.shape(0));
}

Array from_matrix(const qkm::Matrix &m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

qkm::FidelityMode make_mode(std::optional<uint64_t> shots, uint64_t seed) {
    return shots ? qkm::FidelityMode::sampled(*shots, seed) : qkm::FidelityMode::exact();
}

py::dict result_dict(const qkm::ClusteringResult &r) {
    py::dict d;
    d["labels"] = r.labels;
    d["centroids"] = r.centroids;
    d["medoids"] = r.medoids;
    d["iterations"] = r.iterations_run;
    d["converged"] = r.converged;
    d["trace"] = r.trace;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qkmeans, m) {
    m.doc() = "Quantum-kernel k-means core";

    py::register_exception<qkm::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<qkm::SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<qkm::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<qkm::NotFoundError>(m, "NotFoundError", PyExc_FileNotFoundError);
    py::register_exception<qkm::StaleCacheError>(m, "StaleCacheError", PyExc_RuntimeError);
    py::register_exception<qkm::StageError>(m, "StageError", PyExc_RuntimeError);

    py::class_<qkm::FeatureMapConfig>(m, "FeatureMapConfig")
        .def(
            py::init([](const std::string &kind, uint32_t qubits, uint32_t reps, const std::string &entanglement,
                        std::vector<std::string> pauli_strings, uint64_t theta_seed) {
                qkm::FeatureMapConfig c;
                c.kind = qkm::parse_map_kind(kind);
                c.n_qubits = qubits;
                c.reps = reps;
                c.entanglement = qkm::parse_entanglement(entanglement);
                c.pauli_strings = std::move(pauli_strings);
                c.theta_seed = theta_seed;
                return c;
            }),
            py::arg("kind"), py::arg("qubits"), py::arg("reps") = 1, py::arg("entanglement") = "linear",
            py::arg("pauli_strings") = std::vector<std::string>{}, py::arg("theta_seed") = 0)
        .def_property_readonly("kind", [](const qkm::FeatureMapConfig &c) { return qkm::map_kind_name(c.kind); })
        .def_readonly("qubits", &qkm::FeatureMapConfig::n_qubits)
        .def_readonly("reps", &qkm::FeatureMapConfig::reps)
        .def_readonly("theta_seed", &qkm::FeatureMapConfig::theta_seed)
        .def("canonical", &qkm::FeatureMapConfig::canonical)
        .def("digest", &qkm::FeatureMapConfig::digest)
        .def("__repr__", [](const qkm::FeatureMapConfig &c) { return "FeatureMapConfig(" + c.canonical() + ")"; });

    py::class_<qkm::Dataset>(m, "Dataset")
        .def_property_readonly("features", [](const qkm::Dataset &d) { return from_matrix(d.features); })
        .def_readonly("labels", &qkm::Dataset::labels)
        .def_readonly("class_names", &qkm::Dataset::class_names)
        .def_readonly("feature_names", &qkm::Dataset::feature_names)
        .def_readonly("fingerprint", &qkm::Dataset::fingerprint)
        .def("__len__", &qkm::Dataset::size);

    m.def(
        "load_csv",
        [](const std::filesystem::path &path, const std::string &label_column, const std::string &scaling, double lo,
           double hi) {
            qkm::CsvSchema schema;
            schema.label_column = label_column;
            qkm::Dataset ds = qkm::load_csv(path, schema);
            return qkm::fit_scale(ds, qkm::parse_scaling(scaling), lo, hi).dataset;
        },
        py::arg("path"), py::arg("label_column"), py::arg("scaling") = "none", py::arg("lo") = 0.0, py::arg("hi") = 1.0);

    m.def(
        "generate_theta", [](uint64_t seed, size_t count) { return qkm::generate_theta(seed, count).values; },
        py::arg("seed"), py::arg("count"));
    m.def(
        "make_theta", [](const qkm::FeatureMapConfig &c, size_t d) { return qkm::make_theta(c, d).values; },
        py::arg("config"), py::arg("dim"));

    m.def(
        "encode",
        [](const Array &x, const qkm::FeatureMapConfig &c) {
            auto v = to_vector(x);
            qkm::StateVector s = qkm::encode(v, c, qkm::make_theta(c, v.size()));
            const auto &amps = s.amplitudes();
            py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(amps.size()));
            std::copy(amps.begin(), amps.end(), out.mutable_data());
            return out;
        },
        py::arg("x"), py::arg("config"));

    m.def(
        "fidelity_exact",
        [](const Array &x, const Array &y, const qkm::FeatureMapConfig &c) {
            auto a = to_vector(x);
            auto b = to_vector(y);
            return qkm::fidelity_exact(a, b, c, qkm::make_theta(c, a.size()));
        },
        py::arg("x"), py::arg("y"), py::arg("config"));

    m.def(
        "fidelity",
        [](const Array &x, const Array &y, const qkm::FeatureMapConfig &c, std::optional<uint64_t> shots, uint64_t seed) {
            auto a = to_vector(x);
            auto b = to_vector(y);
            return qkm::fidelity(a, b, c, qkm::make_theta(c, a.size()), make_mode(shots, seed));
        },
        py::arg("x"), py::arg("y"), py::arg("config"), py::arg("shots") = py::none(), py::arg("seed") = 0);

    m.def(
        "kernel_matrix",
        [](const Array &data, const qkm::FeatureMapConfig &c, std::optional<uint64_t> shots, uint64_t seed) {
            qkm::Matrix x = to_matrix(data);
            qkm::KernelMatrix k;
            {
                py::gil_scoped_release release;
                k = qkm::kernel_matrix(x, c, qkm::make_theta(c, x.cols()), make_mode(shots, seed));
            }
            return from_matrix(k.values);
        },
        py::arg("data"), py::arg("config"), py::arg("shots") = py::none(), py::arg("seed") = 0);

    m.def(
        "classical_kmeans",
        [](const Array &data, size_t k, size_t t_max, uint64_t seed, const std::string &init) {
            return result_dict(qkm::classical_kmeans(to_matrix(data), k, t_max, seed, qkm::parse_init_strategy(init)));
        },
        py::arg("data"), py::arg("k"), py::arg("t_max") = qkm::DEFAULT_T_MAX, py::arg("seed") = 0,
        py::arg("init") = "random_points");

    m.def(
        "quantum_kmeans",
        [](const Array &data, size_t k, const qkm::FeatureMapConfig &c, size_t t_max, uint64_t seed,
           const std::string &init, std::optional<uint64_t> shots, uint64_t shot_seed) {
            qkm::Matrix x = to_matrix(data);
            qkm::ClusteringResult r;
            {
                py::gil_scoped_release release;
                r = qkm::quantum_kmeans(
                    x, k, c, qkm::make_theta(c, x.cols()), t_max, make_mode(shots, shot_seed), seed,
                    qkm::parse_init_strategy(init));
            }
            return result_dict(r);
        },
        py::arg("data"), py::arg("k"), py::arg("config"), py::arg("t_max") = qkm::DEFAULT_T_MAX, py::arg("seed") = 0,
        py::arg("init") = "random_points", py::arg("shots") = py::none(), py::arg("shot_seed") = 0);

    m.def("adjusted_rand_index", &qkm::adjusted_rand_index, py::arg("labels"), py::arg("truth"));
    m.def("adjusted_mutual_information", &qkm::adjusted_mutual_information, py::arg("labels"), py::arg("truth"));
    m.def(
        "evaluate",
        [](const std::vector<int> &labels, const std::vector<int> &truth) {
            qkm::EvaluationReport r = qkm::evaluate(labels, truth);
            py::dict d;
            d["accuracy"] = r.accuracy;
            d["ari"] = r.ari;
            d["ami"] = r.ami;
            d["confusion"] = r.confusion;
            return d;
        },
        py::arg("labels"), py::arg("truth"));

    m.def(
        "run_config",
        [](const std::filesystem::path &path, std::optional<uint64_t> seed) {
            qkm::ExperimentConfig c = qkm::load_config(path);
            qkm::Overrides o;
            o.seed = seed;
            qkm::apply_overrides(c, o);
            qkm::RunRecord r = qkm::run_experiment(c);
            return qkm::results_text(r);
        },
        py::arg("path"), py::arg("seed") = py::none(),
        "Runs an experiment config and returns its key=value results without writing files.");
}
