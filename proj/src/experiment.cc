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

#include "qkmeans/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qkmeans/svg.h"

namespace qkm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename F>
auto in_stage(const char *stage, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(stage, e.what());
    }
}

const json *find(const json &obj, const char *key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

ColumnRef column_ref(const json &v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<int64_t>() >= 0)) {
        return static_cast<size_t>(v.get<uint64_t>());
    }
    throw ParseError("column reference must be a name or a non-negative index, got " + v.dump());
}

std::vector<ColumnRef> column_refs(const json &v) {
    if (!v.is_array()) {
        throw ParseError("expected an array of columns, got " + v.dump());
    }
    std::vector<ColumnRef> out;
    for (const auto &c : v) {
        out.push_back(column_ref(c));
    }
    return out;
}

std::vector<uint64_t> seed_list(const json &v) {
    if (v.is_number_unsigned() || v.is_number_integer()) {
        return {v.get<uint64_t>()};
    }
    if (!v.is_array() || v.empty()) {
        throw ParseError("seed list must be a non-empty array of integers");
    }
    return v.get<std::vector<uint64_t>>();
}

fs::path resolve(const fs::path &base, const std::string &p) {
    fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

size_t resolve_column(const ColumnRef &ref, const std::vector<std::string> &names) {
    if (const auto *idx = std::get_if<size_t>(&ref)) {
        if (*idx >= names.size()) {
            throw std::invalid_argument("plot feature index " + std::to_string(*idx) + " out of range");
        }
        return *idx;
    }
    const auto &name = std::get<std::string>(ref);
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw std::invalid_argument("unknown plot feature '" + name + "'");
    }
    return static_cast<size_t>(it - names.begin());
}

std::string fmt(double v) {
    return format_double(v);
}

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

struct SweepStats {
    double mean = 0;
    double std = 0;
    double min = 0;
    double max = 0;
};

SweepStats accuracy_stats(const std::vector<SweepRun> &runs) {
    SweepStats s;
    if (runs.empty()) {
        return s;
    }
    s.min = s.max = runs[0].evaluation.accuracy;
    for (const auto &r : runs) {
        s.mean += r.evaluation.accuracy;
        s.min = std::min(s.min, r.evaluation.accuracy);
        s.max = std::max(s.max, r.evaluation.accuracy);
    }
    s.mean /= static_cast<double>(runs.size());
    for (const auto &r : runs) {
        s.std += (r.evaluation.accuracy - s.mean) * (r.evaluation.accuracy - s.mean);
    }
    s.std = std::sqrt(s.std / static_cast<double>(runs.size()));
    return s;
}

void write_file(const fs::path &path, const std::string &content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::vector<uint64_t> effective_theta_seeds(const ExperimentConfig &config) {
    if (config.algorithm == Algorithm::Classical || config.map.kind != MapKind::EfficientSU2) {
        return {config.map.theta_seed};
    }
    return config.clustering.theta_seeds;
}

KernelMatrix load_or_compute_kernel(
    const Matrix &data,
    const FeatureMapConfig &map,
    const ThetaParameters &theta,
    const FidelityMode &mode,
    uint64_t fingerprint,
    const fs::path &cache_path,
    bool &hit,
    std::ostream *log) {
    hit = false;
    if (!cache_path.empty()) {
        try {
            KernelMatrix k = load_kernel(cache_path, fingerprint, kernel_config_digest(map, theta.seed, mode));
            hit = true;
            if (log) {
                *log << "kernel cache hit: " << cache_path.string() << "\n";
            }
            return k;
        } catch (const NotFoundError &) {
            if (log) {
                *log << "kernel cache miss: " << cache_path.string() << "\n";
            }
        } catch (const StaleCacheError &e) {
            if (log) {
                *log << "stale kernel cache (" << e.what() << "); recomputing\n";
            }
        }
    }
    KernelMatrix k = kernel_matrix(data, map, theta, mode, fingerprint);
    if (!cache_path.empty()) {
        in_stage("write", [&] {
            save_kernel(k, cache_path);
            return 0;
        });
    }
    return k;
}

json run_to_json(const SweepRun &run) {
    json j;
    j["theta_seed"] = run.theta_seed;
    j["init_seed"] = run.init_seed;
    j["labels"] = run.result.labels;
    j["centroids"] = run.result.centroids;
    j["medoids"] = run.result.medoids;
    j["iterations"] = run.result.iterations_run;
    j["converged"] = run.result.converged;
    j["trace"] = run.result.trace;
    j["accuracy"] = run.evaluation.accuracy;
    j["ari"] = run.evaluation.ari;
    j["ami"] = run.evaluation.ami;
    return j;
}

}  // namespace

const char *algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Classical:
            return "classical";
        case Algorithm::QuantumCentroid:
            return "quantum_centroid";
        case Algorithm::KernelMatrix:
            return "kernel_matrix";
    }
    return "?";
}

double parse_angle_expr(const json &value) {
    if (value.is_number()) {
        return value.get<double>();
    }
    if (!value.is_string()) {
        throw ParseError("expected a number or angle expression, got " + value.dump());
    }
    std::string s;
    for (char c : value.get<std::string>()) {
        if (c != ' ') {
            s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    auto number = [&](const std::string &text) {
        size_t used = 0;
        double v = 0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw ParseError("bad angle expression '" + value.get<std::string>() + "'");
        }
        return v;
    };
    size_t pos = s.find("pi");
    if (pos == std::string::npos) {
        return number(s);
    }
    std::string factor = s.substr(0, pos);
    std::string rest = s.substr(pos + 2);
    if (!factor.empty() && factor.back() == '*') {
        factor.pop_back();
    }
    double v = std::numbers::pi * (factor.empty() ? 1.0 : number(factor));
    if (!rest.empty()) {
        if (rest[0] != '/') {
            throw ParseError("bad angle expression '" + value.get<std::string>() + "'");
        }
        v /= number(rest.substr(1));
    }
    return v;
}

uint64_t ExperimentConfig::digest() const {
    json copy = source;
    copy.erase("output");
    return Fnv1a().str(copy.dump()).digest();
}

ExperimentConfig parse_config(const json &doc, const fs::path &base_dir) {
    return in_stage("config", [&] {
        if (!doc.is_object()) {
            throw ParseError("config must be a JSON object");
        }
        ExperimentConfig c;
        c.source = doc;
        c.base_dir = base_dir;
        c.name = doc.value("name", std::string("experiment"));

        const json *ds = find(doc, "dataset");
        if (!ds || !ds->is_object()) {
            throw SchemaError("config needs a 'dataset' block");
        }
        const json *path = find(*ds, "path");
        if (!path) {
            throw SchemaError("dataset block needs 'path'");
        }
        c.dataset.path = resolve(base_dir, path->get<std::string>());
        c.dataset.schema.has_header = ds->value("has_header", true);
        const json *label = find(*ds, "label_column");
        if (!label) {
            throw SchemaError("dataset block needs 'label_column'");
        }
        c.dataset.schema.label_column = column_ref(*label);
        if (const json *fc = find(*ds, "feature_columns")) {
            c.dataset.schema.feature_columns = column_refs(*fc);
        }
        if (const json *sel = find(*ds, "select")) {
            c.dataset.select = column_refs(*sel);
        }
        if (const json *sc = find(*ds, "scaling")) {
            if (sc->is_string()) {
                c.dataset.scaling = parse_scaling(sc->get<std::string>());
            } else if (sc->is_object()) {
                c.dataset.scaling = parse_scaling(sc->at("kind").get<std::string>());
                if (const json *lo = find(*sc, "lo")) {
                    c.dataset.lo = parse_angle_expr(*lo);
                }
                if (const json *hi = find(*sc, "hi")) {
                    c.dataset.hi = parse_angle_expr(*hi);
                }
            } else {
                throw ParseError("'scaling' must be a name or an object");
            }
        }

        const json *map = find(doc, "map");
        std::string kind = "classical";
        if (map) {
            kind = map->value("map", std::string("classical"));
        }
        if (kind == "classical") {
            c.algorithm = Algorithm::Classical;
        } else {
            c.map.kind = parse_map_kind(kind);
            c.map.n_qubits = map->value("qubits", 2u);
            c.map.reps = map->value("reps", 1u);
            c.map.entanglement = parse_entanglement(map->value("entanglement", std::string("linear")));
            if (const json *ps = find(*map, "pauli_strings")) {
                c.map.pauli_strings = ps->get<std::vector<std::string>>();
            }
            c.map.theta_seed = map->value("theta_seed", uint64_t{0});
            c.algorithm = Algorithm::QuantumCentroid;
        }

        const json *cl = find(doc, "clustering");
        if (!cl || !cl->is_object()) {
            throw SchemaError("config needs a 'clustering' block");
        }
        const json *k = find(*cl, "k");
        if (!k) {
            throw SchemaError("clustering block needs 'k'");
        }
        int64_t kv = k->get<int64_t>();
        int64_t t_max = cl->value("t_max", static_cast<int64_t>(DEFAULT_T_MAX));
        if (kv < 1) {
            throw ValidationError("k must be at least 1");
        }
        if (t_max < 1) {
            throw ValidationError("t_max must be at least 1");
        }
        c.clustering.k = static_cast<size_t>(kv);
        c.clustering.t_max = static_cast<size_t>(t_max);
        c.clustering.init = parse_init_strategy(cl->value("init", std::string("random_points")));
        if (const json *s = find(*cl, "seeds")) {
            c.clustering.seeds = seed_list(*s);
        }
        c.clustering.theta_seeds = {c.map.theta_seed};
        if (const json *s = find(*cl, "theta_seeds")) {
            c.clustering.theta_seeds = seed_list(*s);
        }
        std::string mode = cl->value("mode", std::string("exact"));
        if (mode == "exact") {
            c.clustering.mode = FidelityMode::exact();
        } else if (mode == "shots") {
            c.clustering.mode = FidelityMode::sampled(cl->value("shots", DEFAULT_SHOTS), cl->value("shot_seed", uint64_t{0}));
            if (c.clustering.mode.shots == 0) {
                throw ValidationError("shots must be positive");
            }
        } else {
            throw ParseError("clustering.mode must be 'exact' or 'shots', got '" + mode + "'");
        }
        std::string algorithm = cl->value("algorithm", std::string("centroid"));
        if (algorithm == "kernel_matrix") {
            if (c.algorithm == Algorithm::Classical) {
                throw ValidationError("the kernel_matrix algorithm needs a quantum feature map");
            }
            c.algorithm = Algorithm::KernelMatrix;
        } else if (algorithm != "centroid") {
            throw ParseError("clustering.algorithm must be 'centroid' or 'kernel_matrix', got '" + algorithm + "'");
        }

        if (const json *out = find(doc, "output")) {
            if (const json *dir = find(*out, "dir")) {
                c.output.dir = resolve(base_dir, dir->get<std::string>());
            }
            if (const json *cache = find(*out, "kernel_cache")) {
                c.output.kernel_cache = resolve(base_dir, cache->get<std::string>());
            }
            if (const json *pf = find(*out, "plot_features")) {
                c.output.plot_features = column_refs(*pf);
                if (c.output.plot_features.size() != 2) {
                    throw ValidationError("output.plot_features needs exactly two columns");
                }
            }
        }
        if (c.output.dir.empty()) {
            c.output.dir = (fs::current_path() / "out" / c.name).lexically_normal();
        }
        return c;
    });
}

ExperimentConfig load_config(const fs::path &path) {
    json doc = in_stage("config", [&] {
        std::ifstream in(path);
        if (!in) {
            throw NotFoundError("config not found: " + path.string());
        }
        try {
            return json::parse(in);
        } catch (const json::parse_error &e) {
            throw ParseError(path.string() + ": " + e.what());
        }
    });
    return parse_config(doc, fs::absolute(path).parent_path());
}

void apply_overrides(ExperimentConfig &config, const Overrides &o) {
    if (o.seed) {
        config.clustering.seeds = {*o.seed};
        config.source["clustering"]["seeds"] = json::array({*o.seed});
    }
    if (o.shots) {
        if (*o.shots == 0) {
            throw StageError("config", "--shots must be positive");
        }
        config.clustering.mode = FidelityMode::sampled(*o.shots, config.clustering.mode.seed);
        config.source["clustering"]["mode"] = "shots";
        config.source["clustering"]["shots"] = *o.shots;
    }
    if (o.kernel_cache) {
        config.output.kernel_cache = fs::absolute(*o.kernel_cache).lexically_normal();
        config.source["output"]["kernel_cache"] = config.output.kernel_cache.string();
    }
    if (o.out) {
        config.output.dir = fs::absolute(*o.out).lexically_normal();
        config.source["output"]["dir"] = config.output.dir.string();
    }
}

PreparedData prepare_dataset(const ExperimentConfig &config) {
    PreparedData p = in_stage("dataset", [&] {
        PreparedData out;
        out.selected = load_csv(config.dataset.path, config.dataset.schema);
        if (!config.dataset.select.empty()) {
            out.selected = select_features(out.selected, config.dataset.select);
        }
        ScaledDataset scaled = fit_scale(out.selected, config.dataset.scaling, config.dataset.lo, config.dataset.hi);
        out.scaled = std::move(scaled.dataset);
        out.scaling = std::move(scaled.spec);
        return out;
    });
    in_stage("validate", [&] {
        if (config.algorithm != Algorithm::Classical) {
            validate_feature_dim(config.map, p.scaled.dim());
        }
        if (config.clustering.k > p.scaled.size()) {
            throw ValidationError(
                "k = " + std::to_string(config.clustering.k) + " exceeds the number of points (" +
                std::to_string(p.scaled.size()) + ")");
        }
        return 0;
    });
    return p;
}

size_t best_run_index(const std::vector<SweepRun> &runs) {
    size_t best = 0;
    for (size_t i = 1; i < runs.size(); i++) {
        if (runs[i].evaluation.accuracy > runs[best].evaluation.accuracy) {
            best = i;
        }
    }
    return best;
}

RunRecord run_experiment(const ExperimentConfig &config, std::ostream *log) {
    auto t0 = std::chrono::steady_clock::now();
    PreparedData data = prepare_dataset(config);
    const Matrix &x = data.scaled.features;

    RunRecord rec;
    rec.name = config.name;
    rec.config = config.source;
    rec.config_dir = config.base_dir.string();
    rec.config_digest = config.digest();
    rec.source_fingerprint = data.selected.fingerprint;
    rec.scaled_fingerprint = data.scaled.fingerprint;
    rec.model = config.algorithm == Algorithm::Classical ? "classical" : map_kind_name(config.map.kind);
    rec.algorithm = algorithm_name(config.algorithm);
    const FidelityMode &mode = config.clustering.mode;
    rec.mode = mode.is_exact() ? "exact" : "shots";
    rec.shots = mode.is_exact() ? 0 : mode.shots;
    rec.shot_seed = mode.is_exact() ? 0 : mode.seed;
    rec.k = config.clustering.k;
    rec.class_names = data.selected.class_names;
    rec.feature_names = data.selected.feature_names;
    rec.truth = data.selected.labels;

    in_stage("config", [&] {
        if (config.output.plot_features.empty()) {
            rec.plot_features = {0, std::min<size_t>(1, data.selected.dim() - 1)};
        } else {
            rec.plot_features = {
                resolve_column(config.output.plot_features[0], rec.feature_names),
                resolve_column(config.output.plot_features[1], rec.feature_names)};
        }
        return 0;
    });
    for (size_t i = 0; i < data.selected.size(); i++) {
        rec.plot_x.push_back(data.selected.features(i, rec.plot_features[0]));
        rec.plot_y.push_back(data.selected.features(i, rec.plot_features[1]));
    }

    std::vector<uint64_t> theta_seeds = effective_theta_seeds(config);
    for (uint64_t theta_seed : theta_seeds) {
        FeatureMapConfig map = config.map;
        map.theta_seed = theta_seed;
        ThetaParameters theta;
        DistanceMatrix distance;
        if (config.algorithm != Algorithm::Classical) {
            theta = in_stage("encode", [&] { return make_theta(map, x.cols()); });
        }
        if (config.algorithm == Algorithm::KernelMatrix) {
            fs::path cache = config.output.kernel_cache;
            if (!cache.empty() && theta_seeds.size() > 1) {
                cache += ".theta" + std::to_string(theta_seed);
            }
            bool hit = false;
            KernelMatrix km = in_stage("kernel", [&] {
                return load_or_compute_kernel(x, map, theta, mode, data.scaled.fingerprint, cache, hit, log);
            });
            distance = to_distance(km);
        }
        for (uint64_t seed : config.clustering.seeds) {
            SweepRun run;
            run.theta_seed = theta_seed;
            run.init_seed = seed;
            run.result = in_stage("cluster", [&] {
                const auto &cl = config.clustering;
                switch (config.algorithm) {
                    case Algorithm::Classical:
                        return classical_kmeans(x, cl.k, cl.t_max, seed, cl.init);
                    case Algorithm::QuantumCentroid:
                        return quantum_kmeans(x, cl.k, map, theta, cl.t_max, mode, seed, cl.init);
                    case Algorithm::KernelMatrix:
                        break;
                }
                return kernel_matrix_kmeans(distance, cl.k, cl.t_max, seed);
            });
            run.evaluation = in_stage("evaluate", [&] {
                return evaluate(run.result.labels, rec.truth, rec.class_names.size());
            });
            if (log) {
                *log << config.name << " theta_seed=" << theta_seed << " init_seed=" << seed
                     << " accuracy=" << fixed(run.evaluation.accuracy) << " ari=" << fixed(run.evaluation.ari)
                     << " ami=" << fixed(run.evaluation.ami) << " iterations=" << run.result.iterations_run << "\n";
            }
            rec.runs.push_back(std::move(run));
        }
    }
    rec.best = best_run_index(rec.runs);
    rec.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::string results_text(const RunRecord &r) {
    std::ostringstream o;
    const SweepRun &best = r.best_run();
    SweepStats stats = accuracy_stats(r.runs);
    o << "name=" << r.name << "\n";
    o << "config_digest=" << hex64(r.config_digest) << "\n";
    o << "source_fingerprint=" << hex64(r.source_fingerprint) << "\n";
    o << "scaled_fingerprint=" << hex64(r.scaled_fingerprint) << "\n";
    o << "model=" << r.model << "\n";
    o << "algorithm=" << r.algorithm << "\n";
    o << "mode=" << r.mode << "\n";
    if (r.mode == "shots") {
        o << "shots=" << r.shots << "\n";
        o << "shot_seed=" << r.shot_seed << "\n";
    }
    o << "n=" << r.truth.size() << "\n";
    o << "k=" << r.k << "\n";
    o << "runs=" << r.runs.size() << "\n";
    o << "best.theta_seed=" << best.theta_seed << "\n";
    o << "best.init_seed=" << best.init_seed << "\n";
    o << "best.iterations=" << best.result.iterations_run << "\n";
    o << "best.converged=" << (best.result.converged ? 1 : 0) << "\n";
    o << "accuracy=" << fmt(best.evaluation.accuracy) << "\n";
    o << "ari=" << fmt(best.evaluation.ari) << "\n";
    o << "ami=" << fmt(best.evaluation.ami) << "\n";
    o << "accuracy.mean=" << fmt(stats.mean) << "\n";
    o << "accuracy.std=" << fmt(stats.std) << "\n";
    o << "accuracy.min=" << fmt(stats.min) << "\n";
    o << "accuracy.max=" << fmt(stats.max) << "\n";
    const auto &cm = best.evaluation.confusion;
    for (size_t t = 0; t < cm.size(); t++) {
        for (size_t p = 0; p < cm[t].size(); p++) {
            o << "confusion." << t << "." << p << "=" << cm[t][p] << "\n";
        }
    }
    for (size_t i = 0; i < r.runs.size(); i++) {
        const SweepRun &run = r.runs[i];
        std::string prefix = "run." + std::to_string(i) + ".";
        o << prefix << "theta_seed=" << run.theta_seed << "\n";
        o << prefix << "init_seed=" << run.init_seed << "\n";
        o << prefix << "accuracy=" << fmt(run.evaluation.accuracy) << "\n";
        o << prefix << "ari=" << fmt(run.evaluation.ari) << "\n";
        o << prefix << "ami=" << fmt(run.evaluation.ami) << "\n";
        o << prefix << "iterations=" << run.result.iterations_run << "\n";
    }
    return o.str();
}

std::string report_text(const RunRecord &r) {
    std::ostringstream o;
    const SweepRun &best = r.best_run();
    SweepStats stats = accuracy_stats(r.runs);
    o << "Experiment: " << r.name << "\n";
    o << "Model: " << r.model << " (" << r.algorithm << ", " << r.mode;
    if (r.mode == "shots") {
        o << ", " << r.shots << " shots, seed " << r.shot_seed;
    }
    o << ")\n";
    o << "Points: " << r.truth.size() << ", clusters: " << r.k << ", classes: " << r.class_names.size() << "\n";
    o << "Config digest: " << hex64(r.config_digest) << "\n";
    o << "Sweep: " << r.runs.size() << " run(s)\n\n";
    o << "Best run (theta seed " << best.theta_seed << ", init seed " << best.init_seed << ")\n";
    o << "  accuracy    " << fixed(best.evaluation.accuracy) << "\n";
    o << "  ARI         " << fixed(best.evaluation.ari) << "\n";
    o << "  AMI         " << fixed(best.evaluation.ami) << "\n";
    o << "  iterations  " << best.result.iterations_run << (best.result.converged ? " (converged)" : " (t_max reached)")
      << "\n\n";
    o << "Accuracy over sweep: best " << fixed(stats.max) << ", mean " << fixed(stats.mean) << ", std "
      << fixed(stats.std) << ", min " << fixed(stats.min) << "\n\n";
    o << "Confusion matrix (rows: true class, columns: predicted class)\n";
    size_t width = 10;
    for (const auto &name : r.class_names) {
        width = std::max(width, name.size() + 2);
    }
    auto pad = [&](const std::string &s) { return s + std::string(width > s.size() ? width - s.size() : 1, ' '); };
    o << pad("");
    for (const auto &name : r.class_names) {
        o << pad(name);
    }
    o << "\n";
    const auto &cm = best.evaluation.confusion;
    for (size_t t = 0; t < cm.size(); t++) {
        o << pad(t < r.class_names.size() ? r.class_names[t] : std::to_string(t));
        for (uint64_t v : cm[t]) {
            o << pad(std::to_string(v));
        }
        o << "\n";
    }
    o << "\nDuration: " << fixed(r.duration_ms / 1000.0, 3) << " s\n";
    return o.str();
}

json record_to_json(const RunRecord &r) {
    json j;
    j["name"] = r.name;
    j["config"] = r.config;
    j["config_dir"] = r.config_dir;
    j["config_digest"] = hex64(r.config_digest);
    j["source_fingerprint"] = hex64(r.source_fingerprint);
    j["scaled_fingerprint"] = hex64(r.scaled_fingerprint);
    j["model"] = r.model;
    j["algorithm"] = r.algorithm;
    j["mode"] = r.mode;
    j["shots"] = r.shots;
    j["shot_seed"] = r.shot_seed;
    j["k"] = r.k;
    j["class_names"] = r.class_names;
    j["feature_names"] = r.feature_names;
    j["truth"] = r.truth;
    j["best"] = r.best;
    j["plot_features"] = r.plot_features;
    j["plot_x"] = r.plot_x;
    j["plot_y"] = r.plot_y;
    j["duration_ms"] = r.duration_ms;
    json runs = json::array();
    for (const auto &run : r.runs) {
        runs.push_back(run_to_json(run));
    }
    j["runs"] = std::move(runs);
    return j;
}

RunRecord record_from_json(const json &j) {
    return in_stage("record", [&] {
        auto hex = [&](const char *key) { return std::stoull(j.at(key).get<std::string>(), nullptr, 16); };
        RunRecord r;
        r.name = j.at("name").get<std::string>();
        r.config = j.at("config");
        r.config_dir = j.value("config_dir", std::string());
        r.config_digest = hex("config_digest");
        r.source_fingerprint = hex("source_fingerprint");
        r.scaled_fingerprint = hex("scaled_fingerprint");
        r.model = j.at("model").get<std::string>();
        r.algorithm = j.at("algorithm").get<std::string>();
        r.mode = j.at("mode").get<std::string>();
        r.shots = j.value("shots", uint64_t{0});
        r.shot_seed = j.value("shot_seed", uint64_t{0});
        r.k = j.at("k").get<size_t>();
        r.class_names = j.at("class_names").get<std::vector<std::string>>();
        r.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        r.truth = j.at("truth").get<std::vector<int>>();
        r.plot_features = j.at("plot_features").get<std::array<size_t, 2>>();
        r.plot_x = j.at("plot_x").get<std::vector<double>>();
        r.plot_y = j.at("plot_y").get<std::vector<double>>();
        r.duration_ms = j.value("duration_ms", 0.0);
        for (const auto &jr : j.at("runs")) {
            SweepRun run;
            run.theta_seed = jr.at("theta_seed").get<uint64_t>();
            run.init_seed = jr.at("init_seed").get<uint64_t>();
            run.result.labels = jr.at("labels").get<std::vector<int>>();
            run.result.centroids = jr.at("centroids").get<std::vector<Centroid>>();
            run.result.medoids = jr.at("medoids").get<std::vector<size_t>>();
            run.result.iterations_run = jr.at("iterations").get<size_t>();
            run.result.converged = jr.at("converged").get<bool>();
            run.result.trace = jr.at("trace").get<std::vector<double>>();
            if (run.result.labels.size() != r.truth.size()) {
                throw ValidationError("record run has " + std::to_string(run.result.labels.size()) + " labels for " +
                                      std::to_string(r.truth.size()) + " points");
            }
            // Metrics are recomputed from the stored labels rather than trusted.
            run.evaluation = evaluate(run.result.labels, r.truth, r.class_names.size());
            r.runs.push_back(std::move(run));
        }
        if (r.runs.empty()) {
            throw ValidationError("record has no runs");
        }
        r.best = best_run_index(r.runs);
        return r;
    });
}

RunRecord load_record(const fs::path &path) {
    json doc = in_stage("record", [&] {
        std::ifstream in(path);
        if (!in) {
            throw NotFoundError("run record not found: " + path.string());
        }
        try {
            return json::parse(in);
        } catch (const json::parse_error &e) {
            throw ParseError(path.string() + ": " + e.what());
        }
    });
    return record_from_json(doc);
}

void write_run_outputs(const RunRecord &record, const fs::path &dir) {
    in_stage("write", [&] {
        write_file(dir / "results.txt", results_text(record));
        write_file(dir / "report.txt", report_text(record));
        write_file(dir / "record.json", record_to_json(record).dump(1) + "\n");
        return 0;
    });
}

RunRecord replay(const RunRecord &record, std::ostream *log) {
    ExperimentConfig config = parse_config(record.config, record.config_dir);
    return run_experiment(config, log);
}

std::vector<CompareRow> compare_records(const std::vector<RunRecord> &records) {
    if (records.size() < 2) {
        throw std::invalid_argument("compare needs at least two configs, got " + std::to_string(records.size()));
    }
    for (const auto &r : records) {
        if (r.source_fingerprint != records[0].source_fingerprint) {
            throw std::invalid_argument(
                "dataset fingerprint mismatch: '" + r.name + "' (" + hex64(r.source_fingerprint) + ") vs '" +
                records[0].name + "' (" + hex64(records[0].source_fingerprint) + ")");
        }
    }
    std::vector<CompareRow> rows;
    for (const auto &r : records) {
        const SweepRun &b = r.best_run();
        rows.push_back({r.name, r.model, b.evaluation.accuracy, b.evaluation.ari, b.evaluation.ami, b.theta_seed, b.init_seed});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CompareRow &a, const CompareRow &b) { return a.accuracy > b.accuracy; });
    return rows;
}

std::string compare_table(const std::vector<CompareRow> &rows) {
    std::ostringstream o;
    o << "rank,name,model,accuracy,ari,ami,theta_seed,init_seed\n";
    for (size_t i = 0; i < rows.size(); i++) {
        const auto &r = rows[i];
        o << i + 1 << "," << r.name << "," << r.model << "," << fmt(r.accuracy) << "," << fmt(r.ari) << ","
          << fmt(r.ami) << "," << r.theta_seed << "," << r.init_seed << "\n";
    }
    return o.str();
}

KernelSummary kernel_command(const ExperimentConfig &config, const fs::path &cache_path, std::ostream *log) {
    if (config.algorithm == Algorithm::Classical) {
        throw StageError("config", "the kernel command needs a quantum feature map");
    }
    PreparedData data = prepare_dataset(config);
    FeatureMapConfig map = config.map;
    map.theta_seed = effective_theta_seeds(config).front();
    ThetaParameters theta = in_stage("encode", [&] { return make_theta(map, data.scaled.dim()); });

    KernelSummary s;
    s.cache_path = cache_path;
    s.kernel = in_stage("kernel", [&] {
        return load_or_compute_kernel(
            data.scaled.features, map, theta, config.clustering.mode, data.scaled.fingerprint, cache_path, s.cache_hit, log);
    });
    const Matrix &v = s.kernel.values;
    size_t n = v.rows();
    double sum = 0;
    size_t count = 0;
    s.min_off_diagonal = n > 1 ? 1.0 : 0.0;
    for (size_t i = 0; i < n; i++) {
        s.max_diagonal_error = std::max(s.max_diagonal_error, std::abs(v(i, i) - 1.0));
        for (size_t j = 0; j < n; j++) {
            if (i == j) {
                continue;
            }
            s.max_asymmetry = std::max(s.max_asymmetry, std::abs(v(i, j) - v(j, i)));
            s.min_off_diagonal = std::min(s.min_off_diagonal, v(i, j));
            sum += v(i, j);
            count++;
        }
    }
    s.mean_off_diagonal = count ? sum / static_cast<double>(count) : 0.0;
    return s;
}

std::string kernel_summary_text(const KernelSummary &s) {
    std::ostringstream o;
    const KernelMatrix &k = s.kernel;
    o << "cache=" << (s.cache_hit ? "hit" : "computed") << "\n";
    o << "n=" << k.size() << "\n";
    o << "map=" << map_kind_name(k.map_config.kind) << "\n";
    o << "map_config=" << k.map_config.canonical() << "\n";
    o << "theta_seed=" << k.theta_seed << "\n";
    o << "mode=" << (k.mode.is_exact() ? "exact" : "shots") << "\n";
    if (!k.mode.is_exact()) {
        o << "shots=" << k.mode.shots << "\n";
        o << "shot_seed=" << k.mode.seed << "\n";
    }
    o << "config_digest=" << hex64(k.config_digest()) << "\n";
    o << "dataset_fingerprint=" << hex64(k.dataset_fingerprint) << "\n";
    o << "min_off_diagonal=" << fmt(s.min_off_diagonal) << "\n";
    o << "mean_off_diagonal=" << fmt(s.mean_off_diagonal) << "\n";
    o << "max_asymmetry=" << fmt(s.max_asymmetry) << "\n";
    o << "max_diagonal_error=" << fmt(s.max_diagonal_error) << "\n";
    o << "symmetric=" << (s.max_asymmetry == 0.0 ? 1 : 0) << "\n";
    return o.str();
}

PlotFiles plot_record(const RunRecord &r, const fs::path &dir) {
    const SweepRun &best = r.best_run();
    LabelAlignment alignment = majority_vote(best.result.labels, r.truth);
    const auto &cm = best.evaluation.confusion;
    size_t c = cm.size();
    auto class_name = [&](size_t i) { return i < r.class_names.size() ? r.class_names[i] : std::to_string(i); };

    PlotFiles files{dir / "confusion.svg", dir / "confusion.csv", dir / "scatter.svg", dir / "scatter.csv"};

    // Confusion heatmap.
    {
        const double cell = 80;
        const double left = 130;
        const double top = 70;
        SvgDocument svg(left + cell * static_cast<double>(c) + 30, top + cell * static_cast<double>(c) + 60);
        svg.text(left + cell * static_cast<double>(c) / 2, 24, r.name + ": confusion matrix", 15, "middle");
        svg.text(left + cell * static_cast<double>(c) / 2, top - 28, "predicted", 12, "middle", "#555");
        uint64_t max_count = 1;
        for (const auto &row : cm) {
            for (uint64_t v : row) {
                max_count = std::max(max_count, v);
            }
        }
        std::ostringstream csv;
        csv << "true_index,true_class,predicted_index,predicted_class,count\n";
        for (size_t t = 0; t < c; t++) {
            double y = top + cell * static_cast<double>(t);
            svg.text(left - 8, y + cell / 2 + 4, class_name(t), 12, "end");
            for (size_t p = 0; p < c; p++) {
                double x = left + cell * static_cast<double>(p);
                double frac = static_cast<double>(cm[t][p]) / static_cast<double>(max_count);
                svg.rect(x, y, cell, cell, heat_color(frac), "#ffffff");
                svg.text(x + cell / 2, y + cell / 2 + 5, std::to_string(cm[t][p]), 14, "middle", frac > 0.5 ? "#ffffff" : "#222");
                csv << t << "," << class_name(t) << "," << p << "," << class_name(p) << "," << cm[t][p] << "\n";
            }
        }
        for (size_t p = 0; p < c; p++) {
            svg.text(left + cell * (static_cast<double>(p) + 0.5), top - 8, class_name(p), 12, "middle");
        }
        svg.text(left + cell * static_cast<double>(c) / 2, top + cell * static_cast<double>(c) + 30,
                 "accuracy " + fixed(best.evaluation.accuracy), 12, "middle", "#555");
        in_stage("write", [&] {
            write_file(files.confusion_svg, svg.str());
            write_file(files.confusion_csv, csv.str());
            return 0;
        });
    }

    // Truth and prediction scatter over the chosen feature pair.
    {
        const double panel = 340;
        const double margin = 50;
        const double legend = 40;
        SvgDocument svg(2 * (panel + margin) + margin, panel + 2 * margin + legend);
        double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
        if (!r.plot_x.empty()) {
            auto [xlo, xhi] = std::minmax_element(r.plot_x.begin(), r.plot_x.end());
            auto [ylo, yhi] = std::minmax_element(r.plot_y.begin(), r.plot_y.end());
            xmin = *xlo, xmax = *xhi, ymin = *ylo, ymax = *yhi;
        }
        if (xmax == xmin) {
            xmax = xmin + 1;
        }
        if (ymax == ymin) {
            ymax = ymin + 1;
        }
        std::string xname = r.plot_features[0] < r.feature_names.size() ? r.feature_names[r.plot_features[0]] : "x";
        std::string yname = r.plot_features[1] < r.feature_names.size() ? r.feature_names[r.plot_features[1]] : "y";
        std::vector<int> predicted(r.truth.size());
        for (size_t i = 0; i < r.truth.size(); i++) {
            predicted[i] = alignment.cluster_to_class.at(best.result.labels[i]);
        }
        auto draw_panel = [&](double ox, const std::string &title, const std::vector<int> &colors) {
            double oy = margin;
            svg.rect(ox, oy, panel, panel, "#fafafa", "#999");
            svg.text(ox + panel / 2, oy - 12, title, 14, "middle");
            svg.text(ox + panel / 2, oy + panel + 30, xname, 12, "middle", "#555");
            svg.text(ox, oy + panel + 15, fixed(xmin, 2), 10, "start", "#555");
            svg.text(ox + panel, oy + panel + 15, fixed(xmax, 2), 10, "end", "#555");
            svg.text(ox - 4, oy + panel, fixed(ymin, 2), 10, "end", "#555");
            svg.text(ox - 4, oy + 10, fixed(ymax, 2), 10, "end", "#555");
            svg.text(ox - 4, oy + panel / 2, yname, 11, "end", "#555");
            for (size_t i = 0; i < r.plot_x.size(); i++) {
                double px = ox + 8 + (panel - 16) * (r.plot_x[i] - xmin) / (xmax - xmin);
                double py = oy + panel - 8 - (panel - 16) * (r.plot_y[i] - ymin) / (ymax - ymin);
                svg.circle(px, py, 3.5, palette_color(static_cast<size_t>(colors[i])));
            }
        };
        draw_panel(margin + 20, "Ground truth", r.truth);
        draw_panel(2 * margin + panel + 20, "Predicted (majority-vote aligned)", predicted);
        double ly = 2 * margin + panel + 20;
        for (size_t i = 0; i < r.class_names.size(); i++) {
            double lx = margin + 20 + 150 * static_cast<double>(i);
            svg.circle(lx, ly - 4, 5, palette_color(i));
            svg.text(lx + 10, ly, class_name(i), 12);
        }
        std::ostringstream csv;
        csv << "index," << xname << "," << yname << ",true_class,cluster,predicted_class\n";
        for (size_t i = 0; i < r.plot_x.size(); i++) {
            csv << i << "," << fmt(r.plot_x[i]) << "," << fmt(r.plot_y[i]) << "," << class_name(static_cast<size_t>(r.truth[i]))
                << "," << best.result.labels[i] << "," << class_name(static_cast<size_t>(predicted[i])) << "\n";
        }
        in_stage("write", [&] {
            write_file(files.scatter_svg, svg.str());
            write_file(files.scatter_csv, csv.str());
            return 0;
        });
    }
    return files;
}

}  // namespace qkm
