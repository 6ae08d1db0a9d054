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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qkmeans/clustering.h"
#include "qkmeans/data.h"
#include "qkmeans/evaluation.h"
#include "qkmeans/feature_maps.h"
#include "qkmeans/kernel.h"

namespace qkm {

/// An error tagged with the pipeline stage that raised it ("config", "dataset", "cluster", ...).
class StageError : public std::runtime_error {
   public:
    StageError(std::string stage, const std::string &message)
        : std::runtime_error(message), stage_(std::move(stage)) {}
    const std::string &stage() const { return stage_; }

   private:
    std::string stage_;
};

enum class Algorithm : uint8_t { Classical, QuantumCentroid, KernelMatrix };

const char *algorithm_name(Algorithm a);

struct DatasetBlock {
    std::filesystem::path path;
    CsvSchema schema;
    std::vector<ColumnRef> select;  // empty keeps every loaded feature
    ScalingKind scaling = ScalingKind::Standard;
    double lo = 0.0;
    double hi = 1.0;
};

struct ClusteringBlock {
    size_t k = 2;
    size_t t_max = DEFAULT_T_MAX;
    InitStrategy init = InitStrategy::RandomPoints;
    std::vector<uint64_t> seeds{0};
    std::vector<uint64_t> theta_seeds{0};
    FidelityMode mode;
};

struct OutputBlock {
    std::filesystem::path dir;
    std::filesystem::path kernel_cache;
    std::vector<ColumnRef> plot_features;
};

struct ExperimentConfig {
    std::string name;
    DatasetBlock dataset;
    Algorithm algorithm = Algorithm::Classical;
    FeatureMapConfig map;  // ignored by the classical algorithm
    ClusteringBlock clustering;
    OutputBlock output;

    /// The parsed document, with command-line overrides folded in. The digest covers everything
    /// except the output block.
    nlohmann::json source;
    std::filesystem::path base_dir;

    uint64_t digest() const;
};

/// Relative paths in the document resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json &doc, const std::filesystem::path &base_dir);
ExperimentConfig load_config(const std::filesystem::path &path);

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<uint64_t> shots;
    std::optional<std::filesystem::path> kernel_cache;
    std::optional<std::filesystem::path> out;
};

void apply_overrides(ExperimentConfig &config, const Overrides &overrides);

/// Parses "pi", "pi/2", "2pi", "0.5*pi" or a plain number.
double parse_angle_expr(const nlohmann::json &value);

struct PreparedData {
    Dataset selected;  // after column selection, before scaling
    Dataset scaled;
    ScalingSpec scaling;
};

PreparedData prepare_dataset(const ExperimentConfig &config);

struct SweepRun {
    uint64_t theta_seed = 0;
    uint64_t init_seed = 0;
    ClusteringResult result;
    EvaluationReport evaluation;
};

/// Everything needed to recompute the reported numbers or replay the run.
struct RunRecord {
    std::string name;
    nlohmann::json config;
    std::string config_dir;
    uint64_t config_digest = 0;
    uint64_t source_fingerprint = 0;  // selected, unscaled data
    uint64_t scaled_fingerprint = 0;
    std::string model;  // "classical" or the feature-map kind
    std::string algorithm;
    std::string mode;  // "exact" or "shots"
    uint64_t shots = 0;
    uint64_t shot_seed = 0;
    size_t k = 0;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::vector<int> truth;
    std::vector<SweepRun> runs;
    size_t best = 0;
    std::array<size_t, 2> plot_features{0, 1};
    std::vector<double> plot_x;
    std::vector<double> plot_y;
    double duration_ms = 0;

    const SweepRun &best_run() const { return runs.at(best); }
};

/// Index of the highest-accuracy run; ties keep the earliest in sweep order.
size_t best_run_index(const std::vector<SweepRun> &runs);

/// Runs the configured sweep (theta seeds outer, init seeds inner). `log` may be null.
RunRecord run_experiment(const ExperimentConfig &config, std::ostream *log = nullptr);

/// Flat key=value lines, one metric per line. Deterministic: contains no timings or paths.
std::string results_text(const RunRecord &record);
std::string report_text(const RunRecord &record);

nlohmann::json record_to_json(const RunRecord &record);
RunRecord record_from_json(const nlohmann::json &doc);
RunRecord load_record(const std::filesystem::path &path);

/// Writes report.txt, results.txt and record.json into `dir`.
void write_run_outputs(const RunRecord &record, const std::filesystem::path &dir);

/// Recomputes a record's sweep from its embedded config.
RunRecord replay(const RunRecord &record, std::ostream *log = nullptr);

struct CompareRow {
    std::string name;
    std::string model;
    double accuracy = 0;
    double ari = 0;
    double ami = 0;
    uint64_t theta_seed = 0;
    uint64_t init_seed = 0;
};

/// Best run of each record, sorted by accuracy (descending, stable). Throws std::invalid_argument
/// for fewer than two records or records over different source data.
std::vector<CompareRow> compare_records(const std::vector<RunRecord> &records);
std::string compare_table(const std::vector<CompareRow> &rows);

struct KernelSummary {
    KernelMatrix kernel;
    bool cache_hit = false;
    std::filesystem::path cache_path;
    double min_off_diagonal = 0;
    double mean_off_diagonal = 0;
    double max_asymmetry = 0;
    double max_diagonal_error = 0;
};

/// Loads the kernel from `cache_path` when fingerprint and config digest match; otherwise computes
/// and stores it. Uses the first theta seed of the sweep.
KernelSummary kernel_command(const ExperimentConfig &config, const std::filesystem::path &cache_path, std::ostream *log);

std::string kernel_summary_text(const KernelSummary &summary);

struct PlotFiles {
    std::filesystem::path confusion_svg;
    std::filesystem::path confusion_csv;
    std::filesystem::path scatter_svg;
    std::filesystem::path scatter_csv;
};

/// Confusion heatmap and truth/prediction scatter for the best run, as SVG plus CSV.
PlotFiles plot_record(const RunRecord &record, const std::filesystem::path &dir);

}  // namespace qkm
