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

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qkmeans/experiment.h"

namespace fs = std::filesystem;

namespace {

struct Flags {
    std::optional<uint64_t> seed;
    std::optional<uint64_t> shots;
    std::optional<std::string> kernel_cache;
    std::optional<std::string> out;

    qkm::Overrides overrides() const {
        qkm::Overrides o;
        o.seed = seed;
        o.shots = shots;
        if (kernel_cache) {
            o.kernel_cache = fs::path(*kernel_cache);
        }
        if (out) {
            o.out = fs::path(*out);
        }
        return o;
    }
};

void add_flags(CLI::App *cmd, Flags &f, bool seed, bool shots, bool cache, bool out) {
    if (seed) {
        cmd->add_option("--seed", f.seed, "Run a single init seed instead of the configured list");
    }
    if (shots) {
        cmd->add_option("--shots", f.shots, "Estimate fidelities from this many shots");
    }
    if (cache) {
        cmd->add_option("--kernel-cache", f.kernel_cache, "Kernel cache file");
    }
    if (out) {
        cmd->add_option("--out", f.out, "Output directory");
    }
}

qkm::ExperimentConfig config_from(const std::string &path, const Flags &flags) {
    qkm::ExperimentConfig c = qkm::load_config(path);
    qkm::apply_overrides(c, flags.overrides());
    return c;
}

int cmd_run(const std::string &config_path, const Flags &flags) {
    qkm::ExperimentConfig config = config_from(config_path, flags);
    qkm::RunRecord record = qkm::run_experiment(config, &std::cerr);
    qkm::write_run_outputs(record, config.output.dir);
    std::cout << qkm::results_text(record);
    std::cerr << "wrote " << (config.output.dir / "results.txt").string() << ", report.txt, record.json\n";
    return 0;
}

int cmd_compare(const std::vector<std::string> &paths, const Flags &flags) {
    std::vector<qkm::RunRecord> records;
    std::vector<qkm::ExperimentConfig> configs;
    for (const auto &p : paths) {
        Flags per = flags;
        per.out.reset();
        configs.push_back(config_from(p, per));
    }
    if (configs.size() < 2) {
        throw std::invalid_argument("compare needs at least two configs, got " + std::to_string(configs.size()));
    }
    for (const auto &c : configs) {
        records.push_back(qkm::run_experiment(c, &std::cerr));
    }
    std::string table = qkm::compare_table(qkm::compare_records(records));
    std::cout << table;
    if (flags.out) {
        fs::path dir(*flags.out);
        fs::create_directories(dir);
        std::ofstream(dir / "compare.csv", std::ios::binary) << table;
        for (const auto &r : records) {
            qkm::write_run_outputs(r, dir / r.name);
        }
        std::cerr << "wrote " << (dir / "compare.csv").string() << "\n";
    }
    return 0;
}

int cmd_kernel(const std::string &config_path, const Flags &flags) {
    qkm::ExperimentConfig config = config_from(config_path, flags);
    fs::path cache = config.output.kernel_cache;
    if (cache.empty()) {
        cache = config.output.dir / "kernel.qkmk";
    }
    qkm::KernelSummary s = qkm::kernel_command(config, cache, &std::cerr);
    std::cout << "path=" << s.cache_path.string() << "\n" << qkm::kernel_summary_text(s);
    return 0;
}

int cmd_plot(const std::string &record_path, const Flags &flags) {
    qkm::RunRecord record = qkm::load_record(record_path);
    fs::path dir = flags.out ? fs::path(*flags.out) : fs::path(record_path).parent_path() / "plots";
    qkm::PlotFiles files = qkm::plot_record(record, dir);
    std::cout << "confusion_svg=" << files.confusion_svg.string() << "\n"
              << "confusion_csv=" << files.confusion_csv.string() << "\n"
              << "scatter_svg=" << files.scatter_svg.string() << "\n"
              << "scatter_csv=" << files.scatter_csv.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum-kernel k-means experiments"};
    app.require_subcommand(1);

    Flags flags;
    std::string config;
    std::vector<std::string> configs;
    std::string record;

    auto *run = app.add_subcommand("run", "Run one experiment config and write its reports");
    run->add_option("config", config, "Experiment config (JSON)")->required();
    add_flags(run, flags, true, true, true, true);

    auto *compare = app.add_subcommand("compare", "Run several configs over one dataset and rank them");
    compare->add_option("configs", configs, "Experiment configs (JSON)")->required();
    add_flags(compare, flags, true, true, false, true);

    auto *kernel = app.add_subcommand("kernel", "Compute or load the cached kernel matrix of a config");
    kernel->add_option("config", config, "Experiment config (JSON)")->required();
    add_flags(kernel, flags, false, true, true, true);

    auto *plot = app.add_subcommand("plot", "Write SVG and CSV plots for a run record");
    plot->add_option("record", record, "record.json from a previous run")->required();
    add_flags(plot, flags, false, false, false, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config, flags);
        }
        if (compare->parsed()) {
            return cmd_compare(configs, flags);
        }
        if (kernel->parsed()) {
            return cmd_kernel(config, flags);
        }
        if (plot->parsed()) {
            return cmd_plot(record, flags);
        }
    } catch (const qkm::StageError &e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error [arguments]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
