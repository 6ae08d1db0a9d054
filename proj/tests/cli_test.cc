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

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "test_util.h"

using qkm::testing::config_path;
using qkm::testing::temp_dir;

namespace {

struct Result {
    int status = 0;
    std::string output;  // stdout and stderr together
};

Result cli(const std::string &args) {
    std::string cmd = std::string(QKM_CLI) + " " + args + " 2>&1";
    Result r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        r.status = -1;
        return r;
    }
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.output.append(buf.data(), n);
    }
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cfg(const std::string &name) {
    return config_path(name).string();
}

}  // namespace

TEST(Cli, RunWritesReports) {
    auto out = temp_dir("cli_run");
    Result r = cli("run " + cfg("iris_classical.json") + " --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_TRUE(std::filesystem::exists(out / "results.txt"));
    EXPECT_TRUE(std::filesystem::exists(out / "report.txt"));
    EXPECT_TRUE(std::filesystem::exists(out / "record.json"));
    EXPECT_NE(r.output.find("accuracy="), std::string::npos);
}

TEST(Cli, RunIsByteIdentical) {
    auto a = temp_dir("cli_det_a");
    auto b = temp_dir("cli_det_b");
    ASSERT_EQ(cli("run " + cfg("iris_zz_full.json") + " --seed 3 --out " + a.string()).status, 0);
    ASSERT_EQ(cli("run " + cfg("iris_zz_full.json") + " --seed 3 --out " + b.string()).status, 0);
    EXPECT_EQ(slurp(a / "results.txt"), slurp(b / "results.txt"));
    EXPECT_NE(slurp(a / "results.txt").find("runs=1\n"), std::string::npos);
}

TEST(Cli, ShotsFlagSwitchesMode) {
    auto out = temp_dir("cli_shots");
    Result r = cli("run " + cfg("iris_zz_full.json") + " --seed 0 --shots 256 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    std::string results = slurp(out / "results.txt");
    EXPECT_NE(results.find("mode=shots\n"), std::string::npos);
    EXPECT_NE(results.find("shots=256\n"), std::string::npos);
}

TEST(Cli, QubitMismatchNamesStage) {
    Result r = cli("run " + cfg("iris_bad_qubits.json") + " --out " + temp_dir("cli_bad").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("[validate]"), std::string::npos) << r.output;
}

TEST(Cli, MissingConfig) {
    Result r = cli("run /no/such/config.json");
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("[config]"), std::string::npos) << r.output;
}

TEST(Cli, CompareRanksAndValidates) {
    auto out = temp_dir("cli_compare");
    Result r = cli("compare " + cfg("iris_classical.json") + " " + cfg("iris_zz_full.json") + " --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    std::string table = slurp(out / "compare.csv");
    EXPECT_EQ(table.substr(0, table.find('\n')), "rank,name,model,accuracy,ari,ami,theta_seed,init_seed");
    EXPECT_NE(table.find("1,iris_classical,"), std::string::npos) << table;

    Result single = cli("compare " + cfg("iris_classical.json"));
    EXPECT_NE(single.status, 0);
    EXPECT_NE(single.output.find("at least two"), std::string::npos);

    Result mismatch = cli("compare " + cfg("iris_classical.json") + " " + cfg("breast_cancer_classical.json"));
    EXPECT_NE(mismatch.status, 0);
    EXPECT_NE(mismatch.output.find("fingerprint"), std::string::npos);
}

TEST(Cli, KernelCacheLifecycle) {
    auto dir = temp_dir("cli_kernel");
    std::string cache = (dir / "zz.qkmk").string();
    Result first = cli("kernel " + cfg("iris_zz_full.json") + " --kernel-cache " + cache);
    ASSERT_EQ(first.status, 0) << first.output;
    EXPECT_NE(first.output.find("cache=computed"), std::string::npos);
    EXPECT_NE(first.output.find("n=150"), std::string::npos);
    EXPECT_NE(first.output.find("symmetric=1"), std::string::npos);
    std::string bytes = slurp(cache);

    Result second = cli("kernel " + cfg("iris_zz_full.json") + " --kernel-cache " + cache);
    EXPECT_NE(second.output.find("cache hit"), std::string::npos) << second.output;
    EXPECT_NE(second.output.find("cache=hit"), std::string::npos);

    std::ofstream(cache, std::ios::binary | std::ios::trunc) << "corrupt";
    Result third = cli("kernel " + cfg("iris_zz_full.json") + " --kernel-cache " + cache);
    EXPECT_EQ(third.status, 0);
    EXPECT_NE(third.output.find("stale"), std::string::npos) << third.output;
    EXPECT_EQ(slurp(cache), bytes);
}

TEST(Cli, KernelWriteFailureIsIoError) {
    Result r = cli("kernel " + cfg("iris_zz_full.json") + " --kernel-cache /proc/qkmeans/none.qkmk");
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("[write]"), std::string::npos) << r.output;
}

TEST(Cli, PlotFromRecord) {
    auto out = temp_dir("cli_plot");
    ASSERT_EQ(cli("run " + cfg("iris_classical.json") + " --out " + out.string()).status, 0);
    Result r = cli("plot " + (out / "record.json").string() + " --out " + (out / "plots").string());
    ASSERT_EQ(r.status, 0) << r.output;
    for (const char *f : {"confusion.svg", "confusion.csv", "scatter.svg", "scatter.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(out / "plots" / f)) << f;
    }
    Result missing = cli("plot " + (out / "nope.json").string());
    EXPECT_NE(missing.status, 0);
    EXPECT_NE(missing.output.find("not found"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_NE(cli("").status, 0);
    EXPECT_NE(cli("frobnicate").status, 0);
    EXPECT_NE(cli("run").status, 0);
}
