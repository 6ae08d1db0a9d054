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

#include "qkmeans/kernel.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "test_util.h"

using namespace qkm;
using qkm::testing::iris;
using qkm::testing::temp_dir;

namespace {

FeatureMapConfig zz_full() {
    FeatureMapConfig c;
    c.kind = MapKind::ZZ;
    c.n_qubits = 4;
    c.entanglement = Entanglement::Full;
    return c;
}

Matrix first_rows(const Matrix &m, size_t n) {
    return Matrix(n, m.cols(), std::vector<double>(m.data().begin(), m.data().begin() + n * m.cols()));
}

}  // namespace

TEST(Kernel, OverlapCircuitAmplitudeIsFidelity) {
    Dataset ds = iris();
    FeatureMapConfig c = zz_full();
    for (size_t i = 0; i < 10; i++) {
        auto x = ds.features.row(i);
        auto y = ds.features.row(149 - i);
        StateVector s = run_circuit(overlap_circuit(x, y, c, {}));
        EXPECT_NEAR(std::norm(s[0]), fidelity_exact(x, y, c, {}), 1e-12);
    }
}

TEST(Kernel, InversionTestIsBinomial) {
    Dataset ds = iris();
    FeatureMapConfig c = zz_full();
    auto x = ds.features.row(3);
    auto y = ds.features.row(60);
    double p = fidelity_exact(x, y, c, {});
    const uint64_t shots = 4096;
    double sigma = std::sqrt(p * (1 - p) / shots);
    for (uint64_t seed = 0; seed < 10; seed++) {
        double est = fidelity_inversion_test(x, y, c, {}, shots, seed);
        EXPECT_NEAR(est, p, 5 * sigma + 1e-9);
        EXPECT_EQ(est * shots, std::round(est * shots));
    }
}

TEST(Kernel, InversionTestOfIdenticalPointsIsOne) {
    FeatureMapConfig c = zz_full();
    std::vector<double> x{0.1, -0.7, 1.4, 2.0};
    EXPECT_EQ(fidelity_inversion_test(x, x, c, {}, 1000, 3), 1.0);
}

TEST(Kernel, FidelityDispatch) {
    FeatureMapConfig c = zz_full();
    std::vector<double> x{0.1, -0.7, 1.4, 2.0};
    std::vector<double> y{0.3, 0.2, -1.1, 0.5};
    EXPECT_EQ(fidelity(x, y, c, {}, FidelityMode::exact()), fidelity_exact(x, y, c, {}));
    EXPECT_EQ(fidelity(x, y, c, {}, FidelityMode::sampled(512, 8)), fidelity_inversion_test(x, y, c, {}, 512, 8));
}

TEST(Kernel, PairSeedDependsOnEveryInput) {
    EXPECT_EQ(pair_seed(1, 2, 3), pair_seed(1, 2, 3));
    EXPECT_NE(pair_seed(1, 2, 3), pair_seed(1, 3, 2));
    EXPECT_NE(pair_seed(1, 2, 3), pair_seed(2, 2, 3));
}

TEST(KernelProperty, ExactMatrixSymmetricUnitDiagonal) {
    Dataset ds = iris();
    KernelMatrix k = kernel_matrix(ds.features, zz_full(), {}, FidelityMode::exact(), ds.fingerprint);
    ASSERT_EQ(k.size(), 150u);
    for (size_t i = 0; i < 150; i++) {
        EXPECT_EQ(k(i, i), 1.0);
        for (size_t j = 0; j < 150; j++) {
            ASSERT_EQ(k(i, j), k(j, i));
            ASSERT_GE(k(i, j), -1e-12);
            ASSERT_LE(k(i, j), 1 + 1e-12);
        }
    }
    EXPECT_EQ(k.dataset_fingerprint, ds.fingerprint);
}

TEST(KernelProperty, ShotMatrixDeterministic) {
    Dataset ds = iris();
    Matrix x = first_rows(ds.features, 12);
    auto mode = FidelityMode::sampled(256, 5);
    KernelMatrix a = kernel_matrix(x, zz_full(), {}, mode);
    KernelMatrix b = kernel_matrix(x, zz_full(), {}, mode);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a(2, 7), fidelity_inversion_test(x.row(2), x.row(7), zz_full(), {}, 256, pair_seed(5, 2, 7)));
    KernelMatrix c = kernel_matrix(x, zz_full(), {}, FidelityMode::sampled(256, 6));
    EXPECT_NE(a.values, c.values);
}

TEST(Kernel, DistanceIsOneMinusKernel) {
    Dataset ds = iris();
    KernelMatrix k = kernel_matrix(first_rows(ds.features, 10), zz_full(), {}, FidelityMode::exact());
    DistanceMatrix d = to_distance(k);
    for (size_t i = 0; i < 10; i++) {
        for (size_t j = 0; j < 10; j++) {
            EXPECT_EQ(d(i, j), 1.0 - k(i, j));
        }
    }
}

TEST(Kernel, PairErrorsNameThePair) {
    Matrix bad(3, 3, 0.5);
    try {
        kernel_matrix(bad, zz_full(), {}, FidelityMode::exact());
        FAIL() << "expected an error";
    } catch (const std::invalid_argument &e) {
        EXPECT_NE(std::string(e.what()).find("pair (0, 1)"), std::string::npos) << e.what();
    }
}

TEST(KernelCache, RoundTrip) {
    auto dir = temp_dir("kernel_cache");
    Dataset ds = iris();
    Matrix x = first_rows(ds.features, 20);
    KernelMatrix k = kernel_matrix(x, zz_full(), {}, FidelityMode::sampled(128, 3), 77);
    save_kernel(k, dir / "k.qkmk");
    KernelMatrix back = load_kernel(dir / "k.qkmk");
    EXPECT_EQ(back, k);
    EXPECT_EQ(back.mode.shots, 128u);
    EXPECT_EQ(back.mode.seed, 3u);
    EXPECT_NO_THROW(load_kernel(dir / "k.qkmk", 77, k.config_digest()));
}

TEST(KernelCache, StaleAndMissing) {
    auto dir = temp_dir("kernel_stale");
    Dataset ds = iris();
    KernelMatrix k = kernel_matrix(first_rows(ds.features, 5), zz_full(), {}, FidelityMode::exact(), 1);
    save_kernel(k, dir / "k.qkmk");
    EXPECT_THROW(load_kernel(dir / "k.qkmk", 2, k.config_digest()), StaleCacheError);
    EXPECT_THROW(load_kernel(dir / "k.qkmk", 1, k.config_digest() + 1), StaleCacheError);
    EXPECT_THROW(load_kernel(dir / "missing.qkmk"), NotFoundError);
    {
        std::ofstream out(dir / "bad.qkmk", std::ios::binary);
        out << "QKMK garbage";
    }
    EXPECT_THROW(load_kernel(dir / "bad.qkmk"), StaleCacheError);
    // Truncated payload.
    std::filesystem::resize_file(dir / "k.qkmk", std::filesystem::file_size(dir / "k.qkmk") - 8);
    EXPECT_THROW(load_kernel(dir / "k.qkmk"), StaleCacheError);
}

TEST(KernelCache, DigestCoversModeAndTheta) {
    FeatureMapConfig c = zz_full();
    EXPECT_NE(kernel_config_digest(c, 0, FidelityMode::exact()), kernel_config_digest(c, 1, FidelityMode::exact()));
    EXPECT_NE(kernel_config_digest(c, 0, FidelityMode::exact()), kernel_config_digest(c, 0, FidelityMode::sampled()));
    EXPECT_NE(kernel_config_digest(c, 0, FidelityMode::sampled(10, 1)),
              kernel_config_digest(c, 0, FidelityMode::sampled(10, 2)));
}
