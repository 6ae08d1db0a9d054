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

#include "qkmeans/clustering.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "qkmeans/evaluation.h"
#include "test_util.h"

using namespace qkm;
using qkm::testing::blobs;
using qkm::testing::iris;

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); i++) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

FeatureMapConfig angle(uint32_t n) {
    FeatureMapConfig c;
    c.kind = MapKind::Angle;
    c.n_qubits = n;
    return c;
}

}  // namespace

TEST(Init, IndicesDistinctAndDeterministic) {
    Dataset ds = iris();
    for (auto s : {InitStrategy::RandomPoints, InitStrategy::KMeansPlusPlus, InitStrategy::FarthestFirst}) {
        for (uint64_t seed = 0; seed < 5; seed++) {
            auto idx = init_indices(ds.features, 5, s, seed);
            ASSERT_EQ(idx.size(), 5u);
            EXPECT_EQ(std::set<size_t>(idx.begin(), idx.end()).size(), 5u);
            EXPECT_EQ(idx, init_indices(ds.features, 5, s, seed));
        }
    }
    EXPECT_NE(init_indices(ds.features, 3, InitStrategy::RandomPoints, 1),
              init_indices(ds.features, 3, InitStrategy::RandomPoints, 2));
}

TEST(Init, FarthestFirstMatchesBruteForce) {
    Matrix m = blobs({{0, 0}, {5, 5}, {-4, 6}, {8, -3}}, 6, 0.8, 3);
    auto got = init_indices(m, 4, InitStrategy::FarthestFirst, 0);
    std::vector<size_t> want{0};
    while (want.size() < 4) {
        size_t best = 0;
        double best_d = -1;
        for (size_t i = 0; i < m.rows(); i++) {
            double d = 1e300;
            for (size_t c : want) d = std::min(d, sq_dist(m.row(i), m.row(c)));
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        want.push_back(best);
    }
    EXPECT_EQ(got, want);
}

TEST(Init, Errors) {
    Matrix m(3, 2, 1.0);
    EXPECT_THROW(init_indices(m, 0, InitStrategy::RandomPoints, 0), std::invalid_argument);
    EXPECT_THROW(init_indices(m, 4, InitStrategy::RandomPoints, 0), std::invalid_argument);
    EXPECT_THROW(parse_init_strategy("pca"), std::invalid_argument);
    EXPECT_EQ(parse_init_strategy(init_strategy_name(InitStrategy::KMeansPlusPlus)), InitStrategy::KMeansPlusPlus);
}

TEST(Assign, TiesGoToLowerIndex) {
    Matrix s(2, 3, 0.0);
    s(0, 1) = 0.5;
    s(0, 2) = 0.5;
    EXPECT_EQ(assign_by_similarity(s), (std::vector<int>{1, 0}));
    Matrix d(2, 3, 1.0);
    d(1, 2) = 0.0;
    EXPECT_EQ(assign_by_distance(d), (std::vector<int>{0, 2}));
}

TEST(Classical, SeparatedBlobs) {
    std::vector<int> truth;
    Matrix m = blobs({{0, 0}, {10, 0}, {0, 10}}, 20, 0.5, 1, &truth);
    for (auto s : {InitStrategy::KMeansPlusPlus, InitStrategy::FarthestFirst}) {
        ClusteringResult r = classical_kmeans(m, 3, 30, 4, s);
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(adjusted_rand_index(r.labels, truth), 1.0);
        EXPECT_EQ(r.centroids.size(), 3u);
    }
}

TEST(Classical, KEqualsOne) {
    Matrix m = blobs({{0, 0}, {3, 3}}, 5, 0.5, 1);
    ClusteringResult r = classical_kmeans(m, 1, 10, 0);
    EXPECT_TRUE(std::all_of(r.labels.begin(), r.labels.end(), [](int l) { return l == 0; }));
    double mean0 = 0;
    for (size_t i = 0; i < m.rows(); i++) mean0 += m(i, 0);
    EXPECT_NEAR(r.centroids[0][0], mean0 / static_cast<double>(m.rows()), 1e-12);
}

TEST(Classical, EmptyClusterRepaired) {
    Matrix m = blobs({{0, 0}, {10, 10}}, 10, 0.5, 2);
    // The third centre is far from everything, so it starts empty.
    std::vector<Centroid> init{{0, 0}, {10, 10}, {1000, 1000}};
    ClusteringResult r = classical_kmeans(m, init, 20);
    std::set<int> used(r.labels.begin(), r.labels.end());
    EXPECT_EQ(used.size(), 3u);
}

TEST(Classical, DuplicatePointsDoNotThrash) {
    Matrix m(6, 1, 0.0);
    for (size_t i = 3; i < 6; i++) m(i, 0) = 1.0;
    ClusteringResult r = classical_kmeans(m, std::vector<Centroid>{{0}, {1}, {5}}, 10);
    EXPECT_LE(r.iterations_run, 10u);
    for (size_t i = 0; i < 6; i++) EXPECT_GE(r.labels[i], 0);
}

TEST(ClassicalProperty, ObjectiveNonIncreasing) {
    Dataset ds = iris();
    for (uint64_t seed = 0; seed < 10; seed++) {
        ClusteringResult r = classical_kmeans(ds.features, 3, 30, seed);
        for (size_t t = 1; t < r.trace.size(); t++) {
            EXPECT_LE(r.trace[t], r.trace[t - 1] + 1e-12) << "seed " << seed << " iteration " << t;
        }
        EXPECT_NEAR(within_cluster_ss(ds.features, r.labels, r.centroids) / 150.0, r.trace.back(), 1e-9);
    }
}

TEST(ClassicalProperty, DeterministicPerSeed) {
    Dataset ds = iris();
    for (auto s : {InitStrategy::RandomPoints, InitStrategy::KMeansPlusPlus}) {
        auto a = classical_kmeans(ds.features, 3, 30, 7, s);
        auto b = classical_kmeans(ds.features, 3, 30, 7, s);
        EXPECT_EQ(a.labels, b.labels);
        EXPECT_EQ(a.centroids, b.centroids);
    }
}

TEST(ClassicalProperty, RowPermutationPermutesLabels) {
    Dataset ds = iris();
    std::vector<Centroid> init;
    for (size_t i : {0u, 60u, 120u}) init.emplace_back(ds.features.row(i).begin(), ds.features.row(i).end());
    ClusteringResult base = classical_kmeans(ds.features, init, 30);

    std::vector<size_t> perm(150);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
    Matrix shuffled(150, 4);
    for (size_t i = 0; i < 150; i++) {
        for (size_t j = 0; j < 4; j++) shuffled(i, j) = ds.features(perm[i], j);
    }
    ClusteringResult moved = classical_kmeans(shuffled, init, 30);
    for (size_t i = 0; i < 150; i++) {
        EXPECT_EQ(moved.labels[i], base.labels[perm[i]]);
    }
}

TEST(Quantum, SeparatedBlobsWithAngleEncoding) {
    std::vector<int> truth;
    Matrix m = blobs({{0.2, 0.2}, {2.8, 2.8}}, 15, 0.1, 5, &truth);
    ClusteringResult r = quantum_kmeans(m, 2, angle(2), {}, 30, FidelityMode::exact(), 1);
    EXPECT_EQ(adjusted_rand_index(r.labels, truth), 1.0);
    EXPECT_TRUE(r.converged);
    for (size_t t = 0; t < r.trace.size(); t++) {
        EXPECT_GE(r.trace[t], 0.0);
        EXPECT_LE(r.trace[t], 1.0 + 1e-12);
    }
}

TEST(Quantum, CentroidsAreMeans) {
    std::vector<int> truth;
    Matrix m = blobs({{0.2, 0.2}, {2.8, 2.8}}, 10, 0.1, 6, &truth);
    ClusteringResult r = quantum_kmeans(m, 2, angle(2), {}, 30, FidelityMode::exact(), 2);
    for (size_t c = 0; c < 2; c++) {
        double sum = 0;
        size_t count = 0;
        for (size_t i = 0; i < m.rows(); i++) {
            if (r.labels[i] == static_cast<int>(c)) {
                sum += m(i, 0);
                count++;
            }
        }
        EXPECT_NEAR(r.centroids[c][0], sum / static_cast<double>(count), 1e-12);
    }
}

TEST(Quantum, SimilaritiesMatchFidelity) {
    Dataset ds = iris();
    FeatureMapConfig c;
    c.kind = MapKind::ZZ;
    c.n_qubits = 4;
    std::vector<Centroid> centroids{{0, 0, 0, 0}, {1, -1, 0.5, 0.2}};
    Matrix s = centroid_similarities(ds.features, centroids, c, {}, FidelityMode::exact());
    for (size_t i = 0; i < 150; i += 17) {
        for (size_t j = 0; j < 2; j++) {
            EXPECT_NEAR(s(i, j), fidelity_exact(ds.features.row(i), centroids[j], c, {}), 1e-12);
        }
    }
}

TEST(Quantum, ShotModeDeterministic) {
    Matrix m = blobs({{0.2, 0.2}, {2.8, 2.8}}, 8, 0.2, 7);
    auto mode = FidelityMode::sampled(256, 3);
    auto a = quantum_kmeans(m, 2, angle(2), {}, 10, mode, 1);
    auto b = quantum_kmeans(m, 2, angle(2), {}, 10, mode, 1);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.trace, b.trace);
}

TEST(Quantum, RejectsDimensionMismatch) {
    Matrix m(5, 3, 0.1);
    EXPECT_THROW(quantum_kmeans(m, 2, angle(2), {}, 10, FidelityMode::exact(), 0), std::invalid_argument);
}

TEST(KernelMatrixKMeans, RecoversBlocks) {
    // Two blocks: distance 0.1 within, 0.9 across.
    size_t n = 10;
    DistanceMatrix d{Matrix(n, n, 0.9)};
    std::vector<int> truth(n);
    for (size_t i = 0; i < n; i++) {
        truth[i] = i < 5 ? 0 : 1;
        for (size_t j = 0; j < n; j++) {
            if ((i < 5) == (j < 5)) d.values(i, j) = i == j ? 0.0 : 0.1;
        }
    }
    ClusteringResult r = kernel_matrix_kmeans(d, std::vector<size_t>{0, 1}, 20);
    EXPECT_EQ(adjusted_rand_index(r.labels, truth), 1.0);
    ASSERT_EQ(r.medoids.size(), 2u);
    for (size_t c = 0; c < 2; c++) {
        EXPECT_EQ(r.labels[r.medoids[c]], static_cast<int>(c));
    }
    EXPECT_THROW(kernel_matrix_kmeans(DistanceMatrix{Matrix(3, 2)}, 2, 10, 0), std::invalid_argument);
}

TEST(KernelMatrixKMeans, MatchesIrisKernel) {
    Dataset ds = iris();
    FeatureMapConfig c = angle(4);
    KernelMatrix k = kernel_matrix(ds.features, c, {}, FidelityMode::exact());
    ClusteringResult a = kernel_matrix_kmeans(to_distance(k), 3, 30, 1);
    ClusteringResult b = kernel_matrix_kmeans(to_distance(k), 3, 30, 1);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_GT(evaluate(a.labels, ds.labels).accuracy, 0.6);
}
