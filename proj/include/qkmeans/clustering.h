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

#include <cstdint>
#include <string_view>
#include <vector>

#include "qkmeans/common.h"
#include "qkmeans/feature_maps.h"
#include "qkmeans/kernel.h"

namespace qkm {

constexpr size_t DEFAULT_T_MAX = 30;

/// A cluster centre in (scaled) feature space.
using Centroid = std::vector<double>;

enum class InitStrategy : uint8_t { RandomPoints, KMeansPlusPlus, FarthestFirst };

const char *init_strategy_name(InitStrategy s);
InitStrategy parse_init_strategy(std::string_view name);

struct ClusteringResult {
    std::vector<int> labels;
    std::vector<Centroid> centroids;  // empty for the precomputed-matrix path
    std::vector<size_t> medoids;      // precomputed-matrix path only: representative row per cluster
    size_t iterations_run = 0;
    bool converged = false;
    /// Per iteration: mean assigned similarity (quantum), mean squared distance (classical) or
    /// mean distance to the representative (precomputed matrix).
    std::vector<double> trace;
};

/// Row indices of k distinct initial centres.
///
/// random_points draws k rows without replacement. kmeans_pp starts from a uniformly drawn row and
/// samples the rest proportional to squared distance. farthest_first starts from row 0 and greedily
/// adds the row maximizing its distance to the chosen set (ties to the lower index).
std::vector<size_t> init_indices(const Matrix &data, size_t k, InitStrategy strategy, uint64_t seed);

std::vector<Centroid> init_centroids(const Matrix &data, size_t k, InitStrategy strategy, uint64_t seed);

/// Lloyd's algorithm on squared Euclidean distance.
ClusteringResult classical_kmeans(
    const Matrix &data, size_t k, size_t t_max, uint64_t seed, InitStrategy strategy = InitStrategy::RandomPoints);

ClusteringResult classical_kmeans(const Matrix &data, std::vector<Centroid> initial, size_t t_max);

/// K-means where points join the centroid of highest fidelity. Centroids are arithmetic means in
/// feature space and are re-encoded through the feature map on every iteration.
ClusteringResult quantum_kmeans(
    const Matrix &data,
    size_t k,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    size_t t_max,
    const FidelityMode &mode,
    uint64_t seed,
    InitStrategy strategy = InitStrategy::RandomPoints);

ClusteringResult quantum_kmeans(
    const Matrix &data,
    std::vector<Centroid> initial,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    size_t t_max,
    const FidelityMode &mode);

/// n x k fidelities between every row of `data` and every centroid.
Matrix centroid_similarities(
    const Matrix &data,
    const std::vector<Centroid> &centroids,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    const FidelityMode &mode,
    uint64_t iteration = 0);

/// Row-wise argmax (ties to the lower column).
std::vector<int> assign_by_similarity(const Matrix &similarities);
/// Row-wise argmin (ties to the lower column).
std::vector<int> assign_by_distance(const Matrix &distances);

/// K-medoids style loop on a precomputed distance matrix. Each cluster is represented by the member
/// with the smallest mean distance to the other members.
ClusteringResult kernel_matrix_kmeans(const DistanceMatrix &distance, size_t k, size_t t_max, uint64_t seed);

ClusteringResult kernel_matrix_kmeans(const DistanceMatrix &distance, std::vector<size_t> initial, size_t t_max);

/// Sum over points of squared distance to the assigned centroid.
double within_cluster_ss(const Matrix &data, const std::vector<int> &labels, const std::vector<Centroid> &centroids);

}  // namespace qkm
