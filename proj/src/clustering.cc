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

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace qkm {

namespace {

// A point whose fit is already perfect is never split off to fill an empty cluster.
constexpr double PERFECT_SIMILARITY_SLACK = 1e-12;

void check_k(size_t n, size_t k, size_t t_max) {
    if (k < 1) {
        throw std::invalid_argument("k must be at least 1.");
    }
    if (k > n) {
        throw std::invalid_argument(
            "k = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(n) + ").");
    }
    if (t_max < 1) {
        throw std::invalid_argument("t_max must be at least 1.");
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (size_t c = 0; c < a.size(); c++) {
        double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

// Index of the best entry in a row; strict comparison keeps the lowest index on ties.
int best_in_row(std::span<const double> row, bool maximize) {
    size_t best = 0;
    for (size_t j = 1; j < row.size(); j++) {
        if (maximize ? row[j] > row[best] : row[j] < row[best]) {
            best = j;
        }
    }
    return static_cast<int>(best);
}

// Refills empty clusters from the worst-fitting point of any cluster with more than one member.
// `fit(i)` is the score of point i against its own cluster; `move(i, j)` moves point i into cluster j.
template <typename Fit, typename IsPerfect, typename Move>
void repair_empty_clusters(std::vector<int> &labels, size_t k, bool maximize, Fit fit, IsPerfect is_perfect, Move move) {
    std::vector<size_t> sizes(k, 0);
    for (int l : labels) {
        sizes[static_cast<size_t>(l)]++;
    }
    for (size_t j = 0; j < k; j++) {
        if (sizes[j] > 0) {
            continue;
        }
        std::optional<size_t> worst;
        double worst_fit = 0;
        for (size_t i = 0; i < labels.size(); i++) {
            if (sizes[static_cast<size_t>(labels[i])] < 2) {
                continue;
            }
            double f = fit(i);
            if (!worst || (maximize ? f < worst_fit : f > worst_fit)) {
                worst = i;
                worst_fit = f;
            }
        }
        if (!worst || is_perfect(worst_fit)) {
            continue;
        }
        sizes[static_cast<size_t>(labels[*worst])]--;
        sizes[j]++;
        labels[*worst] = static_cast<int>(j);
        move(*worst, j);
    }
}

std::vector<Centroid> mean_update(const Matrix &data, const std::vector<int> &labels, std::vector<Centroid> centroids) {
    size_t k = centroids.size();
    size_t d = data.cols();
    std::vector<Centroid> sums(k, Centroid(d, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < labels.size(); i++) {
        auto j = static_cast<size_t>(labels[i]);
        counts[j]++;
        auto row = data.row(i);
        for (size_t c = 0; c < d; c++) {
            sums[j][c] += row[c];
        }
    }
    for (size_t j = 0; j < k; j++) {
        if (counts[j] == 0) {
            continue;
        }
        for (size_t c = 0; c < d; c++) {
            centroids[j][c] = sums[j][c] / static_cast<double>(counts[j]);
        }
    }
    return centroids;
}

// Shared Lloyd iteration: score, assign, repair, test convergence, then move centroids to the means.
// `scores(centroids, iteration)` returns an n x k matrix; `perfect` is the best attainable score.
template <typename ScoreFn>
ClusteringResult lloyd(
    const Matrix &data, std::vector<Centroid> centroids, size_t t_max, bool maximize, double perfect, ScoreFn scores) {
    size_t n = data.rows();
    size_t k = centroids.size();
    check_k(n, k, t_max);
    for (const auto &c : centroids) {
        if (c.size() != data.cols()) {
            throw std::invalid_argument("Centroid dimension does not match the data.");
        }
    }

    ClusteringResult result;
    std::vector<int> previous;
    for (size_t it = 1; it <= t_max; it++) {
        Matrix s = scores(centroids, it);
        std::vector<int> labels = maximize ? assign_by_similarity(s) : assign_by_distance(s);
        std::vector<double> own(n);
        for (size_t i = 0; i < n; i++) {
            own[i] = s(i, static_cast<size_t>(labels[i]));
        }
        repair_empty_clusters(
            labels,
            k,
            maximize,
            [&](size_t i) { return own[i]; },
            [&](double f) { return maximize ? f >= perfect - PERFECT_SIMILARITY_SLACK : f <= perfect; },
            [&](size_t i, size_t j) {
                auto row = data.row(i);
                centroids[j].assign(row.begin(), row.end());
                own[i] = perfect;
            });

        result.trace.push_back(std::accumulate(own.begin(), own.end(), 0.0) / static_cast<double>(n));
        result.iterations_run = it;
        if (labels == previous) {
            result.converged = true;
            break;
        }
        previous = std::move(labels);
        centroids = mean_update(data, previous, std::move(centroids));
    }
    result.labels = std::move(previous);
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace

const char *init_strategy_name(InitStrategy s) {
    switch (s) {
        case InitStrategy::RandomPoints:
            return "random_points";
        case InitStrategy::KMeansPlusPlus:
            return "kmeans_pp";
        case InitStrategy::FarthestFirst:
            return "farthest_first";
    }
    return "?";
}

InitStrategy parse_init_strategy(std::string_view name) {
    for (auto s : {InitStrategy::RandomPoints, InitStrategy::KMeansPlusPlus, InitStrategy::FarthestFirst}) {
        if (name == init_strategy_name(s)) {
            return s;
        }
    }
    throw std::invalid_argument("Unknown init strategy '" + std::string(name) + "'.");
}

std::vector<size_t> init_indices(const Matrix &data, size_t k, InitStrategy strategy, uint64_t seed) {
    size_t n = data.rows();
    check_k(n, k, 1);
    std::mt19937_64 rng(seed);
    std::vector<size_t> chosen;
    chosen.reserve(k);

    if (strategy == InitStrategy::RandomPoints) {
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (size_t m = 0; m < k; m++) {
            size_t pick = m + bounded(rng, n - m);
            std::swap(idx[m], idx[pick]);
            chosen.push_back(idx[m]);
        }
        return chosen;
    }

    std::vector<bool> taken(n, false);
    std::vector<double> nearest(n, 0.0);
    auto take = [&](size_t i) {
        chosen.push_back(i);
        taken[i] = true;
        for (size_t r = 0; r < n; r++) {
            double d = squared_distance(data.row(r), data.row(i));
            nearest[r] = chosen.size() == 1 ? d : std::min(nearest[r], d);
        }
    };
    auto lowest_free = [&]() {
        size_t i = 0;
        while (taken[i]) {
            i++;
        }
        return i;
    };

    take(strategy == InitStrategy::FarthestFirst ? 0 : bounded(rng, n));
    while (chosen.size() < k) {
        if (strategy == InitStrategy::FarthestFirst) {
            std::optional<size_t> best;
            for (size_t r = 0; r < n; r++) {
                if (!taken[r] && (!best || nearest[r] > nearest[*best])) {
                    best = r;
                }
            }
            take(*best);
            continue;
        }
        double total = 0;
        for (size_t r = 0; r < n; r++) {
            total += taken[r] ? 0.0 : nearest[r];
        }
        if (total <= 0) {
            take(lowest_free());
            continue;
        }
        double u = unit_double(rng()) * total;
        std::optional<size_t> pick;
        double acc = 0;
        for (size_t r = 0; r < n; r++) {
            if (taken[r] || nearest[r] <= 0) {
                continue;
            }
            acc += nearest[r];
            pick = r;
            if (u < acc) {
                break;
            }
        }
        take(*pick);
    }
    return chosen;
}

std::vector<Centroid> init_centroids(const Matrix &data, size_t k, InitStrategy strategy, uint64_t seed) {
    std::vector<Centroid> out;
    for (size_t i : init_indices(data, k, strategy, seed)) {
        auto row = data.row(i);
        out.emplace_back(row.begin(), row.end());
    }
    return out;
}

std::vector<int> assign_by_similarity(const Matrix &similarities) {
    std::vector<int> labels(similarities.rows());
    for (size_t i = 0; i < labels.size(); i++) {
        labels[i] = best_in_row(similarities.row(i), true);
    }
    return labels;
}

std::vector<int> assign_by_distance(const Matrix &distances) {
    std::vector<int> labels(distances.rows());
    for (size_t i = 0; i < labels.size(); i++) {
        labels[i] = best_in_row(distances.row(i), false);
    }
    return labels;
}

ClusteringResult classical_kmeans(const Matrix &data, size_t k, size_t t_max, uint64_t seed, InitStrategy strategy) {
    check_k(data.rows(), k, t_max);
    return classical_kmeans(data, init_centroids(data, k, strategy, seed), t_max);
}

ClusteringResult classical_kmeans(const Matrix &data, std::vector<Centroid> initial, size_t t_max) {
    return lloyd(data, std::move(initial), t_max, false, 0.0, [&](const std::vector<Centroid> &centroids, size_t) {
        Matrix d(data.rows(), centroids.size());
        for (size_t i = 0; i < data.rows(); i++) {
            for (size_t j = 0; j < centroids.size(); j++) {
                d(i, j) = squared_distance(data.row(i), centroids[j]);
            }
        }
        return d;
    });
}

Matrix centroid_similarities(
    const Matrix &data,
    const std::vector<Centroid> &centroids,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    const FidelityMode &mode,
    uint64_t iteration) {
    size_t n = data.rows();
    size_t k = centroids.size();
    Matrix s(n, k);
    if (mode.is_exact()) {
        std::vector<StateVector> centre_states;
        centre_states.reserve(k);
        for (const auto &c : centroids) {
            centre_states.push_back(encode(c, config, theta));
        }
        for (size_t i = 0; i < n; i++) {
            StateVector psi = encode(data.row(i), config, theta);
            for (size_t j = 0; j < k; j++) {
                s(i, j) = fidelity(psi, centre_states[j]);
            }
        }
        return s;
    }
    uint64_t base = mode.seed ^ mix64(iteration);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < k; j++) {
            s(i, j) = fidelity_inversion_test(data.row(i), centroids[j], config, theta, mode.shots, pair_seed(base, i, j));
        }
    }
    return s;
}

ClusteringResult quantum_kmeans(
    const Matrix &data,
    size_t k,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    size_t t_max,
    const FidelityMode &mode,
    uint64_t seed,
    InitStrategy strategy) {
    check_k(data.rows(), k, t_max);
    return quantum_kmeans(data, init_centroids(data, k, strategy, seed), config, theta, t_max, mode);
}

ClusteringResult quantum_kmeans(
    const Matrix &data,
    std::vector<Centroid> initial,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    size_t t_max,
    const FidelityMode &mode) {
    validate_feature_dim(config, data.cols());
    if (!mode.is_exact() && mode.shots == 0) {
        throw std::invalid_argument("quantum_kmeans in shot mode needs at least one shot.");
    }

    // Data points never move, so their encoded states are computed once.
    std::vector<StateVector> point_states;
    if (mode.is_exact()) {
        point_states.reserve(data.rows());
        for (size_t i = 0; i < data.rows(); i++) {
            point_states.push_back(encode(data.row(i), config, theta));
        }
    }

    auto scores = [&](const std::vector<Centroid> &centroids, size_t iteration) {
        if (!mode.is_exact()) {
            return centroid_similarities(data, centroids, config, theta, mode, iteration);
        }
        Matrix s(data.rows(), centroids.size());
        std::vector<StateVector> centre_states;
        centre_states.reserve(centroids.size());
        for (const auto &c : centroids) {
            centre_states.push_back(encode(c, config, theta));
        }
        for (size_t i = 0; i < data.rows(); i++) {
            for (size_t j = 0; j < centroids.size(); j++) {
                s(i, j) = fidelity(point_states[i], centre_states[j]);
            }
        }
        return s;
    };
    return lloyd(data, std::move(initial), t_max, true, 1.0, scores);
}

ClusteringResult kernel_matrix_kmeans(const DistanceMatrix &distance, size_t k, size_t t_max, uint64_t seed) {
    size_t n = distance.size();
    check_k(n, k, t_max);
    // Only the row count matters for random index selection.
    return kernel_matrix_kmeans(distance, init_indices(Matrix(n, 0), k, InitStrategy::RandomPoints, seed), t_max);
}

ClusteringResult kernel_matrix_kmeans(const DistanceMatrix &distance, std::vector<size_t> reps, size_t t_max) {
    size_t n = distance.size();
    size_t k = reps.size();
    if (distance.values.cols() != n) {
        throw std::invalid_argument("kernel_matrix_kmeans needs a square distance matrix.");
    }
    check_k(n, k, t_max);
    for (size_t r : reps) {
        if (r >= n) {
            throw std::invalid_argument("Representative index out of range.");
        }
    }

    ClusteringResult result;
    std::vector<int> previous;
    for (size_t it = 1; it <= t_max; it++) {
        Matrix d(n, k);
        for (size_t i = 0; i < n; i++) {
            for (size_t j = 0; j < k; j++) {
                d(i, j) = distance(i, reps[j]);
            }
        }
        std::vector<int> labels = assign_by_distance(d);
        repair_empty_clusters(
            labels,
            k,
            false,
            [&](size_t i) { return distance(i, reps[static_cast<size_t>(labels[i])]); },
            [](double f) { return f <= 0; },
            [&](size_t i, size_t j) { reps[j] = i; });

        double total = 0;
        for (size_t i = 0; i < n; i++) {
            total += distance(i, reps[static_cast<size_t>(labels[i])]);
        }
        result.trace.push_back(total / static_cast<double>(n));
        result.iterations_run = it;
        if (labels == previous) {
            result.converged = true;
            break;
        }
        previous = std::move(labels);

        std::vector<std::vector<size_t>> members(k);
        for (size_t i = 0; i < n; i++) {
            members[static_cast<size_t>(previous[i])].push_back(i);
        }
        for (size_t j = 0; j < k; j++) {
            if (members[j].empty()) {
                continue;
            }
            std::optional<size_t> best;
            double best_cost = 0;
            for (size_t m : members[j]) {
                double cost = 0;
                for (size_t other : members[j]) {
                    cost += distance(m, other);
                }
                if (!best || cost < best_cost) {
                    best = m;
                    best_cost = cost;
                }
            }
            reps[j] = *best;
        }
    }
    result.labels = std::move(previous);
    result.medoids = std::move(reps);
    return result;
}

double within_cluster_ss(const Matrix &data, const std::vector<int> &labels, const std::vector<Centroid> &centroids) {
    double total = 0;
    for (size_t i = 0; i < labels.size(); i++) {
        total += squared_distance(data.row(i), centroids[static_cast<size_t>(labels[i])]);
    }
    return total;
}

}  // namespace qkm
