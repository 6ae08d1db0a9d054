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
#include <filesystem>
#include <span>
#include <vector>

#include "qkmeans/common.h"
#include "qkmeans/feature_maps.h"

namespace qkm {

constexpr uint64_t DEFAULT_SHOTS = 4096;

/// How a fidelity is obtained: exactly from statevectors, or estimated from sampled overlap circuits.
struct FidelityMode {
    enum class Kind : uint8_t { Exact = 0, Shots = 1 };

    Kind kind = Kind::Exact;
    uint64_t shots = DEFAULT_SHOTS;
    uint64_t seed = 0;

    static FidelityMode exact() { return {}; }
    static FidelityMode sampled(uint64_t shots = DEFAULT_SHOTS, uint64_t seed = 0) { return {Kind::Shots, shots, seed}; }

    bool is_exact() const { return kind == Kind::Exact; }
    bool operator==(const FidelityMode &) const = default;
};

/// |<psi(x)|psi(y)>|^2 from exact statevectors.
double fidelity_exact(
    std::span<const double> x, std::span<const double> y, const FeatureMapConfig &config, const ThetaParameters &theta);

/// The overlap circuit U(y)^dagger U(x) acting on |0...0>.
CircuitSpec overlap_circuit(
    std::span<const double> x, std::span<const double> y, const FeatureMapConfig &config, const ThetaParameters &theta);

/// Fraction of `shots` measurements of the overlap circuit that return all zeros.
double fidelity_inversion_test(
    std::span<const double> x,
    std::span<const double> y,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    uint64_t shots,
    uint64_t seed);

double fidelity(
    std::span<const double> x,
    std::span<const double> y,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    const FidelityMode &mode);

/// Seed for the (i, j) pair of a shot-mode batch. Independent of evaluation order.
uint64_t pair_seed(uint64_t seed, uint64_t i, uint64_t j);

/// Symmetric matrix of pairwise fidelities plus the metadata needed to validate a cached copy.
struct KernelMatrix {
    Matrix values;
    FeatureMapConfig map_config;
    uint64_t theta_seed = 0;
    FidelityMode mode;
    uint64_t dataset_fingerprint = 0;

    size_t size() const { return values.rows(); }
    double operator()(size_t i, size_t j) const { return values(i, j); }

    /// Digest over the map config, theta seed and fidelity mode.
    uint64_t config_digest() const;

    bool operator==(const KernelMatrix &) const = default;
};

struct DistanceMatrix {
    Matrix values;

    size_t size() const { return values.rows(); }
    double operator()(size_t i, size_t j) const { return values(i, j); }
};

uint64_t kernel_config_digest(const FeatureMapConfig &config, uint64_t theta_seed, const FidelityMode &mode);

/// Fills the upper triangle with the selected fidelity, mirrors it, and sets the diagonal to 1.
/// Errors from pair (i, j) are rethrown with the pair named in the message.
KernelMatrix kernel_matrix(
    const Matrix &data,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    const FidelityMode &mode,
    uint64_t dataset_fingerprint = 0);

DistanceMatrix to_distance(const KernelMatrix &k);

/// Binary cache: magic "QKMK", u32 version, u64 n, u8 mode, u64 shots, u64 seed, u64 config digest,
/// u64 dataset fingerprint, u64 theta seed, u32-length-prefixed map config text, then n*n
/// little-endian float64 values in row-major order.
void save_kernel(const KernelMatrix &k, const std::filesystem::path &path);

/// Reads a cache file without validating it against any expectation.
/// Throws NotFoundError for a missing file and StaleCacheError for an unreadable or corrupt one.
KernelMatrix load_kernel(const std::filesystem::path &path);

/// As above, and additionally throws StaleCacheError if the fingerprint or config digest differs.
KernelMatrix load_kernel(
    const std::filesystem::path &path, uint64_t expected_fingerprint, uint64_t expected_config_digest);

}  // namespace qkm
