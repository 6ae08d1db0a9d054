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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkmeans/statevector.h"

namespace qkm {

enum class MapKind : uint8_t { ZZ, Z, EfficientSU2, DenseAngle, Angle, Phase, Pauli };

enum class Entanglement : uint8_t { Linear, Circular, Full };

const char *map_kind_name(MapKind kind);
MapKind parse_map_kind(std::string_view name);
const char *entanglement_name(Entanglement e);
Entanglement parse_entanglement(std::string_view name);

/// Qubit pairs receiving two-qubit interactions, in application order.
///
/// Linear gives (i, i+1); circular adds the wrap pair (n-1, 0) when n >= 3; full gives every i < j.
std::vector<std::pair<uint32_t, uint32_t>> entanglement_pairs(Entanglement e, uint32_t n_qubits);

struct FeatureMapConfig {
    MapKind kind = MapKind::ZZ;
    uint32_t n_qubits = 2;
    uint32_t reps = 1;
    Entanglement entanglement = Entanglement::Linear;
    std::vector<std::string> pauli_strings;  // Pauli kind only.
    uint64_t theta_seed = 0;                  // EfficientSU2 only.

    bool operator==(const FeatureMapConfig &) const = default;

    /// Stable textual form; also the input to `digest()`.
    std::string canonical() const;
    uint64_t digest() const;

    /// Inverse of canonical(). Throws ParseError on malformed text.
    static FeatureMapConfig from_canonical(std::string_view text);
};

/// Fixed (non-data) rotation angles of the EfficientSU2 encoder.
struct ThetaParameters {
    std::vector<double> values;
    uint64_t seed = 0;
    uint32_t layer_count = 0;

    bool operator==(const ThetaParameters &) const = default;
};

/// `count` values uniform in [0, 2*pi), reproducible from `seed`.
ThetaParameters generate_theta(uint64_t seed, size_t count, uint32_t layer_count = 0);

/// Checks that a feature vector of dimension d fits the map. Throws std::invalid_argument.
void validate_feature_dim(const FeatureMapConfig &config, size_t d);

/// Number of parameter slots in the EfficientSU2 circuit: 2 * n_qubits * (reps + 1).
size_t su2_slot_count(const FeatureMapConfig &config);

/// How many theta values a d-dimensional input needs (zero for every map except EfficientSU2).
size_t theta_count(const FeatureMapConfig &config, size_t d);

/// The theta parameters used for d-dimensional data, drawn from `config.theta_seed`.
ThetaParameters make_theta(const FeatureMapConfig &config, size_t d);

CircuitSpec build_z_map(std::span<const double> x, const FeatureMapConfig &config);
CircuitSpec build_zz_map(std::span<const double> x, const FeatureMapConfig &config);
CircuitSpec build_efficient_su2(std::span<const double> x, const ThetaParameters &theta, const FeatureMapConfig &config);
CircuitSpec build_angle_encoding(std::span<const double> x, const FeatureMapConfig &config);
CircuitSpec build_dense_angle(std::span<const double> x, const FeatureMapConfig &config);
CircuitSpec build_phase_encoding(std::span<const double> x, const FeatureMapConfig &config);

/// Pauli evolution map. Character k of a word acts on the k-th qubit of each selected subset.
/// Length-1 words act on every qubit, length-2 words on the entanglement pairs, and longer words
/// on all combinations (full) or consecutive windows (linear, circular with wrap).
CircuitSpec build_pauli_map(std::span<const double> x, const FeatureMapConfig &config);

/// Dispatches on `config.kind`. `theta` is read only by EfficientSU2.
CircuitSpec build_feature_map(std::span<const double> x, const FeatureMapConfig &config, const ThetaParameters &theta);

/// run_circuit(build_feature_map(...)).
StateVector encode(std::span<const double> x, const FeatureMapConfig &config, const ThetaParameters &theta);

}  // namespace qkm
