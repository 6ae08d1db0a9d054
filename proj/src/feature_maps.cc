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

#include "qkmeans/feature_maps.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qkmeans/common.h"

namespace qkm {

namespace {

constexpr double PI = std::numbers::pi;

void check_config(const FeatureMapConfig &config) {
    if (config.n_qubits < 1 || config.n_qubits > MAX_QUBITS) {
        throw std::invalid_argument("Feature map qubit count must be in [1, 12].");
    }
    if (config.reps < 1) {
        throw std::invalid_argument("Feature map reps must be at least 1.");
    }
}

void require_dim(const FeatureMapConfig &config, size_t d, size_t expected) {
    if (d != expected) {
        throw std::invalid_argument(
            std::string(map_kind_name(config.kind)) + " map on " + std::to_string(config.n_qubits) + " qubits expects " +
            std::to_string(expected) + " features, got " + std::to_string(d) + ".");
    }
}

void hadamard_layer(CircuitSpec &c) {
    for (uint32_t q = 0; q < c.n_qubits; q++) {
        c.gates.push_back(Gate::h(q));
    }
}

// Qubit subsets for a Pauli word of the given length.
std::vector<std::vector<uint32_t>> pauli_subsets(size_t len, const FeatureMapConfig &config) {
    uint32_t n = config.n_qubits;
    std::vector<std::vector<uint32_t>> out;
    if (len == 1) {
        for (uint32_t q = 0; q < n; q++) {
            out.push_back({q});
        }
        return out;
    }
    if (len == 2) {
        for (auto [i, j] : entanglement_pairs(config.entanglement, n)) {
            out.push_back({i, j});
        }
        return out;
    }
    if (config.entanglement == Entanglement::Full) {
        std::vector<uint32_t> idx(len);
        for (size_t k = 0; k < len; k++) {
            idx[k] = static_cast<uint32_t>(k);
        }
        while (true) {
            out.push_back(idx);
            // Advance to the next combination in lexicographic order.
            size_t k = len;
            while (k > 0 && idx[k - 1] == n - len + (k - 1)) {
                k--;
            }
            if (k == 0) {
                break;
            }
            idx[k - 1]++;
            for (size_t m = k; m < len; m++) {
                idx[m] = idx[m - 1] + 1;
            }
        }
        return out;
    }
    size_t windows = config.entanglement == Entanglement::Circular && n > len ? n : n - len + 1;
    for (size_t start = 0; start < windows; start++) {
        std::vector<uint32_t> s(len);
        for (size_t k = 0; k < len; k++) {
            s[k] = static_cast<uint32_t>((start + k) % n);
        }
        out.push_back(std::move(s));
    }
    return out;
}

void check_pauli_word(const std::string &word, uint32_t n_qubits) {
    if (word.empty() || word.size() > n_qubits) {
        throw std::invalid_argument("Pauli word '" + word + "' must have length in [1, n_qubits].");
    }
    for (char ch : word) {
        if (ch != 'X' && ch != 'Y' && ch != 'Z') {
            throw std::invalid_argument("Pauli word '" + word + "' contains a character outside {X,Y,Z}.");
        }
    }
}

void basis_change(CircuitSpec &c, char pauli, uint32_t q, bool inverse) {
    if (pauli == 'X') {
        c.gates.push_back(Gate::h(q));
    } else if (pauli == 'Y') {
        c.gates.push_back(Gate::rx(q, inverse ? -PI / 2 : PI / 2));
    }
}

}  // namespace

const char *map_kind_name(MapKind kind) {
    switch (kind) {
        case MapKind::ZZ:
            return "zz";
        case MapKind::Z:
            return "z";
        case MapKind::EfficientSU2:
            return "efficient_su2";
        case MapKind::DenseAngle:
            return "dense_angle";
        case MapKind::Angle:
            return "angle";
        case MapKind::Phase:
            return "phase";
        case MapKind::Pauli:
            return "pauli";
    }
    return "?";
}

MapKind parse_map_kind(std::string_view name) {
    for (auto k : {MapKind::ZZ, MapKind::Z, MapKind::EfficientSU2, MapKind::DenseAngle, MapKind::Angle, MapKind::Phase,
                   MapKind::Pauli}) {
        if (name == map_kind_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("Unknown feature map '" + std::string(name) + "'.");
}

const char *entanglement_name(Entanglement e) {
    switch (e) {
        case Entanglement::Linear:
            return "linear";
        case Entanglement::Circular:
            return "circular";
        case Entanglement::Full:
            return "full";
    }
    return "?";
}

Entanglement parse_entanglement(std::string_view name) {
    for (auto e : {Entanglement::Linear, Entanglement::Circular, Entanglement::Full}) {
        if (name == entanglement_name(e)) {
            return e;
        }
    }
    throw std::invalid_argument("Unknown entanglement pattern '" + std::string(name) + "'.");
}

std::vector<std::pair<uint32_t, uint32_t>> entanglement_pairs(Entanglement e, uint32_t n_qubits) {
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    if (e == Entanglement::Full) {
        for (uint32_t i = 0; i < n_qubits; i++) {
            for (uint32_t j = i + 1; j < n_qubits; j++) {
                pairs.emplace_back(i, j);
            }
        }
        return pairs;
    }
    for (uint32_t i = 0; i + 1 < n_qubits; i++) {
        pairs.emplace_back(i, i + 1);
    }
    if (e == Entanglement::Circular && n_qubits >= 3) {
        pairs.emplace_back(n_qubits - 1, 0);
    }
    return pairs;
}

std::string FeatureMapConfig::canonical() const {
    std::string s = "map=";
    s += map_kind_name(kind);
    s += ";qubits=" + std::to_string(n_qubits);
    s += ";reps=" + std::to_string(reps);
    s += ";entanglement=";
    s += entanglement_name(entanglement);
    s += ";pauli=";
    for (size_t k = 0; k < pauli_strings.size(); k++) {
        s += (k ? "," : "") + pauli_strings[k];
    }
    s += ";theta_seed=" + std::to_string(theta_seed);
    return s;
}

uint64_t FeatureMapConfig::digest() const {
    return Fnv1a().str(canonical()).digest();
}

FeatureMapConfig FeatureMapConfig::from_canonical(std::string_view text) {
    FeatureMapConfig c;
    size_t seen = 0;
    size_t pos = 0;
    try {
        while (pos <= text.size()) {
            size_t end = text.find(';', pos);
            if (end == std::string_view::npos) {
                end = text.size();
            }
            std::string_view field = text.substr(pos, end - pos);
            size_t eq = field.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("missing '='");
            }
            std::string_view key = field.substr(0, eq);
            std::string value(field.substr(eq + 1));
            if (key == "map") {
                c.kind = parse_map_kind(value);
            } else if (key == "qubits") {
                c.n_qubits = static_cast<uint32_t>(std::stoul(value));
            } else if (key == "reps") {
                c.reps = static_cast<uint32_t>(std::stoul(value));
            } else if (key == "entanglement") {
                c.entanglement = parse_entanglement(value);
            } else if (key == "pauli") {
                c.pauli_strings.clear();
                size_t p = 0;
                while (!value.empty() && p <= value.size()) {
                    size_t comma = value.find(',', p);
                    if (comma == std::string::npos) {
                        comma = value.size();
                    }
                    c.pauli_strings.push_back(value.substr(p, comma - p));
                    p = comma + 1;
                }
            } else if (key == "theta_seed") {
                c.theta_seed = std::stoull(value);
            } else {
                throw ParseError("unknown key '" + std::string(key) + "'");
            }
            seen++;
            pos = end + 1;
        }
    } catch (const std::exception &e) {
        throw ParseError("Malformed feature map config '" + std::string(text) + "': " + e.what());
    }
    if (seen != 6) {
        throw ParseError("Malformed feature map config '" + std::string(text) + "': expected 6 fields.");
    }
    return c;
}

ThetaParameters generate_theta(uint64_t seed, size_t count, uint32_t layer_count) {
    ThetaParameters theta{{}, seed, layer_count};
    theta.values.reserve(count);
    std::mt19937_64 rng(seed);
    const double upper = std::nextafter(2 * PI, 0.0);
    for (size_t k = 0; k < count; k++) {
        theta.values.push_back(std::min(unit_double(rng()) * 2 * PI, upper));
    }
    return theta;
}

void validate_feature_dim(const FeatureMapConfig &config, size_t d) {
    check_config(config);
    switch (config.kind) {
        case MapKind::ZZ:
            if (config.n_qubits < 2) {
                throw std::invalid_argument("zz map needs at least 2 qubits.");
            }
            require_dim(config, d, config.n_qubits);
            break;
        case MapKind::Z:
        case MapKind::Angle:
        case MapKind::Phase:
            require_dim(config, d, config.n_qubits);
            break;
        case MapKind::Pauli:
            require_dim(config, d, config.n_qubits);
            if (config.pauli_strings.empty()) {
                throw std::invalid_argument("pauli map needs at least one Pauli word.");
            }
            for (const auto &w : config.pauli_strings) {
                check_pauli_word(w, config.n_qubits);
            }
            break;
        case MapKind::DenseAngle:
            require_dim(config, d, 2 * size_t{config.n_qubits});
            break;
        case MapKind::EfficientSU2:
            if (d < 1 || d > su2_slot_count(config)) {
                throw std::invalid_argument(
                    "efficient_su2 on " + std::to_string(config.n_qubits) + " qubits with " + std::to_string(config.reps) +
                    " reps has " + std::to_string(su2_slot_count(config)) + " parameter slots; cannot hold " +
                    std::to_string(d) + " features.");
            }
            break;
    }
}

size_t su2_slot_count(const FeatureMapConfig &config) {
    return 2 * size_t{config.n_qubits} * (size_t{config.reps} + 1);
}

size_t theta_count(const FeatureMapConfig &config, size_t d) {
    if (config.kind != MapKind::EfficientSU2) {
        return 0;
    }
    validate_feature_dim(config, d);
    return su2_slot_count(config) - d;
}

ThetaParameters make_theta(const FeatureMapConfig &config, size_t d) {
    uint32_t layers = config.kind == MapKind::EfficientSU2 ? config.reps + 1 : 0;
    return generate_theta(config.theta_seed, theta_count(config, d), layers);
}

CircuitSpec build_z_map(std::span<const double> x, const FeatureMapConfig &config) {
    check_config(config);
    require_dim(config, x.size(), config.n_qubits);
    CircuitSpec c{config.n_qubits, {}};
    for (uint32_t r = 0; r < config.reps; r++) {
        hadamard_layer(c);
        for (uint32_t q = 0; q < config.n_qubits; q++) {
            c.gates.push_back(Gate::p(q, 2 * x[q]));
        }
    }
    return c;
}

CircuitSpec build_zz_map(std::span<const double> x, const FeatureMapConfig &config) {
    check_config(config);
    if (config.n_qubits < 2) {
        throw std::invalid_argument("zz map needs at least 2 qubits.");
    }
    require_dim(config, x.size(), config.n_qubits);
    CircuitSpec c{config.n_qubits, {}};
    auto pairs = entanglement_pairs(config.entanglement, config.n_qubits);
    for (uint32_t r = 0; r < config.reps; r++) {
        hadamard_layer(c);
        for (uint32_t q = 0; q < config.n_qubits; q++) {
            c.gates.push_back(Gate::p(q, 2 * x[q]));
        }
        for (auto [i, j] : pairs) {
            c.gates.push_back(Gate::cx(i, j));
            c.gates.push_back(Gate::p(j, 2 * (PI - x[i]) * (PI - x[j])));
            c.gates.push_back(Gate::cx(i, j));
        }
    }
    return c;
}

CircuitSpec build_efficient_su2(std::span<const double> x, const ThetaParameters &theta, const FeatureMapConfig &config) {
    check_config(config);
    size_t slots = su2_slot_count(config);
    if (x.size() + theta.values.size() != slots) {
        throw std::invalid_argument(
            "efficient_su2 has " + std::to_string(slots) + " parameter slots but received " + std::to_string(x.size()) +
            " features and " + std::to_string(theta.values.size()) + " theta values.");
    }
    auto slot = [&, next = size_t{0}]() mutable {
        size_t k = next++;
        return k < x.size() ? x[k] : theta.values[k - x.size()];
    };
    CircuitSpec c{config.n_qubits, {}};
    auto pairs = entanglement_pairs(config.entanglement, config.n_qubits);
    for (uint32_t layer = 0; layer <= config.reps; layer++) {
        for (uint32_t q = 0; q < config.n_qubits; q++) {
            c.gates.push_back(Gate::ry(q, slot()));
        }
        for (uint32_t q = 0; q < config.n_qubits; q++) {
            c.gates.push_back(Gate::rz(q, slot()));
        }
        if (layer < config.reps) {
            for (auto [i, j] : pairs) {
                c.gates.push_back(Gate::cx(i, j));
            }
        }
    }
    return c;
}

CircuitSpec build_angle_encoding(std::span<const double> x, const FeatureMapConfig &config) {
    check_config(config);
    require_dim(config, x.size(), config.n_qubits);
    CircuitSpec c{config.n_qubits, {}};
    for (uint32_t q = 0; q < config.n_qubits; q++) {
        c.gates.push_back(Gate::ry(q, x[q]));
    }
    return c;
}

CircuitSpec build_dense_angle(std::span<const double> x, const FeatureMapConfig &config) {
    check_config(config);
    require_dim(config, x.size(), 2 * size_t{config.n_qubits});
    CircuitSpec c{config.n_qubits, {}};
    for (uint32_t q = 0; q < config.n_qubits; q++) {
        c.gates.push_back(Gate::ry(q, x[2 * q]));
        c.gates.push_back(Gate::p(q, x[2 * q + 1]));
    }
    return c;
}

CircuitSpec build_phase_encoding(std::span<const double> x, const FeatureMapConfig &config) {
    check_config(config);
    require_dim(config, x.size(), config.n_qubits);
    CircuitSpec c{config.n_qubits, {}};
    hadamard_layer(c);
    for (uint32_t q = 0; q < config.n_qubits; q++) {
        c.gates.push_back(Gate::p(q, x[q]));
    }
    return c;
}

CircuitSpec build_pauli_map(std::span<const double> x, const FeatureMapConfig &config) {
    FeatureMapConfig checked = config;
    checked.kind = MapKind::Pauli;
    validate_feature_dim(checked, x.size());

    std::vector<std::vector<std::vector<uint32_t>>> subsets;
    for (const auto &word : config.pauli_strings) {
        subsets.push_back(pauli_subsets(word.size(), config));
    }

    CircuitSpec c{config.n_qubits, {}};
    for (uint32_t r = 0; r < config.reps; r++) {
        hadamard_layer(c);
        for (size_t w = 0; w < config.pauli_strings.size(); w++) {
            const auto &word = config.pauli_strings[w];
            for (const auto &s : subsets[w]) {
                size_t m = s.size();
                double angle;
                if (m == 1) {
                    angle = 2 * x[s[0]];
                } else {
                    angle = 2;
                    for (uint32_t q : s) {
                        angle *= PI - x[q];
                    }
                }
                for (size_t k = 0; k < m; k++) {
                    basis_change(c, word[k], s[k], false);
                }
                for (size_t k = 0; k + 1 < m; k++) {
                    c.gates.push_back(Gate::cx(s[k], s[k + 1]));
                }
                c.gates.push_back(Gate::p(s[m - 1], angle));
                for (size_t k = m - 1; k > 0; k--) {
                    c.gates.push_back(Gate::cx(s[k - 1], s[k]));
                }
                for (size_t k = 0; k < m; k++) {
                    basis_change(c, word[k], s[k], true);
                }
            }
        }
    }
    return c;
}

CircuitSpec build_feature_map(std::span<const double> x, const FeatureMapConfig &config, const ThetaParameters &theta) {
    switch (config.kind) {
        case MapKind::ZZ:
            return build_zz_map(x, config);
        case MapKind::Z:
            return build_z_map(x, config);
        case MapKind::EfficientSU2:
            return build_efficient_su2(x, theta, config);
        case MapKind::DenseAngle:
            return build_dense_angle(x, config);
        case MapKind::Angle:
            return build_angle_encoding(x, config);
        case MapKind::Phase:
            return build_phase_encoding(x, config);
        case MapKind::Pauli:
            return build_pauli_map(x, config);
    }
    throw std::logic_error("unhandled map kind");
}

StateVector encode(std::span<const double> x, const FeatureMapConfig &config, const ThetaParameters &theta) {
    return run_circuit(build_feature_map(x, config, theta));
}

}  // namespace qkm
