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

#include "qkmeans/statevector.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qkmeans/common.h"

namespace qkm {

namespace {

using mat2 = std::array<amplitude_t, 4>;

mat2 single_qubit_matrix(const Gate &g) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    double c = std::cos(g.angle / 2);
    double s = std::sin(g.angle / 2);
    const amplitude_t i{0, 1};
    switch (g.kind) {
        case GateKind::H:
            return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
        case GateKind::X:
            return {0, 1, 1, 0};
        case GateKind::RX:
            return {c, -i * s, -i * s, c};
        case GateKind::RY:
            return {c, -s, s, c};
        case GateKind::RZ:
            return {std::polar(1.0, -g.angle / 2), 0, 0, std::polar(1.0, g.angle / 2)};
        case GateKind::P:
            return {1, 0, 0, std::polar(1.0, g.angle)};
        default:
            throw std::logic_error("not a single-qubit gate");
    }
}

void apply_single(std::vector<amplitude_t> &amps, uint32_t q, const mat2 &m) {
    size_t stride = size_t{1} << q;
    size_t n = amps.size();
    for (size_t base = 0; base < n; base += 2 * stride) {
        for (size_t k = base; k < base + stride; k++) {
            amplitude_t a0 = amps[k];
            amplitude_t a1 = amps[k + stride];
            amps[k] = m[0] * a0 + m[1] * a1;
            amps[k + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

// Diagonal gates touch only the |1> half.
void apply_phase(std::vector<amplitude_t> &amps, size_t mask, amplitude_t phase) {
    for (size_t k = 0; k < amps.size(); k++) {
        if ((k & mask) == mask) {
            amps[k] *= phase;
        }
    }
}

void apply_cx(std::vector<amplitude_t> &amps, uint32_t control, uint32_t target) {
    size_t cbit = size_t{1} << control;
    size_t tbit = size_t{1} << target;
    for (size_t k = 0; k < amps.size(); k++) {
        if ((k & cbit) && !(k & tbit)) {
            std::swap(amps[k], amps[k | tbit]);
        }
    }
}

void check_gate(const Gate &g, uint32_t n_qubits) {
    if (g.target >= n_qubits) {
        throw std::invalid_argument(
            "Gate " + g.str() + " targets qubit " + std::to_string(g.target) + " on a " +
            std::to_string(n_qubits) + "-qubit state.");
    }
    if (is_two_qubit(g.kind)) {
        if (g.control >= n_qubits) {
            throw std::invalid_argument(
                "Gate " + g.str() + " controls qubit " + std::to_string(g.control) + " on a " +
                std::to_string(n_qubits) + "-qubit state.");
        }
        if (g.control == g.target) {
            throw std::invalid_argument("Gate " + g.str() + " has identical control and target.");
        }
    }
}

void check_width(uint32_t n_qubits) {
    if (n_qubits < 1 || n_qubits > MAX_QUBITS) {
        throw std::invalid_argument(
            "Qubit count must be in [1, " + std::to_string(MAX_QUBITS) + "], got " + std::to_string(n_qubits) + ".");
    }
}

}  // namespace

const char *gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H:
            return "H";
        case GateKind::X:
            return "X";
        case GateKind::RX:
            return "RX";
        case GateKind::RY:
            return "RY";
        case GateKind::RZ:
            return "RZ";
        case GateKind::P:
            return "P";
        case GateKind::CX:
            return "CX";
        case GateKind::CP:
            return "CP";
    }
    return "?";
}

bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CX || kind == GateKind::CP;
}

bool is_parameterized(GateKind kind) {
    return kind != GateKind::H && kind != GateKind::X && kind != GateKind::CX;
}

Gate Gate::inverse() const {
    Gate g = *this;
    if (is_parameterized(kind)) {
        g.angle = -angle;
    }
    return g;
}

std::string Gate::str() const {
    std::string out = gate_name(kind);
    if (is_parameterized(kind)) {
        out += "(" + format_double(angle) + ")";
    }
    out += " ";
    if (is_two_qubit(kind)) {
        out += std::to_string(control) + ",";
    }
    out += std::to_string(target);
    return out;
}

CircuitSpec CircuitSpec::adjoint() const {
    CircuitSpec out{n_qubits, {}};
    out.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        out.gates.push_back(it->inverse());
    }
    return out;
}

CircuitSpec &CircuitSpec::append(const CircuitSpec &other) {
    if (other.n_qubits != n_qubits) {
        throw std::invalid_argument("Cannot append circuits of different widths.");
    }
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
    return *this;
}

StateVector::StateVector(uint32_t n_qubits, std::vector<amplitude_t> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    check_width(n_qubits);
    if (amplitudes_.size() != (size_t{1} << n_qubits)) {
        throw std::invalid_argument("Amplitude count must be 2^n_qubits.");
    }
}

double StateVector::norm() const {
    double total = 0;
    for (const auto &a : amplitudes_) {
        total += std::norm(a);
    }
    return std::sqrt(total);
}

StateVector zero_state(uint32_t n_qubits) {
    check_width(n_qubits);
    std::vector<amplitude_t> amps(size_t{1} << n_qubits);
    amps[0] = 1;
    return StateVector(n_qubits, std::move(amps));
}

StateVector apply_gate(StateVector state, const Gate &gate) {
    check_gate(gate, state.n_qubits_);
    auto &amps = state.amplitudes_;
    switch (gate.kind) {
        case GateKind::P:
            apply_phase(amps, size_t{1} << gate.target, std::polar(1.0, gate.angle));
            break;
        case GateKind::CP:
            apply_phase(amps, (size_t{1} << gate.target) | (size_t{1} << gate.control), std::polar(1.0, gate.angle));
            break;
        case GateKind::CX:
            apply_cx(amps, gate.control, gate.target);
            break;
        default:
            apply_single(amps, gate.target, single_qubit_matrix(gate));
    }
    return state;
}

void validate_circuit(const CircuitSpec &circuit) {
    check_width(circuit.n_qubits);
    for (const auto &g : circuit.gates) {
        check_gate(g, circuit.n_qubits);
    }
}

StateVector run_circuit(const CircuitSpec &circuit) {
    return run_circuit(zero_state(circuit.n_qubits), circuit);
}

StateVector run_circuit(StateVector state, const CircuitSpec &circuit) {
    if (state.n_qubits() != circuit.n_qubits) {
        throw std::invalid_argument("Circuit width does not match state width.");
    }
    for (const auto &g : circuit.gates) {
        state = apply_gate(std::move(state), g);
    }
    return state;
}

amplitude_t inner_product(const StateVector &a, const StateVector &b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw std::invalid_argument(
            "inner_product of a " + std::to_string(a.n_qubits()) + "-qubit and a " + std::to_string(b.n_qubits()) +
            "-qubit state.");
    }
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    double re = 0;
    double im = 0;
    for (size_t k = 0; k < x.size(); k++) {
        // conj(x) * y
        re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
        im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
    }
    return {re, im};
}

double fidelity(const StateVector &a, const StateVector &b) {
    return std::norm(inner_product(a, b));
}

std::vector<uint64_t> sample_counts(const StateVector &state, uint64_t shots, uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("shots must be at least 1.");
    }
    auto amps = state.amplitudes();
    std::vector<double> cumulative(amps.size());
    double total = 0;
    for (size_t k = 0; k < amps.size(); k++) {
        total += std::norm(amps[k]);
        cumulative[k] = total;
    }
    std::vector<uint64_t> counts(amps.size(), 0);
    std::mt19937_64 rng(seed);
    for (uint64_t s = 0; s < shots; s++) {
        double u = unit_double(rng()) * total;
        // First index whose cumulative mass exceeds u; zero-probability outcomes are never chosen.
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        size_t k = it == cumulative.end() ? amps.size() - 1 : static_cast<size_t>(it - cumulative.begin());
        counts[k]++;
    }
    return counts;
}

std::map<std::string, uint64_t> sample_bitstrings(const StateVector &state, uint64_t shots, uint64_t seed) {
    auto counts = sample_counts(state, shots, seed);
    std::map<std::string, uint64_t> out;
    for (size_t k = 0; k < counts.size(); k++) {
        if (counts[k] > 0) {
            out[basis_bitstring(k, state.n_qubits())] = counts[k];
        }
    }
    return out;
}

std::string basis_bitstring(size_t index, uint32_t n_qubits) {
    std::string s(n_qubits, '0');
    for (uint32_t q = 0; q < n_qubits; q++) {
        if ((index >> q) & 1) {
            s[n_qubits - 1 - q] = '1';
        }
    }
    return s;
}

}  // namespace qkm
