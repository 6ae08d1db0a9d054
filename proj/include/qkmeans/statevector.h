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

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qkm {

using amplitude_t = std::complex<double>;

constexpr uint32_t MAX_QUBITS = 12;

enum class GateKind : uint8_t { H, X, RX, RY, RZ, P, CX, CP };

const char *gate_name(GateKind kind);
bool is_two_qubit(GateKind kind);
bool is_parameterized(GateKind kind);

/// A single gate. `control` is meaningful for CX and CP only; `angle` for RX, RY, RZ, P and CP.
struct Gate {
    GateKind kind = GateKind::H;
    uint32_t target = 0;
    uint32_t control = 0;
    double angle = 0.0;

    bool operator==(const Gate &) const = default;

    static Gate h(uint32_t q) { return {GateKind::H, q, 0, 0.0}; }
    static Gate x(uint32_t q) { return {GateKind::X, q, 0, 0.0}; }
    static Gate rx(uint32_t q, double theta) { return {GateKind::RX, q, 0, theta}; }
    static Gate ry(uint32_t q, double theta) { return {GateKind::RY, q, 0, theta}; }
    static Gate rz(uint32_t q, double theta) { return {GateKind::RZ, q, 0, theta}; }
    static Gate p(uint32_t q, double phi) { return {GateKind::P, q, 0, phi}; }
    static Gate cx(uint32_t control, uint32_t target) { return {GateKind::CX, target, control, 0.0}; }
    static Gate cp(uint32_t control, uint32_t target, double phi) { return {GateKind::CP, target, control, phi}; }

    /// The gate's inverse: negated angle for rotations and phases, itself for H, X and CX.
    Gate inverse() const;

    std::string str() const;
};

/// Ordered gate list; gates apply left to right.
struct CircuitSpec {
    uint32_t n_qubits = 1;
    std::vector<Gate> gates;

    bool operator==(const CircuitSpec &) const = default;

    /// The adjoint circuit: gates reversed, each replaced by its inverse.
    CircuitSpec adjoint() const;
    /// Appends other's gates (qubit counts must match).
    CircuitSpec &append(const CircuitSpec &other);
};

/// Dense amplitudes of an n-qubit register. Qubit 0 is the least significant bit of the basis index.
class StateVector {
   public:
    /// Throws std::invalid_argument if n is out of range or the length is not 2^n.
    StateVector(uint32_t n_qubits, std::vector<amplitude_t> amplitudes);

    uint32_t n_qubits() const { return n_qubits_; }
    size_t size() const { return amplitudes_.size(); }
    std::span<const amplitude_t> amplitudes() const { return amplitudes_; }
    amplitude_t operator[](size_t k) const { return amplitudes_[k]; }
    double norm() const;

    friend StateVector apply_gate(StateVector state, const Gate &gate);

   private:
    uint32_t n_qubits_;
    std::vector<amplitude_t> amplitudes_;
};

StateVector zero_state(uint32_t n_qubits);

/// Returns `state` transformed by `gate`. Throws std::invalid_argument on bad qubit indices.
StateVector apply_gate(StateVector state, const Gate &gate);

/// Throws std::invalid_argument if any gate is out of range for the circuit width.
void validate_circuit(const CircuitSpec &circuit);

StateVector run_circuit(const CircuitSpec &circuit);

/// Continues evolving `state` through every gate of `circuit`.
StateVector run_circuit(StateVector state, const CircuitSpec &circuit);

/// Sum over k of conj(a_k) * b_k.
amplitude_t inner_product(const StateVector &a, const StateVector &b);

/// |<a|b>|^2.
double fidelity(const StateVector &a, const StateVector &b);

/// Per-basis-index counts from `shots` independent measurements of all qubits.
std::vector<uint64_t> sample_counts(const StateVector &state, uint64_t shots, uint64_t seed);

/// Bitstring (most significant qubit first) to count, for outcomes observed at least once.
std::map<std::string, uint64_t> sample_bitstrings(const StateVector &state, uint64_t shots, uint64_t seed);

std::string basis_bitstring(size_t index, uint32_t n_qubits);

}  // namespace qkm
