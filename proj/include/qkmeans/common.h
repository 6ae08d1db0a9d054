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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qkm {

/// Dense row-major matrix of doubles.
class Matrix {
   public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(size_t rows, size_t cols, std::vector<double> data);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    double &operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
    double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double> &data() const { return data_; }
    std::vector<double> &data() { return data_; }

    bool operator==(const Matrix &) const = default;

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

// Error kinds surfaced by the library. Invalid arguments use std::invalid_argument.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StaleCacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a accumulator. Used for content fingerprints and config digests.
class Fnv1a {
   public:
    Fnv1a &bytes(const void *data, size_t n);
    Fnv1a &u64(uint64_t v);
    Fnv1a &f64(double v);
    Fnv1a &str(std::string_view s);
    uint64_t digest() const { return state_; }

   private:
    uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex64(uint64_t v);

/// splitmix64 finalizer; mixes seeds for per-item derived streams.
uint64_t mix64(uint64_t v);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_double(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound) by rejection. `next` yields uniform 64-bit words.
template <typename Engine>
uint64_t bounded(Engine &next, uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    while (true) {
        uint64_t r = next();
        if (r < limit) {
            return r % bound;
        }
    }
}

/// Round-trippable decimal rendering of a double (shortest of %.17g precision that parses back).
std::string format_double(double v);

}  // namespace qkm
