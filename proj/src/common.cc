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

#include "qkmeans/common.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace qkm {

Matrix::Matrix(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix data size does not match rows*cols.");
    }
}

Fnv1a &Fnv1a::bytes(const void *data, size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (size_t k = 0; k < n; k++) {
        state_ ^= p[k];
        state_ *= 0x100000001b3ULL;
    }
    return *this;
}

Fnv1a &Fnv1a::u64(uint64_t v) {
    unsigned char buf[8];
    for (int k = 0; k < 8; k++) {
        buf[k] = static_cast<unsigned char>(v >> (8 * k));
    }
    return bytes(buf, 8);
}

Fnv1a &Fnv1a::f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return u64(bits);
}

Fnv1a &Fnv1a::str(std::string_view s) {
    u64(s.size());
    return bytes(s.data(), s.size());
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

uint64_t mix64(uint64_t v) {
    v += 0x9e3779b97f4a7c15ULL;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
}

std::string format_double(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; precision++) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

}  // namespace qkm
