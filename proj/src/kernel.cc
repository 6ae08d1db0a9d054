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

#include "qkmeans/kernel.h"

#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace qkm {

namespace {

constexpr char CACHE_MAGIC[4] = {'Q', 'K', 'M', 'K'};
constexpr uint32_t CACHE_VERSION = 1;

void put_u64(std::string &out, uint64_t v) {
    for (int k = 0; k < 8; k++) {
        out.push_back(static_cast<char>(v >> (8 * k)));
    }
}

void put_u32(std::string &out, uint32_t v) {
    for (int k = 0; k < 4; k++) {
        out.push_back(static_cast<char>(v >> (8 * k)));
    }
}

class Reader {
   public:
    explicit Reader(std::string_view data) : data_(data) {}

    uint64_t u64() { return take(8); }
    uint32_t u32() { return static_cast<uint32_t>(take(4)); }
    uint8_t u8() { return static_cast<uint8_t>(take(1)); }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::string_view bytes(size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    size_t remaining() const { return data_.size() - pos_; }

   private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n) {
            throw StaleCacheError("Kernel cache is truncated.");
        }
    }
    uint64_t take(size_t n) {
        need(n);
        uint64_t v = 0;
        for (size_t k = 0; k < n; k++) {
            v |= uint64_t{static_cast<unsigned char>(data_[pos_ + k])} << (8 * k);
        }
        pos_ += n;
        return v;
    }

    std::string_view data_;
    size_t pos_ = 0;
};

}  // namespace

double fidelity_exact(
    std::span<const double> x, std::span<const double> y, const FeatureMapConfig &config, const ThetaParameters &theta) {
    return fidelity(encode(x, config, theta), encode(y, config, theta));
}

CircuitSpec overlap_circuit(
    std::span<const double> x, std::span<const double> y, const FeatureMapConfig &config, const ThetaParameters &theta) {
    CircuitSpec c = build_feature_map(x, config, theta);
    c.append(build_feature_map(y, config, theta).adjoint());
    return c;
}

double fidelity_inversion_test(
    std::span<const double> x,
    std::span<const double> y,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    uint64_t shots,
    uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("fidelity_inversion_test needs at least one shot.");
    }
    auto counts = sample_counts(run_circuit(overlap_circuit(x, y, config, theta)), shots, seed);
    return static_cast<double>(counts[0]) / static_cast<double>(shots);
}

double fidelity(
    std::span<const double> x,
    std::span<const double> y,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    const FidelityMode &mode) {
    if (mode.is_exact()) {
        return fidelity_exact(x, y, config, theta);
    }
    return fidelity_inversion_test(x, y, config, theta, mode.shots, mode.seed);
}

uint64_t pair_seed(uint64_t seed, uint64_t i, uint64_t j) {
    return seed ^ mix64(mix64(i) ^ (j * 0x9e3779b97f4a7c15ULL));
}

uint64_t kernel_config_digest(const FeatureMapConfig &config, uint64_t theta_seed, const FidelityMode &mode) {
    Fnv1a h;
    h.str(config.canonical()).u64(theta_seed).u64(static_cast<uint64_t>(mode.kind));
    if (!mode.is_exact()) {
        h.u64(mode.shots).u64(mode.seed);
    }
    return h.digest();
}

uint64_t KernelMatrix::config_digest() const {
    return kernel_config_digest(map_config, theta_seed, mode);
}

KernelMatrix kernel_matrix(
    const Matrix &data,
    const FeatureMapConfig &config,
    const ThetaParameters &theta,
    const FidelityMode &mode,
    uint64_t dataset_fingerprint) {
    if (!mode.is_exact() && mode.shots == 0) {
        throw std::invalid_argument("kernel_matrix in shot mode needs at least one shot.");
    }
    size_t n = data.rows();
    KernelMatrix k{Matrix(n, n), config, theta.seed, mode, dataset_fingerprint};

    std::vector<std::optional<StateVector>> states(mode.is_exact() ? n : 0);
    auto state_of = [&](size_t i) -> const StateVector & {
        if (!states[i]) {
            states[i] = encode(data.row(i), config, theta);
        }
        return *states[i];
    };

    for (size_t i = 0; i < n; i++) {
        k.values(i, i) = 1.0;
        for (size_t j = i + 1; j < n; j++) {
            double v;
            try {
                if (mode.is_exact()) {
                    v = qkm::fidelity(state_of(i), state_of(j));
                } else {
                    v = fidelity_inversion_test(
                        data.row(i), data.row(j), config, theta, mode.shots, pair_seed(mode.seed, i, j));
                }
            } catch (const std::exception &e) {
                throw std::invalid_argument(
                    "kernel_matrix failed at pair (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
            }
            k.values(i, j) = v;
            k.values(j, i) = v;
        }
    }
    // A single point never reaches the pair loop, so validate it explicitly.
    if (n == 1) {
        validate_feature_dim(config, data.cols());
    }
    return k;
}

DistanceMatrix to_distance(const KernelMatrix &k) {
    size_t n = k.size();
    DistanceMatrix d{Matrix(n, n)};
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            d.values(i, j) = 1.0 - k.values(i, j);
        }
    }
    return d;
}

void save_kernel(const KernelMatrix &k, const std::filesystem::path &path) {
    std::string out(CACHE_MAGIC, 4);
    put_u32(out, CACHE_VERSION);
    put_u64(out, k.size());
    out.push_back(static_cast<char>(k.mode.kind));
    put_u64(out, k.mode.shots);
    put_u64(out, k.mode.seed);
    put_u64(out, k.config_digest());
    put_u64(out, k.dataset_fingerprint);
    put_u64(out, k.theta_seed);
    std::string text = k.map_config.canonical();
    put_u32(out, static_cast<uint32_t>(text.size()));
    out += text;
    for (double v : k.values.data()) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        put_u64(out, bits);
    }

    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("Cannot open kernel cache '" + path.string() + "' for writing.");
    }
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw IoError("Failed writing kernel cache '" + path.string() + "'.");
    }
}

KernelMatrix load_kernel(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw NotFoundError("Kernel cache '" + path.string() + "' does not exist.");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    std::string raw = ss.str();
    Reader r(raw);

    if (r.bytes(4) != std::string_view(CACHE_MAGIC, 4)) {
        throw StaleCacheError("Kernel cache '" + path.string() + "' has a bad magic header.");
    }
    if (uint32_t version = r.u32(); version != CACHE_VERSION) {
        throw StaleCacheError("Kernel cache '" + path.string() + "' has unsupported version " + std::to_string(version) + ".");
    }
    KernelMatrix k;
    uint64_t n = r.u64();
    uint8_t mode = r.u8();
    if (mode > 1) {
        throw StaleCacheError("Kernel cache '" + path.string() + "' has an unknown fidelity mode.");
    }
    k.mode.kind = static_cast<FidelityMode::Kind>(mode);
    k.mode.shots = r.u64();
    k.mode.seed = r.u64();
    uint64_t stored_digest = r.u64();
    k.dataset_fingerprint = r.u64();
    k.theta_seed = r.u64();
    uint32_t text_len = r.u32();
    try {
        k.map_config = FeatureMapConfig::from_canonical(r.bytes(text_len));
    } catch (const ParseError &e) {
        throw StaleCacheError("Kernel cache '" + path.string() + "': " + e.what());
    }
    if (k.config_digest() != stored_digest) {
        throw StaleCacheError("Kernel cache '" + path.string() + "' header digest does not match its contents.");
    }
    if (n > (1u << 20) || r.remaining() != n * n * 8) {
        throw StaleCacheError("Kernel cache '" + path.string() + "' has the wrong payload size.");
    }
    std::vector<double> values(n * n);
    for (auto &v : values) {
        v = r.f64();
    }
    k.values = Matrix(n, n, std::move(values));
    return k;
}

KernelMatrix load_kernel(
    const std::filesystem::path &path, uint64_t expected_fingerprint, uint64_t expected_config_digest) {
    KernelMatrix k = load_kernel(path);
    if (k.dataset_fingerprint != expected_fingerprint) {
        throw StaleCacheError(
            "Kernel cache '" + path.string() + "' was built for dataset " + hex64(k.dataset_fingerprint) +
            ", expected " + hex64(expected_fingerprint) + ".");
    }
    if (k.config_digest() != expected_config_digest) {
        throw StaleCacheError(
            "Kernel cache '" + path.string() + "' was built for config " + hex64(k.config_digest()) + ", expected " +
            hex64(expected_config_digest) + ".");
    }
    return k;
}

}  // namespace qkm
