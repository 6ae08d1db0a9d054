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

#include "qkmeans/evaluation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qkm {

namespace {

void check_lengths(const std::vector<int> &labels, const std::vector<int> &truth, size_t min_n, const char *what) {
    if (labels.size() != truth.size()) {
        throw std::invalid_argument(
            std::string(what) + ": label vectors differ in length (" + std::to_string(labels.size()) + " vs " +
            std::to_string(truth.size()) + ").");
    }
    if (labels.size() < min_n) {
        throw std::invalid_argument(std::string(what) + " needs at least " + std::to_string(min_n) + " points.");
    }
}

// Dense 0..m-1 relabeling in order of first appearance.
std::vector<size_t> densify(const std::vector<int> &v, size_t &count) {
    std::map<int, size_t> ids;
    std::vector<size_t> out(v.size());
    for (size_t i = 0; i < v.size(); i++) {
        auto [it, inserted] = ids.emplace(v[i], ids.size());
        out[i] = it->second;
    }
    count = ids.size();
    return out;
}

struct Contingency {
    std::vector<std::vector<uint64_t>> cells;  // rows: labels, cols: truth
    std::vector<uint64_t> row_sums;
    std::vector<uint64_t> col_sums;
    uint64_t n = 0;
};

Contingency contingency(const std::vector<int> &labels, const std::vector<int> &truth) {
    size_t r = 0;
    size_t c = 0;
    auto a = densify(labels, r);
    auto b = densify(truth, c);
    Contingency t;
    t.cells.assign(r, std::vector<uint64_t>(c, 0));
    t.row_sums.assign(r, 0);
    t.col_sums.assign(c, 0);
    t.n = labels.size();
    for (size_t i = 0; i < a.size(); i++) {
        t.cells[a[i]][b[i]]++;
        t.row_sums[a[i]]++;
        t.col_sums[b[i]]++;
    }
    return t;
}

double choose2(uint64_t x) {
    return static_cast<double>(x) * static_cast<double>(x > 0 ? x - 1 : 0) / 2.0;
}

double entropy_of(const std::vector<uint64_t> &sums, uint64_t n) {
    double h = 0;
    for (uint64_t s : sums) {
        if (s > 0) {
            double p = static_cast<double>(s) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    }
    return h;
}

double mutual_information_of(const Contingency &t) {
    double mi = 0;
    double n = static_cast<double>(t.n);
    for (size_t i = 0; i < t.row_sums.size(); i++) {
        for (size_t j = 0; j < t.col_sums.size(); j++) {
            uint64_t nij = t.cells[i][j];
            if (nij == 0) {
                continue;
            }
            double v = static_cast<double>(nij);
            mi += v / n * std::log(n * v / (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
        }
    }
    return std::max(mi, 0.0);
}

double expected_mutual_information_of(const Contingency &t) {
    uint64_t n = t.n;
    // log k! for k = 0..n
    std::vector<double> log_fact(n + 1, 0.0);
    for (uint64_t k = 2; k <= n; k++) {
        log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
    }
    double nd = static_cast<double>(n);
    double emi = 0;
    for (uint64_t a : t.row_sums) {
        for (uint64_t b : t.col_sums) {
            uint64_t lo = std::max<int64_t>(1, static_cast<int64_t>(a + b) - static_cast<int64_t>(n));
            uint64_t hi = std::min(a, b);
            double fixed = log_fact[a] + log_fact[b] + log_fact[n - a] + log_fact[n - b] - log_fact[n];
            for (uint64_t nij = lo; nij <= hi; nij++) {
                double v = static_cast<double>(nij);
                double term = v / nd * std::log(nd * v / (static_cast<double>(a) * static_cast<double>(b)));
                double log_p = fixed - log_fact[nij] - log_fact[a - nij] - log_fact[b - nij] - log_fact[n - a - b + nij];
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

}  // namespace

LabelAlignment majority_vote(const std::vector<int> &labels, const std::vector<int> &truth) {
    check_lengths(labels, truth, 1, "majority_vote");
    int max_class = *std::max_element(truth.begin(), truth.end());
    if (*std::min_element(truth.begin(), truth.end()) < 0) {
        throw std::invalid_argument("majority_vote: class indices must be non-negative.");
    }
    LabelAlignment out;
    for (size_t i = 0; i < labels.size(); i++) {
        auto &hist = out.vote_counts[labels[i]];
        hist.resize(static_cast<size_t>(max_class) + 1, 0);
        hist[static_cast<size_t>(truth[i])]++;
    }
    for (const auto &[cluster, hist] : out.vote_counts) {
        // max_element returns the first maximum, i.e. the lowest class index.
        out.cluster_to_class[cluster] = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    }
    return out;
}

double accuracy(const std::vector<int> &labels, const std::vector<int> &truth, const LabelAlignment &alignment) {
    check_lengths(labels, truth, 1, "accuracy");
    uint64_t hits = 0;
    for (size_t i = 0; i < labels.size(); i++) {
        auto it = alignment.cluster_to_class.find(labels[i]);
        if (it == alignment.cluster_to_class.end()) {
            throw std::invalid_argument("accuracy: alignment has no class for cluster " + std::to_string(labels[i]) + ".");
        }
        hits += it->second == truth[i];
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

ConfusionMatrix confusion_matrix(
    const std::vector<int> &labels, const std::vector<int> &truth, const LabelAlignment &alignment, size_t num_classes) {
    check_lengths(labels, truth, 1, "confusion_matrix");
    size_t c = num_classes;
    if (c == 0) {
        c = static_cast<size_t>(*std::max_element(truth.begin(), truth.end())) + 1;
    }
    ConfusionMatrix m(c, std::vector<uint64_t>(c, 0));
    for (size_t i = 0; i < labels.size(); i++) {
        auto t = static_cast<size_t>(truth[i]);
        auto p = static_cast<size_t>(alignment.cluster_to_class.at(labels[i]));
        if (t >= c || p >= c) {
            throw std::invalid_argument("confusion_matrix: class index exceeds the class count.");
        }
        m[t][p]++;
    }
    return m;
}

bool same_partition(const std::vector<int> &a, const std::vector<int> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    size_t ca = 0;
    size_t cb = 0;
    return densify(a, ca) == densify(b, cb);
}

double adjusted_rand_index(const std::vector<int> &labels, const std::vector<int> &truth) {
    check_lengths(labels, truth, 2, "adjusted_rand_index");
    Contingency t = contingency(labels, truth);
    double index = 0;
    for (const auto &row : t.cells) {
        for (uint64_t v : row) {
            index += choose2(v);
        }
    }
    double sum_a = 0;
    for (uint64_t a : t.row_sums) {
        sum_a += choose2(a);
    }
    double sum_b = 0;
    for (uint64_t b : t.col_sums) {
        sum_b += choose2(b);
    }
    double expected = sum_a * sum_b / choose2(t.n);
    double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) {
        return same_partition(labels, truth) ? 1.0 : 0.0;
    }
    return (index - expected) / (max_index - expected);
}

double entropy(const std::vector<int> &labels) {
    size_t m = 0;
    auto dense = densify(labels, m);
    std::vector<uint64_t> sums(m, 0);
    for (size_t v : dense) {
        sums[v]++;
    }
    return entropy_of(sums, labels.size());
}

double mutual_information(const std::vector<int> &labels, const std::vector<int> &truth) {
    check_lengths(labels, truth, 1, "mutual_information");
    return mutual_information_of(contingency(labels, truth));
}

double expected_mutual_information(const std::vector<int> &labels, const std::vector<int> &truth) {
    check_lengths(labels, truth, 1, "expected_mutual_information");
    return expected_mutual_information_of(contingency(labels, truth));
}

double adjusted_mutual_information(const std::vector<int> &labels, const std::vector<int> &truth) {
    check_lengths(labels, truth, 2, "adjusted_mutual_information");
    if (same_partition(labels, truth)) {
        return 1.0;
    }
    Contingency t = contingency(labels, truth);
    double h_labels = entropy_of(t.row_sums, t.n);
    double h_truth = entropy_of(t.col_sums, t.n);
    if (h_labels == 0 && h_truth == 0) {
        return 0.0;
    }
    double mi = mutual_information_of(t);
    double emi = expected_mutual_information_of(t);
    double denominator = 0.5 * (h_labels + h_truth) - emi;
    // Keep the sign but avoid dividing by an exact or rounding-level zero.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (denominator < 0) {
        denominator = std::min(denominator, -eps);
    } else {
        denominator = std::max(denominator, eps);
    }
    return (mi - emi) / denominator;
}

EvaluationReport evaluate(const std::vector<int> &labels, const std::vector<int> &truth, size_t num_classes) {
    LabelAlignment alignment = majority_vote(labels, truth);
    EvaluationReport r;
    r.accuracy = accuracy(labels, truth, alignment);
    r.confusion = confusion_matrix(labels, truth, alignment, num_classes);
    r.ari = labels.size() >= 2 ? adjusted_rand_index(labels, truth) : 1.0;
    r.ami = labels.size() >= 2 ? adjusted_mutual_information(labels, truth) : 1.0;
    return r;
}

}  // namespace qkm
