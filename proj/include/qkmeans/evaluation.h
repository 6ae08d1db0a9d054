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
#include <map>
#include <vector>

namespace qkm {

/// Cluster-to-class mapping obtained by majority vote within each cluster.
struct LabelAlignment {
    std::map<int, int> cluster_to_class;
    std::map<int, std::vector<uint64_t>> vote_counts;  // per cluster, a histogram over classes
};

/// Confusion counts: rows are true classes, columns are aligned predicted classes.
using ConfusionMatrix = std::vector<std::vector<uint64_t>>;

struct EvaluationReport {
    double accuracy = 0;
    ConfusionMatrix confusion;
    double ari = 0;
    double ami = 0;
};

/// Each cluster takes its most frequent true class; ties go to the lower class index.
/// Several clusters may map to the same class.
LabelAlignment majority_vote(const std::vector<int> &labels, const std::vector<int> &truth);

double accuracy(const std::vector<int> &labels, const std::vector<int> &truth, const LabelAlignment &alignment);

/// `num_classes` of 0 means max(truth) + 1.
ConfusionMatrix confusion_matrix(
    const std::vector<int> &labels, const std::vector<int> &truth, const LabelAlignment &alignment, size_t num_classes = 0);

double adjusted_rand_index(const std::vector<int> &labels, const std::vector<int> &truth);

/// AMI with arithmetic-mean normalization, natural logarithms and the exact hypergeometric
/// expectation of the mutual information.
double adjusted_mutual_information(const std::vector<int> &labels, const std::vector<int> &truth);

double mutual_information(const std::vector<int> &labels, const std::vector<int> &truth);
double expected_mutual_information(const std::vector<int> &labels, const std::vector<int> &truth);
double entropy(const std::vector<int> &labels);

/// True when both label vectors induce the same set partition.
bool same_partition(const std::vector<int> &a, const std::vector<int> &b);

EvaluationReport evaluate(const std::vector<int> &labels, const std::vector<int> &truth, size_t num_classes = 0);

}  // namespace qkm
