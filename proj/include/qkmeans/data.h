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
#include <string>
#include <variant>
#include <vector>

#include "qkmeans/common.h"

namespace qkm {

/// A column reference: a header name, or a zero-based position.
using ColumnRef = std::variant<std::string, size_t>;

struct CsvSchema {
    ColumnRef label_column;
    std::vector<ColumnRef> feature_columns;  // Empty selects every non-label column.
    bool has_header = true;
};

struct Dataset {
    Matrix features;             // n x d
    std::vector<int> labels;     // class indices; used only for evaluation
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    uint64_t fingerprint = 0;

    size_t size() const { return features.rows(); }
    size_t dim() const { return features.cols(); }
    size_t num_classes() const { return class_names.size(); }

    /// Hash over feature names, feature values and labels.
    uint64_t compute_fingerprint() const;
};

/// Parses a comma-separated file. Class names become indices in order of first appearance.
///
/// Throws NotFoundError (missing file), SchemaError (missing column), ParseError (non-numeric
/// feature cell, with row and column) and ValidationError (fewer than 2 rows, empty label).
Dataset load_csv(const std::filesystem::path &path, const CsvSchema &schema);

/// Keeps the requested columns in the order given. Throws std::invalid_argument for unknown
/// columns and ValidationError for an empty selection.
Dataset select_features(const Dataset &ds, const std::vector<ColumnRef> &columns);

enum class ScalingKind : uint8_t { None, Standard, MinMax, StandardThenMinMax };

const char *scaling_name(ScalingKind kind);
ScalingKind parse_scaling(std::string_view name);

/// A fitted scaler. Standard scaling uses the population standard deviation; a constant
/// feature keeps std = 1 (so it maps to 0). Min-max maps a constant feature to `lo`.
struct ScalingSpec {
    ScalingKind kind = ScalingKind::Standard;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<double> mins;  // of the (standardized, if applicable) input to the min-max stage
    std::vector<double> maxs;

    std::vector<double> apply(std::span<const double> x) const;
};

struct ScaledDataset {
    Dataset dataset;
    ScalingSpec spec;
};

ScaledDataset fit_scale(const Dataset &ds, ScalingKind kind, double lo = 0.0, double hi = 1.0);

}  // namespace qkm
