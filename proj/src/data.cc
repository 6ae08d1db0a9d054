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

#include "qkmeans/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace qkm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t k = 0; k < line.size(); k++) {
        char ch = line[k];
        if (quoted) {
            if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur.push_back('"');
                k++;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

std::string column_label(const ColumnRef &ref) {
    if (const auto *name = std::get_if<std::string>(&ref)) {
        return "'" + *name + "'";
    }
    return "#" + std::to_string(std::get<size_t>(ref));
}

// Position of `ref` among `names`, or npos.
size_t find_column(const ColumnRef &ref, const std::vector<std::string> &names, bool names_known) {
    if (const auto *pos = std::get_if<size_t>(&ref)) {
        return *pos < names.size() ? *pos : std::string::npos;
    }
    if (!names_known) {
        return std::string::npos;
    }
    const auto &name = std::get<std::string>(ref);
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return k;
        }
    }
    return std::string::npos;
}

bool parse_number(std::string_view cell, double &out) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

uint64_t Dataset::compute_fingerprint() const {
    Fnv1a h;
    h.u64(features.rows()).u64(features.cols());
    for (const auto &name : feature_names) {
        h.str(name);
    }
    for (double v : features.data()) {
        h.f64(v);
    }
    for (int label : labels) {
        h.u64(static_cast<uint64_t>(label));
    }
    return h.digest();
}

Dataset load_csv(const std::filesystem::path &path, const CsvSchema &schema) {
    std::ifstream f(path);
    if (!f) {
        throw NotFoundError("Dataset file '" + path.string() + "' does not exist.");
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> line_numbers;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        line_no++;
        if (trim(line).empty()) {
            continue;
        }
        rows.push_back(split_record(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) {
        throw ValidationError("Dataset file '" + path.string() + "' is empty.");
    }

    std::vector<std::string> names;
    size_t first_data = 0;
    if (schema.has_header) {
        names = rows[0];
        first_data = 1;
    } else {
        for (size_t k = 0; k < rows[0].size(); k++) {
            names.push_back("col" + std::to_string(k));
        }
    }
    size_t width = names.size();

    size_t label_col = find_column(schema.label_column, names, schema.has_header);
    if (label_col == std::string::npos) {
        throw SchemaError("Label column " + column_label(schema.label_column) + " not found in '" + path.string() + "'.");
    }
    std::vector<size_t> feature_cols;
    if (schema.feature_columns.empty()) {
        for (size_t k = 0; k < width; k++) {
            if (k != label_col) {
                feature_cols.push_back(k);
            }
        }
    } else {
        for (const auto &ref : schema.feature_columns) {
            size_t c = find_column(ref, names, schema.has_header);
            if (c == std::string::npos) {
                throw SchemaError("Feature column " + column_label(ref) + " not found in '" + path.string() + "'.");
            }
            feature_cols.push_back(c);
        }
    }
    if (feature_cols.empty()) {
        throw SchemaError("Dataset '" + path.string() + "' has no feature columns.");
    }

    size_t n = rows.size() - first_data;
    if (n < 2) {
        throw ValidationError("Dataset '" + path.string() + "' needs at least 2 rows, found " + std::to_string(n) + ".");
    }

    Dataset ds;
    ds.features = Matrix(n, feature_cols.size());
    ds.labels.resize(n);
    for (size_t c : feature_cols) {
        ds.feature_names.push_back(names[c]);
    }
    std::map<std::string, int> class_index;
    for (size_t r = 0; r < n; r++) {
        const auto &row = rows[first_data + r];
        size_t file_line = line_numbers[first_data + r];
        if (row.size() != width) {
            throw ParseError(
                "Row at line " + std::to_string(file_line) + " of '" + path.string() + "' has " +
                std::to_string(row.size()) + " cells, expected " + std::to_string(width) + ".");
        }
        for (size_t k = 0; k < feature_cols.size(); k++) {
            const auto &cell = row[feature_cols[k]];
            double v;
            if (!parse_number(cell, v)) {
                throw ParseError(
                    "Non-numeric feature cell '" + cell + "' at line " + std::to_string(file_line) + ", column " +
                    std::to_string(feature_cols[k]) + " (" + names[feature_cols[k]] + ") of '" + path.string() + "'.");
            }
            ds.features(r, k) = v;
        }
        const auto &label = row[label_col];
        if (label.empty()) {
            throw ValidationError("Empty class label at line " + std::to_string(file_line) + " of '" + path.string() + "'.");
        }
        auto [it, inserted] = class_index.emplace(label, static_cast<int>(ds.class_names.size()));
        if (inserted) {
            ds.class_names.push_back(label);
        }
        ds.labels[r] = it->second;
    }
    ds.fingerprint = ds.compute_fingerprint();
    return ds;
}

Dataset select_features(const Dataset &ds, const std::vector<ColumnRef> &columns) {
    if (columns.empty()) {
        throw ValidationError("Feature selection must keep at least one column.");
    }
    std::vector<size_t> picked;
    for (const auto &ref : columns) {
        size_t c = find_column(ref, ds.feature_names, true);
        if (c == std::string::npos) {
            throw std::invalid_argument("Unknown feature " + column_label(ref) + ".");
        }
        picked.push_back(c);
    }
    Dataset out;
    out.features = Matrix(ds.size(), picked.size());
    for (size_t r = 0; r < ds.size(); r++) {
        for (size_t k = 0; k < picked.size(); k++) {
            out.features(r, k) = ds.features(r, picked[k]);
        }
    }
    for (size_t c : picked) {
        out.feature_names.push_back(ds.feature_names[c]);
    }
    out.labels = ds.labels;
    out.class_names = ds.class_names;
    out.fingerprint = out.compute_fingerprint();
    return out;
}

const char *scaling_name(ScalingKind kind) {
    switch (kind) {
        case ScalingKind::None:
            return "none";
        case ScalingKind::Standard:
            return "standard";
        case ScalingKind::MinMax:
            return "minmax";
        case ScalingKind::StandardThenMinMax:
            return "standard_then_minmax";
    }
    return "?";
}

ScalingKind parse_scaling(std::string_view name) {
    for (auto k : {ScalingKind::None, ScalingKind::Standard, ScalingKind::MinMax, ScalingKind::StandardThenMinMax}) {
        if (name == scaling_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("Unknown scaling '" + std::string(name) + "'.");
}

std::vector<double> ScalingSpec::apply(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    bool standardize = kind == ScalingKind::Standard || kind == ScalingKind::StandardThenMinMax;
    bool minmax = kind == ScalingKind::MinMax || kind == ScalingKind::StandardThenMinMax;
    for (size_t c = 0; c < out.size(); c++) {
        if (standardize) {
            out[c] = (out[c] - means[c]) / stds[c];
        }
        if (minmax) {
            double span = maxs[c] - mins[c];
            out[c] = span > 0 ? lo + (out[c] - mins[c]) / span * (hi - lo) : lo;
        }
    }
    return out;
}

ScaledDataset fit_scale(const Dataset &ds, ScalingKind kind, double lo, double hi) {
    if (ds.dim() < 1) {
        throw std::invalid_argument("fit_scale needs at least one feature.");
    }
    if ((kind == ScalingKind::MinMax || kind == ScalingKind::StandardThenMinMax) && !(lo < hi)) {
        throw std::invalid_argument("Min-max scaling needs lo < hi.");
    }
    size_t n = ds.size();
    size_t d = ds.dim();
    ScalingSpec spec{kind, lo, hi, {}, {}, {}, {}};
    Matrix x = ds.features;

    if (kind == ScalingKind::Standard || kind == ScalingKind::StandardThenMinMax) {
        spec.means.assign(d, 0.0);
        spec.stds.assign(d, 0.0);
        for (size_t c = 0; c < d; c++) {
            double mean = 0;
            for (size_t r = 0; r < n; r++) {
                mean += x(r, c);
            }
            mean /= static_cast<double>(n);
            double var = 0;
            for (size_t r = 0; r < n; r++) {
                double dv = x(r, c) - mean;
                var += dv * dv;
            }
            double sd = std::sqrt(var / static_cast<double>(n));
            spec.means[c] = mean;
            spec.stds[c] = sd > 0 ? sd : 1.0;
            for (size_t r = 0; r < n; r++) {
                x(r, c) = (x(r, c) - mean) / spec.stds[c];
            }
        }
    }
    if (kind == ScalingKind::MinMax || kind == ScalingKind::StandardThenMinMax) {
        spec.mins.assign(d, 0.0);
        spec.maxs.assign(d, 0.0);
        for (size_t c = 0; c < d; c++) {
            double mn = x(0, c);
            double mx = x(0, c);
            for (size_t r = 1; r < n; r++) {
                mn = std::min(mn, x(r, c));
                mx = std::max(mx, x(r, c));
            }
            spec.mins[c] = mn;
            spec.maxs[c] = mx;
            double span = mx - mn;
            for (size_t r = 0; r < n; r++) {
                x(r, c) = span > 0 ? lo + (x(r, c) - mn) / span * (hi - lo) : lo;
                // Endpoint rounding can leave a value a hair outside [lo, hi].
                x(r, c) = std::clamp(x(r, c), lo, hi);
            }
        }
    }

    Dataset out = ds;
    out.features = std::move(x);
    out.fingerprint = out.compute_fingerprint();
    return {std::move(out), std::move(spec)};
}

}  // namespace qkm
