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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "test_util.h"

using namespace qkm;
using qkm::testing::data_path;
using qkm::testing::temp_dir;

namespace {

std::filesystem::path write_csv(const std::string &name, const std::string &content) {
    auto dir = temp_dir("data_" + name);
    auto p = dir / (name + ".csv");
    std::ofstream(p) << content;
    return p;
}

CsvSchema schema(ColumnRef label) {
    CsvSchema s;
    s.label_column = std::move(label);
    return s;
}

}  // namespace

TEST(Csv, LoadsIris) {
    Dataset ds = load_csv(data_path("iris.csv"), schema(std::string("species")));
    EXPECT_EQ(ds.size(), 150u);
    EXPECT_EQ(ds.dim(), 4u);
    EXPECT_EQ(ds.class_names, (std::vector<std::string>{"setosa", "versicolor", "virginica"}));
    EXPECT_EQ(ds.feature_names[2], "petal_length");
    EXPECT_DOUBLE_EQ(ds.features(0, 0), 5.1);
    EXPECT_EQ(ds.labels[0], 0);
    EXPECT_EQ(ds.labels[149], 2);
    EXPECT_EQ(ds.fingerprint, ds.compute_fingerprint());
}

TEST(Csv, LoadsBreastCancer) {
    Dataset ds = load_csv(data_path("breast_cancer.csv"), schema(std::string("diagnosis")));
    EXPECT_EQ(ds.size(), 569u);
    EXPECT_EQ(ds.dim(), 30u);
    EXPECT_EQ(ds.num_classes(), 2u);
}

TEST(Csv, FingerprintStableAndSensitive) {
    auto a = write_csv("fp_a", "x,y,c\n1,2,p\n3,4,q\n");
    auto b = write_csv("fp_b", "x,y,c\n1,2,p\n3,4.5,q\n");
    Dataset da = load_csv(a, schema(std::string("c")));
    EXPECT_EQ(da.fingerprint, load_csv(a, schema(std::string("c"))).fingerprint);
    EXPECT_NE(da.fingerprint, load_csv(b, schema(std::string("c"))).fingerprint);
}

TEST(Csv, QuotedFieldsAndIndexColumns) {
    auto p = write_csv("quoted", "\"a\",\"b, c\",label\n1,2,\"x, y\"\n3,4,z\n");
    Dataset ds = load_csv(p, schema(size_t{2}));
    EXPECT_EQ(ds.feature_names[1], "b, c");
    EXPECT_EQ(ds.class_names[0], "x, y");
    CsvSchema s = schema(size_t{2});
    s.feature_columns = {size_t{1}};
    EXPECT_EQ(load_csv(p, s).dim(), 1u);
}

TEST(Csv, NoHeader) {
    auto p = write_csv("noheader", "1,2,a\n3,4,b\n");
    CsvSchema s = schema(size_t{2});
    s.has_header = false;
    Dataset ds = load_csv(p, s);
    EXPECT_EQ(ds.size(), 2u);
    EXPECT_DOUBLE_EQ(ds.features(1, 1), 4.0);
}

TEST(Csv, Errors) {
    EXPECT_THROW(load_csv(data_path("missing.csv"), schema(std::string("c"))), NotFoundError);
    auto good = write_csv("err_good", "x,y,c\n1,2,p\n3,4,q\n");
    EXPECT_THROW(load_csv(good, schema(std::string("nope"))), SchemaError);
    CsvSchema s = schema(std::string("c"));
    s.feature_columns = {std::string("z")};
    EXPECT_THROW(load_csv(good, s), SchemaError);

    auto bad_cell = write_csv("err_cell", "x,y,c\n1,2,p\n3,abc,q\n");
    try {
        load_csv(bad_cell, schema(std::string("c")));
        FAIL();
    } catch (const ParseError &e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("abc"), std::string::npos) << msg;
    }
    EXPECT_THROW(load_csv(write_csv("err_nan", "x,c\n1,p\nnan,q\n"), schema(std::string("c"))), ParseError);
    EXPECT_THROW(load_csv(write_csv("err_one", "x,c\n1,p\n"), schema(std::string("c"))), ValidationError);
    EXPECT_THROW(load_csv(write_csv("err_label", "x,c\n1,p\n2,\n"), schema(std::string("c"))), ValidationError);
}

TEST(Select, OrderAndErrors) {
    Dataset ds = load_csv(data_path("iris.csv"), schema(std::string("species")));
    Dataset sel = select_features(ds, {std::string("petal_width"), size_t{0}});
    EXPECT_EQ(sel.feature_names, (std::vector<std::string>{"petal_width", "sepal_length"}));
    EXPECT_DOUBLE_EQ(sel.features(0, 0), ds.features(0, 3));
    EXPECT_NE(sel.fingerprint, ds.fingerprint);
    EXPECT_EQ(sel.fingerprint, sel.compute_fingerprint());
    EXPECT_THROW(select_features(ds, {std::string("nope")}), std::invalid_argument);
    EXPECT_THROW(select_features(ds, {size_t{4}}), std::invalid_argument);
    EXPECT_THROW(select_features(ds, {}), ValidationError);
}

TEST(Scaling, StandardUsesPopulationStd) {
    Dataset ds = load_csv(data_path("iris.csv"), schema(std::string("species")));
    ScaledDataset s = fit_scale(ds, ScalingKind::Standard);
    for (size_t j = 0; j < 4; j++) {
        double mean = 0, var = 0;
        for (size_t i = 0; i < 150; i++) mean += s.dataset.features(i, j);
        mean /= 150;
        for (size_t i = 0; i < 150; i++) var += std::pow(s.dataset.features(i, j) - mean, 2);
        EXPECT_NEAR(mean, 0.0, 1e-12);
        EXPECT_NEAR(var / 150, 1.0, 1e-12);
    }
}

TEST(Scaling, MinMaxRangeAndConstantColumn) {
    auto p = write_csv("minmax", "x,k,c\n1,5,a\n3,5,b\n2,5,a\n");
    Dataset ds = load_csv(p, schema(std::string("c")));
    ScaledDataset s = fit_scale(ds, ScalingKind::MinMax, 0.0, 3.0);
    EXPECT_DOUBLE_EQ(s.dataset.features(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.dataset.features(1, 0), 3.0);
    EXPECT_DOUBLE_EQ(s.dataset.features(2, 0), 1.5);
    EXPECT_DOUBLE_EQ(s.dataset.features(1, 1), 0.0);
    ScaledDataset st = fit_scale(ds, ScalingKind::Standard);
    EXPECT_DOUBLE_EQ(st.dataset.features(0, 1), 0.0);
    EXPECT_THROW(fit_scale(ds, ScalingKind::MinMax, 1.0, 1.0), std::invalid_argument);
}

TEST(Scaling, TransformReproducesFit) {
    Dataset ds = load_csv(data_path("iris.csv"), schema(std::string("species")));
    for (auto k : {ScalingKind::None, ScalingKind::Standard, ScalingKind::MinMax, ScalingKind::StandardThenMinMax}) {
        ScaledDataset s = fit_scale(ds, k, 0.0, 3.14);
        for (size_t i = 0; i < 150; i += 13) {
            auto row = s.spec.apply(ds.features.row(i));
            for (size_t j = 0; j < 4; j++) {
                EXPECT_NEAR(row[j], s.dataset.features(i, j), 1e-12);
            }
        }
        EXPECT_EQ(parse_scaling(scaling_name(k)), k);
    }
    EXPECT_THROW(parse_scaling("robust"), std::invalid_argument);
}

TEST(Scaling, StandardThenMinMaxInRange) {
    Dataset ds = load_csv(data_path("iris.csv"), schema(std::string("species")));
    ScaledDataset s = fit_scale(ds, ScalingKind::StandardThenMinMax, 0.0, 3.0);
    for (double v : s.dataset.features.data()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 3.0);
    }
    // Min-max after standardization equals min-max of the raw column.
    ScaledDataset direct = fit_scale(ds, ScalingKind::MinMax, 0.0, 3.0);
    for (size_t i = 0; i < s.dataset.features.data().size(); i++) {
        EXPECT_NEAR(s.dataset.features.data()[i], direct.dataset.features.data()[i], 1e-12);
    }
}
