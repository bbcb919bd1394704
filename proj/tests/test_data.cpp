#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "fried/csv.hpp"
#include "fried/errors.hpp"
#include "fried/split.hpp"
#include "fried/synth.hpp"

using namespace fried;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/fried_test_" + name) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

SchemaConfig toy_schema() {
    SchemaConfig schema;
    schema.label_column = "label";
    schema.label_positive = "yes";
    schema.protected_columns = {"group"};
    schema.protected_positive = {"b"};
    schema.categorical_columns = {"color"};
    return schema;
}

}  // namespace

TEST_CASE("csv parser handles quoting") {
    TempFile f("quote.csv",
               "a,b,c\n"
               "1,\"x,y\",\"say \"\"hi\"\"\"\n"
               "2,\"multi\nline\",plain\r\n");
    const auto rows = read_csv(f.path);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][1] == "x,y");
    CHECK(rows[1][2] == "say \"hi\"");
    CHECK(rows[2][1] == "multi\nline");
    CHECK(rows[2][2] == "plain");
}

TEST_CASE("load_csv one-hot width and binarization") {
    TempFile f("toy.csv",
               "age,color,label,group\n"
               "10,red,yes,a\n"
               "20,blue,no,b\n"
               "30,red,yes,b\n");
    const Dataset ds = load_csv(f.path, toy_schema());
    // one numeric column plus a 2-level one-hot
    CHECK(ds.x.cols() == 3);
    CHECK(ds.feature_names == std::vector<std::string>{"age", "color=red", "color=blue"});
    CHECK(ds.y == std::vector<int>{1, 0, 1});
    CHECK(ds.p(0, 0) == 0.0);
    CHECK(ds.p(1, 0) == 1.0);
    CHECK(ds.preprocessing.rows_dropped == 0);
    CHECK(ds.x(0, 1) == 1.0);  // first row is red
    CHECK(ds.x(1, 2) == 1.0);
}

TEST_CASE("load_csv missing column and bad numeric errors") {
    TempFile f("nolabel.csv", "age,color,group\n10,red,a\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, toy_schema()),
                         doctest::Contains("label"), DataError);

    TempFile g("badnum.csv",
               "age,color,label,group\n10,red,yes,a\noops,blue,no,b\n");
    CHECK_THROWS_WITH_AS(load_csv(g.path, toy_schema()), doctest::Contains("age"), DataError);
}

TEST_CASE("load_csv drops incomplete rows and standardizes") {
    TempFile f("missing.csv",
               "age,color,label,group\n"
               "10,red,yes,a\n"
               "?,blue,no,b\n"
               "30,red,yes,b\n"
               "20,,no,a\n"
               "40,blue,no,b\n");
    const Dataset ds = load_csv(f.path, toy_schema());
    CHECK(ds.rows() == 3);
    CHECK(ds.preprocessing.rows_dropped == 2);

    // numeric column is standardized
    double mean = 0.0, var = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) mean += ds.x(r, 0);
    mean /= 3.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) var += (ds.x(r, 0) - mean) * (ds.x(r, 0) - mean);
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::sqrt(var / 3.0) == doctest::Approx(1.0).epsilon(1e-6));

    // de-standardizing reproduces the raw ages
    const auto& t = ds.preprocessing.columns[0];
    CHECK(destandardize(t, ds.x(0, 0)) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(destandardize(t, ds.x(2, 0)) == doctest::Approx(40.0).epsilon(1e-9));
}

TEST_CASE("load_csv adult-style sample matches a hand tally") {
    // 6 complete rows; sex=Male positive protected, income >50K positive label.
    TempFile f("adult.csv",
               "age,workclass,sex,income\n"
               "39, State-gov, Male, <=50K\n"
               "50, Self-emp, Male, >50K\n"
               "38, Private, Female, <=50K\n"
               "28, Private, Female, >50K\n"
               "45, State-gov, Male, >50K\n"
               "31, Private, Female, <=50K\n");
    SchemaConfig schema;
    schema.label_column = "income";
    schema.label_positive = ">50K";
    schema.protected_columns = {"sex"};
    schema.protected_positive = {"Male"};
    schema.categorical_columns = {"workclass"};
    const Dataset ds = load_csv(f.path, schema);
    CHECK(ds.rows() == 6);
    // age + 3 workclass levels
    CHECK(ds.x.cols() == 4);
    // hand-counted: 3 males, 2 of them >50K; 3 females, 1 of them >50K
    double males = 0, male_pos = 0, female_pos = 0;
    for (std::size_t r = 0; r < 6; ++r) {
        if (ds.p(r, 0) == 1.0) {
            males += 1;
            male_pos += ds.y[r];
        } else {
            female_pos += ds.y[r];
        }
    }
    CHECK(males == 3);
    CHECK(male_pos == 2);
    CHECK(female_pos == 1);
}

TEST_CASE("load_csv is deterministic and order-preserving") {
    TempFile f("order.csv",
               "v,label,group\n1,yes,a\n2,no,b\n3,yes,a\n4,no,b\n");
    SchemaConfig schema;
    schema.label_column = "label";
    schema.label_positive = "yes";
    schema.protected_columns = {"group"};
    schema.protected_positive = {"b"};
    const Dataset a = load_csv(f.path, schema);
    const Dataset b = load_csv(f.path, schema);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    // order preserved: raw values recoverable in input order
    for (std::size_t r = 0; r < 4; ++r)
        CHECK(destandardize(a.preprocessing.columns[0], a.x(r, 0)) ==
              doctest::Approx(static_cast<double>(r + 1)).epsilon(1e-9));
}

TEST_CASE("export/reload round trip") {
    const Dataset ds = synth_bias_dataset(200, 0.5, 0.1, 21);
    export_dataset_csv(ds, "/tmp/fried_test_export.csv");
    const Dataset back = load_csv("/tmp/fried_test_export.csv", exported_dataset_schema(ds));
    REQUIRE(back.rows() == ds.rows());
    CHECK(back.y == ds.y);
    CHECK(back.p == ds.p);
    for (std::size_t r = 0; r < ds.rows(); ++r)
        for (std::size_t c = 0; c < ds.x.cols(); ++c) {
            const double raw_a = destandardize(ds.preprocessing.columns[c], ds.x(r, c));
            const double raw_b = destandardize(back.preprocessing.columns[c], back.x(r, c));
            CHECK(raw_a == doctest::Approx(raw_b).epsilon(1e-9));
        }
    std::remove("/tmp/fried_test_export.csv");
}

TEST_CASE("synth_bias endpoints") {
    // bias = 1, no label noise: the label IS the protected attribute
    const Dataset hard = synth_bias_dataset(500, 1.0, 0.0, 3);
    for (std::size_t r = 0; r < hard.rows(); ++r)
        CHECK(hard.y[r] == static_cast<int>(hard.p(r, 0)));

    // bias = 0: the Bayes predictor on the informative features is parity-neutral
    const Dataset fair = synth_bias_dataset(10000, 0.0, 0.0, 4);
    std::vector<int> yhat(fair.rows());
    for (std::size_t r = 0; r < fair.rows(); ++r)
        yhat[r] = fair.x(r, 0) + fair.x(r, 1) > 0.0 ? 1 : 0;
    double rate[2] = {0, 0}, count[2] = {0, 0};
    for (std::size_t r = 0; r < fair.rows(); ++r) {
        const int g = fair.p(r, 0) > 0.5 ? 1 : 0;
        rate[g] += yhat[r];
        count[g] += 1;
    }
    CHECK(std::abs(rate[0] / count[0] - rate[1] / count[1]) < 0.05);

    CHECK_THROWS_AS(synth_bias_dataset(5, 0.5, 0.0, 1), DataError);
    CHECK_THROWS_AS(synth_bias_dataset(100, 1.5, 0.0, 1), ConfigError);
}

TEST_CASE("synth_bias determinism and group rates match the construction") {
    const Dataset a = synth_bias_dataset(4000, 0.6, 0.1, 77);
    const Dataset b = synth_bias_dataset(4000, 0.6, 0.1, 77);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.p == b.p);

    const double expect_p1 = a.preprocessing.extra.at("prob_y1_given_p1");
    const double expect_p0 = a.preprocessing.extra.at("prob_y1_given_p0");
    double pos[2] = {0, 0}, count[2] = {0, 0};
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const int g = a.p(r, 0) > 0.5 ? 1 : 0;
        pos[g] += a.y[r];
        count[g] += 1;
    }
    const double tol = 2.0 / std::sqrt(static_cast<double>(a.rows()));
    CHECK(std::abs(pos[1] / count[1] - expect_p1) < tol);
    CHECK(std::abs(pos[0] / count[0] - expect_p0) < tol);
}

TEST_CASE("synth_shapes renders labeled sprites") {
    const Dataset ds = synth_shapes_dataset(300, ShapeFactor::scale, 0.0, 5);
    CHECK(ds.x.cols() == 256);
    CHECK(ds.p.cols() == 1);
    const Dataset same = synth_shapes_dataset(300, ShapeFactor::scale, 0.0, 5);
    CHECK(ds.x == same.x);

    const Dataset both = synth_shapes_dataset(300, ShapeFactor::scale_and_shape, 0.0, 5);
    CHECK(both.p.cols() == 2);

    // scale filter leaves only large sprites, so the scale bit is constant 1
    const Dataset filtered = synth_shapes_dataset(200, ShapeFactor::scale, 0.75, 6);
    for (std::size_t r = 0; r < filtered.rows(); ++r) CHECK(filtered.p(r, 0) == 1.0);

    // labels split roughly evenly between upper and lower positions
    double ones = 0;
    for (int v : ds.y) ones += v;
    CHECK(ones / 300.0 > 0.3);
    CHECK(ones / 300.0 < 0.7);
}

TEST_CASE("synth_bow dimensions and determinism") {
    const Dataset ds = synth_bow_dataset(100, 200, 9);
    CHECK(ds.x.cols() == 200);
    const Dataset same = synth_bow_dataset(100, 200, 9);
    CHECK(ds.x == same.x);
    CHECK_THROWS_AS(synth_bow_dataset(100, 10, 9), ConfigError);
}

TEST_CASE("train_test_split sizes and stratification") {
    const Dataset ds = synth_bias_dataset(100, 0.5, 0.1, 13);
    const auto split = train_test_split(ds, 0.8, 1);
    CHECK(split.train.size() + split.test.size() == 100);
    // strata rounding can move a couple of rows around the 80/20 line
    CHECK(split.train.size() >= 76);
    CHECK(split.train.size() <= 84);

    std::set<std::size_t> seen(split.train.begin(), split.train.end());
    for (auto i : split.test) CHECK(seen.insert(i).second);
    CHECK(seen.size() == 100);

    CHECK_THROWS_AS(train_test_split(ds, 1.5, 1), ConfigError);
}

TEST_CASE("kfold partitions and per-fold group rates") {
    const Dataset ds = synth_bias_dataset(1000, 0.5, 0.1, 17);
    const auto folds = kfold_indices(ds, 5, 2);
    std::set<std::size_t> all;
    for (const auto& fold : folds)
        for (auto i : fold) CHECK(all.insert(i).second);
    CHECK(all.size() == 1000);

    double global_rate = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) global_rate += ds.p(r, 0);
    global_rate /= 1000.0;
    for (const auto& fold : folds) {
        double rate = 0.0;
        for (auto i : fold) rate += ds.p(i, 0);
        rate /= static_cast<double>(fold.size());
        CHECK(std::abs(rate - global_rate) < 0.05);
    }
}

TEST_CASE("stratification falls back to labels when a joint stratum is empty") {
    Dataset ds = synth_bias_dataset(100, 0.0, 0.0, 31);
    // force an empty (y=1, group=1) stratum
    for (std::size_t r = 0; r < ds.rows(); ++r)
        if (ds.y[r] == 1) ds.p(r, 0) = 0.0;
    bool label_only = false;
    const auto split = train_test_split(ds, 0.8, 3, &label_only);
    CHECK(label_only);
    CHECK(split.train.size() + split.test.size() == 100);
}
