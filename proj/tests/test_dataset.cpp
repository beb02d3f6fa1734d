#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dualband/dataset.hpp"

using namespace dualband;

namespace {

Example make_example(double d, double theta, double cm, int label) {
    Example ex;
    ex.features[Feature::d] = d;
    ex.features[Feature::theta] = theta;
    ex.features[Feature::cm_power] = cm;
    ex.label = label;
    return ex;
}

Dataset numbered_dataset(int n) {
    // Distinct d values double as identities for split bookkeeping.
    Dataset ds;
    for (int i = 0; i < n; ++i) ds.examples.push_back(make_example(i + 1.0, 0.0, i * 0.5, i % 2));
    return ds;
}

}  // namespace

TEST_CASE("feature names round trip and unknown names are rejected") {
    for (int i = 0; i < kFeatureCount; ++i) {
        const Feature f = static_cast<Feature>(i);
        CHECK(feature_from_name(feature_name(f)) == f);
    }
    CHECK_THROWS_WITH_AS(feature_from_name("dd"), "unknown feature name: 'dd'", std::invalid_argument);
}

TEST_CASE("feature vector range invariants") {
    FeatureVector fv;
    CHECK_THROWS_AS(fv.validate(), std::invalid_argument);  // all absent
    fv[Feature::d] = 0.0;
    CHECK_THROWS_AS(fv.validate(), std::invalid_argument);
    fv[Feature::d] = 10.0;
    CHECK_NOTHROW(fv.validate());
    fv[Feature::theta] = 4.0;
    CHECK_THROWS_AS(fv.validate(), std::invalid_argument);
    fv[Feature::theta] = -3.0;
    CHECK_NOTHROW(fv.validate());
    fv[Feature::delay] = -1e-9;
    CHECK_THROWS_AS(fv.validate(), std::invalid_argument);
    fv[Feature::delay] = 1e-7;
    CHECK_NOTHROW(fv.validate());
}

TEST_CASE("make_combo canonicalizes, names the combo, rejects bad input") {
    const FeatureCombo c = make_combo({"theta", "d"});
    CHECK(c.to_string() == "d,theta");  // canonical order
    CHECK(c.contains(Feature::d));
    CHECK(c.contains(Feature::theta));
    CHECK(!c.contains(Feature::cm_power));
    CHECK_THROWS_AS(make_combo({}), std::invalid_argument);
    CHECK_THROWS_AS(make_combo({"d", "d"}), std::invalid_argument);
    CHECK_THROWS_AS(make_combo({"dist"}), std::invalid_argument);
}

TEST_CASE("select_features projects and reports missing features by index") {
    Dataset ds = numbered_dataset(3);
    const Dataset proj = select_features(ds, make_combo({"d"}));
    REQUIRE(proj.n() == 3);
    CHECK(proj.examples[1].features.has(Feature::d));
    CHECK(!proj.examples[1].features.has(Feature::theta));
    CHECK(proj.examples[1].label == ds.examples[1].label);

    ds.examples[2].features[Feature::theta].reset();
    CHECK_THROWS_WITH_AS(select_features(ds, make_combo({"theta"})),
                         "example 2 is missing feature 'theta'", std::invalid_argument);
}

TEST_CASE("fit_scaler standardizes with sample std and log10 on distance") {
    Dataset ds;
    ds.examples.push_back(make_example(10.0, 0.0, 3.0, 0));
    ds.examples.push_back(make_example(1000.0, 0.0, -3.0, 1));
    const Scaler s = fit_scaler(ds, make_combo({"d", "cm_power"}));
    REQUIRE(s.features.size() == 2);
    CHECK(s.use_log10[0]);   // d
    CHECK(!s.use_log10[1]);  // cm_power
    CHECK(s.offset[0] == doctest::Approx(2.0).epsilon(1e-15));            // mean of log10 {1, 3}
    CHECK(s.scale[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));  // sample std
    CHECK(s.offset[1] == doctest::Approx(0.0).epsilon(1).scale(1e-15));
    CHECK(s.scale[1] == doctest::Approx(4.242640687119285).epsilon(1e-15));
    CHECK(s.transform(0, 100.0) == doctest::Approx(0.0).epsilon(1).scale(1e-15));
    CHECK(s.transform(1, 3.0) == doctest::Approx(3.0 / 4.242640687119285).epsilon(1e-15));
}

TEST_CASE("fit_scaler rejects tiny and degenerate inputs") {
    Dataset one;
    one.examples.push_back(make_example(5.0, 0.0, 1.0, 0));
    CHECK_THROWS_AS(fit_scaler(one, make_combo({"d"})), std::invalid_argument);

    Dataset flat;
    flat.examples.push_back(make_example(5.0, 0.0, 1.0, 0));
    flat.examples.push_back(make_example(5.0, 0.1, 2.0, 1));
    CHECK_THROWS_WITH_AS(fit_scaler(flat, make_combo({"d"})),
                         "degenerate scale: feature 'd' has zero variance", std::invalid_argument);
}

TEST_CASE("apply_scaler transforms exactly the scaler's features") {
    Dataset ds;
    ds.examples.push_back(make_example(10.0, 0.25, 3.0, 0));
    ds.examples.push_back(make_example(1000.0, -0.25, -3.0, 1));
    const Scaler s = fit_scaler(ds, make_combo({"cm_power"}));
    const Dataset out = apply_scaler(s, ds);
    CHECK(*out.examples[0].features[Feature::cm_power] ==
          doctest::Approx(3.0 / 4.242640687119285).epsilon(1e-15));
    // untouched features pass through
    CHECK(*out.examples[0].features[Feature::d] == 10.0);
    CHECK(*out.examples[0].features[Feature::theta] == 0.25);
}

TEST_CASE("split_random produces the documented 52/13/35 and 1040/260/700 cuts") {
    const Dataset ds100 = numbered_dataset(100);
    const SplitResult r100 = split_random(ds100, {0.65, 0.2, 1});
    CHECK(r100.train.n() == 52);
    CHECK(r100.validation.n() == 13);
    CHECK(r100.test.n() == 35);

    const Dataset ds2000 = numbered_dataset(2000);
    const SplitResult r2000 = split_random(ds2000, {0.65, 0.2, 1});
    CHECK(r2000.train.n() == 1040);
    CHECK(r2000.validation.n() == 260);
    CHECK(r2000.test.n() == 700);
}

TEST_CASE("split_random partitions: disjoint union for every small n") {
    for (int n = 8; n <= 30; ++n) {
        const Dataset ds = numbered_dataset(n);
        const SplitResult r = split_random(ds, {0.65, 0.2, static_cast<std::uint64_t>(n)});
        std::multiset<double> seen;
        for (const Dataset* part : {&r.train, &r.validation, &r.test})
            for (const Example& ex : part->examples) seen.insert(*ex.features[Feature::d]);
        REQUIRE(seen.size() == static_cast<std::size_t>(n));
        std::multiset<double> expected;
        for (const Example& ex : ds.examples) expected.insert(*ex.features[Feature::d]);
        CHECK(seen == expected);
    }
}

TEST_CASE("split_random is seed-deterministic and seed-sensitive") {
    const Dataset ds = numbered_dataset(50);
    const SplitResult a = split_random(ds, {0.65, 0.2, 9});
    const SplitResult b = split_random(ds, {0.65, 0.2, 9});
    const SplitResult c = split_random(ds, {0.65, 0.2, 10});
    REQUIRE(a.train.n() == b.train.n());
    bool identical_ab = true, identical_ac = true;
    for (std::size_t i = 0; i < a.train.n(); ++i) {
        identical_ab &= *a.train.examples[i].features[Feature::d] == *b.train.examples[i].features[Feature::d];
        identical_ac &= *a.train.examples[i].features[Feature::d] == *c.train.examples[i].features[Feature::d];
    }
    CHECK(identical_ab);
    CHECK(!identical_ac);
}

TEST_CASE("split_random rejects parts that would be empty or bad fractions") {
    CHECK_THROWS_AS(split_random(numbered_dataset(2), {0.65, 0.2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(split_random(numbered_dataset(100), {1.0, 0.2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(split_random(numbered_dataset(100), {0.65, 0.0, 0}), std::invalid_argument);
}

TEST_CASE("split_two cuts round-half-up and partitions") {
    const Dataset ds = numbered_dataset(11);
    const auto [a, b] = split_two(ds, 0.5, 3);  // round(5.5) = 6
    CHECK(a.n() == 6);
    CHECK(b.n() == 5);
    std::multiset<double> seen;
    for (const Dataset* part : {&a, &b})
        for (const Example& ex : part->examples) seen.insert(*ex.features[Feature::d]);
    CHECK(seen.size() == 11);
    CHECK_THROWS_AS(split_two(numbered_dataset(1), 0.5, 0), std::invalid_argument);
}

TEST_CASE("majority baseline error is the label-1 fraction") {
    Dataset ds;
    for (int label : {1, 1, 0, 1}) ds.examples.push_back(make_example(1.0, 0.0, 0.0, label));
    CHECK(majority_baseline_error(ds) == 0.75);
    CHECK_THROWS_AS(majority_baseline_error(Dataset{}), std::invalid_argument);
}
