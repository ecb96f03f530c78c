#include "metaselect/metafeatures.hpp"
#include "metaselect/errors.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace metaselect;

TEST_CASE("column_gradient matches the hand-computed oracle") {
    // scaled column is already in [0,1]; |diffs| = 0.5, 0.5, 0.75 -> mean 0.5833...
    CHECK(column_gradient({0.0, 0.5, 1.0, 0.25}) ==
          doctest::Approx(0.5833333333333334).epsilon(1e-12));
}

TEST_CASE("column_gradient is scale-invariant via internal minmax") {
    const double base = column_gradient({0.0, 0.5, 1.0, 0.25});
    CHECK(column_gradient({10.0, 15.0, 20.0, 12.5}) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("column_gradient degenerate cases give zero") {
    CHECK(column_gradient({7.0, 7.0, 7.0}) == 0.0);
    CHECK(column_gradient({3.0}) == 0.0);
}

TEST_CASE("extract matches the frozen 4-row mixed-table oracle") {
    auto table = test_util::make_table(
        "mixed", {test_util::numeric_col("x", {0.0, 0.5, 1.0, 0.25}),
                  test_util::numeric_col("y", {0.0, 1.0, 2.0, 0.5}),
                  test_util::cat_col("c", {"a", "b", "a", "b"}),
                  test_util::cat_col("t", {"pos", "neg", "pos", "neg"})});
    MetaFeatureVector mf = extract(table);
    CHECK(mf.n_rows == 4);
    CHECK(mf.n_cols == 3);  // predictors only
    CHECK(mf.rows_to_cols == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(mf.n_discrete == 1);
    CHECK(mf.max_factors == 2);
    CHECK(mf.min_factors == 2);
    CHECK(mf.avg_factors == 2.0);
    CHECK(mf.n_continuous == 2);
    // y scales to the same [0,1] profile as x, so both gradients are 0.58333...
    const double g = 0.5833333333333334;
    CHECK(mf.grad_avg == doctest::Approx(g).epsilon(1e-12));
    CHECK(mf.grad_min == doctest::Approx(g).epsilon(1e-12));
    CHECK(mf.grad_max == doctest::Approx(g).epsilon(1e-12));
    CHECK(mf.grad_std == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("extract zero-fills factor stats without categoricals and gradients without numerics") {
    auto numeric_only = test_util::separable_table("nums", 12, 3);
    MetaFeatureVector a = extract(numeric_only);
    CHECK(a.n_discrete == 0);
    CHECK(a.max_factors == 0);
    CHECK(a.min_factors == 0);
    CHECK(a.avg_factors == 0);

    auto cat_only = test_util::make_table(
        "cats", {test_util::cat_col("c", {"a", "b", "c", "a"}),
                 test_util::cat_col("t", {"pos", "neg", "pos", "neg"})});
    MetaFeatureVector b = extract(cat_only);
    CHECK(b.n_continuous == 0);
    CHECK(b.grad_avg == 0);
    CHECK(b.grad_min == 0);
    CHECK(b.grad_max == 0);
    CHECK(b.grad_std == 0);
    CHECK(b.max_factors == 3);
}

TEST_CASE("grad_std uses the population convention") {
    // two numeric columns with gradients g1 and g2: population std = |g1-g2|/2
    auto table = test_util::make_table(
        "two", {test_util::numeric_col("x", {0, 1, 0, 1}),      // gradient 1.0
                test_util::numeric_col("y", {0, 0.5, 1.0, 0.25}),  // gradient 0.58333...
                test_util::cat_col("t", {"pos", "neg", "pos", "neg"})});
    MetaFeatureVector mf = extract(table);
    const double g1 = 1.0;
    const double g2 = 0.5833333333333334;
    CHECK(mf.grad_avg == doctest::Approx((g1 + g2) / 2).epsilon(1e-12));
    CHECK(mf.grad_min == doctest::Approx(g2).epsilon(1e-12));
    CHECK(mf.grad_max == doctest::Approx(g1).epsilon(1e-12));
    CHECK(mf.grad_std == doctest::Approx((g1 - g2) / 2).epsilon(1e-12));
}

TEST_CASE("field lookup follows the canonical order") {
    MetaFeatureVector mf;
    mf.n_rows = 10;
    mf.grad_std = 0.25;
    CHECK(mf.field("n_rows") == 10);
    CHECK(mf.field("grad_std") == 0.25);
    CHECK_THROWS_AS(mf.field("bogus"), ConfigError);

    const auto& names = MetaFeatureVector::field_names();
    CHECK(names.front() == std::string("n_rows"));
    CHECK(names.back() == std::string("grad_std"));
    auto arr = mf.as_array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        CHECK(mf.field(names[i]) == arr[i]);
    }
}

TEST_CASE("metafeatures json round-trips exactly") {
    auto table = test_util::separable_table("rt", 30, 9);
    MetaFeatureVector mf = extract(table);
    MetaFeatureVector back = metafeatures_from_json(metafeatures_to_json(mf));
    CHECK(back.as_array() == mf.as_array());
    // canonical field order in the serialized document
    const std::string text = metafeatures_to_json(mf);
    CHECK(text.find("n_rows") < text.find("n_cols"));
    CHECK(text.find("n_cols") < text.find("rows_to_cols"));
    CHECK(text.find("grad_max") < text.find("grad_std"));
}
