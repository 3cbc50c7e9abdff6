#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "somstream/core.hpp"

using namespace somstream;

TEST_CASE("euclidean_distance basics") {
    std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
    CHECK(euclidean_distance(a, b) == doctest::Approx(5.0));
    CHECK(euclidean_distance(a, a) == 0.0);
    CHECK(euclidean_distance(a, b) == euclidean_distance(b, a));
    std::vector<double> c{1.0};
    CHECK_THROWS_AS(euclidean_distance(a, c), std::invalid_argument);
}

TEST_CASE("euclidean_distance matches scalar-loop oracle") {
    std::vector<double> a{0.2, 0.7, 0.1}, b{0.5, 0.5, 0.5};
    // independent elementwise summation
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(euclidean_distance(a, b) == doctest::Approx(std::sqrt(s)).epsilon(1e-15));

    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(5), y(5);
        for (int f = 0; f < 5; ++f) {
            x[f] = rng.uniform(-10, 10);
            y[f] = rng.uniform(-10, 10);
        }
        double acc = 0.0;
        for (int f = 0; f < 5; ++f) acc += (x[f] - y[f]) * (x[f] - y[f]);
        CHECK(euclidean_distance(x, y) == doctest::Approx(std::sqrt(acc)).epsilon(1e-14));
    }
}

TEST_CASE("discriminant") {
    std::vector<double> m{0.3, 0.4};
    CHECK(discriminant(m, m) == 1.0);
    std::vector<double> x{1.3, 0.4};  // distance 1
    CHECK(discriminant(x, m) == doctest::Approx(std::exp(-1.0)));
    std::vector<double> x2{0.3 + std::log(2.0), 0.4};  // distance ln 2
    CHECK(discriminant(x2, m) == doctest::Approx(0.5));

    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        std::vector<double> b{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        double v = discriminant(a, b);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        CHECK((v == 1.0) == (a == b));
    }
}

TEST_CASE("batch_label_cardinality") {
    LabelSet a;
    a.insert(0);
    LabelSet ab;
    ab.insert(0);
    ab.insert(1);
    auto lc = batch_label_cardinality({a, ab});
    CHECK(lc.z == doctest::Approx(1.5));
    CHECK(lc.n == 2);

    std::vector<LabelSet> singles(10, a);
    CHECK(batch_label_cardinality(singles).z == doctest::Approx(1.0));

    CHECK_THROWS_AS(batch_label_cardinality({}), std::invalid_argument);
}

TEST_CASE("cardinality of a concatenation is the count-weighted mean of parts") {
    Rng rng(11);
    std::vector<LabelSet> part1, part2;
    for (int i = 0; i < 37; ++i) {
        LabelSet y;
        int count = 1 + static_cast<int>(rng.index(3));
        for (int j = 0; j < count; ++j) y.insert(static_cast<int>(rng.index(5)));
        part1.push_back(y);
    }
    for (int i = 0; i < 23; ++i) {
        LabelSet y;
        y.insert(static_cast<int>(rng.index(5)));
        part2.push_back(y);
    }
    auto z1 = batch_label_cardinality(part1);
    auto z2 = batch_label_cardinality(part2);
    std::vector<LabelSet> all = part1;
    all.insert(all.end(), part2.begin(), part2.end());
    auto za = batch_label_cardinality(all);
    double weighted = (z1.z * z1.n + z2.z * z2.n) / (z1.n + z2.n);
    CHECK(za.z == doctest::Approx(weighted).epsilon(1e-12));
}

TEST_CASE("scale_features") {
    DatasetMeta meta;
    meta.n_features = 3;
    meta.feature_min = {0.0, -1.0, 2.0};
    meta.feature_max = {1.0, 1.0, 2.0};  // third feature degenerate

    auto lo = scale_features({0.0, -1.0, 2.0}, meta);
    CHECK(lo[0] == 0.0);
    CHECK(lo[1] == 0.0);
    CHECK(lo[2] == 0.5);

    auto hi = scale_features({1.0, 1.0, 2.0}, meta);
    CHECK(hi[0] == 1.0);
    CHECK(hi[1] == 1.0);
    CHECK(hi[2] == 0.5);

    auto mid = scale_features({0.5, 0.0, 2.0}, meta);
    CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid[1] == doctest::Approx(0.5).epsilon(1e-12));

    // clamped outside the fitted range
    auto out = scale_features({-3.0, 9.0, 5.0}, meta);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 1.0);

    CHECK_THROWS_AS(scale_features({0.0}, meta), std::invalid_argument);
}

TEST_CASE("scale_features is idempotent under the identity range") {
    DatasetMeta meta;
    meta.n_features = 2;
    meta.feature_min = {0.0, 0.0};
    meta.feature_max = {1.0, 1.0};
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x{rng.uniform(), rng.uniform()};
        auto once = scale_features(x, meta);
        auto twice = scale_features(once, meta);
        CHECK(once == twice);
        CHECK(once == x);
    }
}

TEST_CASE("LabelSet keeps ids sorted and unique") {
    LabelSet y;
    y.insert(3);
    y.insert(1);
    y.insert(3);
    y.insert(0);
    CHECK(y.ids == std::vector<int>{0, 1, 3});
    CHECK(y.contains(1));
    CHECK(!y.contains(2));
}
