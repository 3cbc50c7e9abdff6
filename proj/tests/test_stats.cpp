#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "somstream/stats.hpp"

using namespace somstream;

namespace {

LabelSet make(std::initializer_list<int> ids) {
    LabelSet y;
    for (int c : ids) y.insert(c);
    return y;
}

std::vector<LabelSet> random_labelsets(Rng& rng, int count, int n) {
    std::vector<LabelSet> out;
    for (int i = 0; i < count; ++i) {
        LabelSet y;
        int size = 1 + static_cast<int>(rng.index(3));
        for (int j = 0; j < size; ++j) y.insert(static_cast<int>(rng.index(n)));
        out.push_back(std::move(y));
    }
    return out;
}

void check_count_invariants(const CountMatrix& counts) {
    for (int j = 0; j < counts.n; ++j) {
        CHECK(counts.at(j, j) <= counts.n_total);
        for (int k = 0; k < counts.n; ++k) {
            if (j == k) continue;
            CHECK(counts.at(j, k) == counts.at(k, j));
            CHECK(counts.at(j, k) <= std::min(counts.at(j, j), counts.at(k, k)));
        }
    }
}

}  // namespace

TEST_CASE("build_counts direct cases") {
    auto counts = build_counts({make({0}), make({0, 1})}, 2);
    CHECK(counts.at(0, 0) == 2);
    CHECK(counts.at(1, 1) == 1);
    CHECK(counts.at(0, 1) == 1);
    CHECK(counts.at(1, 0) == 1);
    CHECK(counts.n_total == 2);

    auto disjoint = build_counts({make({0}), make({1}), make({2})}, 3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            if (j != k) CHECK(disjoint.at(j, k) == 0);

    CHECK_THROWS_AS(build_counts({make({5})}, 2), std::invalid_argument);
}

TEST_CASE("build_counts matches nested-loop pair-counting oracle on 200 random instances") {
    Rng rng(123);
    const int n = 5;
    auto labels = random_labelsets(rng, 200, n);
    auto counts = build_counts(labels, n);

    for (int j = 0; j < n; ++j) {
        std::uint64_t diag = 0;
        for (const auto& y : labels)
            if (y.contains(j)) ++diag;
        CHECK(counts.at(j, j) == diag);
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            std::uint64_t pair = 0;
            for (const auto& y : labels)
                if (y.contains(j) && y.contains(k)) ++pair;
            CHECK(counts.at(j, k) == pair);
        }
    }
    check_count_invariants(counts);
}

TEST_CASE("probabilities_from_counts") {
    CountMatrix counts(2);
    counts.n_total = 10;
    counts.at(0, 0) = 5;
    counts.at(1, 1) = 10;
    counts.at(0, 1) = 5;
    counts.at(1, 0) = 5;
    auto probs = probabilities_from_counts(counts);
    CHECK(probs.at(0, 1) == doctest::Approx(0.5));  // f(0,1)/f(1) = 5/10
    CHECK(probs.at(1, 1) == doctest::Approx(1.0));  // diagonal = count/N
    CHECK(probs.at(0, 0) == doctest::Approx(0.5));
    CHECK(probs.at(1, 0) == doctest::Approx(1.0));

    // zero-count column yields zero, not NaN
    CountMatrix zero(2);
    zero.n_total = 3;
    zero.at(0, 0) = 3;
    auto pz = probabilities_from_counts(zero);
    CHECK(pz.at(0, 1) == 0.0);
    CHECK(pz.at(1, 1) == 0.0);
}

TEST_CASE("probabilities match ratio oracle on random counts") {
    Rng rng(9);
    const int n = 4;
    auto labels = random_labelsets(rng, 200, n);
    auto counts = build_counts(labels, n);
    auto probs = probabilities_from_counts(counts);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double expected;
            if (j == k)
                expected = static_cast<double>(counts.at(j, j)) / counts.n_total;
            else
                expected = counts.at(k, k) > 0
                               ? static_cast<double>(counts.at(j, k)) / counts.at(k, k)
                               : 0.0;
            CHECK(probs.at(j, k) == doctest::Approx(expected).epsilon(1e-12));
            CHECK(probs.at(j, k) >= 0.0);
            CHECK(probs.at(j, k) <= 1.0);
        }
}

TEST_CASE("average_outputs") {
    SomGrid grid;
    grid.grid_dim = 1;
    grid.neurons.push_back({{0.0, 0.0}, 4, {0, 0}});

    std::vector<std::vector<double>> on_weight(5, {0.0, 0.0});
    auto [avg1, hits1] = average_outputs(grid, on_weight);
    CHECK(avg1[0] == doctest::Approx(1.0));
    CHECK(hits1[0] == 5);

    std::vector<std::vector<double>> at_one{{1.0, 0.0}};
    auto [avg2, hits2] = average_outputs(grid, at_one);
    CHECK(avg2[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(hits2[0] == 1);
}

TEST_CASE("average_outputs matches two-pass assign-then-average oracle") {
    Rng rng(77);
    SomGrid grid;
    grid.grid_dim = 2;
    for (int i = 0; i < 4; ++i)
        grid.neurons.push_back(
            {{rng.uniform(), rng.uniform()}, 4, {i % 2, i / 2}});
    std::vector<std::vector<double>> X;
    for (int i = 0; i < 60; ++i) X.push_back({rng.uniform(), rng.uniform()});

    auto [avg, hits] = average_outputs(grid, X);

    std::vector<std::vector<std::vector<double>>> assigned(grid.size());
    for (const auto& x : X) assigned[best_matching(grid, x)].push_back(x);
    for (std::size_t b = 0; b < grid.size(); ++b) {
        CHECK(hits[b] == assigned[b].size());
        if (assigned[b].empty()) {
            CHECK(avg[b] == 0.0);
            continue;
        }
        double sum = 0.0;
        for (const auto& x : assigned[b]) sum += discriminant(x, grid.neurons[b].weight);
        CHECK(avg[b] == doctest::Approx(sum / assigned[b].size()).epsilon(1e-12));
    }
}

TEST_CASE("neuron_threshold") {
    // all conditionals zero -> empty product: threshold = p(y_j) * avg
    ProbMatrix probs(3);
    probs.at(0, 0) = 0.4;
    CHECK(neuron_threshold(0, probs, 0.9) == doctest::Approx(0.4 * 0.9));

    // n=2 hand case: p(y_0)=0.5, p(y_1|y_0)=0.4, avg=0.8 -> 0.16
    ProbMatrix two(2);
    two.at(0, 0) = 0.5;
    two.at(1, 0) = 0.4;
    CHECK(neuron_threshold(0, two, 0.8) == doctest::Approx(0.16));
}

TEST_CASE("neuron_threshold matches term-by-term oracle on random 5-class P") {
    Rng rng(31);
    const int n = 5;
    for (int trial = 0; trial < 30; ++trial) {
        ProbMatrix probs(n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                probs.at(j, k) = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        int j = static_cast<int>(rng.index(n));
        double avg = rng.uniform(0.0, 2.0);

        double expected = probs.at(j, j);
        for (int k = 0; k < n; ++k)
            if (k != j && probs.at(k, j) > 0.0) expected *= probs.at(k, j);
        expected *= avg;

        CHECK(neuron_threshold(j, probs, avg) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("neuron_threshold monotone in avg_output and prior") {
    ProbMatrix probs(3);
    probs.at(0, 0) = 0.3;
    probs.at(1, 0) = 0.5;
    probs.at(2, 0) = 0.2;
    double t1 = neuron_threshold(0, probs, 0.4);
    double t2 = neuron_threshold(0, probs, 0.8);
    CHECK(t2 >= t1);
    probs.at(0, 0) = 0.6;
    CHECK(neuron_threshold(0, probs, 0.4) >= t1);
}

TEST_CASE("update_counts single steps") {
    CountMatrix counts(3);
    update_counts(counts, make({2}));
    CHECK(counts.at(2, 2) == 1);
    CHECK(counts.at(0, 0) == 0);
    update_counts(counts, make({0, 1}));
    CHECK(counts.at(0, 0) == 1);
    CHECK(counts.at(1, 1) == 1);
    CHECK(counts.at(0, 1) == 1);
    CHECK(counts.at(1, 0) == 1);
}

TEST_CASE("update_counts replay equals build_counts, invariants hold throughout") {
    Rng rng(222);
    const int n = 6;
    auto history = random_labelsets(rng, 500, n);

    CountMatrix incremental(n);
    for (const auto& y : history) {
        update_counts(incremental, y);
        incremental.n_total += 1;
        check_count_invariants(incremental);
    }
    auto batch = build_counts(history, n);
    CHECK(incremental == batch);

    // probabilities along both routes agree exactly
    CHECK(probabilities_from_counts(incremental) == probabilities_from_counts(batch));
}

TEST_CASE("update_cardinality") {
    LabelCardinality prev{2.0, 1};
    auto next = update_cardinality(prev, make({0}), 2);
    CHECK(next.z == doctest::Approx(1.5));
    CHECK(next.n == 2);

    // |Y| == z is a fixed point
    LabelCardinality fix{2.0, 9};
    auto same = update_cardinality(fix, make({0, 1}), 10);
    CHECK(same.z == doctest::Approx(2.0));
}

TEST_CASE("update_cardinality replay equals batch mean over long histories") {
    Rng rng(404);
    auto history = random_labelsets(rng, 100000, 4);
    LabelCardinality running{0.0, 0};
    for (std::size_t i = 0; i < history.size(); ++i)
        running = update_cardinality(running, history[i], i + 1);
    auto batch = batch_label_cardinality(history);
    CHECK(running.z == doctest::Approx(batch.z).epsilon(1e-9));
    CHECK(running.n == batch.n);
}

TEST_CASE("update_average_output") {
    std::vector<double> m{0.0, 0.0};
    CHECK(update_average_output(1.5, m, m) == doctest::Approx(2.5));
    std::vector<double> x{1.0, 0.0};
    CHECK(update_average_output(0.0, x, m) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("cumulative updates match a running-sum oracle") {
    Rng rng(55);
    std::vector<double> m{0.2, 0.8};
    double avg = 0.7;
    double oracle = 0.7;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x{rng.uniform(), rng.uniform()};
        avg = update_average_output(avg, x, m);
        oracle += std::exp(-euclidean_distance(x, m));
        CHECK(avg == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("apply_output_update running-mean mode keeps the mean over hits") {
    double avg = 0.5;
    std::uint64_t hits = 2;  // mean of two observations totalling 1.0
    apply_output_update(avg, hits, 1.0, AvgOutputMode::RunningMean);
    CHECK(avg == doctest::Approx(2.0 / 3.0));
    CHECK(hits == 3);

    double cum = 0.5;
    std::uint64_t h2 = 2;
    apply_output_update(cum, h2, 1.0, AvgOutputMode::Cumulative);
    CHECK(cum == doctest::Approx(1.5));
    CHECK(h2 == 3);
}

TEST_CASE("update_thresholds") {
    ProbMatrix probs(2);
    probs.at(0, 0) = 0.6;
    probs.at(1, 1) = 0.7;
    probs.at(1, 0) = 0.5;
    probs.at(0, 1) = 0.4;

    NeuronStats stats;
    stats.avg_output = {{0.9, 0.3}, {0.8}};
    stats.threshold = {{0.0, 0.0}, {0.0}};
    stats.hit_count = {{4, 4}, {4}};

    update_thresholds(stats, probs);
    CHECK(stats.threshold[0][0] == doctest::Approx(neuron_threshold(0, probs, 0.9)));
    CHECK(stats.threshold[0][1] == doctest::Approx(neuron_threshold(0, probs, 0.3)));
    CHECK(stats.threshold[1][0] == doctest::Approx(neuron_threshold(1, probs, 0.8)));

    // deterministic: same inputs, same output
    auto copy = stats;
    update_thresholds(copy, probs);
    CHECK(copy.threshold == stats.threshold);

    // zero off-diagonals -> threshold = prior * avg
    ProbMatrix diag(2);
    diag.at(0, 0) = 0.6;
    diag.at(1, 1) = 0.7;
    update_thresholds(stats, diag);
    CHECK(stats.threshold[0][0] == doctest::Approx(0.6 * 0.9));
    CHECK(stats.threshold[1][0] == doctest::Approx(0.7 * 0.8));
}

TEST_CASE("update_thresholds spot-check against direct recomputation") {
    Rng rng(66);
    const int n = 4;
    ProbMatrix probs(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) probs.at(j, k) = rng.uniform();

    NeuronStats stats;
    stats.avg_output.resize(n);
    stats.threshold.resize(n);
    stats.hit_count.resize(n);
    for (int c = 0; c < n; ++c) {
        int m = 1 + static_cast<int>(rng.index(5));
        for (int b = 0; b < m; ++b) stats.avg_output[c].push_back(rng.uniform(0.0, 3.0));
        stats.threshold[c].assign(m, 0.0);
        stats.hit_count[c].assign(m, 4);
    }
    update_thresholds(stats, probs);
    for (int check = 0; check < 20; ++check) {
        int c = static_cast<int>(rng.index(n));
        int b = static_cast<int>(rng.index(stats.avg_output[c].size()));
        CHECK(stats.threshold[c][b] ==
              doctest::Approx(neuron_threshold(c, probs, stats.avg_output[c][b]))
                  .epsilon(1e-12));
    }
}
