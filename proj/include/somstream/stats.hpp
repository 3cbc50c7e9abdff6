#pragma once

#include <cstdint>
#include <vector>

#include "somstream/core.hpp"
#include "somstream/som.hpp"

namespace somstream {

/// Co-occurrence counts: t[j][j] = instances labeled j, t[j][k] = instances
/// labeled both j and k. n_total counts every instance seen (offline + online).
struct CountMatrix {
    int n = 0;
    std::uint64_t n_total = 0;
    std::vector<std::uint64_t> t;  // n*n, row-major

    CountMatrix() = default;
    explicit CountMatrix(int n_classes)
        : n(n_classes), t(static_cast<std::size_t>(n_classes) * n_classes, 0) {}

    std::uint64_t& at(int j, int k) { return t[static_cast<std::size_t>(j) * n + k]; }
    std::uint64_t at(int j, int k) const { return t[static_cast<std::size_t>(j) * n + k]; }
    bool operator==(const CountMatrix&) const = default;
};

/// p[j][k] = p(y_j | y_k) = t[j][k] / t[k][k]; diagonal holds priors t[j][j] / N.
struct ProbMatrix {
    int n = 0;
    std::vector<double> p;

    ProbMatrix() = default;
    explicit ProbMatrix(int n_classes)
        : n(n_classes), p(static_cast<std::size_t>(n_classes) * n_classes, 0.0) {}

    double& at(int j, int k) { return p[static_cast<std::size_t>(j) * n + k]; }
    double at(int j, int k) const { return p[static_cast<std::size_t>(j) * n + k]; }
    bool operator==(const ProbMatrix&) const = default;
};

enum class AvgOutputMode {
    Cumulative,   // online updates add exp(-distance) to the stored value
    RunningMean,  // online updates keep the mean over all hits
};

/// Per-map, per-neuron average outputs, acceptance thresholds, and hit counts
/// (offline assignment sizes, advanced online).
struct NeuronStats {
    std::vector<std::vector<double>> avg_output;
    std::vector<std::vector<double>> threshold;
    std::vector<std::vector<std::uint64_t>> hit_count;
    bool operator==(const NeuronStats&) const = default;
};

CountMatrix build_counts(const std::vector<LabelSet>& labelsets, int n);

ProbMatrix probabilities_from_counts(const CountMatrix& counts);

/// Maps each instance to its best neuron and averages the discriminant per
/// neuron. Returns (avg_output, assigned count) per neuron; unassigned
/// neurons get 0.
std::pair<std::vector<double>, std::vector<std::uint64_t>> average_outputs(
    const SomGrid& grid, const std::vector<std::vector<double>>& X_class);

/// threshold = p(y_j) * prod over k != j with p(y_k|y_j) > 0 of p(y_k|y_j),
/// times the neuron's average output. Zero conditionals are skipped so the
/// product never collapses.
double neuron_threshold(int class_j, const ProbMatrix& probs, double avg_output);

/// Adds one labeled instance to the counts: diagonal for each class, both
/// off-diagonal cells for each unordered pair. n_total is the caller's.
void update_counts(CountMatrix& counts, const LabelSet& labels);

/// z_N = ((N-1) * z_{N-1} + |Y_N|) / N, with N counting the new instance.
LabelCardinality update_cardinality(const LabelCardinality& prev, const LabelSet& labels,
                                    std::uint64_t n);

/// Cumulative form: returns avg_prev + exp(-||x - m_b||), with m_b already
/// nudged toward x.
double update_average_output(double avg_prev, std::span<const double> x,
                             std::span<const double> m_b);

/// In-place per-mode variant used by the online phase; advances the hit count.
void apply_output_update(double& avg, std::uint64_t& hits, double output,
                         AvgOutputMode mode);

/// Recomputes every neuron's threshold from the current probabilities and
/// average outputs.
void update_thresholds(NeuronStats& stats, const ProbMatrix& probs);

}  // namespace somstream
