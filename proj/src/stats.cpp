#include "somstream/stats.hpp"

namespace somstream {

CountMatrix build_counts(const std::vector<LabelSet>& labelsets, int n) {
    CountMatrix counts(n);
    for (const auto& y : labelsets) {
        for (int c : y.ids)
            if (c < 0 || c >= n)
                throw std::invalid_argument("build_counts: label index out of range");
        update_counts(counts, y);
    }
    counts.n_total = labelsets.size();
    return counts;
}

ProbMatrix probabilities_from_counts(const CountMatrix& counts) {
    ProbMatrix probs(counts.n);
    for (int j = 0; j < counts.n; ++j) {
        for (int k = 0; k < counts.n; ++k) {
            if (j == k) {
                probs.at(j, j) = counts.n_total > 0
                                     ? static_cast<double>(counts.at(j, j)) /
                                           static_cast<double>(counts.n_total)
                                     : 0.0;
            } else {
                std::uint64_t fk = counts.at(k, k);
                probs.at(j, k) =
                    fk > 0 ? static_cast<double>(counts.at(j, k)) / static_cast<double>(fk)
                           : 0.0;
            }
        }
    }
    return probs;
}

std::pair<std::vector<double>, std::vector<std::uint64_t>> average_outputs(
    const SomGrid& grid, const std::vector<std::vector<double>>& X_class) {
    if (X_class.empty())
        throw std::invalid_argument("average_outputs: empty class subset");
    std::vector<double> sums(grid.size(), 0.0);
    std::vector<std::uint64_t> counts(grid.size(), 0);
    for (const auto& x : X_class) {
        std::size_t b = best_matching(grid, x);
        sums[b] += discriminant(x, grid.neurons[b].weight);
        ++counts[b];
    }
    for (std::size_t b = 0; b < grid.size(); ++b)
        if (counts[b] > 0) sums[b] /= static_cast<double>(counts[b]);
    return {std::move(sums), std::move(counts)};
}

double neuron_threshold(int class_j, const ProbMatrix& probs, double avg_output) {
    double tr = probs.at(class_j, class_j);
    for (int k = 0; k < probs.n; ++k) {
        if (k == class_j) continue;
        double cond = probs.at(k, class_j);
        if (cond > 0.0) tr *= cond;
    }
    return tr * avg_output;
}

void update_counts(CountMatrix& counts, const LabelSet& labels) {
    const auto& ids = labels.ids;
    for (std::size_t a = 0; a < ids.size(); ++a) {
        counts.at(ids[a], ids[a]) += 1;
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            counts.at(ids[a], ids[b]) += 1;
            counts.at(ids[b], ids[a]) += 1;
        }
    }
}

LabelCardinality update_cardinality(const LabelCardinality& prev, const LabelSet& labels,
                                    std::uint64_t n) {
    double z = (static_cast<double>(n - 1) * prev.z + static_cast<double>(labels.size())) /
               static_cast<double>(n);
    return {z, n};
}

double update_average_output(double avg_prev, std::span<const double> x,
                             std::span<const double> m_b) {
    return avg_prev + discriminant(x, m_b);
}

void apply_output_update(double& avg, std::uint64_t& hits, double output,
                         AvgOutputMode mode) {
    if (mode == AvgOutputMode::Cumulative) {
        avg += output;
    } else {
        avg = (avg * static_cast<double>(hits) + output) / static_cast<double>(hits + 1);
    }
    ++hits;
}

void update_thresholds(NeuronStats& stats, const ProbMatrix& probs) {
    for (std::size_t j = 0; j < stats.avg_output.size(); ++j)
        for (std::size_t b = 0; b < stats.avg_output[j].size(); ++b)
            stats.threshold[j][b] =
                neuron_threshold(static_cast<int>(j), probs, stats.avg_output[j][b]);
}

}  // namespace somstream
