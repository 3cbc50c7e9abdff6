#include "somstream/som.hpp"

#include <limits>

namespace somstream {

namespace {

GridPos axial_from_offset(int row, int col) {
    // odd-r offset to axial
    return {col - (row - (row & 1)) / 2, row};
}

}  // namespace

SomGrid init_grid(int d, const std::vector<std::vector<double>>& training,
                  std::uint64_t rng_seed) {
    if (d < 1) throw std::invalid_argument("init_grid: d must be >= 1");
    if (training.empty()) throw std::invalid_argument("init_grid: empty training set");

    Rng rng(rng_seed);
    SomGrid grid;
    grid.grid_dim = d;
    grid.neurons.reserve(static_cast<std::size_t>(d) * d);
    for (int row = 0; row < d; ++row) {
        for (int col = 0; col < d; ++col) {
            Neuron n;
            n.pos = axial_from_offset(row, col);
            const auto& sample = training[rng.index(training.size())];
            n.weight.resize(sample.size());
            for (std::size_t f = 0; f < sample.size(); ++f)
                n.weight[f] = sample[f] + rng.uniform(-0.01, 0.01);
            grid.neurons.push_back(std::move(n));
        }
    }
    return grid;
}

std::size_t best_matching(const SomGrid& grid, std::span<const double> x) {
    if (grid.neurons.empty()) throw std::invalid_argument("best_matching: empty grid");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.neurons.size(); ++i) {
        double d = euclidean_distance(x, grid.neurons[i].weight);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::pair<std::size_t, double>> sort_neurons(const SomGrid& grid,
                                                         std::span<const double> x) {
    if (grid.neurons.empty()) throw std::invalid_argument("sort_neurons: empty grid");
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(grid.neurons.size());
    for (std::size_t i = 0; i < grid.neurons.size(); ++i)
        out.emplace_back(i, euclidean_distance(x, grid.neurons[i].weight));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return out;
}

SomGrid batch_train(SomGrid grid, const std::vector<std::vector<double>>& X,
                    const BatchTrainConfig& cfg) {
    if (X.empty()) throw std::invalid_argument("batch_train: empty training set");

    const std::size_t n_neurons = grid.neurons.size();
    const std::size_t n_features = grid.neurons.front().weight.size();
    double r0 = cfg.initial_radius >= 0.0
                    ? cfg.initial_radius
                    : std::ceil(grid.grid_dim / 2.0);
    double r1 = cfg.final_radius;

    std::vector<int> assignment(X.size());
    std::vector<std::vector<double>> sums(n_neurons, std::vector<double>(n_features));
    std::vector<std::size_t> counts(n_neurons);

    auto assign_pass = [&] {
        std::fill(counts.begin(), counts.end(), 0);
        for (auto& s : sums) std::fill(s.begin(), s.end(), 0.0);
        for (std::size_t i = 0; i < X.size(); ++i) {
            std::size_t b = best_matching(grid, X[i]);
            assignment[i] = static_cast<int>(b);
            ++counts[b];
            for (std::size_t f = 0; f < n_features; ++f) sums[b][f] += X[i][f];
        }
    };

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        double radius =
            cfg.max_epochs > 1
                ? r0 - (r0 - r1) * static_cast<double>(epoch) / (cfg.max_epochs - 1)
                : r0;

        assign_pass();

        // New weight = mean over the union of sub-lists within the radius.
        double max_move = 0.0;
        std::vector<std::vector<double>> new_weights(n_neurons);
        for (std::size_t b = 0; b < n_neurons; ++b) {
            std::vector<double> acc(n_features, 0.0);
            std::size_t total = 0;
            for (std::size_t o = 0; o < n_neurons; ++o) {
                if (hex_distance(grid.neurons[b].pos, grid.neurons[o].pos) <= radius) {
                    total += counts[o];
                    for (std::size_t f = 0; f < n_features; ++f) acc[f] += sums[o][f];
                }
            }
            if (total == 0) {
                new_weights[b] = grid.neurons[b].weight;  // frozen for this epoch
                continue;
            }
            for (std::size_t f = 0; f < n_features; ++f)
                acc[f] /= static_cast<double>(total);
            new_weights[b] = std::move(acc);
        }
        for (std::size_t b = 0; b < n_neurons; ++b) {
            max_move = std::max(
                max_move, euclidean_distance(grid.neurons[b].weight, new_weights[b]));
            grid.neurons[b].weight = std::move(new_weights[b]);
        }
        if (max_move < cfg.convergence_tol) break;
    }

    // Final assignment against the converged weights fixes mapped_count.
    assign_pass();
    for (std::size_t b = 0; b < n_neurons; ++b)
        grid.neurons[b].mapped_count = static_cast<int>(counts[b]);
    return grid;
}

SomGrid prune(SomGrid grid) {
    std::vector<Neuron> kept;
    for (auto& n : grid.neurons)
        if (n.mapped_count >= 4) kept.push_back(std::move(n));
    if (kept.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < grid.neurons.size(); ++i)
            if (grid.neurons[i].mapped_count > grid.neurons[best].mapped_count) best = i;
        kept.push_back(std::move(grid.neurons[best]));
    }
    grid.neurons = std::move(kept);
    return grid;
}

void incremental_update(SomGrid& grid, std::size_t b, std::span<const double> x,
                        double eta) {
    if (b >= grid.neurons.size())
        throw std::invalid_argument("incremental_update: neuron index out of range");
    auto& w = grid.neurons[b].weight;
    if (x.size() != w.size())
        throw std::invalid_argument("incremental_update: length mismatch");
    for (std::size_t f = 0; f < w.size(); ++f) w[f] += eta * (x[f] - w[f]);
}

}  // namespace somstream
