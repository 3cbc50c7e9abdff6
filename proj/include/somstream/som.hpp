#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "somstream/core.hpp"

namespace somstream {

/// Axial coordinates on the hexagonal lattice.
struct GridPos {
    int q = 0;
    int r = 0;
    bool operator==(const GridPos&) const = default;
};

inline int hex_distance(GridPos a, GridPos b) {
    int dq = a.q - b.q;
    int dr = a.r - b.r;
    int ds = -dq - dr;
    return (std::abs(dq) + std::abs(dr) + std::abs(ds)) / 2;
}

struct Neuron {
    std::vector<double> weight;
    int mapped_count = 0;  // instances assigned in the last batch pass
    GridPos pos;
};

/// One class map: up to d*d neurons on a hexagonal 2-d grid.
struct SomGrid {
    std::vector<Neuron> neurons;
    int grid_dim = 0;

    std::size_t size() const { return neurons.size(); }
    bool operator==(const SomGrid&) const = default;
};

inline bool operator==(const Neuron& a, const Neuron& b) {
    return a.weight == b.weight && a.mapped_count == b.mapped_count && a.pos == b.pos;
}

struct BatchTrainConfig {
    int max_epochs = 100;
    double convergence_tol = 1e-6;
    double initial_radius = -1.0;  // < 0 means ceil(d/2)
    double final_radius = 0.0;
    std::uint64_t rng_seed = 0;
};

/// d*d grid with weights seeded from random training instances plus +-0.01
/// uniform noise per feature. Deterministic for a fixed seed.
SomGrid init_grid(int d, const std::vector<std::vector<double>>& training,
                  std::uint64_t rng_seed);

/// Index of the nearest neuron; distance ties go to the lowest index.
std::size_t best_matching(const SomGrid& grid, std::span<const double> x);

/// All neurons ordered by ascending distance to x, ties by lowest index.
std::vector<std::pair<std::size_t, double>> sort_neurons(const SomGrid& grid,
                                                         std::span<const double> x);

/// Batch Kohonen training: assign instances to best-matching neurons, then
/// replace each weight with the mean over its neighborhood's sub-lists. The
/// neighborhood is a hard radius in hex lattice distance, shrinking linearly
/// over epochs. Stops on convergence or max_epochs; a final assignment pass
/// records mapped_count per neuron.
SomGrid batch_train(SomGrid grid, const std::vector<std::vector<double>>& X,
                    const BatchTrainConfig& cfg);

/// Drops neurons with fewer than four mapped instances. If that would empty
/// the map, keeps the single neuron with the largest count (ties by index).
SomGrid prune(SomGrid grid);

/// m_b <- m_b + eta * (x - m_b). Only neuron b changes.
void incremental_update(SomGrid& grid, std::size_t b, std::span<const double> x,
                        double eta);

}  // namespace somstream
