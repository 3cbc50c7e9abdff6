#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "somstream/core.hpp"
#include "somstream/som.hpp"
#include "somstream/stats.hpp"

namespace somstream {

/// Everything the online phase needs: one pruned map per class, count and
/// probability matrices, label cardinality, per-neuron outputs/thresholds,
/// scaling parameters, and the fixed kNN parameter.
struct Model {
    DatasetMeta meta;
    std::vector<SomGrid> maps;
    CountMatrix counts;
    ProbMatrix probs;
    LabelCardinality cardinality;
    NeuronStats stats;
    int k = 1;
    bool scale_inputs = true;
    AvgOutputMode avg_mode = AvgOutputMode::Cumulative;

    bool operator==(const Model&) const = default;
};

inline bool operator==(const DatasetMeta& a, const DatasetMeta& b) {
    return a.n_features == b.n_features && a.n_classes == b.n_classes &&
           a.feature_min == b.feature_min && a.feature_max == b.feature_max;
}
inline bool operator==(const LabelCardinality& a, const LabelCardinality& b) {
    return a.z == b.z && a.n == b.n;
}

struct OfflineOptions {
    bool scale_inputs = true;
    AvgOutputMode avg_mode = AvgOutputMode::Cumulative;
};

/// One feature-vector subset per class; a multi-label instance is copied into
/// every subset of its labels. Instances without truth are rejected.
std::vector<std::vector<std::vector<double>>> build_class_subsets(
    const std::vector<Instance>& dataset, int n_classes);

/// Full offline pipeline: fit scaling, cardinality, T/P, per-class map
/// training + pruning, average outputs, thresholds, and the odd-k rule
/// (smallest surviving map, minus one if even, floor 1).
Model train_offline(const std::vector<Instance>& dataset, int n_classes, int grid_dim,
                    const BatchTrainConfig& cfg, const OfflineOptions& opt = {});

/// Versioned text document; doubles round-trip via 17 significant digits so
/// load(save(m)) == m field-for-field.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Shortest-round-trip decimal form shared by every file writer.
std::string format_double(double v);

}  // namespace somstream
