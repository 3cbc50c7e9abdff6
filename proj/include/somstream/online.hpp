#pragma once

#include <cstdint>
#include <vector>

#include "somstream/model.hpp"

namespace somstream {

/// Per-class neuron rankings for one instance: the full sorted list, the
/// winning neuron index, and its discriminant output.
struct RankedNeurons {
    std::vector<std::vector<std::pair<std::size_t, double>>> sorted;
    std::vector<std::size_t> win_neuron;
    std::vector<double> win_output;
};

/// Mutable state of the online phase. With adapt_enabled = false the model is
/// never touched (frozen baseline).
struct OnlineState {
    Model model;
    double eta = 0.05;
    bool adapt_enabled = true;
    std::uint64_t rejects = 0;
    std::vector<std::pair<std::uint64_t, LabelSet>> predictions_log;

    explicit OnlineState(Model m, double learning_rate = 0.05, bool adapt = true)
        : model(std::move(m)), eta(learning_rate), adapt_enabled(adapt) {
        if (eta <= 0.0 || eta >= 1.0)
            throw std::invalid_argument("OnlineState: eta must be in (0,1)");
    }
};

RankedNeurons rank_all_maps(const Model& model, std::span<const double> x);

/// Iterative kNN elimination over the merged neuron lists: take the k nearest
/// remaining neurons, majority-vote on map ownership, append the winner and
/// drop its map, repeat. Vote ties go to the tied class owning the nearest
/// selected neuron, then the lowest class index. Returns a permutation of all
/// class indices.
std::vector<int> rank_classes_knn(const RankedNeurons& ranked, int k);

/// Label-set assembly: the top kNN class is always assigned; candidates at
/// rank 2..ceil(z) join when their Bayes score clears the winning neuron's
/// threshold. Uses the cardinality value from before this instance's update.
LabelSet classify(const Model& model, const RankedNeurons& ranked,
                  const std::vector<int>& win_classes);

/// Unsupervised adaptation after a prediction: weight nudge + average-output
/// update for each predicted class, then cardinality, counts, probabilities,
/// and thresholds. Expects counts.n_total already advanced for this instance.
void adapt(OnlineState& state, std::span<const double> x, const RankedNeurons& ranked,
           const LabelSet& prediction);

/// Full per-instance pipeline: scale, rank, kNN, classify, adapt, log.
/// Returns the prediction.
LabelSet process_instance(OnlineState& state, const Instance& instance);

/// Runs every instance through process_instance in order; malformed instances
/// are skipped and tallied in state.rejects.
void process_stream(OnlineState& state, const std::vector<Instance>& stream);

}  // namespace somstream
