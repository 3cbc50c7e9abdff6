#include "somstream/online.hpp"

namespace somstream {

RankedNeurons rank_all_maps(const Model& model, std::span<const double> x) {
    const int n = model.meta.n_classes;
    RankedNeurons ranked;
    ranked.sorted.resize(n);
    ranked.win_neuron.resize(n);
    ranked.win_output.resize(n);
    for (int c = 0; c < n; ++c) {
        ranked.sorted[c] = sort_neurons(model.maps[c], x);
        ranked.win_neuron[c] = ranked.sorted[c].front().first;
        ranked.win_output[c] = std::exp(-ranked.sorted[c].front().second);
    }
    return ranked;
}

std::vector<int> rank_classes_knn(const RankedNeurons& ranked, int k) {
    const int n = static_cast<int>(ranked.sorted.size());
    std::vector<bool> eliminated(n, false);
    std::vector<int> result;
    result.reserve(n);

    for (int round = 0; round < n; ++round) {
        int remaining = n - round;
        if (remaining == 1) {
            for (int c = 0; c < n; ++c)
                if (!eliminated[c]) result.push_back(c);
            break;
        }

        // Merge the remaining maps' sorted lists, picking the k nearest
        // neurons by (distance, class, position). No global re-sort needed.
        std::vector<std::size_t> head(n, 0);
        std::vector<int> votes(n, 0);
        std::vector<int> first_pick(n, -1);  // selection rank of a class's nearest neuron
        std::size_t pool = 0;
        for (int c = 0; c < n; ++c)
            if (!eliminated[c]) pool += ranked.sorted[c].size();
        std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), pool);

        for (std::size_t pick = 0; pick < take; ++pick) {
            int best_c = -1;
            for (int c = 0; c < n; ++c) {
                if (eliminated[c] || head[c] >= ranked.sorted[c].size()) continue;
                if (best_c < 0 ||
                    ranked.sorted[c][head[c]].second < ranked.sorted[best_c][head[best_c]].second)
                    best_c = c;
            }
            ++votes[best_c];
            if (first_pick[best_c] < 0) first_pick[best_c] = static_cast<int>(pick);
            ++head[best_c];
        }

        int winner = -1;
        for (int c = 0; c < n; ++c) {
            if (eliminated[c] || votes[c] == 0) continue;
            if (winner < 0 || votes[c] > votes[winner] ||
                (votes[c] == votes[winner] && first_pick[c] < first_pick[winner]))
                winner = c;
        }
        if (winner < 0) {  // k == 0 cannot happen; guard for empty lists
            for (int c = 0; c < n; ++c)
                if (!eliminated[c]) { winner = c; break; }
        }
        result.push_back(winner);
        eliminated[winner] = true;
    }
    return result;
}

LabelSet classify(const Model& model, const RankedNeurons& ranked,
                  const std::vector<int>& win_classes) {
    const int n = model.meta.n_classes;
    LabelSet prediction;
    prediction.insert(win_classes.front());

    int bound = static_cast<int>(std::ceil(model.cardinality.z));
    bound = std::max(1, std::min(bound, n));
    for (int pos = 1; pos < bound; ++pos) {
        int c = win_classes[pos];
        double score = model.probs.at(c, c);
        for (int d : prediction.ids) {
            double cond = model.probs.at(d, c);
            if (cond > 0.0) score *= cond;  // zero conditionals are skipped
        }
        score *= ranked.win_output[c];
        double tr = model.stats.threshold[c][ranked.win_neuron[c]];
        if (score >= tr) prediction.insert(c);
    }
    return prediction;
}

void adapt(OnlineState& state, std::span<const double> x, const RankedNeurons& ranked,
           const LabelSet& prediction) {
    Model& model = state.model;
    for (int c : prediction.ids) {
        std::size_t b = ranked.win_neuron[c];
        incremental_update(model.maps[c], b, x, state.eta);
        // Average output uses the freshly nudged weight.
        double output = discriminant(x, model.maps[c].neurons[b].weight);
        apply_output_update(model.stats.avg_output[c][b], model.stats.hit_count[c][b],
                            output, model.avg_mode);
    }
    model.cardinality = update_cardinality(model.cardinality, prediction,
                                           model.counts.n_total);
    update_counts(model.counts, prediction);
    model.probs = probabilities_from_counts(model.counts);
    update_thresholds(model.stats, model.probs);
}

namespace {

bool well_formed(const Instance& instance, const Model& model) {
    if (static_cast<int>(instance.features.size()) != model.meta.n_features) return false;
    for (double v : instance.features)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

LabelSet process_instance(OnlineState& state, const Instance& instance) {
    std::vector<double> x = state.model.scale_inputs
                                ? scale_features(instance.features, state.model.meta)
                                : instance.features;
    if (state.adapt_enabled) state.model.counts.n_total += 1;

    RankedNeurons ranked = rank_all_maps(state.model, x);
    std::vector<int> win_classes = rank_classes_knn(ranked, state.model.k);
    LabelSet prediction = classify(state.model, ranked, win_classes);
    if (state.adapt_enabled) adapt(state, x, ranked, prediction);

    state.predictions_log.emplace_back(instance.sequence_id, prediction);
    return prediction;
}

void process_stream(OnlineState& state, const std::vector<Instance>& stream) {
    for (const auto& instance : stream) {
        if (!well_formed(instance, state.model)) {
            ++state.rejects;
            continue;
        }
        process_instance(state, instance);
    }
}

}  // namespace somstream
