#include "somstream/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace somstream {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<std::vector<double>>> build_class_subsets(
    const std::vector<Instance>& dataset, int n_classes) {
    std::vector<std::vector<std::vector<double>>> subsets(n_classes);
    for (const auto& inst : dataset) {
        if (!inst.truth || inst.truth->empty())
            throw std::runtime_error("build_class_subsets: instance " +
                                     std::to_string(inst.sequence_id) +
                                     " has no ground-truth labels");
        for (int c : inst.truth->ids) {
            if (c < 0 || c >= n_classes)
                throw std::runtime_error("build_class_subsets: label out of range at instance " +
                                         std::to_string(inst.sequence_id));
            subsets[c].push_back(inst.features);
        }
    }
    return subsets;
}

Model train_offline(const std::vector<Instance>& dataset, int n_classes, int grid_dim,
                    const BatchTrainConfig& cfg, const OfflineOptions& opt) {
    if (dataset.empty()) throw std::invalid_argument("train_offline: empty dataset");
    const int n_features = static_cast<int>(dataset.front().features.size());

    Model model;
    model.scale_inputs = opt.scale_inputs;
    model.avg_mode = opt.avg_mode;
    model.meta.n_features = n_features;
    model.meta.n_classes = n_classes;
    model.meta.feature_min.assign(n_features, std::numeric_limits<double>::infinity());
    model.meta.feature_max.assign(n_features, -std::numeric_limits<double>::infinity());
    for (const auto& inst : dataset) {
        if (static_cast<int>(inst.features.size()) != n_features)
            throw std::runtime_error("train_offline: ragged feature vector at instance " +
                                     std::to_string(inst.sequence_id));
        for (int f = 0; f < n_features; ++f) {
            if (!std::isfinite(inst.features[f]))
                throw std::runtime_error("train_offline: non-finite feature at instance " +
                                         std::to_string(inst.sequence_id));
            model.meta.feature_min[f] = std::min(model.meta.feature_min[f], inst.features[f]);
            model.meta.feature_max[f] = std::max(model.meta.feature_max[f], inst.features[f]);
        }
    }

    std::vector<Instance> scaled = dataset;
    if (opt.scale_inputs)
        for (auto& inst : scaled) inst.features = scale_features(inst.features, model.meta);

    std::vector<LabelSet> labels;
    labels.reserve(scaled.size());
    for (const auto& inst : scaled) {
        if (!inst.truth || inst.truth->empty())
            throw std::runtime_error("train_offline: unlabeled instance " +
                                     std::to_string(inst.sequence_id));
        labels.push_back(*inst.truth);
    }

    model.cardinality = batch_label_cardinality(labels);
    model.counts = build_counts(labels, n_classes);
    model.probs = probabilities_from_counts(model.counts);

    auto subsets = build_class_subsets(scaled, n_classes);
    std::vector<int> missing;
    for (int c = 0; c < n_classes; ++c)
        if (subsets[c].empty()) missing.push_back(c);
    if (!missing.empty()) {
        std::string msg = "train_offline: no training instances for classes:";
        for (int c : missing) msg += " " + std::to_string(c);
        throw std::runtime_error(msg);
    }

    model.maps.resize(n_classes);
    model.stats.avg_output.resize(n_classes);
    model.stats.threshold.resize(n_classes);
    model.stats.hit_count.resize(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        BatchTrainConfig class_cfg = cfg;
        class_cfg.rng_seed = cfg.rng_seed + 0x9e3779b97f4a7c15ULL * (c + 1);
        SomGrid grid = init_grid(grid_dim, subsets[c], class_cfg.rng_seed);
        grid = prune(batch_train(std::move(grid), subsets[c], class_cfg));
        auto [avg, hits] = average_outputs(grid, subsets[c]);
        model.maps[c] = std::move(grid);
        model.stats.avg_output[c] = std::move(avg);
        model.stats.hit_count[c] = std::move(hits);
        model.stats.threshold[c].assign(model.maps[c].size(), 0.0);
    }
    update_thresholds(model.stats, model.probs);

    std::size_t smallest = model.maps.front().size();
    for (const auto& m : model.maps) smallest = std::min(smallest, m.size());
    model.k = static_cast<int>(smallest);
    if (model.k % 2 == 0) --model.k;
    if (model.k < 1) model.k = 1;
    return model;
}

namespace {

constexpr const char* kMagic = "somstream-model";
constexpr int kVersion = 1;

class LineReader {
public:
    explicit LineReader(std::istream& in, std::string path)
        : in_(in), path_(std::move(path)) {}

    std::istringstream next(const std::string& expect_key = {}) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty()) {
                std::istringstream ss(line);
                if (!expect_key.empty()) {
                    std::string key;
                    ss >> key;
                    if (key != expect_key) fail("expected '" + expect_key + "', got '" + key + "'");
                }
                return ss;
            }
        }
        fail("unexpected end of file");
        return std::istringstream{};
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error(path_ + ":" + std::to_string(line_no_) +
                                 ": parse error: " + what);
    }

    template <typename T>
    T read(std::istringstream& ss) {
        T v;
        if (!(ss >> v)) fail("malformed value");
        return v;
    }

private:
    std::istream& in_;
    std::string path_;
    int line_no_ = 0;
};

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
    const int n = model.meta.n_classes;

    out << kMagic << " " << kVersion << "\n";
    out << "n_features " << model.meta.n_features << "\n";
    out << "n_classes " << n << "\n";
    out << "k " << model.k << "\n";
    out << "scale_inputs " << (model.scale_inputs ? 1 : 0) << "\n";
    out << "avg_output_mode "
        << (model.avg_mode == AvgOutputMode::Cumulative ? "cumulative" : "running_mean")
        << "\n";
    out << "cardinality " << format_double(model.cardinality.z) << " "
        << model.cardinality.n << "\n";
    out << "feature_min";
    for (double v : model.meta.feature_min) out << " " << format_double(v);
    out << "\nfeature_max";
    for (double v : model.meta.feature_max) out << " " << format_double(v);
    out << "\n";

    out << "counts " << model.counts.n_total << "\n";
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) out << (k ? " " : "") << model.counts.at(j, k);
        out << "\n";
    }
    out << "probs\n";
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k)
            out << (k ? " " : "") << format_double(model.probs.at(j, k));
        out << "\n";
    }

    for (int c = 0; c < n; ++c) {
        const SomGrid& grid = model.maps[c];
        out << "map " << c << " " << grid.grid_dim << " " << grid.size() << "\n";
        for (const auto& neuron : grid.neurons) {
            out << "neuron " << neuron.pos.q << " " << neuron.pos.r << " "
                << neuron.mapped_count;
            for (double w : neuron.weight) out << " " << format_double(w);
            out << "\n";
        }
        out << "avg_output";
        for (double v : model.stats.avg_output[c]) out << " " << format_double(v);
        out << "\nhit_count";
        for (std::uint64_t v : model.stats.hit_count[c]) out << " " << v;
        out << "\nthreshold";
        for (double v : model.stats.threshold[c]) out << " " << format_double(v);
        out << "\n";
    }
    out << "end\n";
    if (!out) throw std::runtime_error("save_model: write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
    LineReader r(in, path.string());

    auto header = r.next();
    std::string magic = r.read<std::string>(header);
    if (magic != kMagic) r.fail("not a model file (bad magic)");
    int version = r.read<int>(header);
    if (version != kVersion)
        throw std::runtime_error(path.string() + ": unsupported model format version " +
                                 std::to_string(version));

    Model model;
    {
        auto ss = r.next("n_features");
        model.meta.n_features = r.read<int>(ss);
    }
    {
        auto ss = r.next("n_classes");
        model.meta.n_classes = r.read<int>(ss);
    }
    {
        auto ss = r.next("k");
        model.k = r.read<int>(ss);
    }
    {
        auto ss = r.next("scale_inputs");
        model.scale_inputs = r.read<int>(ss) != 0;
    }
    {
        auto ss = r.next("avg_output_mode");
        std::string mode = r.read<std::string>(ss);
        if (mode == "cumulative")
            model.avg_mode = AvgOutputMode::Cumulative;
        else if (mode == "running_mean")
            model.avg_mode = AvgOutputMode::RunningMean;
        else
            r.fail("unknown avg_output_mode '" + mode + "'");
    }
    {
        auto ss = r.next("cardinality");
        model.cardinality.z = r.read<double>(ss);
        model.cardinality.n = r.read<std::uint64_t>(ss);
    }
    const int nf = model.meta.n_features;
    const int n = model.meta.n_classes;
    {
        auto ss = r.next("feature_min");
        model.meta.feature_min.resize(nf);
        for (int f = 0; f < nf; ++f) model.meta.feature_min[f] = r.read<double>(ss);
    }
    {
        auto ss = r.next("feature_max");
        model.meta.feature_max.resize(nf);
        for (int f = 0; f < nf; ++f) model.meta.feature_max[f] = r.read<double>(ss);
    }

    model.counts = CountMatrix(n);
    {
        auto ss = r.next("counts");
        model.counts.n_total = r.read<std::uint64_t>(ss);
    }
    for (int j = 0; j < n; ++j) {
        auto ss = r.next();
        for (int k = 0; k < n; ++k) model.counts.at(j, k) = r.read<std::uint64_t>(ss);
    }
    model.probs = ProbMatrix(n);
    r.next("probs");
    for (int j = 0; j < n; ++j) {
        auto ss = r.next();
        for (int k = 0; k < n; ++k) model.probs.at(j, k) = r.read<double>(ss);
    }

    model.maps.resize(n);
    model.stats.avg_output.resize(n);
    model.stats.threshold.resize(n);
    model.stats.hit_count.resize(n);
    for (int c = 0; c < n; ++c) {
        auto ss = r.next("map");
        int idx = r.read<int>(ss);
        if (idx != c) r.fail("maps out of order");
        SomGrid& grid = model.maps[c];
        grid.grid_dim = r.read<int>(ss);
        std::size_t m = r.read<std::size_t>(ss);
        grid.neurons.resize(m);
        for (std::size_t b = 0; b < m; ++b) {
            auto ns = r.next("neuron");
            grid.neurons[b].pos.q = r.read<int>(ns);
            grid.neurons[b].pos.r = r.read<int>(ns);
            grid.neurons[b].mapped_count = r.read<int>(ns);
            grid.neurons[b].weight.resize(nf);
            for (int f = 0; f < nf; ++f) grid.neurons[b].weight[f] = r.read<double>(ns);
        }
        auto as = r.next("avg_output");
        model.stats.avg_output[c].resize(m);
        for (std::size_t b = 0; b < m; ++b) model.stats.avg_output[c][b] = r.read<double>(as);
        auto hs = r.next("hit_count");
        model.stats.hit_count[c].resize(m);
        for (std::size_t b = 0; b < m; ++b)
            model.stats.hit_count[c][b] = r.read<std::uint64_t>(hs);
        auto ts = r.next("threshold");
        model.stats.threshold[c].resize(m);
        for (std::size_t b = 0; b < m; ++b) model.stats.threshold[c][b] = r.read<double>(ts);
    }
    r.next("end");
    return model;
}

}  // namespace somstream
