#include "somstream/cli.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace somstream::cli {

namespace fs = std::filesystem;

namespace {

/// Removes declared outputs unless release() is called, so failed commands
/// never leave partial files behind.
class OutputGuard {
public:
    void track(const fs::path& p) { paths_.push_back(p); }
    void release() { released_ = true; }
    ~OutputGuard() {
        if (released_) return;
        for (const auto& p : paths_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

private:
    std::vector<fs::path> paths_;
    bool released_ = false;
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run config " + path.string());
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        auto bad = [&](const std::string& what) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": " + what);
        };
        std::string value;
        if (key == "dataset") ss >> cfg.dataset;
        else if (key == "generator_config") ss >> cfg.generator_config;
        else if (key == "grid_dim") ss >> cfg.grid_dim;
        else if (key == "eta") ss >> cfg.eta;
        else if (key == "seed") ss >> cfg.seed;
        else if (key == "n_windows") ss >> cfg.n_windows;
        else if (key == "offline_fraction") ss >> cfg.offline_fraction;
        else if (key == "output_dir") ss >> cfg.output_dir;
        else if (key == "variant") {
            ss >> cfg.variant;
            if (cfg.variant != "adaptive" && cfg.variant != "frozen")
                bad("variant must be adaptive or frozen");
        } else if (key == "split_mode") {
            ss >> value;
            if (value == "head") cfg.split_mode = SplitMode::Head;
            else if (value == "stratified") cfg.split_mode = SplitMode::Stratified;
            else bad("split_mode must be head or stratified");
        } else if (key == "avg_output_mode") {
            ss >> value;
            if (value == "cumulative") cfg.avg_mode = AvgOutputMode::Cumulative;
            else if (value == "running_mean") cfg.avg_mode = AvgOutputMode::RunningMean;
            else bad("avg_output_mode must be cumulative or running_mean");
        } else if (key == "scale_inputs") {
            int v = 0;
            ss >> v;
            cfg.scale_inputs = v != 0;
        } else {
            bad("unknown config key '" + key + "'");
        }
        if (ss.fail()) bad("malformed value for '" + key + "'");
    }
    if (cfg.grid_dim < 1) throw std::runtime_error("run config: grid_dim must be >= 1");
    if (cfg.eta <= 0.0 || cfg.eta >= 1.0)
        throw std::runtime_error("run config: eta must be in (0,1)");
    if (cfg.n_windows < 1) throw std::runtime_error("run config: n_windows must be >= 1");
    if (cfg.offline_fraction <= 0.0 || cfg.offline_fraction >= 1.0)
        throw std::runtime_error("run config: offline_fraction must be in (0,1)");
    return cfg;
}

void write_predictions(const std::vector<std::pair<std::uint64_t, LabelSet>>& log,
                       const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write prediction log " + path.string());
    for (const auto& [id, labels] : log) {
        out << id << "\t";
        for (std::size_t i = 0; i < labels.ids.size(); ++i)
            out << (i ? "," : "") << labels.ids[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::pair<std::uint64_t, LabelSet>> load_predictions(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prediction log " + path.string());
    std::vector<std::pair<std::uint64_t, LabelSet>> log;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::uint64_t id;
        std::string labels;
        if (!(ss >> id >> labels))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed log row");
        LabelSet y;
        std::istringstream ls(labels);
        std::string cell;
        while (std::getline(ls, cell, ',')) y.insert(std::stoi(cell));
        log.emplace_back(id, std::move(y));
    }
    return log;
}

fs::path cmd_generate(const fs::path& config_path, const fs::path& out_path) {
    SphericalStreamConfig cfg = load_generator_config(config_path);
    OutputGuard guard;
    guard.track(out_path);
    fs::path echo = out_path;
    echo += ".config";
    guard.track(echo);

    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
    auto instances = generate_spherical(cfg);
    write_stream(instances, cfg.n_features, cfg.n_classes, out_path);
    save_generator_config(cfg, echo);
    guard.release();
    return out_path;
}

fs::path cmd_train(const fs::path& stream_path, const RunConfig& cfg) {
    LoadedStream loaded = load_delimited(stream_path);
    SplitResult split = split_offline(loaded.instances, cfg.offline_fraction,
                                      cfg.split_mode, loaded.meta.n_classes);
    if (!split.missing_classes.empty()) {
        std::string msg = "training split is missing classes:";
        for (int c : split.missing_classes) msg += " " + std::to_string(c);
        throw std::runtime_error(msg);
    }

    BatchTrainConfig train_cfg;
    train_cfg.rng_seed = cfg.seed;
    OfflineOptions opt{cfg.scale_inputs, cfg.avg_mode};
    Model model = train_offline(split.train, loaded.meta.n_classes, cfg.grid_dim,
                                train_cfg, opt);

    ensure_dir(cfg.output_dir);
    fs::path model_path = fs::path(cfg.output_dir) / "model.som";
    fs::path summary_path = fs::path(cfg.output_dir) / "train_summary.txt";
    OutputGuard guard;
    guard.track(model_path);
    guard.track(summary_path);

    save_model(model, model_path);
    std::ofstream sum(summary_path);
    if (!sum) throw std::runtime_error("cannot write " + summary_path.string());
    sum << "train_instances " << split.train.size() << "\n";
    sum << "k " << model.k << "\n";
    sum << "z " << format_double(model.cardinality.z) << "\n";
    for (int c = 0; c < model.meta.n_classes; ++c)
        sum << "map_" << c << "_neurons " << model.maps[c].size() << "\n";
    if (!sum) throw std::runtime_error("write failed for " + summary_path.string());
    guard.release();
    return model_path;
}

fs::path cmd_run(const fs::path& model_path, const fs::path& stream_path,
                 const RunConfig& cfg) {
    Model model = load_model(model_path);
    LoadedStream loaded = load_delimited(stream_path);
    if (loaded.meta.n_features != model.meta.n_features)
        throw std::runtime_error("stream has " + std::to_string(loaded.meta.n_features) +
                                 " features but the model expects " +
                                 std::to_string(model.meta.n_features));
    SplitResult split = split_offline(loaded.instances, cfg.offline_fraction,
                                      cfg.split_mode, loaded.meta.n_classes);

    bool adaptive = cfg.variant == "adaptive";
    OnlineState state(std::move(model), cfg.eta, adaptive);
    process_stream(state, split.stream);

    ensure_dir(cfg.output_dir);
    fs::path log_path =
        fs::path(cfg.output_dir) / ("predictions_" + cfg.variant + ".log");
    OutputGuard guard;
    guard.track(log_path);
    write_predictions(state.predictions_log, log_path);
    if (adaptive) {
        fs::path snapshot = fs::path(cfg.output_dir) / "model_adapted.som";
        guard.track(snapshot);
        save_model(state.model, snapshot);
    }
    guard.release();
    return log_path;
}

void cmd_evaluate(const fs::path& log_path, const fs::path& stream_path,
                  const RunConfig& cfg) {
    auto log = load_predictions(log_path);
    LoadedStream loaded = load_delimited(stream_path);

    std::map<std::uint64_t, const LabelSet*> truth_by_id;
    for (const auto& inst : loaded.instances)
        if (inst.truth) truth_by_id[inst.sequence_id] = &*inst.truth;

    std::vector<LabelSet> predictions, truths;
    predictions.reserve(log.size());
    truths.reserve(log.size());
    for (const auto& [id, labels] : log) {
        auto it = truth_by_id.find(id);
        if (it == truth_by_id.end())
            throw std::runtime_error("prediction log id " + std::to_string(id) +
                                     " has no ground truth in the stream file");
        predictions.push_back(labels);
        truths.push_back(*it->second);
    }

    RunReport report = windowed_evaluate(predictions, truths, loaded.meta.n_classes,
                                         cfg.n_windows);
    report.grid_dim = cfg.grid_dim;
    report.eta = cfg.eta;
    report.seed = cfg.seed;
    report.dataset_id = stream_path.filename().string();
    report.variant = cfg.variant;

    ensure_dir(cfg.output_dir);
    fs::path base = fs::path(cfg.output_dir) / ("report_" + cfg.variant);
    OutputGuard guard;
    fs::path t = base;
    t += "_windows.csv";
    guard.track(t);
    fs::path s = base;
    s += "_summary.txt";
    guard.track(s);
    emit_report(report, base);
    guard.release();
}

void cmd_pipeline(const RunConfig& cfg) {
    RunConfig local = cfg;
    ensure_dir(local.output_dir);

    fs::path stream_path;
    if (!local.generator_config.empty()) {
        stream_path = fs::path(local.output_dir) / "stream.csv";
        cmd_generate(local.generator_config, stream_path);
    } else if (!local.dataset.empty()) {
        stream_path = local.dataset;
    } else {
        throw std::runtime_error("pipeline: need a dataset or a generator_config");
    }

    fs::path model_path = cmd_train(stream_path, local);

    local.variant = "adaptive";
    fs::path adaptive_log = cmd_run(model_path, stream_path, local);
    cmd_evaluate(adaptive_log, stream_path, local);

    local.variant = "frozen";
    fs::path frozen_log = cmd_run(model_path, stream_path, local);
    cmd_evaluate(frozen_log, stream_path, local);

    RunReport adaptive = parse_report(fs::path(local.output_dir) / "report_adaptive");
    RunReport frozen = parse_report(fs::path(local.output_dir) / "report_frozen");

    fs::path cmp_path = fs::path(local.output_dir) / "comparison.csv";
    OutputGuard guard;
    guard.track(cmp_path);
    std::ofstream cmp(cmp_path);
    if (!cmp) throw std::runtime_error("cannot write " + cmp_path.string());
    cmp << "window_index,adaptive_macro_f,frozen_macro_f,delta\n";
    for (std::size_t w = 0; w < adaptive.windows.size(); ++w) {
        double a = adaptive.windows[w].macro_f;
        double f = frozen.windows[w].macro_f;
        cmp << w << "," << format_double(a) << "," << format_double(f) << ","
            << format_double(a - f) << "\n";
    }
    if (!cmp) throw std::runtime_error("write failed for " + cmp_path.string());
    guard.release();
}

}  // namespace somstream::cli
