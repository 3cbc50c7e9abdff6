#include "somstream/streams.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "somstream/model.hpp"  // format_double

namespace somstream {

DriftKind drift_kind_from_string(const std::string& s) {
    if (s == "none") return DriftKind::None;
    if (s == "displacement") return DriftKind::Displacement;
    if (s == "rotation") return DriftKind::Rotation;
    throw std::runtime_error("unknown drift_kind '" + s + "'");
}

std::string to_string(DriftKind kind) {
    switch (kind) {
        case DriftKind::None: return "none";
        case DriftKind::Displacement: return "displacement";
        case DriftKind::Rotation: return "rotation";
    }
    return "none";
}

namespace {

void validate(const SphericalStreamConfig& cfg) {
    if (cfg.n_classes < 1 || cfg.n_features < 1)
        throw std::invalid_argument("generator: need at least one class and feature");
    if (static_cast<int>(cfg.centers.size()) != cfg.n_classes ||
        static_cast<int>(cfg.radii.size()) != cfg.n_classes)
        throw std::invalid_argument("generator: one center and radius per class required");
    for (const auto& c : cfg.centers)
        if (static_cast<int>(c.size()) != cfg.n_features)
            throw std::invalid_argument("generator: center dimension mismatch");
    for (double r : cfg.radii)
        if (r <= 0.0) throw std::invalid_argument("generator: radii must be positive");
    if (cfg.drift_kind != DriftKind::None && cfg.sd < 1)
        throw std::invalid_argument("generator: sd must be >= 1 when drifting");
}

}  // namespace

std::vector<Instance> generate_spherical(const SphericalStreamConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.rng_seed);

    auto centers = cfg.centers;

    // Fixed per-cluster displacement directions, drawn up front.
    std::vector<std::vector<double>> directions(cfg.n_classes);
    for (auto& dir : directions) {
        dir.resize(cfg.n_features);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : dir) {
                v = rng.gaussian();
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& v : dir) v /= norm;
    }

    auto apply_drift = [&] {
        switch (cfg.drift_kind) {
            case DriftKind::None:
                break;
            case DriftKind::Displacement:
                for (int c = 0; c < cfg.n_classes; ++c)
                    for (int f = 0; f < cfg.n_features; ++f)
                        centers[c][f] += cfg.drift_step * directions[c][f];
                break;
            case DriftKind::Rotation: {
                double cs = std::cos(cfg.drift_step), sn = std::sin(cfg.drift_step);
                for (auto& c : centers) {
                    double x = c[0], y = c[1];
                    c[0] = cs * x - sn * y;
                    c[1] = sn * x + cs * y;
                }
                break;
            }
        }
    };

    std::vector<Instance> out;
    out.reserve(cfg.stream_length);
    std::vector<double> point(cfg.n_features);
    for (std::uint64_t i = 0; i < cfg.stream_length; ++i) {
        if (cfg.drift_kind != DriftKind::None && i > 0 && i % cfg.sd == 0) apply_drift();

        std::size_t cluster = rng.index(cfg.n_classes);

        // Uniform in the ball: normalized Gaussian direction, radius ~ U^(1/d).
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : point) {
                v = rng.gaussian();
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        double dist = cfg.radii[cluster] *
                      std::pow(rng.uniform(), 1.0 / cfg.n_features);
        for (int f = 0; f < cfg.n_features; ++f)
            point[f] = centers[cluster][f] + dist * point[f] / norm;

        Instance inst;
        inst.features = point;
        inst.sequence_id = i;
        LabelSet truth;
        for (int c = 0; c < cfg.n_classes; ++c)
            if (euclidean_distance(point, centers[c]) <= cfg.radii[c]) truth.insert(c);
        inst.truth = std::move(truth);
        out.push_back(std::move(inst));
    }
    return out;
}

SphericalStreamConfig load_generator_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open generator config " + path.string());
    SphericalStreamConfig cfg;
    std::map<int, std::vector<double>> centers;
    std::map<int, double> radii;
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
        if (key == "n_classes") ss >> cfg.n_classes;
        else if (key == "n_features") ss >> cfg.n_features;
        else if (key == "stream_length") ss >> cfg.stream_length;
        else if (key == "sd") ss >> cfg.sd;
        else if (key == "drift_step") ss >> cfg.drift_step;
        else if (key == "rng_seed") ss >> cfg.rng_seed;
        else if (key == "drift_kind") {
            std::string kind;
            ss >> kind;
            cfg.drift_kind = drift_kind_from_string(kind);
        } else if (key.rfind("center_", 0) == 0) {
            int c = std::stoi(key.substr(7));
            double v;
            while (ss >> v) centers[c].push_back(v);
        } else if (key.rfind("radius_", 0) == 0) {
            radii[std::stoi(key.substr(7))] = [&] {
                double v;
                if (!(ss >> v)) bad("malformed radius");
                return v;
            }();
        } else {
            bad("unknown config key '" + key + "'");
        }
        if (ss.fail() && key != "drift_kind" && key.rfind("center_", 0) != 0)
            bad("malformed value for '" + key + "'");
    }
    cfg.centers.resize(cfg.n_classes);
    cfg.radii.assign(cfg.n_classes, 0.0);
    for (auto& [c, v] : centers)
        if (c >= 0 && c < cfg.n_classes) cfg.centers[c] = std::move(v);
    for (auto& [c, v] : radii)
        if (c >= 0 && c < cfg.n_classes) cfg.radii[c] = v;
    validate(cfg);
    return cfg;
}

void save_generator_config(const SphericalStreamConfig& cfg,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write generator config " + path.string());
    out << "n_classes " << cfg.n_classes << "\n";
    out << "n_features " << cfg.n_features << "\n";
    out << "stream_length " << cfg.stream_length << "\n";
    out << "sd " << cfg.sd << "\n";
    out << "drift_kind " << to_string(cfg.drift_kind) << "\n";
    out << "drift_step " << format_double(cfg.drift_step) << "\n";
    out << "rng_seed " << cfg.rng_seed << "\n";
    for (int c = 0; c < cfg.n_classes; ++c) {
        out << "center_" << c;
        for (double v : cfg.centers[c]) out << " " << format_double(v);
        out << "\n";
        out << "radius_" << c << " " << format_double(cfg.radii[c]) << "\n";
    }
}

void write_stream(const std::vector<Instance>& instances, int n_features, int n_classes,
                  const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write stream file " + path.string());
    for (int f = 0; f < n_features; ++f) out << (f ? "," : "") << "f" << f;
    for (int c = 0; c < n_classes; ++c) out << ",y" << c;
    out << "\n";
    for (const auto& inst : instances) {
        for (int f = 0; f < n_features; ++f)
            out << (f ? "," : "") << format_double(inst.features[f]);
        for (int c = 0; c < n_classes; ++c)
            out << "," << (inst.truth && inst.truth->contains(c) ? 1 : 0);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

LoadedStream load_delimited(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stream file " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ":1: empty stream file");

    std::vector<std::string> columns;
    {
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) columns.push_back(cell);
    }
    int n_features = 0, n_classes = 0;
    for (const auto& col : columns) {
        if (col.rfind("f", 0) == 0 && n_classes == 0) ++n_features;
        else if (col.rfind("y", 0) == 0) ++n_classes;
        else throw std::runtime_error(path.string() + ":1: unexpected header column '" +
                                      col + "'");
    }
    if (n_features == 0 || n_classes == 0)
        throw std::runtime_error(path.string() + ":1: header needs f* and y* columns");

    LoadedStream result;
    result.meta.n_features = n_features;
    result.meta.n_classes = n_classes;
    result.label_frequency.assign(n_classes, 0);

    int line_no = 1;
    std::uint64_t seq = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        Instance inst;
        inst.sequence_id = seq++;
        inst.features.reserve(n_features);
        LabelSet truth;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            char* endp = nullptr;
            double v = std::strtod(cell.c_str(), &endp);
            if (endp == cell.c_str() || *endp != '\0')
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": non-numeric cell '" + cell + "'");
            if (col < n_features) {
                inst.features.push_back(v);
            } else {
                int c = col - n_features;
                if (c >= n_classes)
                    throw std::runtime_error(path.string() + ":" +
                                             std::to_string(line_no) + ": ragged row");
                if (v != 0.0) {
                    truth.insert(c);
                    ++result.label_frequency[c];
                }
            }
            ++col;
        }
        if (col != n_features + n_classes)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": ragged row");
        inst.truth = std::move(truth);
        result.instances.push_back(std::move(inst));
    }
    return result;
}

SplitResult split_offline(const std::vector<Instance>& instances, double fraction,
                          SplitMode mode, int n_classes) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::invalid_argument("split_offline: fraction must be in (0,1)");
    const std::size_t target =
        static_cast<std::size_t>(fraction * static_cast<double>(instances.size()));

    SplitResult result;
    std::vector<bool> taken(instances.size(), false);
    if (mode == SplitMode::Head) {
        for (std::size_t i = 0; i < target; ++i) taken[i] = true;
    } else {
        // Greedy stratified pick: accept an instance while any of its classes
        // is still under its quota.
        std::vector<std::size_t> quota(n_classes,
                                       std::max<std::size_t>(1, target / std::max(1, n_classes)));
        std::vector<std::size_t> have(n_classes, 0);
        std::size_t picked = 0;
        for (std::size_t i = 0; i < instances.size() && picked < target; ++i) {
            const auto& truth = instances[i].truth;
            if (!truth) continue;
            bool wanted = false;
            for (int c : truth->ids)
                if (have[c] < quota[c]) wanted = true;
            if (!wanted) continue;
            for (int c : truth->ids) ++have[c];
            taken[i] = true;
            ++picked;
        }
        // top up from the head if quotas left the split short
        for (std::size_t i = 0; i < instances.size() && picked < target; ++i) {
            if (!taken[i]) {
                taken[i] = true;
                ++picked;
            }
        }
    }

    std::vector<bool> seen(n_classes, false);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (taken[i]) {
            result.train.push_back(instances[i]);
            if (instances[i].truth)
                for (int c : instances[i].truth->ids) seen[c] = true;
        } else {
            result.stream.push_back(instances[i]);
        }
    }
    for (int c = 0; c < n_classes; ++c)
        if (!seen[c]) result.missing_classes.push_back(c);
    return result;
}

}  // namespace somstream
